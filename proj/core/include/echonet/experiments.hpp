#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "echonet/graph.hpp"
#include "echonet/measures.hpp"
#include "echonet/model.hpp"
#include "echonet/netgen.hpp"
#include "echonet/rng.hpp"

namespace echonet {

struct NetworkSpec {
  enum class Model : std::uint8_t { er, sf };
  Model model = Model::er;
  std::uint32_t n = 10'000;
  double p = 1.6e-3;       // er edge inclusion probability
  double lambda = 2.43;    // sf power-law exponent
  std::uint32_t kmin = 3;  // sf minimum degree

  void validate() const;
};

AdaptiveDigraph generate_network(const NetworkSpec& spec, Rng& rng);

// One experiment cell: everything needed to reproduce R independent runs.
struct ExperimentConfig {
  NetworkSpec network;
  double phi = 0.785;
  double delta = 0.1;
  PopulationSpec population;
  std::uint32_t replications = 100;
  std::uint64_t iterations = 100'000'000;
  std::uint64_t master_seed = 0;
  // Optional stored snapshot to start from instead of a fresh network and
  // fresh opinions (sensitivity checks). Kinds are still drawn per the
  // population spec; stubborn profile opinions override the snapshot.
  std::string initial_graph;
  std::string initial_opinions;

  void validate() const;
};

std::string config_to_json_string(const ExperimentConfig& config);
ExperimentConfig config_from_json_string(const std::string& text);

struct ReplicationResult {
  std::uint32_t index = 0;
  std::uint64_t seed = 0;
  BcResult bc;       // BC(b-hat): normal users only
  BcResult bc_hom;   // BC_hom(b-hat, b-hat_NN)
  EdgeFractions edge_fractions;
};

// Peak summary of one side of the 5/9 split.
struct SideStats {
  std::size_t count = 0;
  double mass = 0.0;  // proportion of defined values on this side
  double mean = 0.0;  // peak position; NaN when the side is empty
};

struct SampleStats {
  std::size_t n_defined = 0;
  std::size_t n_degenerate = 0;
  double mean = 0.0;
  double sd = 0.0;
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
  SideStats below;  // values <= 5/9
  SideStats above;  // values > 5/9
};

SampleStats summarize_sample(std::span<const BcResult> values);

struct ResultCell {
  std::string label;  // curve/mode tag within a table
  ExperimentConfig config;
  std::vector<ReplicationResult> replications;
  SampleStats bc_stats;
  SampleStats bc_hom_stats;
  double stubborn_edge_mean = 0.0;
  double periphery_edge_mean = 0.0;
  std::optional<DensityMap> density;  // first replication, when collected
};

struct ResultTable {
  std::string name;
  std::vector<ResultCell> cells;
};

// One row per replication plus one summary row per cell; byte-stable.
std::string result_table_to_csv(const ResultTable& table);

struct CellSpec {
  std::string label;
  ExperimentConfig config;
  bool collect_density = false;
  std::uint32_t density_bins = 50;
};

// Fan the (cell x replication) grid over a worker pool. Results are
// deterministic functions of per-replication seeds, independent of
// scheduling.
std::vector<ResultCell> run_cells(std::span<const CellSpec> cells,
                                  unsigned workers);

ResultCell run_replications(const ExperimentConfig& config, unsigned workers);

// paired_out, when non-null, receives the final (b-hat, b-hat_NN) sample
// (used for density-map snapshots).
ReplicationResult run_one_replication(const ExperimentConfig& config,
                                      std::uint32_t replication_index,
                                      PairedSample* paired_out = nullptr);

// --- study designs --------------------------------------------------------

// BC and BC_hom across the receive-rule offset; cell k is seeded from
// derive(base.master_seed, k).
ResultTable sweep_phi(std::span<const double> phis,
                      const ExperimentConfig& base, unsigned workers);

// Returns the phi of the cell with the highest mean BC_hom (the
// maximum-polarization anchor).
double argmax_bc_hom_phi(const ResultTable& table);

// Two curves over the priority-user fraction, one per posting rule of the
// priority users ("aligned" and "controversial" labels). Matched fractions
// share replication seeds so the curves are directly comparable.
ResultTable sweep_priority_fraction(std::span<const double> fractions,
                                    const ExperimentConfig& base,
                                    unsigned workers);

// Mean BC_hom over the priority x stubborn fraction grid. Cells with more
// stubborn than priority users are invalid in ideologue mode and absent
// from the table.
ResultTable contour_stubborn_priority(std::span<const double> priority_fracs,
                                      std::span<const double> stubborn_fracs,
                                      const ExperimentConfig& base,
                                      unsigned workers);

// Renders mean BC_hom per grid cell as a PGM heatmap (absent cells black).
std::string contour_to_pgm(const ResultTable& table,
                           std::span<const double> priority_fracs,
                           std::span<const double> stubborn_fracs);

struct TransitionScan {
  ResultTable table;
  // Fraction where the above-threshold mass crosses 1/2, linearly
  // interpolated between grid points; nullopt when the scan never crosses.
  std::optional<double> critical_fraction;
};

// Scan over extremist-user fractions in one mode: "stubborn" (stubborn
// only) or "ideologue" (stubborn and priority).
TransitionScan transition_scan(std::span<const double> fractions,
                               bool ideologue_mode,
                               const ExperimentConfig& base, unsigned workers);

// Crossing of the above-mass series through 1/2 on an ascending fraction
// grid; exact grid hits win, otherwise linear interpolation.
std::optional<double> critical_fraction_from_masses(
    std::span<const double> fractions, std::span<const double> above_mass);

// Centrist stubborn users, ideologue vs non-priority modes; the headline
// measure is BC(b-hat). Density maps are collected per cell.
ResultTable centrist_study(std::span<const double> fractions,
                           const ExperimentConfig& base, unsigned workers);

// --- scale presets ----------------------------------------------------------

struct ScalePreset {
  std::uint32_t n = 0;
  double er_p = 0.0;
  std::uint64_t iterations = 0;
  std::uint32_t replications = 0;
  std::uint32_t transition_replications = 0;
};

// n=2000, z~8, 2e7 iterations, R=20: qualitative regimes of the full-size
// setup at laptop runtimes (same events-per-node budget).
ScalePreset desk_scale();
// n=1e4, p=1.6e-3, 1e8 iterations, R=100 (500 for transition scans).
ScalePreset paper_scale();

ExperimentConfig base_config(const ScalePreset& scale, double phi,
                             std::uint64_t master_seed);

// Anchor offsets: polarization / consensus regimes of the base model.
inline constexpr double kPhiPolarized = 0.785;
inline constexpr double kPhiConsensus = 1.473;

unsigned default_worker_count();

void parallel_for(std::size_t count, unsigned workers,
                  const std::function<void(std::size_t)>& fn);

}  // namespace echonet
