#include "echonet/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <thread>

#include "echonet/io.hpp"
#include "json.hpp"

namespace echonet {

namespace {

using ordered_json = nlohmann::ordered_json;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string model_name(NetworkSpec::Model m) {
  return m == NetworkSpec::Model::er ? "er" : "sf";
}

std::string profile_name(StubbornProfile p) {
  return p == StubbornProfile::extremist ? "extremist" : "centrist";
}

std::string rule_name(PostingRule r) {
  return r == PostingRule::aligned ? "aligned" : "controversial";
}

PostingRule rule_from_name(const std::string& s) {
  if (s == "aligned") return PostingRule::aligned;
  if (s == "controversial") return PostingRule::controversial;
  throw std::invalid_argument("unknown posting rule '" + s + "'");
}

StubbornProfile profile_from_name(const std::string& s) {
  if (s == "extremist") return StubbornProfile::extremist;
  if (s == "centrist") return StubbornProfile::centrist;
  throw std::invalid_argument("unknown stubborn profile '" + s + "'");
}

}  // namespace

void NetworkSpec::validate() const {
  if (n < 2) throw std::invalid_argument("network: n must be >= 2");
  if (model == Model::er) {
    if (!(p >= 0.0 && p <= 1.0)) {
      throw std::invalid_argument("network: p must be in [0, 1]");
    }
  } else {
    if (!(lambda > 2.0)) {
      throw std::invalid_argument("network: lambda must be > 2");
    }
    if (kmin < 1) throw std::invalid_argument("network: kmin must be >= 1");
  }
}

AdaptiveDigraph generate_network(const NetworkSpec& spec, Rng& rng) {
  spec.validate();
  if (spec.model == NetworkSpec::Model::er) {
    return generate_er_directed(spec.n, spec.p, rng);
  }
  return generate_sf_directed(spec.n, spec.lambda, spec.kmin, rng);
}

void ExperimentConfig::validate() const {
  network.validate();
  ModelParams{.delta = delta, .phi = phi, .iterations = iterations}.validate();
  population.validate();
  if (replications < 1) {
    throw std::invalid_argument("replications must be >= 1");
  }
  if (initial_graph.empty() != initial_opinions.empty()) {
    throw std::invalid_argument(
        "snapshot start needs both initial_graph and initial_opinions");
  }
}

std::string config_to_json_string(const ExperimentConfig& config) {
  ordered_json net;
  net["model"] = model_name(config.network.model);
  net["n"] = config.network.n;
  if (config.network.model == NetworkSpec::Model::er) {
    net["p"] = config.network.p;
  } else {
    net["lambda"] = config.network.lambda;
    net["kmin"] = config.network.kmin;
  }
  ordered_json j;
  j["network"] = net;
  j["phi"] = config.phi;
  j["delta"] = config.delta;
  j["priority_fraction"] = config.population.priority_fraction;
  j["stubborn_fraction"] = config.population.stubborn_fraction;
  j["stubborn_profile"] = profile_name(config.population.stubborn_profile);
  j["stubborn_are_priority"] = config.population.stubborn_are_priority;
  j["stubborn_posting"] = rule_name(config.population.stubborn_posting);
  j["priority_posting"] = rule_name(config.population.priority_posting);
  j["replications"] = config.replications;
  j["iterations"] = config.iterations;
  j["master_seed"] = config.master_seed;
  if (!config.initial_graph.empty()) {
    j["initial_graph"] = config.initial_graph;
    j["initial_opinions"] = config.initial_opinions;
  }
  return j.dump(2) + "\n";
}

ExperimentConfig config_from_json_string(const std::string& text) {
  const auto j = ordered_json::parse(text);
  ExperimentConfig c;
  if (j.contains("network")) {
    const auto& net = j.at("network");
    const std::string model = net.value("model", "er");
    if (model == "er") {
      c.network.model = NetworkSpec::Model::er;
    } else if (model == "sf") {
      c.network.model = NetworkSpec::Model::sf;
    } else {
      throw std::invalid_argument("unknown network model '" + model + "'");
    }
    c.network.n = net.value("n", c.network.n);
    c.network.p = net.value("p", c.network.p);
    c.network.lambda = net.value("lambda", c.network.lambda);
    c.network.kmin = net.value("kmin", c.network.kmin);
  }
  c.phi = j.value("phi", c.phi);
  c.delta = j.value("delta", c.delta);
  c.population.priority_fraction =
      j.value("priority_fraction", c.population.priority_fraction);
  c.population.stubborn_fraction =
      j.value("stubborn_fraction", c.population.stubborn_fraction);
  if (j.contains("stubborn_profile")) {
    c.population.stubborn_profile =
        profile_from_name(j.at("stubborn_profile").get<std::string>());
  }
  c.population.stubborn_are_priority =
      j.value("stubborn_are_priority", c.population.stubborn_are_priority);
  if (j.contains("stubborn_posting")) {
    c.population.stubborn_posting =
        rule_from_name(j.at("stubborn_posting").get<std::string>());
  }
  if (j.contains("priority_posting")) {
    c.population.priority_posting =
        rule_from_name(j.at("priority_posting").get<std::string>());
  }
  c.replications = j.value("replications", c.replications);
  c.iterations = j.value("iterations", c.iterations);
  c.master_seed = j.value("master_seed", c.master_seed);
  c.initial_graph = j.value("initial_graph", std::string());
  c.initial_opinions = j.value("initial_opinions", std::string());
  c.validate();
  return c;
}

ReplicationResult run_one_replication(const ExperimentConfig& config,
                                      std::uint32_t replication_index,
                                      PairedSample* paired_out) {
  const std::uint64_t seed = derive_seed(config.master_seed, replication_index);
  Rng graph_rng = make_rng(derive_seed(seed, 0));
  Rng init_rng = make_rng(derive_seed(seed, 1));
  Rng dynamics_rng = make_rng(derive_seed(seed, 2));

  AdaptiveDigraph graph(0);
  OpinionState state;
  if (config.initial_graph.empty()) {
    graph = generate_network(config.network, graph_rng);
    state = init_opinion_state(config.network.n, config.population, init_rng);
  } else {
    graph = io::read_edge_list(config.initial_graph);
    const OpinionState loaded = io::read_opinions_csv(config.initial_opinions);
    if (loaded.size() != graph.node_count()) {
      throw std::runtime_error(
          "snapshot opinion/graph node counts are inconsistent");
    }
    state = init_opinion_state(graph.node_count(), config.population, init_rng);
    for (std::uint32_t i = 0; i < state.size(); ++i) {
      if (!state.is_stubborn(i)) state.opinions[i] = loaded.opinions[i];
    }
  }

  const ModelParams params{
      .delta = config.delta, .phi = config.phi, .iterations = config.iterations};
  run(state, graph, params, dynamics_rng);

  std::vector<std::uint8_t> normal(state.size());
  std::vector<std::uint8_t> stubborn(state.size());
  for (std::uint32_t i = 0; i < state.size(); ++i) {
    normal[i] = state.is_normal(i) ? 1 : 0;
    stubborn[i] = state.is_stubborn(i) ? 1 : 0;
  }

  ReplicationResult result;
  result.index = replication_index;
  result.seed = seed;

  std::vector<double> b_hat;
  b_hat.reserve(state.size());
  for (std::uint32_t i = 0; i < state.size(); ++i) {
    if (normal[i]) b_hat.push_back(state.opinions[i]);
  }
  result.bc = bimodality_coefficient(b_hat);

  PairedSample paired = paired_opinion_sample(graph, state.opinions, normal);
  result.bc_hom = bc_hom(paired.b, paired.b_nn);
  result.edge_fractions = stubborn_edge_fraction(graph, stubborn);
  if (paired_out) *paired_out = std::move(paired);
  return result;
}

SampleStats summarize_sample(std::span<const BcResult> values) {
  SampleStats stats;
  std::vector<double> defined;
  defined.reserve(values.size());
  for (const BcResult& v : values) {
    if (v.degenerate) {
      ++stats.n_degenerate;
    } else {
      defined.push_back(v.value);
    }
  }
  stats.n_defined = defined.size();
  if (defined.empty()) {
    stats.mean = stats.sd = stats.q1 = stats.median = stats.q3 = kNaN;
    stats.below = {.count = 0, .mass = 0.0, .mean = kNaN};
    stats.above = {.count = 0, .mass = 0.0, .mean = kNaN};
    return stats;
  }
  double sum = 0.0;
  for (double v : defined) sum += v;
  stats.mean = sum / static_cast<double>(defined.size());
  double ss = 0.0;
  for (double v : defined) ss += (v - stats.mean) * (v - stats.mean);
  stats.sd = defined.size() > 1
                 ? std::sqrt(ss / (static_cast<double>(defined.size()) - 1.0))
                 : 0.0;
  stats.q1 = quantile(defined, 0.25);
  stats.median = quantile(defined, 0.5);
  stats.q3 = quantile(defined, 0.75);

  const auto side = [&](bool above) {
    SideStats s;
    double side_sum = 0.0;
    for (double v : defined) {
      const bool is_above = v > kBimodalThreshold;
      if (is_above == above) {
        ++s.count;
        side_sum += v;
      }
    }
    s.mass = static_cast<double>(s.count) / static_cast<double>(defined.size());
    s.mean = s.count > 0 ? side_sum / static_cast<double>(s.count) : kNaN;
    return s;
  };
  stats.below = side(false);
  stats.above = side(true);
  return stats;
}

std::vector<ResultCell> run_cells(std::span<const CellSpec> cells,
                                  unsigned workers) {
  for (const CellSpec& cell : cells) cell.config.validate();

  std::vector<std::size_t> offsets(cells.size() + 1, 0);
  for (std::size_t c = 0; c < cells.size(); ++c) {
    offsets[c + 1] = offsets[c] + cells[c].config.replications;
  }
  const std::size_t total = offsets.back();

  std::vector<ResultCell> results(cells.size());
  std::vector<PairedSample> first_paired(cells.size());
  for (std::size_t c = 0; c < cells.size(); ++c) {
    results[c].label = cells[c].label;
    results[c].config = cells[c].config;
    results[c].replications.resize(cells[c].config.replications);
  }

  parallel_for(total, workers, [&](std::size_t task) {
    const auto it = std::upper_bound(offsets.begin(), offsets.end(), task);
    const auto c = static_cast<std::size_t>(it - offsets.begin()) - 1;
    const auto rep = static_cast<std::uint32_t>(task - offsets[c]);
    const bool want_paired = cells[c].collect_density && rep == 0;
    results[c].replications[rep] = run_one_replication(
        cells[c].config, rep, want_paired ? &first_paired[c] : nullptr);
  });

  for (std::size_t c = 0; c < results.size(); ++c) {
    ResultCell& cell = results[c];
    std::vector<BcResult> bc;
    std::vector<BcResult> bch;
    double stub_sum = 0.0;
    double peri_sum = 0.0;
    for (const ReplicationResult& r : cell.replications) {
      bc.push_back(r.bc);
      bch.push_back(r.bc_hom);
      stub_sum += r.edge_fractions.stubborn;
      peri_sum += r.edge_fractions.periphery;
    }
    cell.bc_stats = summarize_sample(bc);
    cell.bc_hom_stats = summarize_sample(bch);
    const auto r_count = static_cast<double>(cell.replications.size());
    cell.stubborn_edge_mean = stub_sum / r_count;
    cell.periphery_edge_mean = peri_sum / r_count;
    if (cells[c].collect_density) {
      cell.density = density_map(first_paired[c].b, first_paired[c].b_nn,
                                 cells[c].density_bins);
    }
  }
  return results;
}

ResultCell run_replications(const ExperimentConfig& config, unsigned workers) {
  const CellSpec spec{.label = "", .config = config};
  return run_cells(std::span(&spec, 1), workers)[0];
}

// --- CSV ---------------------------------------------------------------

namespace {

std::string bc_field(const BcResult& r) {
  return r.degenerate ? "nan" : io::format_double(r.value);
}

std::string num_field(double v) {
  return std::isnan(v) ? "nan" : io::format_double(v);
}

void append_config_fields(std::string& out, const ResultCell& cell) {
  const ExperimentConfig& c = cell.config;
  out += cell.label;
  out += ',';
  out += model_name(c.network.model);
  out += ',';
  out += std::to_string(c.network.n);
  out += ',';
  out += io::format_double(c.phi);
  out += ',';
  out += io::format_double(c.delta);
  out += ',';
  out += io::format_double(c.population.priority_fraction);
  out += ',';
  out += io::format_double(c.population.stubborn_fraction);
  out += ',';
  out += profile_name(c.population.stubborn_profile);
  out += ',';
  out += c.population.stubborn_are_priority ? '1' : '0';
  out += ',';
  out += rule_name(c.population.stubborn_posting);
  out += ',';
  out += rule_name(c.population.priority_posting);
  out += ',';
  out += std::to_string(c.iterations);
  out += ',';
  out += std::to_string(c.replications);
}

}  // namespace

std::string result_table_to_csv(const ResultTable& table) {
  std::string out =
      "label,network,n,phi,delta,priority_fraction,stubborn_fraction,"
      "stubborn_profile,stubborn_are_priority,stubborn_posting,"
      "priority_posting,iterations,replications,row,replication,seed,bc,"
      "bc_hom,stubborn_edge_fraction,periphery_edge_fraction,bc_mean,bc_sd,"
      "bc_q1,bc_median,bc_q3,bc_hom_mean,bc_hom_sd,bc_hom_q1,bc_hom_median,"
      "bc_hom_q3,bc_hom_below_mass,bc_hom_below_mean,bc_hom_above_mass,"
      "bc_hom_above_mean,degenerate_count,stubborn_edge_fraction_mean,"
      "periphery_edge_fraction_mean\n";
  constexpr int kSummaryFields = 16;
  constexpr int kRepFields = 6;
  for (const ResultCell& cell : table.cells) {
    for (const ReplicationResult& r : cell.replications) {
      append_config_fields(out, cell);
      out += ",rep,";
      out += std::to_string(r.index);
      out += ',';
      out += std::to_string(r.seed);
      out += ',';
      out += bc_field(r.bc);
      out += ',';
      out += bc_field(r.bc_hom);
      out += ',';
      out += io::format_double(r.edge_fractions.stubborn);
      out += ',';
      out += io::format_double(r.edge_fractions.periphery);
      for (int i = 0; i < kSummaryFields; ++i) out += ',';
      out += '\n';
    }
    append_config_fields(out, cell);
    out += ",summary";
    for (int i = 0; i < kRepFields; ++i) out += ',';
    out += num_field(cell.bc_stats.mean);
    out += ',';
    out += num_field(cell.bc_stats.sd);
    out += ',';
    out += num_field(cell.bc_stats.q1);
    out += ',';
    out += num_field(cell.bc_stats.median);
    out += ',';
    out += num_field(cell.bc_stats.q3);
    out += ',';
    out += num_field(cell.bc_hom_stats.mean);
    out += ',';
    out += num_field(cell.bc_hom_stats.sd);
    out += ',';
    out += num_field(cell.bc_hom_stats.q1);
    out += ',';
    out += num_field(cell.bc_hom_stats.median);
    out += ',';
    out += num_field(cell.bc_hom_stats.q3);
    out += ',';
    out += num_field(cell.bc_hom_stats.below.mass);
    out += ',';
    out += num_field(cell.bc_hom_stats.below.mean);
    out += ',';
    out += num_field(cell.bc_hom_stats.above.mass);
    out += ',';
    out += num_field(cell.bc_hom_stats.above.mean);
    out += ',';
    out += std::to_string(cell.bc_hom_stats.n_degenerate);
    out += ',';
    out += num_field(cell.stubborn_edge_mean);
    out += ',';
    out += num_field(cell.periphery_edge_mean);
    out += '\n';
  }
  return out;
}

// --- study designs -------------------------------------------------------

ResultTable sweep_phi(std::span<const double> phis,
                      const ExperimentConfig& base, unsigned workers) {
  if (phis.empty()) throw std::invalid_argument("sweep_phi: empty grid");
  std::vector<CellSpec> cells;
  for (std::size_t k = 0; k < phis.size(); ++k) {
    CellSpec cell{.label = "phi", .config = base};
    cell.config.phi = phis[k];
    cell.config.master_seed = derive_seed(base.master_seed, k);
    cells.push_back(std::move(cell));
  }
  return {.name = "sweep_phi", .cells = run_cells(cells, workers)};
}

double argmax_bc_hom_phi(const ResultTable& table) {
  if (table.cells.empty()) {
    throw std::invalid_argument("argmax_bc_hom_phi: empty table");
  }
  double best_phi = table.cells.front().config.phi;
  double best = -std::numeric_limits<double>::infinity();
  for (const ResultCell& cell : table.cells) {
    if (!std::isnan(cell.bc_hom_stats.mean) && cell.bc_hom_stats.mean > best) {
      best = cell.bc_hom_stats.mean;
      best_phi = cell.config.phi;
    }
  }
  return best_phi;
}

ResultTable sweep_priority_fraction(std::span<const double> fractions,
                                    const ExperimentConfig& base,
                                    unsigned workers) {
  std::vector<CellSpec> cells;
  for (const PostingRule rule :
       {PostingRule::aligned, PostingRule::controversial}) {
    for (std::size_t k = 0; k < fractions.size(); ++k) {
      CellSpec cell{.label = rule_name(rule), .config = base};
      cell.config.population.priority_fraction = fractions[k];
      cell.config.population.stubborn_fraction = 0.0;
      cell.config.population.stubborn_are_priority = false;
      cell.config.population.priority_posting = rule;
      // Matched fractions share seeds across the two rule curves.
      cell.config.master_seed = derive_seed(base.master_seed, k);
      cells.push_back(std::move(cell));
    }
  }
  return {.name = "sweep_priority_fraction",
          .cells = run_cells(cells, workers)};
}

ResultTable contour_stubborn_priority(std::span<const double> priority_fracs,
                                      std::span<const double> stubborn_fracs,
                                      const ExperimentConfig& base,
                                      unsigned workers) {
  std::vector<CellSpec> cells;
  for (std::size_t pi = 0; pi < priority_fracs.size(); ++pi) {
    for (std::size_t si = 0; si < stubborn_fracs.size(); ++si) {
      const double p = priority_fracs[pi];
      const double s = stubborn_fracs[si];
      if (base.population.stubborn_are_priority && s > p + 1e-12) {
        continue;  // invalid cell, absent from the table
      }
      CellSpec cell{.label = "contour", .config = base};
      cell.config.population.priority_fraction = p;
      cell.config.population.stubborn_fraction = s;
      // Seeds indexed on the full grid so absent cells do not shift them.
      cell.config.master_seed =
          derive_seed(base.master_seed, pi * stubborn_fracs.size() + si);
      cells.push_back(std::move(cell));
    }
  }
  return {.name = "contour_stubborn_priority",
          .cells = run_cells(cells, workers)};
}

std::string contour_to_pgm(const ResultTable& table,
                           std::span<const double> priority_fracs,
                           std::span<const double> stubborn_fracs) {
  const auto w = priority_fracs.size();
  const auto h = stubborn_fracs.size();
  std::vector<int> pixels(w * h, 0);
  const auto find_index = [](std::span<const double> grid, double v) {
    for (std::size_t i = 0; i < grid.size(); ++i) {
      if (std::abs(grid[i] - v) < 1e-12) return i;
    }
    return grid.size();
  };
  for (const ResultCell& cell : table.cells) {
    const std::size_t x =
        find_index(priority_fracs, cell.config.population.priority_fraction);
    const std::size_t y =
        find_index(stubborn_fracs, cell.config.population.stubborn_fraction);
    if (x >= w || y >= h || std::isnan(cell.bc_hom_stats.mean)) continue;
    const double v = std::clamp(cell.bc_hom_stats.mean, 0.0, 1.0);
    pixels[y * w + x] = 1 + static_cast<int>(std::lround(v * 254.0));
  }
  std::string out = "P2\n";
  out += std::to_string(w) + " " + std::to_string(h) + "\n255\n";
  for (std::size_t row = 0; row < h; ++row) {
    const std::size_t y = h - 1 - row;  // largest stubborn fraction on top
    for (std::size_t x = 0; x < w; ++x) {
      if (x > 0) out += ' ';
      out += std::to_string(pixels[y * w + x]);
    }
    out += '\n';
  }
  return out;
}

std::optional<double> critical_fraction_from_masses(
    std::span<const double> fractions, std::span<const double> above_mass) {
  if (fractions.size() != above_mass.size()) {
    throw std::invalid_argument("critical_fraction: length mismatch");
  }
  for (std::size_t k = 0; k < fractions.size(); ++k) {
    if (above_mass[k] == 0.5) return fractions[k];
    if (k + 1 < fractions.size() && above_mass[k] < 0.5 &&
        above_mass[k + 1] > 0.5) {
      const double t = (0.5 - above_mass[k]) / (above_mass[k + 1] - above_mass[k]);
      return fractions[k] + t * (fractions[k + 1] - fractions[k]);
    }
  }
  return std::nullopt;
}

TransitionScan transition_scan(std::span<const double> fractions,
                               bool ideologue_mode,
                               const ExperimentConfig& base, unsigned workers) {
  std::vector<CellSpec> cells;
  for (std::size_t k = 0; k < fractions.size(); ++k) {
    CellSpec cell{.label = ideologue_mode ? "ideologue" : "stubborn",
                  .config = base};
    cell.config.population.stubborn_fraction = fractions[k];
    cell.config.population.priority_fraction =
        ideologue_mode ? fractions[k] : 0.0;
    cell.config.population.stubborn_are_priority = ideologue_mode;
    cell.config.population.stubborn_profile = StubbornProfile::extremist;
    cell.config.population.stubborn_posting = PostingRule::aligned;
    // Seeds depend on the fraction only, so the two modes are paired.
    cell.config.master_seed = derive_seed(base.master_seed, k);
    cells.push_back(std::move(cell));
  }
  TransitionScan scan;
  scan.table = {.name = "transition_scan", .cells = run_cells(cells, workers)};
  std::vector<double> masses;
  for (const ResultCell& cell : scan.table.cells) {
    masses.push_back(cell.bc_hom_stats.above.mass);
  }
  scan.critical_fraction = critical_fraction_from_masses(fractions, masses);
  return scan;
}

ResultTable centrist_study(std::span<const double> fractions,
                           const ExperimentConfig& base, unsigned workers) {
  std::vector<CellSpec> cells;
  for (const bool ideologue : {true, false}) {
    for (std::size_t k = 0; k < fractions.size(); ++k) {
      CellSpec cell{.label = ideologue ? "ideologue" : "stubborn",
                    .config = base,
                    .collect_density = true};
      cell.config.population.stubborn_fraction = fractions[k];
      cell.config.population.priority_fraction =
          ideologue ? fractions[k] : 0.0;
      cell.config.population.stubborn_are_priority = ideologue;
      cell.config.population.stubborn_profile = StubbornProfile::centrist;
      cell.config.population.stubborn_posting = PostingRule::aligned;
      cell.config.master_seed = derive_seed(base.master_seed, k);
      cells.push_back(std::move(cell));
    }
  }
  return {.name = "centrist_study", .cells = run_cells(cells, workers)};
}

// --- scale presets -------------------------------------------------------

ScalePreset desk_scale() {
  return {.n = 2000,
          .er_p = 16.0 / 1999.0,
          .iterations = 20'000'000,
          .replications = 20,
          .transition_replications = 20};
}

ScalePreset paper_scale() {
  return {.n = 10'000,
          .er_p = 1.6e-3,
          .iterations = 100'000'000,
          .replications = 100,
          .transition_replications = 500};
}

ExperimentConfig base_config(const ScalePreset& scale, double phi,
                             std::uint64_t master_seed) {
  ExperimentConfig config;
  config.network =
      NetworkSpec{.model = NetworkSpec::Model::er, .n = scale.n, .p = scale.er_p};
  config.phi = phi;
  config.replications = scale.replications;
  config.iterations = scale.iterations;
  config.master_seed = master_seed;
  return config;
}

unsigned default_worker_count() {
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

void parallel_for(std::size_t count, unsigned workers,
                  const std::function<void(std::size_t)>& fn) {
  if (count == 0) return;
  workers = std::max(1u, std::min<unsigned>(
                             workers, static_cast<unsigned>(std::min<std::size_t>(
                                          count, 1024))));
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1, std::memory_order_relaxed);
        if (i >= count || failed.load(std::memory_order_relaxed)) return;
        try {
          fn(i);
        } catch (...) {
          const std::scoped_lock lock(error_mutex);
          if (!error) error = std::current_exception();
          failed.store(true, std::memory_order_relaxed);
          return;
        }
      }
    });
  }
  for (std::thread& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace echonet
