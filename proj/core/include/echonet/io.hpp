#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "echonet/graph.hpp"
#include "echonet/measures.hpp"
#include "echonet/model.hpp"

namespace echonet::io {

// Shortest round-trip decimal form via std::to_chars; locale-independent
// and byte-stable across runs.
std::string format_double(double v);
double parse_double(const std::string& s);

// FNV-1a 64-bit, hex encoded. Used for manifest file hashes.
std::uint64_t fnv1a64(std::string_view bytes);
std::string hash_file(const std::filesystem::path& path);

void write_text_file(const std::filesystem::path& path,
                     const std::string& contents);
std::string read_text_file(const std::filesystem::path& path);

// Edge list: one `src<TAB>dst` line per edge (src follows dst), ASCII
// decimal ids, sorted by (src, dst) on export.
std::string edge_list_to_string(const AdaptiveDigraph& graph);
void write_edge_list(const std::filesystem::path& path,
                     const AdaptiveDigraph& graph);
AdaptiveDigraph read_edge_list(const std::filesystem::path& path);
AdaptiveDigraph read_edge_list(const std::filesystem::path& path,
                               std::uint32_t node_count);

// Opinions snapshot CSV: header then `id,opinion,priority,stubborn` rows,
// opinions at full precision.
std::string opinions_to_csv(const OpinionState& state);
void write_opinions_csv(const std::filesystem::path& path,
                        const OpinionState& state);
OpinionState read_opinions_csv(const std::filesystem::path& path);

// Density map as CSV rows `x,y,count` (bin centers) and as a P2 PGM raster
// (y = +1 at the top row).
std::string density_map_to_csv(const DensityMap& map);
std::string density_map_to_pgm(const DensityMap& map);

// Coefficient rows `measure,value,n`.
struct MeasureRow {
  std::string name;
  BcResult result;
  std::size_t n = 0;
};
std::string measures_to_csv(const std::vector<MeasureRow>& rows);

}  // namespace echonet::io
