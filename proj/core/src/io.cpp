#include "echonet/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <system_error>

namespace echonet::io {

namespace {

[[noreturn]] void fail(const std::string& msg) {
  throw std::runtime_error("io: " + msg);
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = line.find(sep, start);
    if (pos == std::string::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

std::uint64_t parse_u64(const std::string& s) {
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    fail("bad integer field '" + s + "'");
  }
  return v;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc{}) fail("to_chars failed");
  return std::string(buf, ptr);
}

double parse_double(const std::string& s) {
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    fail("bad float field '" + s + "'");
  }
  return v;
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string hash_file(const std::filesystem::path& path) {
  const std::string contents = read_text_file(path);
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a64(contents)));
  return std::string(buf);
}

void write_text_file(const std::filesystem::path& path,
                     const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail("cannot open '" + path.string() + "' for writing");
  out.write(contents.data(),
            static_cast<std::streamsize>(contents.size()));
  if (!out) fail("write failed for '" + path.string() + "'");
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return std::move(ss).str();
}

std::string edge_list_to_string(const AdaptiveDigraph& graph) {
  std::string out;
  for (const auto& [src, dst] : graph.sorted_edges()) {
    out += std::to_string(src);
    out += '\t';
    out += std::to_string(dst);
    out += '\n';
  }
  return out;
}

void write_edge_list(const std::filesystem::path& path,
                     const AdaptiveDigraph& graph) {
  write_text_file(path, edge_list_to_string(graph));
}

namespace {

std::vector<std::pair<NodeId, NodeId>> parse_edges(
    const std::filesystem::path& path, NodeId& max_id) {
  std::ifstream in(path);
  if (!in) fail("cannot open '" + path.string() + "'");
  std::vector<std::pair<NodeId, NodeId>> edges;
  std::string line;
  std::size_t lineno = 0;
  max_id = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto fields = split(line, '\t');
    if (fields.size() != 2) {
      fail("edge list '" + path.string() + "' line " +
           std::to_string(lineno) + ": expected src<TAB>dst");
    }
    const auto src = static_cast<NodeId>(parse_u64(fields[0]));
    const auto dst = static_cast<NodeId>(parse_u64(fields[1]));
    max_id = std::max({max_id, src, dst});
    edges.emplace_back(src, dst);
  }
  return edges;
}

}  // namespace

AdaptiveDigraph read_edge_list(const std::filesystem::path& path) {
  NodeId max_id = 0;
  const auto edges = parse_edges(path, max_id);
  if (edges.empty()) fail("edge list '" + path.string() + "' is empty");
  return AdaptiveDigraph::from_edges(max_id + 1, edges);
}

AdaptiveDigraph read_edge_list(const std::filesystem::path& path,
                               std::uint32_t node_count) {
  NodeId max_id = 0;
  const auto edges = parse_edges(path, max_id);
  if (!edges.empty() && max_id >= node_count) {
    fail("edge list '" + path.string() + "' references node " +
         std::to_string(max_id) + " outside 0.." +
         std::to_string(node_count - 1));
  }
  return AdaptiveDigraph::from_edges(node_count, edges);
}

std::string opinions_to_csv(const OpinionState& state) {
  std::string out = "id,opinion,priority,stubborn\n";
  for (std::uint32_t i = 0; i < state.size(); ++i) {
    out += std::to_string(i);
    out += ',';
    out += format_double(state.opinions[i]);
    out += ',';
    out += state.is_priority(i) ? '1' : '0';
    out += ',';
    out += state.is_stubborn(i) ? '1' : '0';
    out += '\n';
  }
  return out;
}

void write_opinions_csv(const std::filesystem::path& path,
                        const OpinionState& state) {
  write_text_file(path, opinions_to_csv(state));
}

OpinionState read_opinions_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open '" + path.string() + "'");
  std::string line;
  if (!std::getline(in, line) || !line.starts_with("id,")) {
    fail("opinions csv '" + path.string() + "': missing header");
  }
  std::vector<double> opinions;
  std::vector<std::uint8_t> priority;
  std::vector<std::uint8_t> stubborn;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto fields = split(line, ',');
    if (fields.size() != 4) {
      fail("opinions csv '" + path.string() + "' line " +
           std::to_string(lineno) + ": expected 4 fields");
    }
    const std::uint64_t id = parse_u64(fields[0]);
    if (id != opinions.size()) {
      fail("opinions csv '" + path.string() + "': ids must be dense 0..n-1");
    }
    opinions.push_back(parse_double(fields[1]));
    priority.push_back(fields[2] == "1");
    stubborn.push_back(fields[3] == "1");
  }
  OpinionState state(static_cast<std::uint32_t>(opinions.size()));
  state.opinions = std::move(opinions);
  for (std::uint32_t i = 0; i < state.size(); ++i) {
    state.set_kind(i, priority[i], stubborn[i]);
    // Posting rules are a run-time configuration, not part of the snapshot;
    // stubborn users default to aligned posting, everyone else controversial.
    state.set_rule(i, stubborn[i] ? PostingRule::aligned
                                  : PostingRule::controversial);
  }
  return state;
}

std::string density_map_to_csv(const DensityMap& map) {
  std::string out = "x,y,count\n";
  for (std::uint32_t y = 0; y < map.bins; ++y) {
    for (std::uint32_t x = 0; x < map.bins; ++x) {
      out += format_double(map.bin_center(x));
      out += ',';
      out += format_double(map.bin_center(y));
      out += ',';
      out += std::to_string(map.at(x, y));
      out += '\n';
    }
  }
  return out;
}

std::string density_map_to_pgm(const DensityMap& map) {
  std::uint64_t max_count = 1;
  for (std::uint64_t c : map.counts) max_count = std::max(max_count, c);
  std::string out = "P2\n";
  out += std::to_string(map.bins) + " " + std::to_string(map.bins) + "\n";
  out += std::to_string(max_count) + "\n";
  // Raster rows top to bottom: y = +1 first.
  for (std::uint32_t row = 0; row < map.bins; ++row) {
    const std::uint32_t y = map.bins - 1 - row;
    for (std::uint32_t x = 0; x < map.bins; ++x) {
      if (x > 0) out += ' ';
      out += std::to_string(map.at(x, y));
    }
    out += '\n';
  }
  return out;
}

std::string measures_to_csv(const std::vector<MeasureRow>& rows) {
  std::string out = "measure,value,n\n";
  for (const auto& row : rows) {
    out += row.name;
    out += ',';
    out += row.result.degenerate ? "nan" : format_double(row.result.value);
    out += ',';
    out += std::to_string(row.n);
    out += '\n';
  }
  return out;
}

}  // namespace echonet::io
