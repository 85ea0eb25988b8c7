#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "gbmcut/ray_graph.hpp"

namespace gbmcut {

// Which of the (possibly many) minimum cuts to report. All minimum source sets
// form a lattice; these are its bottom and top elements.
enum class CutSide {
  kMinimalSource,  // nodes reachable from s in the residual graph
  kMaximalSource,  // nodes that cannot reach t in the residual graph
};

struct CutResult {
  std::int64_t flow = 0;    // in network capacity units
  double flow_value = 0.0;  // flow / capacity_scale
  std::vector<std::uint8_t> source_set;  // 1 = source side; indexed by node id
};

// Maximum flow by the Boykov-Kolmogorov search-tree algorithm on exact integer
// capacities. Deterministic: the search order follows the arc order of
// `network`. Throws InvalidArgument for structurally invalid networks.
CutResult max_flow(const FlowNetwork& network, CutSide side = CutSide::kMinimalSource);

// Total capacity of arcs leaving the source set.
std::int64_t cut_capacity(const FlowNetwork& network, const std::vector<std::uint8_t>& source_set);

// Per-ray cut height z_r = max { z : (r,z) on the source side }. Checks the
// prefix property on every ray and |z_r - z_n| <= delta_r on every adjacent
// pair; a violation throws SolverError.
std::vector<int> extract_cut_indices(const CutResult& result, const FlowNetwork& network,
                                     const Adjacency& adjacency, int delta_r);

class DimacsParseError : public FormatError {
 public:
  DimacsParseError(std::size_t line, const std::string& what)
      : FormatError("line " + std::to_string(line) + ": " + what), line_(line) {}
  [[nodiscard]] std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// Reads a DIMACS max-flow problem ("c", "p max N M", "n id s|t", "a u v cap").
FlowNetwork parse_dimacs(std::string_view text);

}  // namespace gbmcut
