#include "gbmcut/max_flow.hpp"

#include <algorithm>
#include <charconv>
#include <deque>
#include <limits>
#include <sstream>
#include <string>

namespace gbmcut {
namespace {

constexpr std::int32_t kNoParent = -1;
constexpr std::int32_t kTerminal = -2;
constexpr std::int32_t kOrphan = -3;
constexpr std::uint32_t kNoArc = std::numeric_limits<std::uint32_t>::max();
constexpr int kInfiniteDist = std::numeric_limits<int>::max();

// Boykov-Kolmogorov augmenting paths with search-tree reuse. Terminal arcs are
// folded into a signed per-node residual `trcap_` (positive: capacity from the
// source, negative: capacity to the sink); every other arc is stored with its
// reverse ("sister") in a CSR layout grouped by tail node.
class BkSolver {
 public:
  explicit BkSolver(const FlowNetwork& net) : n_(net.node_count), source_(net.source), sink_(net.sink) {
    std::vector<std::uint32_t> degree(n_ + 1, 0);
    std::vector<std::int64_t> from_source(n_, 0);
    std::vector<std::int64_t> to_sink(n_, 0);
    for (const Arc& a : net.arcs) {
      if (a.from == a.to || a.to == source_ || a.from == sink_) continue;
      if (a.from == source_ && a.to == sink_) {
        flow_ += a.capacity;
      } else if (a.from == source_) {
        from_source[a.to] += a.capacity;
      } else if (a.to == sink_) {
        to_sink[a.from] += a.capacity;
      } else {
        ++degree[a.from];
        ++degree[a.to];
      }
    }

    first_.assign(n_ + 1, 0);
    for (std::uint32_t v = 0; v < n_; ++v) first_[v + 1] = first_[v] + degree[v];
    const std::uint32_t arc_total = first_[n_];
    head_.resize(arc_total);
    sister_.resize(arc_total);
    rcap_.resize(arc_total);
    std::vector<std::uint32_t> fill(first_.begin(), first_.end() - 1);
    const bool radial = net.rays > 0 && net.samples > 0 && net.rays * net.samples <= n_;
    if (radial) intra_arc_.assign(n_, kNoArc);
    for (const Arc& a : net.arcs) {
      if (a.from == a.to || a.from == source_ || a.to == sink_ || a.to == source_ ||
          a.from == sink_) {
        continue;
      }
      const auto fwd = fill[a.from]++;
      const auto rev = fill[a.to]++;
      head_[fwd] = a.to;
      head_[rev] = a.from;
      sister_[fwd] = rev;
      sister_[rev] = fwd;
      rcap_[fwd] = a.capacity;
      rcap_[rev] = 0;
      if (radial && a.kind == ArcKind::kIntraRay && intra_arc_[a.from] == kNoArc) intra_arc_[a.from] = fwd;
    }

    trcap_.assign(n_, 0);
    for (std::uint32_t v = 0; v < n_; ++v) {
      flow_ += std::min(from_source[v], to_sink[v]);
      trcap_[v] = from_source[v] - to_sink[v];
    }
    if (radial) seed_along_rays(net.rays, net.samples);
    parent_.assign(n_, kNoParent);
    is_sink_.assign(n_, 0);
    active_.assign(n_, 0);
    ts_.assign(n_, 0);
    dist_.assign(n_, 0);
  }

  // Cancels source excess against sink demand further in along the same ray,
  // nearest demand first, through the inward intra-ray arcs. Leaves a feasible
  // flow for the tree search to finish.
  void seed_along_rays(std::size_t rays, std::size_t samples) {
    std::vector<std::uint32_t> demand;
    for (std::size_t r = 0; r < rays; ++r) {
      demand.clear();
      for (std::size_t z = 0; z < samples; ++z) {
        const auto v = static_cast<std::uint32_t>(r * samples + z);
        while (trcap_[v] > 0 && !demand.empty()) {
          const auto u = demand.back();
          const std::int64_t amount = std::min(trcap_[v], -trcap_[u]);
          std::uint32_t k = v;
          bool open = true;
          for (; k != u; k = head_[intra_arc_[k]]) {
            if (intra_arc_[k] == kNoArc || rcap_[intra_arc_[k]] < amount) {
              open = false;
              break;
            }
          }
          if (!open) break;
          for (k = v; k != u; k = head_[intra_arc_[k]]) {
            rcap_[intra_arc_[k]] -= amount;
            rcap_[sister_[intra_arc_[k]]] += amount;
          }
          trcap_[v] -= amount;
          trcap_[u] += amount;
          flow_ += amount;
          if (trcap_[u] == 0) demand.pop_back();
        }
        if (trcap_[v] < 0) demand.push_back(v);
      }
    }
  }

  std::int64_t run() {
    for (std::uint32_t v = 0; v < n_; ++v) {
      if (trcap_[v] > 0) {
        is_sink_[v] = 0;
        parent_[v] = kTerminal;
        dist_[v] = 1;
        set_active(v);
      } else if (trcap_[v] < 0) {
        is_sink_[v] = 1;
        parent_[v] = kTerminal;
        dist_[v] = 1;
        set_active(v);
      }
    }

    std::int64_t current = -1;
    while (true) {
      std::int64_t i = -1;
      if (current >= 0) {
        active_[current] = 0;
        if (parent_[current] != kNoParent) i = current;
        current = -1;
      }
      if (i < 0) {
        i = next_active();
        if (i < 0) break;
      }
      const auto node = static_cast<std::uint32_t>(i);
      const std::int64_t middle = grow(node);
      ++time_;
      if (middle >= 0) {
        active_[node] = 1;
        current = i;
        augment(static_cast<std::uint32_t>(middle));
        adopt_orphans();
      }
    }
    return flow_;
  }

  [[nodiscard]] std::vector<std::uint8_t> source_set(CutSide side) const {
    std::vector<std::uint8_t> in(n_, 0);
    std::vector<std::uint32_t> stack;
    if (side == CutSide::kMinimalSource) {
      for (std::uint32_t v = 0; v < n_; ++v) {
        if (trcap_[v] > 0) {
          in[v] = 1;
          stack.push_back(v);
        }
      }
      while (!stack.empty()) {
        const auto v = stack.back();
        stack.pop_back();
        for (auto a = first_[v]; a < first_[v + 1]; ++a) {
          if (rcap_[a] > 0 && !in[head_[a]]) {
            in[head_[a]] = 1;
            stack.push_back(head_[a]);
          }
        }
      }
      in[source_] = 1;
      in[sink_] = 0;
      return in;
    }

    std::vector<std::uint8_t> reaches_sink(n_, 0);
    for (std::uint32_t v = 0; v < n_; ++v) {
      if (trcap_[v] < 0) {
        reaches_sink[v] = 1;
        stack.push_back(v);
      }
    }
    while (!stack.empty()) {
      const auto v = stack.back();
      stack.pop_back();
      for (auto a = first_[v]; a < first_[v + 1]; ++a) {
        const auto u = head_[a];
        if (rcap_[sister_[a]] > 0 && !reaches_sink[u]) {
          reaches_sink[u] = 1;
          stack.push_back(u);
        }
      }
    }
    for (std::uint32_t v = 0; v < n_; ++v) in[v] = reaches_sink[v] ? 0 : 1;
    in[source_] = 1;
    in[sink_] = 0;
    return in;
  }

 private:
  void set_active(std::uint32_t v) {
    if (!active_[v]) {
      active_[v] = 1;
      queue_.push_back(v);
    }
  }

  std::int64_t next_active() {
    while (!queue_.empty()) {
      const auto v = queue_.front();
      queue_.pop_front();
      active_[v] = 0;
      if (parent_[v] != kNoParent) return v;
    }
    return -1;
  }

  void adopt(std::uint32_t child, std::uint32_t parent_node, std::uint32_t parent_arc, bool sink_tree) {
    is_sink_[child] = sink_tree ? 1 : 0;
    parent_[child] = static_cast<std::int32_t>(parent_arc);
    ts_[child] = ts_[parent_node];
    dist_[child] = dist_[parent_node] + 1;
  }

  // Expands the tree containing `i` by one layer. Returns the arc joining the
  // two trees (oriented source tree -> sink tree) or -1.
  std::int64_t grow(std::uint32_t i) {
    if (!is_sink_[i]) {
      for (auto a = first_[i]; a < first_[i + 1]; ++a) {
        if (rcap_[a] <= 0) continue;
        const auto j = head_[a];
        if (parent_[j] == kNoParent) {
          adopt(j, i, sister_[a], false);
          set_active(j);
        } else if (is_sink_[j]) {
          return a;
        } else if (ts_[j] <= ts_[i] && dist_[j] > dist_[i]) {
          adopt(j, i, sister_[a], false);
        }
      }
    } else {
      for (auto a = first_[i]; a < first_[i + 1]; ++a) {
        if (rcap_[sister_[a]] <= 0) continue;
        const auto j = head_[a];
        if (parent_[j] == kNoParent) {
          adopt(j, i, sister_[a], true);
          set_active(j);
        } else if (!is_sink_[j]) {
          return sister_[a];
        } else if (ts_[j] <= ts_[i] && dist_[j] > dist_[i]) {
          adopt(j, i, sister_[a], true);
        }
      }
    }
    return -1;
  }

  void make_orphan_front(std::uint32_t v) {
    parent_[v] = kOrphan;
    orphans_.push_front(v);
  }

  void make_orphan_back(std::uint32_t v) {
    parent_[v] = kOrphan;
    orphans_.push_back(v);
  }

  void augment(std::uint32_t middle) {
    std::int64_t bottleneck = rcap_[middle];
    std::uint32_t i = head_[sister_[middle]];
    for (;;) {
      const auto a = parent_[i];
      if (a == kTerminal) break;
      bottleneck = std::min(bottleneck, rcap_[sister_[a]]);
      i = head_[a];
    }
    bottleneck = std::min(bottleneck, trcap_[i]);
    i = head_[middle];
    for (;;) {
      const auto a = parent_[i];
      if (a == kTerminal) break;
      bottleneck = std::min(bottleneck, rcap_[a]);
      i = head_[a];
    }
    bottleneck = std::min(bottleneck, -trcap_[i]);

    rcap_[sister_[middle]] += bottleneck;
    rcap_[middle] -= bottleneck;
    i = head_[sister_[middle]];
    for (;;) {
      const auto a = parent_[i];
      if (a == kTerminal) break;
      rcap_[a] += bottleneck;
      rcap_[sister_[a]] -= bottleneck;
      if (rcap_[sister_[a]] == 0) make_orphan_front(i);
      i = head_[a];
    }
    trcap_[i] -= bottleneck;
    if (trcap_[i] == 0) make_orphan_front(i);

    i = head_[middle];
    for (;;) {
      const auto a = parent_[i];
      if (a == kTerminal) break;
      rcap_[sister_[a]] += bottleneck;
      rcap_[a] -= bottleneck;
      if (rcap_[a] == 0) make_orphan_front(i);
      i = head_[a];
    }
    trcap_[i] += bottleneck;
    if (trcap_[i] == 0) make_orphan_front(i);

    flow_ += bottleneck;
  }

  void adopt_orphans() {
    while (!orphans_.empty()) {
      const auto v = orphans_.front();
      orphans_.pop_front();
      process_orphan(v, is_sink_[v] != 0);
    }
  }

  // Distance from `j` to its tree root, or kInfiniteDist when the path runs
  // through an orphan. Caches results via the time stamp.
  int root_distance(std::uint32_t j) {
    int d = 0;
    auto k = j;
    for (;;) {
      if (ts_[k] == time_) return d + dist_[k];
      const auto a = parent_[k];
      ++d;
      if (a == kTerminal) {
        ts_[k] = time_;
        dist_[k] = 1;
        return d;
      }
      if (a == kOrphan) return kInfiniteDist;
      k = head_[a];
    }
  }

  void process_orphan(std::uint32_t i, bool sink_tree) {
    std::int64_t best_arc = -1;
    int best_dist = kInfiniteDist;
    for (auto a0 = first_[i]; a0 < first_[i + 1]; ++a0) {
      const std::int64_t cap = sink_tree ? rcap_[a0] : rcap_[sister_[a0]];
      if (cap <= 0) continue;
      const auto j = head_[a0];
      if (static_cast<bool>(is_sink_[j]) != sink_tree || parent_[j] == kNoParent) continue;
      int d = root_distance(j);
      if (d == kInfiniteDist) continue;
      if (d < best_dist) {
        best_arc = a0;
        best_dist = d;
      }
      for (auto k = j; ts_[k] != time_; k = head_[parent_[k]]) {
        ts_[k] = time_;
        dist_[k] = d--;
      }
    }

    if (best_arc >= 0) {
      parent_[i] = static_cast<std::int32_t>(best_arc);
      ts_[i] = time_;
      dist_[i] = best_dist + 1;
      return;
    }

    parent_[i] = kNoParent;
    for (auto a0 = first_[i]; a0 < first_[i + 1]; ++a0) {
      const auto j = head_[a0];
      if (static_cast<bool>(is_sink_[j]) != sink_tree || parent_[j] == kNoParent) continue;
      const std::int64_t cap = sink_tree ? rcap_[a0] : rcap_[sister_[a0]];
      if (cap > 0) set_active(j);
      const auto a = parent_[j];
      if (a != kTerminal && a != kOrphan && head_[a] == i) make_orphan_back(j);
    }
  }

  std::uint32_t n_;
  std::uint32_t source_;
  std::uint32_t sink_;
  std::vector<std::uint32_t> first_;
  std::vector<std::uint32_t> head_;
  std::vector<std::uint32_t> sister_;
  std::vector<std::int64_t> rcap_;
  std::vector<std::int64_t> trcap_;
  std::vector<std::int32_t> parent_;
  std::vector<std::uint8_t> is_sink_;
  std::vector<std::uint8_t> active_;
  std::vector<int> ts_;
  std::vector<int> dist_;
  std::deque<std::uint32_t> queue_;
  std::deque<std::uint32_t> orphans_;
  std::vector<std::uint32_t> intra_arc_;  // inward arc per ray node, radial networks only
  int time_ = 0;
  std::int64_t flow_ = 0;
};

}  // namespace

CutResult max_flow(const FlowNetwork& network, CutSide side) {
  network.validate();
  BkSolver solver(network);
  CutResult result;
  result.flow = solver.run();
  result.flow_value = static_cast<double>(result.flow) / network.capacity_scale;
  result.source_set = solver.source_set(side);
  return result;
}

std::int64_t cut_capacity(const FlowNetwork& network, const std::vector<std::uint8_t>& source_set) {
  std::int64_t total = 0;
  for (const Arc& a : network.arcs) {
    if (source_set[a.from] && !source_set[a.to]) total += a.capacity;
  }
  return total;
}

std::vector<int> extract_cut_indices(const CutResult& result, const FlowNetwork& network,
                                     const Adjacency& adjacency, int delta_r) {
  if (network.rays != adjacency.size() || network.samples == 0) {
    throw InvalidArgument("network was not built from this ray adjacency");
  }
  std::vector<int> cut(network.rays, -1);
  for (std::size_t r = 0; r < network.rays; ++r) {
    std::size_t z = 0;
    while (z < network.samples && result.source_set[network.node(r, z)]) ++z;
    cut[r] = static_cast<int>(z) - 1;
    for (; z < network.samples; ++z) {
      if (result.source_set[network.node(r, z)]) {
        throw SolverError("ray " + std::to_string(r) + ": source side is not a prefix");
      }
    }
  }
  for (std::size_t r = 0; r < network.rays; ++r) {
    for (auto rn : adjacency[r]) {
      if (std::abs(cut[r] - cut[rn]) > delta_r) {
        throw SolverError("rays " + std::to_string(r) + " and " + std::to_string(rn) +
                          " violate the smoothness bound");
      }
    }
  }
  return cut;
}

FlowNetwork parse_dimacs(std::string_view text) {
  FlowNetwork net;
  bool have_problem = false;
  bool have_source = false;
  bool have_sink = false;
  std::size_t declared_arcs = 0;
  std::size_t line_no = 0;

  const auto parse_int = [&](const std::string& token, std::int64_t& out) {
    const auto* end = token.data() + token.size();
    const auto [ptr, ec] = std::from_chars(token.data(), end, out);
    if (ec != std::errc{} || ptr != end) throw DimacsParseError(line_no, "bad integer '" + token + "'");
  };
  const auto node_id = [&](const std::string& token) {
    std::int64_t id = 0;
    parse_int(token, id);
    if (id < 1 || id > net.node_count) throw DimacsParseError(line_no, "node id out of range");
    return static_cast<std::uint32_t>(id - 1);
  };

  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::istringstream line(std::string(text.substr(pos, eol - pos)));
    pos = eol + 1;
    ++line_no;

    std::string tag;
    if (!(line >> tag) || tag == "c") continue;
    std::vector<std::string> fields;
    for (std::string f; line >> f;) fields.push_back(f);

    if (tag == "p") {
      if (have_problem) throw DimacsParseError(line_no, "duplicate problem line");
      if (fields.size() != 3 || fields[0] != "max") {
        throw DimacsParseError(line_no, "expected 'p max <nodes> <arcs>'");
      }
      std::int64_t nodes = 0;
      std::int64_t arcs = 0;
      parse_int(fields[1], nodes);
      parse_int(fields[2], arcs);
      if (nodes < 2 || nodes > std::numeric_limits<std::uint32_t>::max() || arcs < 0) {
        throw DimacsParseError(line_no, "invalid problem size");
      }
      net.node_count = static_cast<std::uint32_t>(nodes);
      declared_arcs = static_cast<std::size_t>(arcs);
      net.arcs.reserve(declared_arcs);
      have_problem = true;
    } else if (!have_problem) {
      throw DimacsParseError(line_no, "'" + tag + "' line before problem line");
    } else if (tag == "n") {
      if (fields.size() != 2) throw DimacsParseError(line_no, "expected 'n <id> s|t'");
      const auto id = node_id(fields[0]);
      if (fields[1] == "s") {
        net.source = id;
        have_source = true;
      } else if (fields[1] == "t") {
        net.sink = id;
        have_sink = true;
      } else {
        throw DimacsParseError(line_no, "node designator must be s or t");
      }
    } else if (tag == "a") {
      if (fields.size() != 3) throw DimacsParseError(line_no, "expected 'a <u> <v> <cap>'");
      Arc arc;
      arc.from = node_id(fields[0]);
      arc.to = node_id(fields[1]);
      parse_int(fields[2], arc.capacity);
      if (arc.capacity < 0) throw DimacsParseError(line_no, "negative capacity");
      net.arcs.push_back(arc);
    } else {
      throw DimacsParseError(line_no, "unknown line type '" + tag + "'");
    }
  }
  if (!have_problem) throw DimacsParseError(line_no, "missing problem line");
  if (!have_source || !have_sink) throw DimacsParseError(line_no, "missing source or sink designator");
  if (net.source == net.sink) throw DimacsParseError(line_no, "source equals sink");
  if (net.arcs.size() != declared_arcs) {
    throw DimacsParseError(line_no, "problem line declares " + std::to_string(declared_arcs) +
                                        " arcs, found " + std::to_string(net.arcs.size()));
  }
  return net;
}

}  // namespace gbmcut
