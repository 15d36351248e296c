#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

namespace wgt {

// Agents are indexed 0..n-1 inside the library. Reports and config files use
// 1-based ids; convert with to_external_id / from_external_id.
using AgentIndex = std::size_t;

inline std::size_t to_external_id(AgentIndex i) { return i + 1; }
AgentIndex from_external_id(std::size_t id, std::size_t n);

struct Edge {
  AgentIndex from;
  AgentIndex to;

  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

/// Directed communication graph. An edge (i, j) means i sends to j.
/// Edges are kept sorted and unique; self-loops are rejected since the
/// self-weights live in the mixing matrices, not in the edge set.
class DirectedGraph {
 public:
  DirectedGraph(std::size_t n, std::vector<Edge> edges);

  /// Directed cycle 0 -> 1 -> ... -> n-1 -> 0.
  static DirectedGraph cycle(std::size_t n);

  /// Six agents on the directed ring 1->2->...->6->1 plus chords 1->4, 5->2.
  static DirectedGraph sensor_ring6();

  /// Named preset lookup ("ring6_chords", "cycleN").
  static DirectedGraph preset(const std::string& name);

  std::size_t size() const noexcept { return n_; }
  const std::vector<Edge>& edges() const noexcept { return edges_; }

  const std::vector<AgentIndex>& in_neighbors(AgentIndex i) const;
  const std::vector<AgentIndex>& out_neighbors(AgentIndex i) const;

  bool has_edge(AgentIndex from, AgentIndex to) const;
  bool is_strongly_connected() const;

 private:
  void check_agent(AgentIndex i) const;

  std::size_t n_;
  std::vector<Edge> edges_;
  std::vector<std::vector<AgentIndex>> in_;
  std::vector<std::vector<AgentIndex>> out_;
};

}  // namespace wgt
