#include "wgt/graph.hpp"

#include <algorithm>
#include <string>

#include "wgt/errors.hpp"

namespace wgt {

AgentIndex from_external_id(std::size_t id, std::size_t n) {
  if (id < 1 || id > n) {
    throw DomainError("agent id " + std::to_string(id) + " outside 1.." + std::to_string(n));
  }
  return id - 1;
}

DirectedGraph::DirectedGraph(std::size_t n, std::vector<Edge> edges)
    : n_(n), edges_(std::move(edges)), in_(n), out_(n) {
  if (n_ == 0) throw DomainError("graph needs at least one agent");
  for (const Edge& e : edges_) {
    if (e.from >= n_ || e.to >= n_) {
      throw DomainError("edge (" + std::to_string(e.from + 1) + "," + std::to_string(e.to + 1) +
                        ") references an unknown agent");
    }
    if (e.from == e.to) {
      throw DomainError("self-loop on agent " + std::to_string(e.from + 1));
    }
  }
  std::sort(edges_.begin(), edges_.end());
  edges_.erase(std::unique(edges_.begin(), edges_.end()), edges_.end());
  // Sorted edges give ascending neighbor lists.
  for (const Edge& e : edges_) {
    out_[e.from].push_back(e.to);
    in_[e.to].push_back(e.from);
  }
  for (auto& v : in_) std::sort(v.begin(), v.end());
}

DirectedGraph DirectedGraph::cycle(std::size_t n) {
  std::vector<Edge> edges;
  if (n > 1) {
    for (AgentIndex i = 0; i < n; ++i) edges.push_back({i, (i + 1) % n});
  }
  return DirectedGraph(n, std::move(edges));
}

DirectedGraph DirectedGraph::sensor_ring6() {
  std::vector<Edge> edges;
  for (AgentIndex i = 0; i < 6; ++i) edges.push_back({i, (i + 1) % 6});
  edges.push_back({0, 3});
  edges.push_back({4, 1});
  return DirectedGraph(6, std::move(edges));
}

DirectedGraph DirectedGraph::preset(const std::string& name) {
  if (name == "ring6_chords") return sensor_ring6();
  if (name.starts_with("cycle")) {
    const std::string digits = name.substr(5);
    if (!digits.empty() && std::all_of(digits.begin(), digits.end(), ::isdigit)) {
      const auto n = std::stoul(digits);
      if (n >= 1) return cycle(n);
    }
  }
  throw ConfigError("unknown graph preset '" + name + "'");
}

void DirectedGraph::check_agent(AgentIndex i) const {
  if (i >= n_) {
    throw DomainError("agent index " + std::to_string(i) + " outside graph of size " +
                      std::to_string(n_));
  }
}

const std::vector<AgentIndex>& DirectedGraph::in_neighbors(AgentIndex i) const {
  check_agent(i);
  return in_[i];
}

const std::vector<AgentIndex>& DirectedGraph::out_neighbors(AgentIndex i) const {
  check_agent(i);
  return out_[i];
}

bool DirectedGraph::has_edge(AgentIndex from, AgentIndex to) const {
  return std::binary_search(edges_.begin(), edges_.end(), Edge{from, to});
}

bool DirectedGraph::is_strongly_connected() const {
  // Strongly connected iff agent 0 reaches everyone forward and backward.
  auto reaches_all = [this](const std::vector<std::vector<AgentIndex>>& adj) {
    std::vector<bool> seen(n_, false);
    std::vector<AgentIndex> stack{0};
    seen[0] = true;
    std::size_t count = 1;
    while (!stack.empty()) {
      const AgentIndex u = stack.back();
      stack.pop_back();
      for (AgentIndex v : adj[u]) {
        if (!seen[v]) {
          seen[v] = true;
          ++count;
          stack.push_back(v);
        }
      }
    }
    return count == n_;
  };
  return reaches_all(out_) && reaches_all(in_);
}

}  // namespace wgt
