#include <doctest.h>

#include <queue>
#include <random>

#include "support.hpp"
#include "wgt/errors.hpp"
#include "wgt/graph.hpp"

using namespace wgt;

namespace {

// Breadth-first search from every agent over a plain adjacency matrix.
bool reaches_everything(std::size_t n, const std::vector<Edge>& edges) {
  std::vector<std::vector<bool>> adj(n, std::vector<bool>(n, false));
  for (const auto& e : edges) adj[e.from][e.to] = true;
  for (std::size_t s = 0; s < n; ++s) {
    std::vector<bool> seen(n, false);
    std::queue<std::size_t> q;
    q.push(s);
    seen[s] = true;
    while (!q.empty()) {
      const auto u = q.front();
      q.pop();
      for (std::size_t v = 0; v < n; ++v) {
        if (adj[u][v] && !seen[v]) {
          seen[v] = true;
          q.push(v);
        }
      }
    }
    for (bool b : seen)
      if (!b) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("3-cycle neighbor sets") {
  const auto g = DirectedGraph::cycle(3);
  CHECK(g.in_neighbors(1) == std::vector<AgentIndex>{0});
  CHECK(g.out_neighbors(1) == std::vector<AgentIndex>{2});
  CHECK(g.is_strongly_connected());
}

TEST_CASE("sensor graph") {
  const auto g = DirectedGraph::sensor_ring6();
  CHECK(g.size() == 6);
  CHECK(g.edges().size() == 8);
  // agent 1 hears from 6 and talks to 2 and 4; agent 2 hears from 1 and 5
  CHECK(g.in_neighbors(0) == std::vector<AgentIndex>{5});
  CHECK(g.out_neighbors(0) == std::vector<AgentIndex>{1, 3});
  CHECK(g.in_neighbors(1) == std::vector<AgentIndex>{0, 4});
  CHECK(g.is_strongly_connected());
  CHECK(DirectedGraph::preset("ring6_chords").edges() == g.edges());
  CHECK(DirectedGraph::preset("cycle4").edges() == DirectedGraph::cycle(4).edges());
}

TEST_CASE("one-way pair is not strongly connected") {
  CHECK_FALSE(DirectedGraph(2, {{0, 1}}).is_strongly_connected());
  CHECK(DirectedGraph(1, {}).is_strongly_connected());
}

TEST_CASE("strong connectivity matches reachability from every agent") {
  std::mt19937_64 gen(11);
  std::uniform_int_distribution<std::size_t> size(1, 6);
  std::uniform_real_distribution<double> density(0.05, 0.6);
  int connected = 0;
  for (int t = 0; t < 3000; ++t) {
    const auto g = testing::random_graph(gen, size(gen), density(gen));
    const bool oracle = reaches_everything(g.size(), g.edges());
    REQUIRE(g.is_strongly_connected() == oracle);
    connected += oracle;
  }
  // both outcomes were exercised
  CHECK(connected > 100);
  CHECK(connected < 2900);
}

TEST_CASE("in and out neighbors mirror each other") {
  std::mt19937_64 gen(5);
  for (int t = 0; t < 200; ++t) {
    const auto g = testing::random_graph(gen, 6, 0.4);
    for (AgentIndex i = 0; i < 6; ++i) {
      for (AgentIndex j : g.in_neighbors(i)) {
        const auto& out = g.out_neighbors(j);
        CHECK(std::find(out.begin(), out.end(), i) != out.end());
        CHECK(g.has_edge(j, i));
      }
      CHECK(std::is_sorted(g.in_neighbors(i).begin(), g.in_neighbors(i).end()));
    }
  }
}

TEST_CASE("duplicate edges collapse") {
  const DirectedGraph g(3, {{0, 1}, {0, 1}, {1, 2}, {2, 0}});
  CHECK(g.edges().size() == 3);
}

TEST_CASE("invalid graphs and ids") {
  CHECK_THROWS_AS(DirectedGraph(0, {}), DomainError);
  CHECK_THROWS_AS(DirectedGraph(2, {{0, 0}}), DomainError);
  CHECK_THROWS_AS(DirectedGraph(2, {{0, 2}}), DomainError);
  CHECK_THROWS_AS(DirectedGraph::cycle(3).in_neighbors(3), DomainError);
  CHECK_THROWS_AS(from_external_id(0, 3), DomainError);
  CHECK_THROWS_AS(from_external_id(4, 3), DomainError);
  CHECK(from_external_id(3, 3) == 2);
  CHECK_THROWS_AS(DirectedGraph::preset("hexagon"), ConfigError);
}
