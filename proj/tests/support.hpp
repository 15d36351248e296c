#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <vector>

#include "wgt/engine.hpp"
#include "wgt/graph.hpp"
#include "wgt/objective.hpp"
#include "wgt/weights.hpp"

namespace wgt::testing {

// The 6-agent estimation problem with the usual parameters.
inline Scenario sensor_scenario(Mode mode, double alpha, std::size_t iterations,
                                std::uint64_t seed = 1, double e = 0.8, double m = 10.0) {
  Scenario sc{WeightSchedule(DirectedGraph::sensor_ring6(), WeightScheme::uniform),
              make_sensor_scenario(6, 3, 2, 0.01, seed),
              mode,
              StepSizes::uniform(6, alpha),
              LambdaSchedule::decaying(e, m),
              iterations,
              seed + 1,
              1e-6};
  validate(sc);
  return sc;
}

inline DirectedGraph random_graph(std::mt19937_64& gen, std::size_t n, double density) {
  std::bernoulli_distribution coin(density);
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j && coin(gen)) edges.push_back({i, j});
  return DirectedGraph(n, edges);
}

// Random strongly connected graph: a shuffled Hamiltonian cycle plus extras.
inline DirectedGraph random_connected_graph(std::mt19937_64& gen, std::size_t n, double density) {
  std::vector<std::size_t> perm(n);
  for (std::size_t i = 0; i < n; ++i) perm[i] = i;
  std::shuffle(perm.begin(), perm.end(), gen);
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < n && n > 1; ++i) edges.push_back({perm[i], perm[(i + 1) % n]});
  std::bernoulli_distribution coin(density);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j && coin(gen)) edges.push_back({i, j});
  return DirectedGraph(n, edges);
}

}  // namespace wgt::testing
