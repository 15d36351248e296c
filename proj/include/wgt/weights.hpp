#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "wgt/graph.hpp"
#include "wgt/linalg.hpp"

namespace wgt {

enum class WeightScheme {
  uniform,   // equal weight on self and every neighbor, same matrices for all k
  dithered,  // uniform mixed with a seeded random stochastic pattern per k
};

std::string to_string(WeightScheme s);
WeightScheme weight_scheme_from_string(const std::string& s);

/// Row-stochastic A (state mixing) and column-stochastic B (tracker mixing)
/// for one iteration.
struct WeightPair {
  Matrix A;
  Matrix B;
};

/// Per-iteration mixing matrices compatible with a strongly connected graph.
///
/// [A_k]_ij > 0 exactly for j in in(i) u {i}; rows sum to 1.
/// [B_k]_li > 0 exactly for l in out(i) u {i}; columns sum to 1.
///
/// The dithered scheme draws, for every row of A and column of B, a random
/// stochastic vector w on the allowed support and uses
///   (1 - jitter) * uniform + jitter * w,
/// so every positive entry stays >= (1 - jitter) / (support size). Draws come
/// from Rng(seed, k) in the order: rows of A ascending (support ascending),
/// then columns of B ascending (support ascending).
class WeightSchedule {
 public:
  WeightSchedule(DirectedGraph graph, WeightScheme scheme, double jitter = 0.0,
                 std::uint64_t seed = 0);

  const DirectedGraph& graph() const noexcept { return graph_; }
  WeightScheme scheme() const noexcept { return scheme_; }
  double jitter() const noexcept { return jitter_; }
  std::uint64_t seed() const noexcept { return seed_; }
  bool is_static() const noexcept { return scheme_ == WeightScheme::uniform; }

  /// Guaranteed lower bounds on the positive entries of every A_k / B_k.
  double a_floor() const noexcept { return a_floor_; }
  double b_floor() const noexcept { return b_floor_; }

  /// Matrices for iteration k >= 1. Deterministic in (seed, k).
  WeightPair matrices_at(std::size_t k) const;

 private:
  DirectedGraph graph_;
  WeightScheme scheme_;
  double jitter_;
  std::uint64_t seed_;
  double a_floor_;
  double b_floor_;
  WeightPair uniform_;
};

/// Checks stochasticity, the graph-induced sparsity pattern and the entry
/// floors. Returns an empty string when admissible, otherwise a description of
/// the first violation.
std::string admissibility_violation(const WeightPair& w, const DirectedGraph& g, double a_floor,
                                    double b_floor, double tol = 1e-12);

/// pi_1 = 1/n, pi_{k+1} = B_k pi_k. Returns pi_1..pi_K.
std::vector<Vector> pi_sequence(const WeightSchedule& ws, std::size_t horizon);

struct PowerIterationSettings {
  double tolerance = 1e-12;
  std::size_t max_iterations = 100000;
};

/// Left Perron vector of a row-stochastic A: phi^T A = phi^T, 1^T phi = 1.
/// Throws NumericalError if the iteration does not settle within the cap.
Vector phi_static(const Matrix& A, const PowerIterationSettings& settings = {});

struct ContractionRadii {
  double rho_A;  // rho(A - 1 phi^T)
  double rho_B;  // rho(B - pi 1^T)
};

ContractionRadii contraction_radii(const Matrix& A, const Vector& phi, const Matrix& B,
                                   const Vector& pi);

}  // namespace wgt
