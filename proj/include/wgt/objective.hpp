#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "wgt/linalg.hpp"

namespace wgt {

/// f(x) = ||s - S x||^2 + r ||x||^2 for one agent.
class QuadraticObjective {
 public:
  QuadraticObjective(Matrix S, Vector s, double r);

  std::size_t rows() const noexcept { return static_cast<std::size_t>(S_.rows()); }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(S_.cols()); }
  const Matrix& measurement_matrix() const noexcept { return S_; }
  const Vector& measurements() const noexcept { return s_; }
  double regularizer() const noexcept { return r_; }

  double value(const Vector& x) const;
  /// 2 S^T (S x - s) + 2 r x
  Vector gradient(const Vector& x) const;
  /// 2 (S^T S + r I), constant for a quadratic.
  const Matrix& hessian() const noexcept { return hessian_; }

  double smoothness() const noexcept { return L_; }         // lambda_max(hessian)
  double strong_convexity() const noexcept { return mu_; }  // lambda_min(hessian)

  /// Minimizer of this agent's objective alone.
  Vector local_minimizer() const;

 private:
  void check_dim(const Vector& x) const;

  Matrix S_;
  Vector s_;
  double r_;
  Matrix StS_;
  Vector Sts_;
  Matrix hessian_;
  double L_ = 0.0;
  double mu_ = 0.0;
};

/// The n local objectives together with the network-wide constants
/// L = max L_i, mu = min mu_i, L_hat = n L, mu_hat = n mu.
class ObjectiveEnsemble {
 public:
  explicit ObjectiveEnsemble(std::vector<QuadraticObjective> agents);

  std::size_t size() const noexcept { return agents_.size(); }
  std::size_t dim() const noexcept { return agents_.front().dim(); }
  const QuadraticObjective& agent(std::size_t i) const { return agents_.at(i); }
  const std::vector<QuadraticObjective>& agents() const noexcept { return agents_; }

  double L() const noexcept { return L_; }
  double mu() const noexcept { return mu_; }
  double L_hat() const noexcept { return static_cast<double>(size()) * L_; }
  double mu_hat() const noexcept { return static_cast<double>(size()) * mu_; }

  /// Unique minimizer of sum_i f_i.
  Vector global_optimum() const;

  /// Row i = grad f_i(row i of x). x is n x p.
  Matrix stacked_gradient(const Matrix& x) const;

 private:
  std::vector<QuadraticObjective> agents_;
  double L_ = 0.0;
  double mu_ = 0.0;
};

/// Sensor-network estimation problem: S_i ~ U[0,10]^{d x p}, xtilde ~ U[0,1]^p,
/// s_i = S_i xtilde + w_i with w_i ~ N(0, I_d), r_i = r.
/// Draw order from Rng(seed): every S_i (agent-major, row-major), then
/// xtilde, then every w_i (agent-major).
ObjectiveEnsemble make_sensor_scenario(std::size_t n, std::size_t d, std::size_t p, double r,
                                       std::uint64_t seed);

}  // namespace wgt
