#include "wgt/objective.hpp"

#include <algorithm>
#include <string>

#include <Eigen/Eigenvalues>

#include "wgt/errors.hpp"
#include "wgt/rng.hpp"

namespace wgt {

QuadraticObjective::QuadraticObjective(Matrix S, Vector s, double r)
    : S_(std::move(S)), s_(std::move(s)), r_(r) {
  if (S_.rows() == 0 || S_.cols() == 0) throw DomainError("measurement matrix must be non-empty");
  if (s_.size() != S_.rows()) {
    throw DomainError("measurement vector has " + std::to_string(s_.size()) + " entries, expected " +
                      std::to_string(S_.rows()));
  }
  if (!(r_ >= 0.0)) throw DomainError("regularizer must be >= 0");
  StS_ = S_.transpose() * S_;
  Sts_ = S_.transpose() * s_;
  const auto p = S_.cols();
  hessian_ = 2.0 * (StS_ + r_ * Matrix::Identity(p, p));
  Eigen::SelfAdjointEigenSolver<Matrix> eig(hessian_, Eigen::EigenvaluesOnly);
  mu_ = eig.eigenvalues().minCoeff();
  L_ = eig.eigenvalues().maxCoeff();
}

void QuadraticObjective::check_dim(const Vector& x) const {
  if (x.size() != S_.cols()) {
    throw DomainError("point has dimension " + std::to_string(x.size()) + ", expected " +
                      std::to_string(S_.cols()));
  }
}

double QuadraticObjective::value(const Vector& x) const {
  check_dim(x);
  return (s_ - S_ * x).squaredNorm() + r_ * x.squaredNorm();
}

Vector QuadraticObjective::gradient(const Vector& x) const {
  check_dim(x);
  return 2.0 * (StS_ * x - Sts_) + 2.0 * r_ * x;
}

Vector QuadraticObjective::local_minimizer() const {
  const auto p = S_.cols();
  Eigen::LDLT<Matrix> ldlt(StS_ + r_ * Matrix::Identity(p, p));
  if (ldlt.info() != Eigen::Success || mu_ <= 0.0) {
    throw NumericalError("local objective is not strongly convex");
  }
  return ldlt.solve(Sts_);
}

ObjectiveEnsemble::ObjectiveEnsemble(std::vector<QuadraticObjective> agents)
    : agents_(std::move(agents)) {
  if (agents_.empty()) throw DomainError("ensemble needs at least one agent");
  const auto p = agents_.front().dim();
  L_ = agents_.front().smoothness();
  mu_ = agents_.front().strong_convexity();
  for (const auto& a : agents_) {
    if (a.dim() != p) throw DomainError("agents disagree on the decision dimension");
    L_ = std::max(L_, a.smoothness());
    mu_ = std::min(mu_, a.strong_convexity());
  }
}

Vector ObjectiveEnsemble::global_optimum() const {
  const auto p = static_cast<Eigen::Index>(dim());
  Matrix lhs = Matrix::Zero(p, p);
  Vector rhs = Vector::Zero(p);
  for (const auto& a : agents_) {
    lhs += a.measurement_matrix().transpose() * a.measurement_matrix() +
           a.regularizer() * Matrix::Identity(p, p);
    rhs += a.measurement_matrix().transpose() * a.measurements();
  }
  Eigen::FullPivLU<Matrix> lu(lhs);
  if (!lu.isInvertible()) throw NumericalError("global normal equations are singular");
  return lu.solve(rhs);
}

Matrix ObjectiveEnsemble::stacked_gradient(const Matrix& x) const {
  if (static_cast<std::size_t>(x.rows()) != size() || static_cast<std::size_t>(x.cols()) != dim()) {
    throw DomainError("state matrix must be n x p");
  }
  Matrix g(x.rows(), x.cols());
  for (std::size_t i = 0; i < size(); ++i) {
    const auto row = static_cast<Eigen::Index>(i);
    g.row(row) = agents_[i].gradient(x.row(row).transpose()).transpose();
  }
  return g;
}

ObjectiveEnsemble make_sensor_scenario(std::size_t n, std::size_t d, std::size_t p, double r,
                                       std::uint64_t seed) {
  if (n == 0 || d == 0 || p == 0) throw DomainError("n, d and p must be positive");
  if (!(r >= 0.0)) throw DomainError("regularizer must be >= 0");
  const auto rows = static_cast<Eigen::Index>(d);
  const auto cols = static_cast<Eigen::Index>(p);
  Rng rng(seed);

  std::vector<Matrix> S(n, Matrix(rows, cols));
  for (auto& Si : S) {
    for (Eigen::Index a = 0; a < rows; ++a) {
      for (Eigen::Index b = 0; b < cols; ++b) Si(a, b) = rng.uniform(0.0, 10.0);
    }
  }
  Vector truth(cols);
  for (Eigen::Index b = 0; b < cols; ++b) truth(b) = rng.uniform();

  std::vector<QuadraticObjective> agents;
  agents.reserve(n);
  for (auto& Si : S) {
    Vector noise(rows);
    for (Eigen::Index a = 0; a < rows; ++a) noise(a) = rng.normal();
    Vector si = Si * truth + noise;
    agents.emplace_back(std::move(Si), std::move(si), r);
  }
  return ObjectiveEnsemble(std::move(agents));
}

}  // namespace wgt
