#include "wgt/monitor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

#include "wgt/errors.hpp"

namespace wgt {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double safe_div(double num, double den) { return den > 0.0 ? num / den : kInf; }

void require_static_wgt(const Scenario& sc, const char* what) {
  if (!sc.weights.is_static()) {
    throw DomainError(std::string(what) + " needs a static weight schedule");
  }
  if (sc.mode != Mode::wgt) throw DomainError(std::string(what) + " applies to WGT runs only");
}

}  // namespace

MetricVector metric_vector(const NetworkState& s, const Vector& x_star,
                           const std::optional<Vector>& phi, const Vector& pi_k) {
  const auto n = s.x.rows();
  const Eigen::RowVectorXd xbar =
      phi ? Eigen::RowVectorXd(phi->transpose() * s.x) : Eigen::RowVectorXd(s.x.colwise().mean());
  const Eigen::RowVectorXd yhat = s.y.colwise().sum();
  MetricVector m;
  m.k = s.k;
  m.s1 = (xbar.transpose() - x_star).norm();
  m.s2 = (s.x - Vector::Ones(n) * xbar).norm();
  m.s3 = (s.y - pi_k * yhat).norm();
  return m;
}

std::string to_string(Surrogate s) {
  return s == Surrogate::spectral_radius ? "spectral_radius" : "spectral_norm";
}

ContractionEstimates estimate_contraction(const WeightPair& w, const Vector& phi,
                                          const Vector& pi_k, const Vector& pi_k1,
                                          const StepSizes& steps, Surrogate surrogate) {
  const Eigen::Index n = w.A.rows();
  const Vector ones = Vector::Ones(n);
  const Matrix At = w.A - ones * phi.transpose();
  const Matrix Bt = w.B - pi_k * ones.transpose();
  auto measure = [&](const Matrix& m) {
    return surrogate == Surrogate::spectral_radius ? spectral_radius(m) : spectral_norm(m);
  };
  ContractionEstimates est;
  est.surrogate = surrogate;
  est.sigma_A = measure(At);
  est.sigma_B = measure(Bt);
  est.xi = spectral_norm(Matrix::Identity(n, n) - pi_k1 * ones.transpose());
  est.phi_norm = phi.norm();
  est.pi_norm = pi_k.norm();
  est.A_norm = spectral_norm(w.A);
  est.A_minus_I_norm = spectral_norm(w.A - Matrix::Identity(n, n));
  est.alpha_check = steps.max();
  est.alpha_tilde = phi.dot(steps.as_vector().cwiseProduct(pi_k));
  est.theta = est.alpha_tilde / est.alpha_check;
  return est;
}

ProblemConstants problem_constants(const ObjectiveEnsemble& objective) {
  ProblemConstants pc;
  pc.n = objective.size();
  pc.L = objective.L();
  pc.mu = objective.mu();
  const Vector x_star = objective.global_optimum();
  const Matrix at_opt = Vector::Ones(static_cast<Eigen::Index>(pc.n)) * x_star.transpose();
  pc.grad_norm_at_optimum = objective.stacked_gradient(at_opt).norm();
  return pc;
}

LinearBound build_C(const ContractionEstimates& e, double lam_k, double lam_k1,
                    const ProblemConstants& pc) {
  const double rn = std::sqrt(static_cast<double>(pc.n));
  const double L = pc.L;
  const double ac = e.alpha_check;
  const double dl = lam_k - lam_k1;
  const double shared = rn * ac * L * lam_k * lam_k1 * e.A_norm * e.pi_norm;

  LinearBound out;
  auto& C = out.C;
  C(0, 0) = 1.0 - pc.mu_hat() * e.alpha_tilde * lam_k;
  C(0, 1) = rn * L * e.alpha_tilde * lam_k;
  C(0, 2) = ac * e.phi_norm;
  C(1, 0) = ac * pc.L_hat() * e.sigma_A * e.pi_norm * lam_k;
  C(1, 1) = e.sigma_A * (1.0 + rn * ac * L * e.pi_norm * lam_k);
  C(1, 2) = ac * e.delta_AB * e.sigma_A;
  C(2, 0) = rn * L * e.delta_B2 * e.xi * (shared + dl);
  C(2, 1) = L * e.delta_B2 * e.xi * (shared + lam_k1 * e.A_minus_I_norm + dl);
  C(2, 2) = e.sigma_B + ac * L * e.delta_B2 * e.xi * lam_k1 * e.A_norm;
  out.d = Eigen::Vector3d(0.0, 0.0, e.delta_B2 * e.xi * dl * pc.grad_norm_at_optimum);
  out.precondition_ok = e.alpha_tilde * lam_k <= 2.0 / (pc.mu_hat() + pc.L_hat());
  return out;
}

double spectral_radius_3x3(const Eigen::Matrix3d& M) {
  Eigen::EigenSolver<Eigen::Matrix3d> solver(M, false);
  return solver.eigenvalues().cwiseAbs().maxCoeff();
}

bool det_criterion(const Eigen::Matrix3d& M, double c_star) {
  return (c_star * Eigen::Matrix3d::Identity() - M).determinant() > 0.0;
}

namespace {

AdmissibilityStep admissibility_step(std::size_t k, const ContractionEstimates& e, double lam_k,
                                     double lam_k1, const ProblemConstants& pc) {
  const double n = static_cast<double>(pc.n);
  const double rn = std::sqrt(n);
  const double L = pc.L;
  const double mu = pc.mu;
  const double dl = lam_k - lam_k1;
  const double sA = e.sigma_A;
  const double sB = e.sigma_B;
  const double dB = e.delta_B2;
  const double dAB = e.delta_AB;
  const double xi = e.xi;
  const double ph = e.phi_norm;
  const double pa = e.pi_norm;  // pi in the A-norm surrogate
  const double p2 = e.pi_norm;
  const double An = e.A_norm;
  const double th = e.theta;

  AdmissibilityStep s;
  s.k = k;
  s.e1 = n * rn * L * L * sA * dB * xi * An * p2 * lam_k * lam_k * lam_k1 *
         (L * dAB * th + L * ph * pa + mu * dAB * th);
  s.e2 = n * L * sA * dB * xi * lam_k * dl * ((L + mu) * dAB * th + L * ph * pa) +
         n * L * dB * xi * lam_k * lam_k1 *
             (0.5 * L * ph * (1.0 - sA) * An * p2 + (L * sA * ph * pa + mu * dAB * sA * th) * (An + 1.0)) +
         0.5 * n * rn * L * L * sA * pa * (1.0 - sB) * th * lam_k * lam_k;
  s.e3 = 0.25 * pc.mu_hat() * (1.0 - sA) * (1.0 - sB) * th * lam_k -
         0.5 * rn * L * dB * xi * ph * (1.0 - sA) * dl;

  s.ratio = lam_k1 / lam_k;
  s.ratio_lower = 1.0 - rn * mu * (1.0 - sB) * th / (2.0 * L * dB * xi * ph);
  s.ratio_ok = s.ratio_lower < s.ratio && s.ratio <= 1.0;

  s.terms[0] = safe_div(2.0, th * lam_k * (pc.mu_hat() + pc.L_hat()));
  s.terms[1] = safe_div(1.0 - sA, 2.0 * rn * L * sA * lam_k * pa);
  s.terms[2] = safe_div(1.0 - sB, 2.0 * L * dB * xi * lam_k1 * An);
  s.terms[3] = s.e3 > 0.0 ? 2.0 * s.e3 / (s.e2 + std::sqrt(s.e2 * s.e2 + 4.0 * s.e1 * s.e3)) : 0.0;
  const auto it = std::min_element(s.terms.begin(), s.terms.end());
  s.bound = *it;
  s.binding_term = static_cast<int>(it - s.terms.begin()) + 1;
  return s;
}

}  // namespace

AdmissibilityReport step_size_admissibility(const Scenario& sc, std::size_t horizon,
                                           Surrogate surrogate) {
  require_static_wgt(sc, "admissibility check");
  if (horizon == 0) throw DomainError("admissibility horizon must be >= 1");
  const WeightPair w = sc.weights.matrices_at(1);
  const Vector phi = phi_static(w.A);
  const ProblemConstants pc = problem_constants(sc.objective);

  AdmissibilityReport rep;
  rep.surrogate = surrogate;
  rep.horizon = horizon;
  rep.sum_diverges = sc.lambda.sum_diverges();
  rep.vanishes = sc.lambda.vanishes();
  rep.alpha_check = sc.steps.max();
  rep.steps.reserve(horizon);

  Vector pi = Vector::Constant(w.A.rows(), 1.0 / static_cast<double>(w.A.rows()));
  for (std::size_t k = 1; k <= horizon; ++k) {
    const Vector pi_next = w.B * pi;
    const auto est = estimate_contraction(w, phi, pi, pi_next, sc.steps, surrogate);
    rep.steps.push_back(admissibility_step(k, est, sc.lambda(k), sc.lambda(k + 1), pc));
    pi = pi_next;
  }

  std::size_t first = horizon + 1;
  for (std::size_t k = horizon; k >= 1 && rep.steps[k - 1].ratio_ok; --k) first = k;
  if (first <= horizon) {
    rep.window_from = first;
    rep.alpha_bound = kInf;
    for (std::size_t k = first; k <= horizon; ++k) {
      const auto& s = rep.steps[k - 1];
      if (s.bound < rep.alpha_bound) {
        rep.alpha_bound = s.bound;
        rep.binding_term = s.binding_term;
      }
    }
    rep.alpha_ok = rep.alpha_check < rep.alpha_bound;
  }
  rep.admissible = rep.sum_diverges && rep.vanishes && rep.window_from.has_value() && rep.alpha_ok;
  return rep;
}

std::vector<double> c_matrix_radii(const Scenario& sc, std::size_t horizon, Surrogate surrogate) {
  require_static_wgt(sc, "C_k radii");
  const WeightPair w = sc.weights.matrices_at(1);
  const Vector phi = phi_static(w.A);
  const ProblemConstants pc = problem_constants(sc.objective);
  std::vector<double> out;
  out.reserve(horizon);
  Vector pi = Vector::Constant(w.A.rows(), 1.0 / static_cast<double>(w.A.rows()));
  for (std::size_t k = 1; k <= horizon; ++k) {
    const Vector pi_next = w.B * pi;
    const auto est = estimate_contraction(w, phi, pi, pi_next, sc.steps, surrogate);
    out.push_back(spectral_radius_3x3(build_C(est, sc.lambda(k), sc.lambda(k + 1), pc).C));
    pi = pi_next;
  }
  return out;
}

SequenceLimits decay_sequence_sums(double c, const LambdaSchedule& lambda, std::span<const double> r,
                                std::size_t horizon) {
  if (!(c > 0.0)) throw DomainError("c must be > 0");
  if (r.size() < horizon) throw DomainError("r must provide at least K entries");
  SequenceLimits out;
  for (std::size_t k = 1; k <= horizon; ++k) {
    const double factor = 1.0 - c * lambda(k);
    if (factor < 0.0) {
      throw DomainError("1 - c lambda_k < 0 at k = " + std::to_string(k));
    }
    // T_k = factor_k T_{k-1} + 1 reproduces sum_i prod_{j=i+1..k}.
    out.product *= factor;
    out.tail_sum = factor * out.tail_sum + 1.0;
    out.weighted_sum = factor * out.weighted_sum + r[k - 1];
  }
  return out;
}

SlackReport bound_slack(const Scenario& sc, const RunResult& result, Surrogate surrogate) {
  require_static_wgt(sc, "slack measurement");
  const auto& traj = result.trajectory;
  if (traj.size() < 2) throw DomainError("slack measurement needs a recorded trajectory");
  const WeightPair w = sc.weights.matrices_at(1);
  const Vector phi = phi_static(w.A);
  const ProblemConstants pc = problem_constants(sc.objective);
  const Vector& x_star = result.report.x_star;

  SlackReport rep;
  Vector pi = Vector::Constant(w.A.rows(), 1.0 / static_cast<double>(w.A.rows()));
  MetricVector cur = metric_vector(traj[0], x_star, phi, pi);
  for (std::size_t k = 1; k < traj.size(); ++k) {
    const Vector pi_next = w.B * pi;
    const MetricVector next = metric_vector(traj[k], x_star, phi, pi_next);
    const auto est = estimate_contraction(w, phi, pi, pi_next, sc.steps, surrogate);
    const LinearBound lb = build_C(est, sc.lambda(k), sc.lambda(k + 1), pc);
    if (lb.precondition_ok) {
      const Eigen::Vector3d rhs = lb.C * Eigen::Vector3d(cur.s1, cur.s2, cur.s3) + lb.d;
      const std::array<double, 3> lhs{next.s1, next.s2, next.s3};
      for (int c = 0; c < 3; ++c) {
        if (rhs(c) > 0.0) rep.max_ratio[c] = std::max(rep.max_ratio[c], lhs[c] / rhs(c));
      }
      ++rep.evaluated;
    } else {
      ++rep.skipped;
    }
    pi = pi_next;
    cur = next;
  }
  return rep;
}

}  // namespace wgt
