#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "wgt/engine.hpp"
#include "wgt/linalg.hpp"

namespace wgt {

// The contraction analysis is stated in tailored norms that exist but are not
// computable. Everything here evaluates it in 2-norm surrogates with the
// norm-equivalence constants set to 1, so the inequalities are checked only
// up to a recorded slack factor.

struct MetricVector {
  std::size_t k = 1;
  double s1 = 0.0;  // ||xbar^k - x*||
  double s2 = 0.0;  // ||x^k - 1 xbar^k||
  double s3 = 0.0;  // ||y^k - pi_k yhat^k||
};

/// xbar = phi^T x when phi is given, the plain mean otherwise; yhat = 1^T y.
MetricVector metric_vector(const NetworkState& s, const Vector& x_star,
                           const std::optional<Vector>& phi, const Vector& pi_k);

enum class Surrogate { spectral_radius, spectral_norm };
std::string to_string(Surrogate s);

struct ContractionEstimates {
  Surrogate surrogate = Surrogate::spectral_radius;
  double sigma_A = 0.0;  // A - 1 phi^T
  double sigma_B = 0.0;  // B - pi_k 1^T
  double xi = 0.0;       // ||I - pi_{k+1} 1^T||
  double delta_AB = 1.0;
  double delta_B2 = 1.0;
  double phi_norm = 0.0;
  double pi_norm = 0.0;  // ||pi_k||, used for both the A-norm and the 2-norm
  double A_norm = 0.0;
  double A_minus_I_norm = 0.0;
  double alpha_check = 0.0;  // max_i alpha_i
  double alpha_tilde = 0.0;  // phi^T diag(alpha) pi_k
  double theta = 0.0;        // alpha_tilde / alpha_check
};

ContractionEstimates estimate_contraction(const WeightPair& w, const Vector& phi,
                                          const Vector& pi_k, const Vector& pi_k1,
                                          const StepSizes& steps,
                                          Surrogate surrogate = Surrogate::spectral_radius);

struct ProblemConstants {
  std::size_t n = 1;
  double L = 0.0;
  double mu = 0.0;
  double grad_norm_at_optimum = 0.0;  // ||grad F(1 x*)||

  double L_hat() const noexcept { return static_cast<double>(n) * L; }
  double mu_hat() const noexcept { return static_cast<double>(n) * mu; }
};

ProblemConstants problem_constants(const ObjectiveEnsemble& objective);

struct LinearBound {
  Eigen::Matrix3d C;
  Eigen::Vector3d d;
  bool precondition_ok = true;  // alpha_tilde lambda_k <= 2 / (mu_hat + L_hat)
};

/// s^{k+1} <= C_k s^k + d_k with every entry evaluated from the surrogates.
LinearBound build_C(const ContractionEstimates& est, double lam_k, double lam_k1,
                    const ProblemConstants& pc);

double spectral_radius_3x3(const Eigen::Matrix3d& M);

/// det(c* I - M) > 0. For nonnegative irreducible M with diagonal below c*
/// this is equivalent to rho(M) < c*.
bool det_criterion(const Eigen::Matrix3d& M, double c_star);

struct AdmissibilityStep {
  std::size_t k = 1;
  double e1 = 0.0;
  double e2 = 0.0;
  double e3 = 0.0;
  double ratio = 1.0;        // lambda_{k+1} / lambda_k
  double ratio_lower = 0.0;  // the window's open lower end
  bool ratio_ok = false;
  std::array<double, 4> terms{};  // the four step-size caps (inf when vacuous)
  double bound = 0.0;             // min of the terms (0 when e3 <= 0)
  int binding_term = 0;           // 1-based index of the smallest term
};

struct AdmissibilityReport {
  Surrogate surrogate = Surrogate::spectral_radius;
  std::size_t horizon = 0;
  std::vector<AdmissibilityStep> steps;
  bool sum_diverges = false;
  bool vanishes = false;
  std::optional<std::size_t> window_from;  // first k' with the ratio window holding on [k', K]
  double alpha_bound = 0.0;                // min bound over [k', K]
  int binding_term = 0;
  double alpha_check = 0.0;
  bool alpha_ok = false;
  bool admissible = false;
};

/// Step-size cap and lambda-ratio window for a static-weight scenario over
/// k = 1..horizon. Window violations are reported, never thrown.
AdmissibilityReport step_size_admissibility(const Scenario& sc, std::size_t horizon,
                                           Surrogate surrogate = Surrogate::spectral_radius);

/// rho(C_k) for k = 1..horizon of a static-weight scenario.
std::vector<double> c_matrix_radii(const Scenario& sc, std::size_t horizon,
                                   Surrogate surrogate = Surrogate::spectral_radius);

struct SequenceLimits {
  double product = 1.0;       // prod_{i<=K} (1 - c lambda_i)
  double tail_sum = 0.0;      // sum_{i<=K} prod_{i<j<=K} (1 - c lambda_j)
  double weighted_sum = 0.0;  // sum_{i<=K} prod_{i<j<=K} (1 - c lambda_j) r_i
};

/// Throws DomainError if 1 - c lambda_k < 0 for some k <= K or r is shorter than K.
SequenceLimits decay_sequence_sums(double c, const LambdaSchedule& lambda, std::span<const double> r,
                                std::size_t horizon);

struct SlackReport {
  std::array<double, 3> max_ratio{};  // max_k s^{k+1}_c / (C_k s^k + d_k)_c
  std::size_t evaluated = 0;
  std::size_t skipped = 0;  // iterations where the step-size precondition fails
};

/// Measures how far the recorded metrics sit from the surrogate linear bound.
SlackReport bound_slack(const Scenario& sc, const RunResult& result,
                         Surrogate surrogate = Surrogate::spectral_radius);

}  // namespace wgt
