#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "wgt/graph.hpp"
#include "wgt/linalg.hpp"
#include "wgt/objective.hpp"
#include "wgt/weights.hpp"

namespace wgt {

enum class Mode {
  ab,   // push-pull gradient tracking, y tracks the plain gradient sum
  wgt,  // weighted gradient tracking, y tracks lambda_k times the gradient sum
};

std::string to_string(Mode m);
Mode mode_from_string(const std::string& s);

/// lambda_k = 1 / (k^e + m), or a constant (testing only: it never vanishes,
/// so it offers no protection and is outside the convergence theory).
class LambdaSchedule {
 public:
  static LambdaSchedule decaying(double exponent, double offset);
  static LambdaSchedule constant(double value);

  double operator()(std::size_t k) const;

  bool is_constant() const noexcept { return constant_.has_value(); }
  double exponent() const noexcept { return exponent_; }
  double offset() const noexcept { return offset_; }
  double constant_value() const noexcept { return constant_.value_or(0.0); }

  /// sum_k lambda_k = infinity (exponent <= 1, or constant).
  bool sum_diverges() const noexcept { return is_constant() || exponent_ <= 1.0; }
  bool vanishes() const noexcept { return !is_constant(); }

 private:
  LambdaSchedule() = default;

  double exponent_ = 1.0;
  double offset_ = 0.0;
  std::optional<double> constant_;
};

/// Per-agent step sizes alpha_i > 0.
class StepSizes {
 public:
  explicit StepSizes(std::vector<double> alpha);
  static StepSizes uniform(std::size_t n, double alpha);

  std::size_t size() const noexcept { return alpha_.size(); }
  double operator[](std::size_t i) const { return alpha_.at(i); }
  const std::vector<double>& values() const noexcept { return alpha_; }
  double max() const noexcept { return max_; }
  bool is_uniform() const noexcept;
  Vector as_vector() const;

 private:
  std::vector<double> alpha_;
  double max_ = 0.0;
};

/// x, y, and the cached local gradients grad F(x^k), one row per agent.
struct NetworkState {
  std::size_t k = 1;
  Matrix x;
  Matrix y;
  Matrix grad;
};

/// Everything placed on the channels during one iteration. Row e of each
/// matrix belongs to channel graph.edges()[e] = (i -> l):
///   x: AB sends x_i, WGT sends x_i - alpha_i y_i
///   y: [B_k]_li y_i
/// Self-weighted terms never appear here.
struct IterationMessages {
  Matrix x;
  Matrix y;
};

struct Transcript {
  Mode mode = Mode::wgt;
  std::size_t agents = 0;
  std::vector<Edge> channels;
  std::size_t dim = 0;
  std::vector<IterationMessages> iterations;  // iterations[k - 1] holds iteration k

  std::size_t size() const noexcept { return iterations.size(); }
  const IterationMessages& at(std::size_t k) const { return iterations.at(k - 1); }
};

NetworkState initial_state(const ObjectiveEnsemble& objective, const Matrix& x1, double weight1);

IterationMessages emit_messages(const DirectedGraph& g, const NetworkState& s, const WeightPair& w,
                                Mode mode, const StepSizes& steps);

/// Each agent combines what it received with its private terms. The sums run
/// self first, then in-neighbors in ascending order, so a replay from a
/// transcript reproduces the original trajectory bit for bit.
NetworkState absorb_messages(const DirectedGraph& g, const NetworkState& s,
                             const IterationMessages& received, const WeightPair& w, Mode mode,
                             const StepSizes& steps, double weight_k, double weight_k1,
                             const ObjectiveEnsemble& objective);

/// x_i+ = sum_j A_ij x_j - alpha y_i ; y_i+ = sum_j B_ij y_j + grad f_i(x_i+) - grad f_i(x_i)
NetworkState ab_step(const DirectedGraph& g, const NetworkState& s, const WeightPair& w,
                     double alpha, const ObjectiveEnsemble& objective,
                     IterationMessages* sent = nullptr);

/// x_i+ = sum_j A_ij (x_j - alpha_j y_j)
/// y_i+ = sum_j B_ij y_j + lambda_{k+1} grad f_i(x_i+) - lambda_k grad f_i(x_i)
/// Throws ScheduleError if lambda_{k+1} > lambda_k.
NetworkState wgt_step(const DirectedGraph& g, const NetworkState& s, const WeightPair& w,
                      const StepSizes& steps, const LambdaSchedule& lambda,
                      const ObjectiveEnsemble& objective, IterationMessages* sent = nullptr);

struct Scenario {
  WeightSchedule weights;
  ObjectiveEnsemble objective;
  Mode mode = Mode::wgt;
  StepSizes steps;
  LambdaSchedule lambda = LambdaSchedule::decaying(0.8, 10.0);
  std::size_t iterations = 1000;
  std::uint64_t init_seed = 0;
  double threshold = 1e-6;

  const DirectedGraph& graph() const noexcept { return weights.graph(); }
  /// Gradient weight at iteration k: 1 in AB mode, lambda_k in WGT mode.
  double weight(std::size_t k) const { return mode == Mode::ab ? 1.0 : lambda(k); }
};

/// Throws ConfigError when the pieces of a scenario do not fit together.
void validate(const Scenario& sc);

/// x^1: every entry U[0,1], drawn row-major from Rng(seed).
Matrix initial_states(std::size_t n, std::size_t p, std::uint64_t seed);

struct MetricRow {
  std::size_t k = 1;
  double residual = 0.0;         // ||x^k - 1 x*||^2 / ||x^1 - 1 x*||^2
  double consensus_error = 0.0;  // ||x^k - 1 xbar^k||
  double tracking_error = 0.0;   // ||y^k - pi_k 1^T y^k||
  double weight = 1.0;           // lambda_k (1 in AB mode)
};

struct RunReport {
  Mode mode = Mode::wgt;
  bool phi_weighted = false;  // xbar uses the Perron vector phi (else the plain mean)
  Vector x_star;
  std::vector<MetricRow> rows;
  std::optional<std::size_t> iterations_to_threshold;
  double terminal_residual = 0.0;
};

struct RunOptions {
  bool record_transcript = true;
  bool record_trajectory = true;
};

struct RunResult {
  RunReport report;
  Transcript transcript;
  std::vector<NetworkState> trajectory;  // trajectory[k - 1] is the state at iteration k
};

inline constexpr double kDivergenceResidual = 1e12;

/// Executes scenario.iterations steps. Throws DivergenceError when a state
/// turns non-finite or the residual exceeds kDivergenceResidual.
RunResult run(const Scenario& sc, const RunOptions& options = {});

/// Recomputes the trajectory from the transcript plus the agents' private
/// data (initial states, self weights, step sizes, local gradients).
std::vector<NetworkState> replay(const Scenario& sc, const Transcript& t);

}  // namespace wgt
