#include "wgt/engine.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "wgt/errors.hpp"
#include "wgt/rng.hpp"

namespace wgt {

std::string to_string(Mode m) { return m == Mode::ab ? "AB" : "WGT"; }

Mode mode_from_string(const std::string& s) {
  if (s == "AB" || s == "ab") return Mode::ab;
  if (s == "WGT" || s == "wgt") return Mode::wgt;
  throw ConfigError("unknown algorithm mode '" + s + "' (expected AB or WGT)");
}

LambdaSchedule LambdaSchedule::decaying(double exponent, double offset) {
  if (!(exponent > 0.0)) throw ConfigError("lambda exponent e must be > 0");
  if (!(offset >= 0.0)) throw ConfigError("lambda offset m must be >= 0");
  LambdaSchedule s;
  s.exponent_ = exponent;
  s.offset_ = offset;
  return s;
}

LambdaSchedule LambdaSchedule::constant(double value) {
  if (!(value > 0.0) || !std::isfinite(value)) throw ConfigError("constant lambda must be > 0");
  LambdaSchedule s;
  s.constant_ = value;
  return s;
}

double LambdaSchedule::operator()(std::size_t k) const {
  if (k == 0) throw DomainError("lambda is indexed from k = 1");
  if (constant_) return *constant_;
  return 1.0 / (std::pow(static_cast<double>(k), exponent_) + offset_);
}

StepSizes::StepSizes(std::vector<double> alpha) : alpha_(std::move(alpha)) {
  if (alpha_.empty()) throw ConfigError("step sizes must not be empty");
  for (double a : alpha_) {
    if (!(a > 0.0) || !std::isfinite(a)) throw ConfigError("step sizes must be positive");
  }
  max_ = *std::max_element(alpha_.begin(), alpha_.end());
}

StepSizes StepSizes::uniform(std::size_t n, double alpha) {
  return StepSizes(std::vector<double>(n, alpha));
}

bool StepSizes::is_uniform() const noexcept {
  return std::all_of(alpha_.begin(), alpha_.end(), [&](double a) { return a == alpha_.front(); });
}

Vector StepSizes::as_vector() const {
  return Eigen::Map<const Vector>(alpha_.data(), static_cast<Eigen::Index>(alpha_.size()));
}

NetworkState initial_state(const ObjectiveEnsemble& objective, const Matrix& x1, double weight1) {
  NetworkState s;
  s.k = 1;
  s.x = x1;
  s.grad = objective.stacked_gradient(x1);
  s.y = weight1 * s.grad;
  return s;
}

namespace {

void check_shapes(const DirectedGraph& g, const NetworkState& s, const WeightPair& w) {
  const auto n = static_cast<Eigen::Index>(g.size());
  if (s.x.rows() != n || s.y.rows() != n || s.grad.rows() != n || s.x.cols() != s.y.cols() ||
      s.grad.cols() != s.x.cols()) {
    throw DomainError("network state does not match the graph size");
  }
  if (w.A.rows() != n || w.A.cols() != n || w.B.rows() != n || w.B.cols() != n) {
    throw DomainError("weight matrices do not match the graph size");
  }
}

}  // namespace

IterationMessages emit_messages(const DirectedGraph& g, const NetworkState& s, const WeightPair& w,
                                Mode mode, const StepSizes& steps) {
  check_shapes(g, s, w);
  if (steps.size() != g.size()) throw DomainError("one step size per agent is required");
  const auto& edges = g.edges();
  const auto m = static_cast<Eigen::Index>(edges.size());
  IterationMessages out{Matrix(m, s.x.cols()), Matrix(m, s.x.cols())};
  for (Eigen::Index e = 0; e < m; ++e) {
    const auto i = static_cast<Eigen::Index>(edges[e].from);
    const auto l = static_cast<Eigen::Index>(edges[e].to);
    if (mode == Mode::ab) {
      out.x.row(e) = s.x.row(i);
    } else {
      out.x.row(e) = s.x.row(i) - steps[edges[e].from] * s.y.row(i);
    }
    out.y.row(e) = w.B(l, i) * s.y.row(i);
  }
  return out;
}

NetworkState absorb_messages(const DirectedGraph& g, const NetworkState& s,
                             const IterationMessages& received, const WeightPair& w, Mode mode,
                             const StepSizes& steps, double weight_k, double weight_k1,
                             const ObjectiveEnsemble& objective) {
  check_shapes(g, s, w);
  const auto& edges = g.edges();
  const auto p = s.x.cols();
  if (received.x.rows() != static_cast<Eigen::Index>(edges.size()) ||
      received.y.rows() != static_cast<Eigen::Index>(edges.size()) || received.x.cols() != p ||
      received.y.cols() != p) {
    throw DomainError("message block does not match the channel list");
  }

  // Incoming channel indices per agent, ascending by sender (edges are sorted
  // by sender, so a stable scan keeps that order).
  std::vector<std::vector<std::size_t>> inbox(g.size());
  for (std::size_t e = 0; e < edges.size(); ++e) inbox[edges[e].to].push_back(e);

  NetworkState next;
  next.k = s.k + 1;
  next.x.resize(s.x.rows(), p);
  next.y.resize(s.y.rows(), p);
  for (AgentIndex i = 0; i < g.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    Eigen::RowVectorXd xi;
    if (mode == Mode::ab) {
      xi = w.A(r, r) * s.x.row(r);
      for (std::size_t e : inbox[i]) {
        xi += w.A(r, static_cast<Eigen::Index>(edges[e].from)) * received.x.row(static_cast<Eigen::Index>(e));
      }
      xi -= steps[i] * s.y.row(r);
    } else {
      xi = w.A(r, r) * (s.x.row(r) - steps[i] * s.y.row(r));
      for (std::size_t e : inbox[i]) {
        xi += w.A(r, static_cast<Eigen::Index>(edges[e].from)) * received.x.row(static_cast<Eigen::Index>(e));
      }
    }
    next.x.row(r) = xi;
  }
  next.grad = objective.stacked_gradient(next.x);
  for (AgentIndex i = 0; i < g.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    Eigen::RowVectorXd yi = w.B(r, r) * s.y.row(r);
    for (std::size_t e : inbox[i]) yi += received.y.row(static_cast<Eigen::Index>(e));
    yi += weight_k1 * next.grad.row(r) - weight_k * s.grad.row(r);
    next.y.row(r) = yi;
  }
  return next;
}

NetworkState ab_step(const DirectedGraph& g, const NetworkState& s, const WeightPair& w,
                     double alpha, const ObjectiveEnsemble& objective, IterationMessages* sent) {
  const StepSizes steps = StepSizes::uniform(g.size(), alpha);
  IterationMessages msgs = emit_messages(g, s, w, Mode::ab, steps);
  NetworkState next = absorb_messages(g, s, msgs, w, Mode::ab, steps, 1.0, 1.0, objective);
  if (sent) *sent = std::move(msgs);
  return next;
}

NetworkState wgt_step(const DirectedGraph& g, const NetworkState& s, const WeightPair& w,
                      const StepSizes& steps, const LambdaSchedule& lambda,
                      const ObjectiveEnsemble& objective, IterationMessages* sent) {
  const double lam_k = lambda(s.k);
  const double lam_k1 = lambda(s.k + 1);
  if (lam_k1 > lam_k) {
    throw ScheduleError("lambda increases from iteration " + std::to_string(s.k) + " to " +
                        std::to_string(s.k + 1));
  }
  IterationMessages msgs = emit_messages(g, s, w, Mode::wgt, steps);
  NetworkState next = absorb_messages(g, s, msgs, w, Mode::wgt, steps, lam_k, lam_k1, objective);
  if (sent) *sent = std::move(msgs);
  return next;
}

void validate(const Scenario& sc) {
  const std::size_t n = sc.graph().size();
  if (sc.objective.size() != n) {
    throw ConfigError("objective has " + std::to_string(sc.objective.size()) +
                      " agents but the graph has " + std::to_string(n));
  }
  if (sc.steps.size() != n) {
    throw ConfigError("alpha list has " + std::to_string(sc.steps.size()) + " entries, expected " +
                      std::to_string(n));
  }
  if (sc.mode == Mode::ab && !sc.steps.is_uniform()) {
    throw ConfigError("the AB baseline uses one common step size");
  }
  if (!(sc.objective.mu() > 0.0)) throw ConfigError("objective is not strongly convex (mu <= 0)");
  if (!(sc.threshold > 0.0)) throw ConfigError("residual threshold must be > 0");
}

Matrix initial_states(std::size_t n, std::size_t p, std::uint64_t seed) {
  Rng rng(seed);
  Matrix x(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(p));
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    for (Eigen::Index j = 0; j < x.cols(); ++j) x(i, j) = rng.uniform();
  }
  return x;
}

namespace {

struct MetricContext {
  Matrix opt;  // 1 x*^T
  double initial_sq = 1.0;
  std::optional<Vector> phi;
};

MetricRow measure(const MetricContext& ctx, const NetworkState& s, const Vector& pi, double weight) {
  const auto n = s.x.rows();
  MetricRow row;
  row.k = s.k;
  row.weight = weight;
  row.residual = (s.x - ctx.opt).squaredNorm() / ctx.initial_sq;
  const Eigen::RowVectorXd xbar =
      ctx.phi ? Eigen::RowVectorXd(ctx.phi->transpose() * s.x) : Eigen::RowVectorXd(s.x.colwise().mean());
  row.consensus_error = (s.x - Vector::Ones(n) * xbar).norm();
  const Eigen::RowVectorXd yhat = s.y.colwise().sum();
  row.tracking_error = (s.y - pi * yhat).norm();
  return row;
}

void guard(const NetworkState& s, const MetricRow& row) {
  if (!s.x.allFinite() || !s.y.allFinite() || !std::isfinite(row.residual) ||
      row.residual > kDivergenceResidual) {
    throw DivergenceError(s.k, "run diverged at iteration " + std::to_string(s.k) +
                                   " (relative residual " + std::to_string(row.residual) + ")");
  }
}

}  // namespace

RunResult run(const Scenario& sc, const RunOptions& options) {
  validate(sc);
  const DirectedGraph& g = sc.graph();
  const std::size_t n = g.size();
  const std::size_t p = sc.objective.dim();

  MetricContext ctx;
  const Vector x_star = sc.objective.global_optimum();
  ctx.opt = Vector::Ones(static_cast<Eigen::Index>(n)) * x_star.transpose();
  if (sc.weights.is_static()) ctx.phi = phi_static(sc.weights.matrices_at(1).A);

  RunResult out;
  out.report.mode = sc.mode;
  out.report.phi_weighted = ctx.phi.has_value();
  out.report.x_star = x_star;
  out.transcript.mode = sc.mode;
  out.transcript.agents = n;
  out.transcript.channels = g.edges();
  out.transcript.dim = p;
  if (options.record_transcript) out.transcript.iterations.reserve(sc.iterations);
  if (options.record_trajectory) out.trajectory.reserve(sc.iterations + 1);
  out.report.rows.reserve(sc.iterations + 1);

  NetworkState state = initial_state(sc.objective, initial_states(n, p, sc.init_seed), sc.weight(1));
  const double initial_sq = (state.x - ctx.opt).squaredNorm();
  ctx.initial_sq = initial_sq > 0.0 ? initial_sq : 1.0;
  Vector pi = Vector::Constant(static_cast<Eigen::Index>(n), 1.0 / static_cast<double>(n));

  auto record = [&](const NetworkState& s) {
    MetricRow row = measure(ctx, s, pi, sc.weight(s.k));
    guard(s, row);
    if (!out.report.iterations_to_threshold && row.residual <= sc.threshold) {
      out.report.iterations_to_threshold = s.k;
    }
    out.report.rows.push_back(row);
    if (options.record_trajectory) out.trajectory.push_back(s);
  };
  record(state);

  for (std::size_t step = 0; step < sc.iterations; ++step) {
    const WeightPair w = sc.weights.matrices_at(state.k);
    IterationMessages msgs;
    NetworkState next = sc.mode == Mode::ab
                            ? ab_step(g, state, w, sc.steps[0], sc.objective, &msgs)
                            : wgt_step(g, state, w, sc.steps, sc.lambda, sc.objective, &msgs);
    if (options.record_transcript) out.transcript.iterations.push_back(std::move(msgs));
    pi = w.B * pi;
    state = std::move(next);
    record(state);
  }
  out.report.terminal_residual = out.report.rows.back().residual;
  return out;
}

std::vector<NetworkState> replay(const Scenario& sc, const Transcript& t) {
  validate(sc);
  const DirectedGraph& g = sc.graph();
  if (t.channels != g.edges()) throw AuditError("transcript channels do not match the graph");
  if (t.mode != sc.mode) throw AuditError("transcript mode does not match the scenario");

  std::vector<NetworkState> states;
  states.reserve(t.size() + 1);
  states.push_back(initial_state(sc.objective, initial_states(g.size(), sc.objective.dim(), sc.init_seed),
                                 sc.weight(1)));
  for (std::size_t k = 1; k <= t.size(); ++k) {
    const WeightPair w = sc.weights.matrices_at(k);
    const StepSizes steps = sc.mode == Mode::ab ? StepSizes::uniform(g.size(), sc.steps[0]) : sc.steps;
    states.push_back(absorb_messages(g, states.back(), t.at(k), w, sc.mode, steps, sc.weight(k),
                                     sc.weight(k + 1), sc.objective));
  }
  return states;
}

}  // namespace wgt
