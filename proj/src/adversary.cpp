#include "wgt/adversary.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "wgt/errors.hpp"
#include "wgt/rng.hpp"

namespace wgt {

namespace {

// Neumaier-compensated running sum of vectors.
class CompensatedSum {
 public:
  explicit CompensatedSum(Eigen::Index dim) : sum_(Vector::Zero(dim)), carry_(Vector::Zero(dim)) {}

  void add(const Vector& v) {
    for (Eigen::Index j = 0; j < v.size(); ++j) {
      const double t = sum_(j) + v(j);
      if (std::abs(sum_(j)) >= std::abs(v(j))) {
        carry_(j) += (sum_(j) - t) + v(j);
      } else {
        carry_(j) += (v(j) - t) + sum_(j);
      }
      sum_(j) = t;
    }
  }

  Vector value() const { return sum_ + carry_; }

 private:
  Vector sum_;
  Vector carry_;
};

void check_transcript(const Transcript& t) {
  const auto m = static_cast<Eigen::Index>(t.channels.size());
  const auto p = static_cast<Eigen::Index>(t.dim);
  for (std::size_t k = 1; k <= t.size(); ++k) {
    const auto& it = t.at(k);
    if (it.x.rows() != m || it.y.rows() != m || it.x.cols() != p || it.y.cols() != p) {
      throw AuditError("incomplete transcript: iteration " + std::to_string(k) + " has " +
                       std::to_string(it.y.rows()) + " channel records, expected " +
                       std::to_string(m));
    }
  }
}

void check_target(const Transcript& t, AgentIndex i) {
  if (i >= t.agents) {
    throw DomainError("target agent " + std::to_string(i + 1) + " is not in the transcript");
  }
}

double relative_or_absolute(const Vector& estimate, const Vector& truth, bool* absolute) {
  const double err = (estimate - truth).norm();
  const double scale = truth.norm();
  if (scale < kRelativeErrorFloor) {
    if (absolute) *absolute = true;
    return err;
  }
  if (absolute) *absolute = false;
  return err / scale;
}

AuditReport finish(AuditReport r, const Matrix& M) {
  r.equations = static_cast<std::size_t>(M.rows());
  r.unknowns = static_cast<std::size_t>(M.cols());
  r.rank = static_cast<std::size_t>(numerical_rank(M));
  r.nullity = r.unknowns - r.rank;
  return r;
}

// Rows: (K-1) blocks of p equations. Columns: x^2..x^K, then `weights_per_step`
// mixing weights for each step. diffs[k-1] holds the (p x weights_per_step)
// coefficient block I_x,j^k - I_x,i^k.
Matrix state_system_matrix(std::size_t horizon, Eigen::Index p, Eigen::Index weights_per_step,
                           const std::vector<Matrix>& diffs) {
  const auto steps = static_cast<Eigen::Index>(horizon - 1);
  Matrix M = Matrix::Zero(steps * p, steps * p + steps * weights_per_step);
  for (Eigen::Index k = 0; k < steps; ++k) {
    M.block(k * p, k * p, p, p).setIdentity();
    M.block(k * p, steps * p + k * weights_per_step, p, weights_per_step) = -diffs[static_cast<std::size_t>(k)];
  }
  return M;
}

// Rows: K blocks of p equations. Columns: y^2..y^K, then g^2..g^{K+1}.
// weight(k) gives the gradient weight at iteration k.
template <class WeightFn>
Matrix gradient_system_matrix(std::size_t horizon, Eigen::Index p, WeightFn weight) {
  const auto K = static_cast<Eigen::Index>(horizon);
  const Eigen::Index ycols = (K - 1) * p;
  Matrix M = Matrix::Zero(K * p, ycols + K * p);
  const Matrix I = Matrix::Identity(p, p);
  auto ycol = [&](Eigen::Index k) { return (k - 2) * p; };          // y^k, k = 2..K
  auto gcol = [&](Eigen::Index k) { return ycols + (k - 2) * p; };  // g^k, k = 2..K+1
  for (Eigen::Index k = 1; k <= K; ++k) {
    const Eigen::Index row = (k - 1) * p;
    if (k + 1 <= K) M.block(row, ycol(k + 1), p, p) += I;
    if (k >= 2) M.block(row, ycol(k), p, p) -= I;
    M.block(row, gcol(k + 1), p, p) -= weight(static_cast<std::size_t>(k + 1)) * I;
    if (k >= 2) M.block(row, gcol(k), p, p) += weight(static_cast<std::size_t>(k)) * I;
  }
  return M;
}

constexpr std::uint64_t kGenericSeed = 0x6a09e667f3bcc908ULL;

}  // namespace

std::vector<Vector> z_stream(const Transcript& t, AgentIndex i) {
  check_transcript(t);
  check_target(t, i);
  std::vector<Vector> z;
  z.reserve(t.size());
  for (std::size_t k = 1; k <= t.size(); ++k) {
    const auto& msgs = t.at(k);
    Vector zk = Vector::Zero(static_cast<Eigen::Index>(t.dim));
    for (std::size_t e = 0; e < t.channels.size(); ++e) {
      const auto row = static_cast<Eigen::Index>(e);
      if (t.channels[e].from == i) zk += msgs.y.row(row).transpose();
      if (t.channels[e].to == i) zk -= msgs.y.row(row).transpose();
    }
    z.push_back(std::move(zk));
  }
  return z;
}

bool messages_stabilized(const Transcript& t, const DetectorSettings& settings) {
  check_transcript(t);
  if (settings.window == 0 || t.size() < settings.window + 1) return false;
  for (std::size_t k = t.size() - settings.window + 1; k <= t.size(); ++k) {
    const auto& now = t.at(k);
    const auto& before = t.at(k - 1);
    if (now.x.size() == 0) continue;
    const double dx = (now.x - before.x).cwiseAbs().maxCoeff();
    const double dy = (now.y - before.y).cwiseAbs().maxCoeff();
    if (!(std::max(dx, dy) < settings.tolerance)) return false;
  }
  return true;
}

GroundTruth ground_truth(const Scenario& sc, const RunResult& result, AgentIndex i) {
  if (result.trajectory.empty()) throw AuditError("ground truth needs the recorded trajectory");
  if (i >= sc.graph().size()) throw DomainError("target agent outside the scenario");
  const NetworkState& last = result.trajectory.back();
  const auto r = static_cast<Eigen::Index>(i);
  GroundTruth truth;
  truth.gradient_at_final = last.grad.row(r).transpose();
  truth.final_tracker = last.y.row(r).transpose();
  truth.final_weight = sc.weight(last.k);
  truth.gradient_at_optimum = sc.objective.agent(i).gradient(result.report.x_star);
  return truth;
}

AttackReport infer_gradient(const Transcript& t, AgentIndex i, const GroundTruth& truth,
                            const DetectorSettings& detector) {
  const auto z = z_stream(t, i);
  CompensatedSum total(static_cast<Eigen::Index>(t.dim));
  for (const auto& zk : z) total.add(zk);

  AttackReport r;
  r.target = i;
  r.mode = t.mode;
  r.iterations = t.size();
  r.converged = messages_stabilized(t, detector);
  r.inferred_gradient = total.value();
  r.true_gradient_at_final = truth.gradient_at_final;
  r.relative_error = relative_or_absolute(r.inferred_gradient, truth.gradient_at_final,
                                          &r.relative_error_is_absolute);
  if (truth.gradient_at_optimum) {
    r.relative_error_at_optimum =
        relative_or_absolute(r.inferred_gradient, *truth.gradient_at_optimum, nullptr);
  }
  r.leakage_bound = truth.final_weight * truth.gradient_at_final.norm() + truth.final_tracker.norm();
  // The bound is the triangle inequality on an exact identity; allow rounding.
  r.within_leakage_bound =
      r.inferred_gradient.norm() <= r.leakage_bound * (1.0 + 1e-9) + 1e-12;
  return r;
}

std::vector<double> leakage_identity_residuals(const Scenario& sc, const RunResult& result,
                                               AgentIndex i) {
  const Transcript& t = result.transcript;
  if (result.trajectory.size() != t.size() + 1) {
    throw AuditError("identity check needs the full trajectory and transcript");
  }
  const auto z = z_stream(t, i);
  const auto r = static_cast<Eigen::Index>(i);
  CompensatedSum total(static_cast<Eigen::Index>(t.dim));
  std::vector<double> out;
  out.reserve(z.size());
  for (std::size_t k = 1; k <= z.size(); ++k) {
    total.add(z[k - 1]);
    const NetworkState& s = result.trajectory[k];  // iteration k + 1
    const Vector lhs = s.y.row(r).transpose() + total.value() -
                       sc.weight(k + 1) * s.grad.row(r).transpose();
    out.push_back(lhs.norm());
  }
  return out;
}

std::string to_string(AuditKind k) { return k == AuditKind::state ? "state" : "gradient"; }

AuditReport audit_state_system(std::size_t horizon, std::size_t dim) {
  if (horizon < 2) throw DomainError("state audit needs K >= 2");
  if (dim == 0) throw DomainError("dimension must be positive");
  const auto p = static_cast<Eigen::Index>(dim);
  Rng rng(kGenericSeed, horizon * 1000 + dim);
  std::vector<Matrix> diffs;
  for (std::size_t k = 1; k < horizon; ++k) {
    Matrix d(p, 1);
    for (Eigen::Index j = 0; j < p; ++j) d(j, 0) = rng.uniform(-1.0, 1.0);
    diffs.push_back(std::move(d));
  }
  AuditReport r;
  r.kind = AuditKind::state;
  r.source = "generic";
  r.horizon = horizon;
  r.dim = dim;
  return finish(std::move(r), state_system_matrix(horizon, p, 1, diffs));
}

AuditReport audit_state_system(const Scenario& sc, const RunResult& result, AgentIndex target,
                               std::size_t horizon) {
  const Transcript& t = result.transcript;
  check_transcript(t);
  check_target(t, target);
  if (horizon < 2) throw DomainError("state audit needs K >= 2");
  if (t.size() < horizon - 1) throw AuditError("transcript is shorter than the audit horizon");

  AuditReport r;
  r.kind = AuditKind::state;
  r.source = "transcript";
  r.horizon = horizon;
  r.dim = t.dim;
  if (t.mode == Mode::ab) {
    // x_i^k travels verbatim on every out-channel of i.
    r.states_in_clear = true;
    r.equations = (horizon - 1) * t.dim;
    return r;
  }

  const auto out_it = std::find_if(t.channels.begin(), t.channels.end(),
                                   [&](const Edge& e) { return e.from == target; });
  if (out_it == t.channels.end()) throw AuditError("target agent sends nothing; nothing to audit");
  const auto own = static_cast<Eigen::Index>(out_it - t.channels.begin());
  std::vector<Eigen::Index> incoming;
  std::vector<AgentIndex> senders;
  for (std::size_t e = 0; e < t.channels.size(); ++e) {
    if (t.channels[e].to == target) {
      incoming.push_back(static_cast<Eigen::Index>(e));
      senders.push_back(t.channels[e].from);
    }
  }
  const auto p = static_cast<Eigen::Index>(t.dim);
  const auto w = static_cast<Eigen::Index>(incoming.size());

  std::vector<Matrix> diffs;
  Vector rhs((static_cast<Eigen::Index>(horizon) - 1) * p);
  for (std::size_t k = 1; k < horizon; ++k) {
    const auto& msgs = t.at(k);
    Matrix d(p, w);
    for (Eigen::Index c = 0; c < w; ++c) {
      d.col(c) = (msgs.x.row(incoming[static_cast<std::size_t>(c)]) - msgs.x.row(own)).transpose();
    }
    diffs.push_back(std::move(d));
    rhs.segment((static_cast<Eigen::Index>(k) - 1) * p, p) = msgs.x.row(own).transpose();
  }
  const Matrix M = state_system_matrix(horizon, p, w, diffs);
  r = finish(std::move(r), M);

  if (result.trajectory.size() >= horizon) {
    const auto steps = static_cast<Eigen::Index>(horizon - 1);
    Vector u(M.cols());
    const auto row = static_cast<Eigen::Index>(target);
    for (Eigen::Index k = 1; k <= steps; ++k) {
      u.segment((k - 1) * p, p) = result.trajectory[static_cast<std::size_t>(k)].x.row(row).transpose();
      const Matrix A = sc.weights.matrices_at(static_cast<std::size_t>(k)).A;
      for (Eigen::Index c = 0; c < w; ++c) {
        u(steps * p + (k - 1) * w + c) = A(row, static_cast<Eigen::Index>(senders[static_cast<std::size_t>(c)]));
      }
    }
    r.consistency_residual = (M * u - rhs).norm();
  }
  return r;
}

AuditReport audit_gradient_system(std::size_t horizon, std::size_t dim) {
  if (horizon < 1) throw DomainError("gradient audit needs K >= 1");
  if (dim == 0) throw DomainError("dimension must be positive");
  const auto lambda = LambdaSchedule::decaying(0.8, 10.0);
  AuditReport r;
  r.kind = AuditKind::gradient;
  r.source = "generic";
  r.horizon = horizon;
  r.dim = dim;
  return finish(std::move(r), gradient_system_matrix(horizon, static_cast<Eigen::Index>(dim),
                                                     [&](std::size_t k) { return lambda(k); }));
}

AuditReport audit_gradient_system(const Scenario& sc, const RunResult& result, AgentIndex target,
                                  std::size_t horizon) {
  const Transcript& t = result.transcript;
  if (horizon < 1) throw DomainError("gradient audit needs K >= 1");
  if (t.size() < horizon) throw AuditError("transcript is shorter than the audit horizon");
  const auto z = z_stream(t, target);
  const auto p = static_cast<Eigen::Index>(t.dim);
  const auto K = static_cast<Eigen::Index>(horizon);
  auto weight = [&](std::size_t k) { return sc.weight(k); };
  const Matrix M = gradient_system_matrix(horizon, p, weight);

  AuditReport r;
  r.kind = AuditKind::gradient;
  r.source = "transcript";
  r.horizon = horizon;
  r.dim = t.dim;
  r = finish(std::move(r), M);

  if (result.trajectory.size() >= horizon + 1) {
    const auto row = static_cast<Eigen::Index>(target);
    Vector rhs(K * p);
    for (Eigen::Index k = 1; k <= K; ++k) rhs.segment((k - 1) * p, p) = -z[static_cast<std::size_t>(k - 1)];
    // y^{K+1} is on the known side.
    rhs.segment((K - 1) * p, p) -= result.trajectory[horizon].y.row(row).transpose();

    const Eigen::Index ycols = (K - 1) * p;
    Vector u(M.cols());
    for (Eigen::Index k = 2; k <= K; ++k) {
      u.segment((k - 2) * p, p) = result.trajectory[static_cast<std::size_t>(k - 1)].y.row(row).transpose();
    }
    for (Eigen::Index k = 2; k <= K + 1; ++k) {
      u.segment(ycols + (k - 2) * p, p) =
          result.trajectory[static_cast<std::size_t>(k - 1)].grad.row(row).transpose();
    }
    r.consistency_residual = (M * u - rhs).norm();
  }
  return r;
}

}  // namespace wgt
