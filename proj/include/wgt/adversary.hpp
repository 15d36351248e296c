#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "wgt/engine.hpp"
#include "wgt/linalg.hpp"

namespace wgt {

/// z_i^k = sum_{l in out(i)} [B_k]_li y_i^k - sum_{j in in(i)} [B_k]_ij y_j^k,
/// built only from y-type messages on agent i's channels, for k = 1..K.
/// Throws AuditError if any iteration is missing channel records.
std::vector<Vector> z_stream(const Transcript& t, AgentIndex i);

/// Attacker-side convergence detector: every message changes by less than
/// `tolerance` (max-abs) between consecutive iterations over the last
/// `window` iterations of the transcript.
struct DetectorSettings {
  double tolerance = 1e-10;
  std::size_t window = 50;
};

bool messages_stabilized(const Transcript& t, const DetectorSettings& settings = {});

/// What only the simulator knows; used to score an attack.
struct GroundTruth {
  Vector gradient_at_final;              // grad f_i(x_i^{K+1})
  Vector final_tracker;                  // y_i^{K+1}
  double final_weight = 1.0;             // weight multiplying the gradient in y^{K+1}
  std::optional<Vector> gradient_at_optimum;  // grad f_i(x*)
};

GroundTruth ground_truth(const Scenario& sc, const RunResult& result, AgentIndex i);

inline constexpr double kRelativeErrorFloor = 1e-12;

struct AttackReport {
  AgentIndex target = 0;
  Mode mode = Mode::wgt;
  std::size_t iterations = 0;
  bool converged = false;  // detector verdict; false means the report is inconclusive
  Vector inferred_gradient;
  Vector true_gradient_at_final;
  double relative_error = 0.0;  // vs grad f_i(x_i^{K+1}); absolute if that is below the floor
  bool relative_error_is_absolute = false;
  std::optional<double> relative_error_at_optimum;  // vs grad f_i(x*)
  double leakage_bound = 0.0;  // weight_{K+1} ||grad f_i(x_i^{K+1})|| + ||y_i^{K+1}||
  bool within_leakage_bound = false;
};

/// Sums the z-stream: the attacker's estimate of grad f_i at the limit.
AttackReport infer_gradient(const Transcript& t, AgentIndex i, const GroundTruth& truth,
                            const DetectorSettings& detector = {});

/// Per-iteration residual of  y_i^{k+1} + sum_{m<=k} z_i^m - w_{k+1} grad f_i(x_i^{k+1}),
/// with w = 1 (AB) or lambda (WGT). Entry k-1 corresponds to iteration k.
std::vector<double> leakage_identity_residuals(const Scenario& sc, const RunResult& result,
                                               AgentIndex i);

enum class AuditKind { state, gradient };
std::string to_string(AuditKind k);

struct AuditReport {
  AuditKind kind = AuditKind::state;
  std::string source;  // "generic" or "transcript"
  std::size_t horizon = 0;
  std::size_t dim = 0;
  std::size_t equations = 0;
  std::size_t unknowns = 0;
  std::size_t rank = 0;
  std::size_t nullity = 0;
  bool states_in_clear = false;  // AB sends raw states: nothing to solve for
  std::optional<double> consistency_residual;  // ||M u_true - rhs|| when the truth is known
};

/// Two-agent reduction of the state-recovery system: unknowns x_i^2..x_i^K and
/// the mixing weights [A_1]_ij..[A_{K-1}]_ij, with generic observed values as
/// coefficients. Requires K >= 2.
AuditReport audit_state_system(std::size_t horizon, std::size_t dim);

/// Same system built from a recorded transcript around `target`; every
/// in-neighbor contributes one unknown weight per step. Consistency is
/// checked against the simulator's true states and weights.
AuditReport audit_state_system(const Scenario& sc, const RunResult& result, AgentIndex target,
                               std::size_t horizon);

/// Two-agent reduction of the gradient-recovery system: unknowns y_i^2..y_i^K
/// and grad f_i(x_i^2)..grad f_i(x_i^{K+1}); y_i^{K+1} is taken as known.
/// Requires K >= 1.
AuditReport audit_gradient_system(std::size_t horizon, std::size_t dim);

AuditReport audit_gradient_system(const Scenario& sc, const RunResult& result, AgentIndex target,
                                  std::size_t horizon);

}  // namespace wgt
