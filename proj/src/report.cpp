#include "wgt/report.hpp"

#include <cmath>
#include <fstream>
#include <system_error>

#include <fmt/format.h>

#include "wgt/rng.hpp"

namespace wgt {

using nlohmann::json;

namespace {

json vector_json(const Vector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

// JSON has no infinity; caps that never bind are written as null.
json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

}  // namespace

std::string metrics_csv(const std::vector<MetricRow>& rows) {
  std::string out = kCsvHeader;
  out += '\n';
  for (const auto& r : rows) {
    out += fmt::format("{},{:.17g},{:.17g},{:.17g},{:.17g}\n", r.k, r.residual, r.consensus_error,
                       r.tracking_error, r.weight);
  }
  return out;
}

std::string matrices_csv(const WeightSchedule& ws, std::size_t count) {
  std::string out = "k,matrix,row,col,value\n";
  for (std::size_t k = 1; k <= count; ++k) {
    const WeightPair w = ws.matrices_at(k);
    for (const auto& [name, m] : {std::pair{"A", &w.A}, std::pair{"B", &w.B}}) {
      for (Eigen::Index i = 0; i < m->rows(); ++i) {
        for (Eigen::Index j = 0; j < m->cols(); ++j) {
          if ((*m)(i, j) != 0.0) out += fmt::format("{},{},{},{},{:.17g}\n", k, name, i + 1, j + 1, (*m)(i, j));
        }
      }
    }
  }
  return out;
}

std::string ensemble_csv(const ObjectiveEnsemble& e) {
  std::string out = "agent,name,row,col,value\n";
  for (std::size_t a = 0; a < e.size(); ++a) {
    const auto& f = e.agent(a);
    const Matrix& S = f.measurement_matrix();
    for (Eigen::Index i = 0; i < S.rows(); ++i) {
      for (Eigen::Index j = 0; j < S.cols(); ++j) {
        out += fmt::format("{},S,{},{},{:.17g}\n", a + 1, i + 1, j + 1, S(i, j));
      }
    }
    for (Eigen::Index i = 0; i < f.measurements().size(); ++i) {
      out += fmt::format("{},s,{},1,{:.17g}\n", a + 1, i + 1, f.measurements()(i));
    }
    out += fmt::format("{},r,1,1,{:.17g}\n", a + 1, f.regularizer());
  }
  return out;
}

json header_json(const ScenarioConfig& c) {
  return json{{"version", kVersion}, {"rng", std::string(Rng::kFamily)}, {"config", to_json(c)}};
}

json summary_json(const RunReport& r) {
  json out{
      {"mode", to_string(r.mode)},
      {"iterations", r.rows.empty() ? 0 : r.rows.size() - 1},
      {"terminal_residual", r.terminal_residual},
      {"iterations_to_threshold", nullptr},
      {"x_star", vector_json(r.x_star)},
      {"average", r.phi_weighted ? "perron" : "uniform"},
  };
  if (r.iterations_to_threshold) out["iterations_to_threshold"] = *r.iterations_to_threshold;
  if (!r.rows.empty()) {
    out["terminal_consensus_error"] = r.rows.back().consensus_error;
    out["terminal_tracking_error"] = r.rows.back().tracking_error;
  }
  return out;
}

json admissibility_json(const AdmissibilityReport& r) {
  json out{
      {"surrogate", to_string(r.surrogate)},
      {"horizon", r.horizon},
      {"lambda_sum_diverges", r.sum_diverges},
      {"lambda_vanishes", r.vanishes},
      {"window_from", nullptr},
      {"alpha_bound", nullptr},
      {"binding_term", r.binding_term},
      {"alpha_max", r.alpha_check},
      {"alpha_ok", r.alpha_ok},
      {"admissible", r.admissible},
  };
  if (r.window_from) {
    out["window_from"] = *r.window_from;
    out["alpha_bound"] = finite_or_null(r.alpha_bound);
  }
  if (!r.steps.empty()) {
    const auto& s = r.steps.front();
    json caps = json::array();
    for (double t : s.terms) caps.push_back(finite_or_null(t));
    out["first_step"] = {{"e1", s.e1}, {"e2", s.e2}, {"e3", s.e3}, {"ratio", s.ratio},
                         {"ratio_lower", s.ratio_lower}, {"caps", caps}};
  }
  return out;
}

json attack_json(const AttackReport& r) {
  json out{
      {"target", to_external_id(r.target)},
      {"mode", to_string(r.mode)},
      {"iterations", r.iterations},
      {"converged", r.converged},
      {"status", r.converged ? "ok" : "inconclusive"},
      {"inferred_gradient", vector_json(r.inferred_gradient)},
      {"true_gradient_at_final", vector_json(r.true_gradient_at_final)},
      {"relative_error", r.relative_error},
      {"relative_error_is_absolute", r.relative_error_is_absolute},
      {"relative_error_at_optimum", nullptr},
      {"leakage_bound", r.leakage_bound},
      {"within_leakage_bound", r.within_leakage_bound},
  };
  if (r.relative_error_at_optimum) out["relative_error_at_optimum"] = *r.relative_error_at_optimum;
  return out;
}

json audit_json(const AuditReport& r) {
  json out{
      {"kind", to_string(r.kind)},
      {"source", r.source},
      {"horizon", r.horizon},
      {"dim", r.dim},
      {"equations", r.equations},
      {"unknowns", r.unknowns},
      {"rank", r.rank},
      {"nullity", r.nullity},
      {"states_in_clear", r.states_in_clear},
      {"consistency_residual", nullptr},
  };
  if (r.consistency_residual) out["consistency_residual"] = *r.consistency_residual;
  return out;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::system_error(errno, std::generic_category(), path.string());
  out << text;
  if (!out) throw std::system_error(errno, std::generic_category(), path.string());
}

}  // namespace wgt
