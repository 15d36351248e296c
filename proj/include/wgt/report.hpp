#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "wgt/adversary.hpp"
#include "wgt/config.hpp"
#include "wgt/engine.hpp"
#include "wgt/monitor.hpp"

namespace wgt {

inline constexpr const char* kVersion = "0.1.0";

/// Fixed column order: k,residual,consensus_error,tracking_error,lambda_k.
inline constexpr const char* kCsvHeader = "k,residual,consensus_error,tracking_error,lambda_k";

/// Header line plus one line per row; numbers use 17 significant digits.
std::string metrics_csv(const std::vector<MetricRow>& rows);

nlohmann::json header_json(const ScenarioConfig& c);
nlohmann::json summary_json(const RunReport& r);
nlohmann::json admissibility_json(const AdmissibilityReport& r);
nlohmann::json attack_json(const AttackReport& r);
nlohmann::json audit_json(const AuditReport& r);

/// k,matrix,row,col,value for k = 1..count (1-based rows and columns, zeros omitted).
std::string matrices_csv(const WeightSchedule& ws, std::size_t count);
/// agent,name,row,col,value with name in {S, s, r}.
std::string ensemble_csv(const ObjectiveEnsemble& e);

/// Creates parent directories as needed.
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace wgt
