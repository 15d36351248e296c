#include "wgt/commands.hpp"

#include <algorithm>
#include <atomic>
#include <limits>
#include <map>
#include <ostream>
#include <system_error>
#include <thread>

#include <fmt/format.h>

#include "wgt/adversary.hpp"
#include "wgt/errors.hpp"
#include "wgt/monitor.hpp"
#include "wgt/report.hpp"

namespace wgt {

using nlohmann::json;

namespace {

constexpr std::uint64_t kSweepInitSeedOffset = 1000;

std::filesystem::path out_path(const ScenarioConfig& c, const char* file) {
  return std::filesystem::path(c.output_dir) / file;
}

bool monitored(const Scenario& sc) { return sc.mode == Mode::wgt && sc.weights.is_static(); }

json audits_json(const Scenario& sc, const RunResult& result, const ScenarioConfig& c) {
  const std::size_t K = c.attack.audit_horizon;
  const std::size_t p = sc.objective.dim();
  json out = json::array();
  if (K >= 2) out.push_back(audit_json(audit_state_system(K, p)));
  out.push_back(audit_json(audit_gradient_system(K, p)));
  if (K >= 2 && result.transcript.size() >= K - 1) {
    out.push_back(audit_json(audit_state_system(sc, result, c.attack.target, K)));
  }
  if (result.transcript.size() >= K) {
    out.push_back(audit_json(audit_gradient_system(sc, result, c.attack.target, K)));
  }
  return out;
}

AttackReport attack(const Scenario& sc, const RunResult& result, const ScenarioConfig& c) {
  const DetectorSettings detector{c.attack.stabilization_tolerance, c.attack.stabilization_window};
  return infer_gradient(result.transcript, c.attack.target,
                        ground_truth(sc, result, c.attack.target), detector);
}

double max_of(const std::vector<double>& v) {
  return v.empty() ? 0.0 : *std::max_element(v.begin(), v.end());
}

std::string format_count(const std::optional<std::size_t>& k) {
  return k ? std::to_string(*k) : std::string("not reached");
}

}  // namespace

void apply_overrides(ScenarioConfig& c, const Overrides& o) {
  if (o.output_dir) c.output_dir = *o.output_dir;
  if (o.objective_seed) c.objective_seed = *o.objective_seed;
  if (o.init_seed) c.init_seed = *o.init_seed;
  if (o.weight_seed) c.weight_seed = *o.weight_seed;
  if (o.threshold) {
    if (!(*o.threshold > 0.0)) throw ConfigError("--threshold must be > 0");
    c.threshold = *o.threshold;
  }
  if (o.target) {
    if (*o.target == 0) throw ConfigError("--target: agent ids are 1-based");
    c.attack.target = *o.target - 1;
  }
  if (o.iterations) {
    if (*o.iterations == 0) throw ConfigError("--iterations must be >= 1");
    c.iterations = *o.iterations;
  }
}

SweepResult run_sweep(const ScenarioConfig& c, unsigned threads) {
  if (c.sweep.empty()) throw ConfigError("sweep: the grid is empty");
  if (c.sweep.alpha.empty() && c.alpha.size() != 1) {
    throw ConfigError("sweep: per-agent alpha lists cannot be swept; give sweep.alpha");
  }
  const auto axis = [](const std::vector<double>& grid, double fallback) {
    return grid.empty() ? std::vector<double>{fallback} : grid;
  };
  const auto alphas = axis(c.sweep.alpha, c.alpha.front());
  const auto es = axis(c.sweep.lambda_e, c.lambda_e);
  const auto ms = axis(c.sweep.lambda_m, c.lambda_m);
  const bool explicit_seeds = !c.sweep.seeds.empty();
  const std::vector<std::uint64_t> seeds =
      explicit_seeds ? c.sweep.seeds : std::vector<std::uint64_t>{c.objective_seed};

  SweepResult result;
  for (double a : alphas)
    for (double e : es)
      for (double m : ms)
        for (auto s : seeds) result.cells.push_back(SweepCell{a, e, m, s, {}, 0.0, "ok", ""});

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t idx = next++; idx < result.cells.size(); idx = next++) {
      SweepCell& cell = result.cells[idx];
      ScenarioConfig cfg = c;
      cfg.alpha = {cell.alpha};
      cfg.lambda_constant.reset();
      cfg.lambda_e = cell.lambda_e;
      cfg.lambda_m = cell.lambda_m;
      if (explicit_seeds) {
        cfg.objective_seed = cell.seed;
        cfg.init_seed = cell.seed + kSweepInitSeedOffset;
      }
      try {
        const Scenario sc = build_scenario(cfg);
        const RunResult r = run(sc, RunOptions{false, false});
        cell.iterations_to_threshold = r.report.iterations_to_threshold;
        cell.terminal_residual = r.report.terminal_residual;
      } catch (const DivergenceError& e) {
        cell.status = "diverged";
        cell.detail = fmt::format("iteration {}", e.iteration());
      } catch (const std::exception& e) {
        cell.status = "error";
        cell.detail = e.what();
      }
    }
  };
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, result.cells.size()));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  constexpr auto kNever = std::numeric_limits<std::size_t>::max();
  const auto count_at = [&](std::size_t ia, std::size_t ie, std::size_t im, std::size_t is) {
    const auto& cell =
        result.cells[((ia * es.size() + ie) * ms.size() + im) * seeds.size() + is];
    return cell.status == "ok" && cell.iterations_to_threshold ? *cell.iterations_to_threshold
                                                                : kNever;
  };
  // Axes are checked in ascending parameter order regardless of grid order.
  const auto order = [](const std::vector<double>& v) {
    std::vector<std::size_t> idx(v.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::stable_sort(idx.begin(), idx.end(), [&](auto a, auto b) { return v[a] < v[b]; });
    return idx;
  };
  const auto alpha_order = order(alphas);
  const auto e_order = order(es);

  if (alphas.size() >= 2) {
    for (std::size_t ie = 0; ie < es.size(); ++ie) {
      for (std::size_t im = 0; im < ms.size(); ++im) {
        MonotonicityCheck chk{"alpha", fmt::format("lambda_e={} lambda_m={}", es[ie], ms[im]),
                              alphas.size(), 0, seeds.size(), false};
        for (std::size_t is = 0; is < seeds.size(); ++is) {
          bool ok = true;
          for (std::size_t j = 1; j < alpha_order.size(); ++j) {
            ok = ok && count_at(alpha_order[j], ie, im, is) <= count_at(alpha_order[j - 1], ie, im, is);
          }
          chk.seeds_agreeing += ok;
        }
        chk.holds = 2 * chk.seeds_agreeing > chk.seeds;
        result.checks.push_back(chk);
      }
    }
  }
  if (es.size() >= 2) {
    for (std::size_t ia = 0; ia < alphas.size(); ++ia) {
      for (std::size_t im = 0; im < ms.size(); ++im) {
        MonotonicityCheck chk{"lambda_e", fmt::format("alpha={} lambda_m={}", alphas[ia], ms[im]),
                              es.size(), 0, seeds.size(), false};
        for (std::size_t is = 0; is < seeds.size(); ++is) {
          bool ok = true;
          for (std::size_t j = 1; j < e_order.size(); ++j) {
            ok = ok && count_at(ia, e_order[j], im, is) >= count_at(ia, e_order[j - 1], im, is);
          }
          chk.seeds_agreeing += ok;
        }
        chk.holds = 2 * chk.seeds_agreeing > chk.seeds;
        result.checks.push_back(chk);
      }
    }
  }
  return result;
}

std::string sweep_csv(const SweepResult& r) {
  std::string out = "alpha,lambda_e,lambda_m,seed,iterations_to_threshold,terminal_residual,status\n";
  for (const auto& c : r.cells) {
    out += fmt::format("{},{},{},{},{},{:.17g},{}\n", c.alpha, c.lambda_e, c.lambda_m, c.seed,
                       c.iterations_to_threshold ? std::to_string(*c.iterations_to_threshold) : "",
                       c.terminal_residual, c.status);
  }
  return out;
}

int run_command(const ScenarioConfig& c, std::ostream& out) {
  const Scenario sc = build_scenario(c);
  const RunResult result = run(sc);

  json doc = header_json(c);
  doc["summary"] = summary_json(result.report);
  if (monitored(sc)) {
    doc["admissibility"] = admissibility_json(step_size_admissibility(sc, c.admissibility_horizon));
  }
  const AttackReport ar = attack(sc, result, c);
  doc["attack"] = attack_json(ar);
  doc["leakage_identity_max_residual"] =
      max_of(leakage_identity_residuals(sc, result, c.attack.target));
  doc["audits"] = audits_json(sc, result, c);

  write_text(out_path(c, "report.csv"), metrics_csv(result.report.rows));
  if (c.export_matrices > 0) {
    write_text(out_path(c, "matrices.csv"), matrices_csv(sc.weights, c.export_matrices));
  }
  if (c.dump_ensemble) write_text(out_path(c, "ensemble.csv"), ensemble_csv(sc.objective));
  write_text(out_path(c, "report.json"), doc.dump(2) + "\n");
  out << fmt::format("{}: {} iterations, terminal residual {:.3e}, threshold {:g} reached at {}\n",
                     to_string(sc.mode), sc.iterations, result.report.terminal_residual,
                     sc.threshold, format_count(result.report.iterations_to_threshold));
  out << "wrote " << out_path(c, "report.csv").string() << " and report.json\n";
  return kExitOk;
}

int sweep_command(const ScenarioConfig& c, std::ostream& out) {
  const SweepResult r = run_sweep(c);
  json checks = json::array();
  bool all_hold = true;
  for (const auto& chk : r.checks) {
    checks.push_back({{"axis", chk.axis}, {"slice", chk.slice}, {"points", chk.points},
                      {"seeds_agreeing", chk.seeds_agreeing}, {"seeds", chk.seeds},
                      {"holds", chk.holds}});
    all_hold = all_hold && chk.holds;
    out << fmt::format("{:<9} {:<28} {}/{} seeds monotone: {}\n", chk.axis, chk.slice,
                       chk.seeds_agreeing, chk.seeds, chk.holds ? "yes" : "no");
  }
  json doc = header_json(c);
  doc["monotonicity"] = checks;
  doc["cells"] = r.cells.size();
  write_text(out_path(c, "sweep.csv"), sweep_csv(r));
  write_text(out_path(c, "sweep.json"), doc.dump(2) + "\n");
  out << fmt::format("{} cells, {} checks, all monotone: {}\n", r.cells.size(), r.checks.size(),
                     all_hold ? "yes" : "no");
  return kExitOk;
}

int attack_command(const ScenarioConfig& c, std::ostream& out) {
  const Scenario sc = build_scenario(c);
  const RunResult result = run(sc);
  const AttackReport ar = attack(sc, result, c);

  json doc = header_json(c);
  doc["attack"] = attack_json(ar);
  doc["leakage_identity_max_residual"] =
      max_of(leakage_identity_residuals(sc, result, c.attack.target));
  doc["audits"] = audits_json(sc, result, c);
  write_text(out_path(c, "attack.json"), doc.dump(2) + "\n");

  out << fmt::format("{} attack on agent {}: relative error {:.3e}{}\n", to_string(ar.mode),
                     to_external_id(ar.target), ar.relative_error,
                     ar.relative_error_at_optimum
                         ? fmt::format(" (vs gradient at optimum {:.3e})", *ar.relative_error_at_optimum)
                         : std::string());
  if (!ar.converged) {
    out << "inconclusive: messages did not stabilize within the transcript\n";
    return kExitInconclusive;
  }
  return kExitOk;
}

int audit_command(const ScenarioConfig& c, std::ostream& out) {
  ScenarioConfig cfg = c;
  cfg.iterations = std::max<std::size_t>(c.attack.audit_horizon, 1) + 1;
  const Scenario sc = build_scenario(cfg);
  const RunResult result = run(sc);
  json doc = header_json(c);
  doc["audits"] = audits_json(sc, result, cfg);
  for (const auto& a : doc["audits"]) {
    out << fmt::format("{:<8} {:<10} K={} equations={} unknowns={} rank={} nullity={}\n",
                       a["kind"].get<std::string>(), a["source"].get<std::string>(),
                       a["horizon"].get<std::size_t>(), a["equations"].get<std::size_t>(),
                       a["unknowns"].get<std::size_t>(), a["rank"].get<std::size_t>(),
                       a["nullity"].get<std::size_t>());
  }
  write_text(out_path(c, "audit.json"), doc.dump(2) + "\n");
  return kExitOk;
}

int validate_command(const ScenarioConfig& c, std::ostream& out) {
  const Scenario sc = build_scenario(c);
  out << fmt::format("config ok: {} agents, {} edges, mode {}\n", sc.graph().size(),
                     sc.graph().edges().size(), to_string(sc.mode));
  if (monitored(sc)) {
    const auto adm = step_size_admissibility(sc, c.admissibility_horizon);
    out << fmt::format("step-size cap over k <= {}: {}; max alpha {} {}\n", adm.horizon,
                       adm.window_from ? fmt::format("{:.3e}", adm.alpha_bound)
                                       : std::string("lambda window never holds"),
                       adm.alpha_check, adm.alpha_ok ? "passes" : "exceeds it");
  }
  return kExitOk;
}

int dispatch(const std::string& command, const std::filesystem::path& config,
             const Overrides& overrides, std::ostream& out, std::ostream& err) {
  static const std::map<std::string, int (*)(const ScenarioConfig&, std::ostream&)> commands{
      {"run", run_command},       {"sweep", sweep_command},
      {"attack", attack_command}, {"audit", audit_command},
      {"validate", validate_command},
  };
  const auto it = commands.find(command);
  if (it == commands.end()) {
    err << "unknown command: " << command << "\n";
    return kExitUsage;
  }
  try {
    ScenarioConfig c = load_config(config);
    apply_overrides(c, overrides);
    return it->second(c, out);
  } catch (const std::system_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const DivergenceError& e) {
    err << "diverged at iteration " << e.iteration() << ": " << e.what() << "\n";
    return kExitDivergence;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kExitDivergence;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const DomainError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const ScheduleError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const AuditError& e) {
    err << "audit failed: " << e.what() << "\n";
    return kExitInconclusive;
  }
}

}  // namespace wgt
