#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <fmt/format.h>

#include "error.hpp"
#include "log.hpp"

namespace cavnet {

namespace {

constexpr double kGuardRatio = 10.0;
constexpr double kEigenTolerance = 1e-10;

CsvStamp stamp_for(const RunConfig& config) { return {CAVNET_VERSION, iso8601_now(), config.hash}; }

std::string unit_suffix(const RunConfig& config) {
  return config.unit == FrequencyUnit::AngularMHz ? " (x2pi MHz)" : " Omega";
}

std::string time_suffix(const RunConfig& config) {
  return config.unit == FrequencyUnit::AngularMHz ? " us" : " /Omega";
}

double max_coupling(const SystemParams& p) {
  double g = 0.0;
  for (const auto& row : p.g) {
    for (double v : row) g = std::max(g, std::abs(v));
  }
  return g;
}

std::size_t model_dimension(const RunConfig& config, const SystemParams& p) {
  const ModelKind kind = config.run.model.kind;
  if (kind == ModelKind::Full || kind == ModelKind::NormalMode) {
    return network_space(config.run.model.truncation)->dimension();
  }
  const bool dark = config.run.protocol == ProtocolKind::Qst;
  return build_model(p, kind, config.run.model.truncation, {}, dark).space->dimension();
}

void write(Report& report, const RunConfig& config, const CommandOptions& options, std::vector<OutputFile> files) {
  write_outputs(options.out_dir, files, config.resolved, stamp_for(config));
  for (const auto& f : files) report.files.push_back(f.name);
  report.files.push_back("manifest.json");
  report.text += "wrote " + std::to_string(report.files.size()) + " file(s) to " + options.out_dir + "\n";
}

void note_seedless(const CommandOptions& options) {
  // No driver draws random numbers; the flag only documents that.
  if (options.seedless) logger()->debug("seedless run: no random number generator is used");
}

}  // namespace

Report cmd_validate(const RunConfig& config) {
  Report r;
  std::ostringstream out;
  SystemParams p;
  try {
    p = resolved_params(config.run);
  } catch (const ArgumentError& e) {
    throw ConfigError(e.what());
  }

  out << "config " << config.hash << ", unit " << unit_name(config.unit) << "\n";
  out << "branch detunings (delta_n = delta2 - delta1 + n*nu):\n";
  for (Branch n : kBranches) {
    const double d = branch_detuning(p, n);
    out << fmt::format("  n = {:>6}  delta_n = {:>14.8g}{}\n", branch_name(n), d, unit_suffix(config));
    r.values["delta_" + std::string(branch_name(n))] = d;
  }
  if (auto n = resonant_branch(p)) {
    out << "resonant branch: " << branch_name(*n) << "\n";
    r.values["resonant"] = branch_value(*n);
  } else {
    out << "resonant branch: none\n";
  }

  const double g = max_coupling(p);
  const double nu_g = g > 0 ? p.nu / g : INFINITY;
  const double g_omega = g / std::abs(p.omega);
  const double d_omega = std::abs(p.delta1) / std::abs(p.omega);
  auto guard = [&](const char* name, double ratio) {
    const bool strong = ratio >= kGuardRatio;
    out << fmt::format("  {:<12} ratio {:>10.4g}  {}\n", name, ratio, strong ? "ok" : "weak (< 10)");
    if (!strong) logger()->warn("guard condition {} is only {:.4g}", name, ratio);
  };
  out << "guard conditions (nu >> g >> Omega, delta1 >> Omega):\n";
  guard("nu/g", nu_g);
  guard("g/Omega", g_omega);
  guard("delta1/Omega", d_omega);
  r.values["guard_nu_g"] = nu_g;
  r.values["guard_g_omega"] = g_omega;
  r.values["guard_delta1_omega"] = d_omega;

  std::size_t dim = 0;
  try {
    dim = model_dimension(config, p);
  } catch (const ArgumentError& e) {
    throw ConfigError(e.what());
  }
  out << "model " << model_name(config.run.model.kind) << ", truncation "
      << truncation_name(config.run.model.truncation) << ", Hilbert dimension " << dim << "\n";
  r.values["dimension"] = static_cast<double>(dim);

  const ProtocolTiming t = ProtocolTiming::from(p);
  out << fmt::format("tau_qesd = pi*delta1/Omega^2 = {:.10g}{}\n", t.tau_qesd, time_suffix(config));
  out << fmt::format("t_qst = {:.10g}{}\n", t.t_qst, time_suffix(config));
  r.values["tau_qesd"] = t.tau_qesd;
  r.values["t_qst"] = t.t_qst;
  out << (config.run.dissipation.closed() ? "closed system\n" : "dissipative (Lindblad)\n");
  out << "hard constraints: ok\n";
  r.text = out.str();
  return r;
}

Report cmd_eigencheck(double g) {
  if (!std::isfinite(g)) throw ArgumentError("g must be finite");
  const ZenoEigensystem z = zeno_eigensystem(g);
  Report r;
  std::ostringstream out;
  out << fmt::format("H_g eigensystem for g = {:.10g}\n", g);
  out << fmt::format("  {:<7} {:>20}\n", "state", "closed form");
  for (std::size_t i = 0; i < z.eigenvalues.size(); ++i) {
    out << fmt::format("  {:<7} {:>20.12f}\n", ZenoEigensystem::kLabels[i], z.eigenvalues[i]);
    r.values[std::string("lambda_") + ZenoEigensystem::kLabels[i]] = z.eigenvalues[i];
  }
  out << "  numeric (ascending):";
  for (int i = 0; i < z.numeric_eigenvalues.size(); ++i) out << fmt::format(" {:.12f}", z.numeric_eigenvalues[i]);
  out << "\n";
  out << fmt::format("max residual |H v - lambda v| = {:.3e}\n", z.max_residual);
  out << fmt::format("max eigenvalue mismatch       = {:.3e}\n", z.max_eigenvalue_mismatch);
  out << fmt::format("orthonormality defect         = {:.3e}\n", z.orthonormality_defect);
  r.values["max_residual"] = z.max_residual;
  r.values["max_eigenvalue_mismatch"] = z.max_eigenvalue_mismatch;
  r.values["orthonormality_defect"] = z.orthonormality_defect;
  r.ok = z.max_residual <= kEigenTolerance && z.max_eigenvalue_mismatch <= kEigenTolerance;
  out << (r.ok ? "ok\n" : "FAILED: residual above 1e-10\n");
  r.text = out.str();
  return r;
}

Report cmd_run(const RunConfig& config, const CommandOptions& options) {
  note_seedless(options);
  const ProtocolOutcome outcome = run_protocol(config.run);
  Report r;
  const CsvStamp stamp = stamp_for(config);
  std::vector<OutputFile> files{{"trajectory.csv", render_csv(trajectory_table(outcome.trajectory), stamp)}};

  std::ostringstream out;
  const bool qesd = config.run.protocol == ProtocolKind::Qesd;
  out << fmt::format("{} with model {}: duration {:.10g}{}\n", qesd ? "QESD" : "QST", model_name(config.run.model.kind),
                     outcome.duration, time_suffix(config));
  out << fmt::format("final fidelity F = {:.10f}\n", outcome.fidelity);
  if (outcome.phase_angle) out << fmt::format("phase gate angle = {:.10g}\n", *outcome.phase_angle);
  const auto& st = outcome.trajectory.stats;
  out << fmt::format("steps {} (rejected {})\n", st.steps, st.rejected);
  r.values["fidelity"] = outcome.fidelity;
  r.values["duration"] = outcome.duration;
  r.values["steps"] = static_cast<double>(st.steps);
  r.values["rejected"] = static_cast<double>(st.rejected);
  if (outcome.phase_angle) r.values["phase_angle"] = *outcome.phase_angle;

  const ModelKind kind = config.run.model.kind;
  if (qesd && (kind == ModelKind::Full || kind == ModelKind::NormalMode)) {
    const AuditResult audit = audit_table(outcome);
    files.push_back({"audit.csv", render_csv(audit.table, stamp)});
    out << fmt::format("max P_A = {:.4e}, max P_C = {:.4e}, max P_F = {:.4e}\n", audit.max_pa, audit.max_pc,
                       audit.max_pf);
    r.values["max_PA"] = audit.max_pa;
    r.values["max_PC"] = audit.max_pc;
    r.values["max_PF"] = audit.max_pf;
  }
  r.text = out.str();
  write(r, config, options, std::move(files));
  return r;
}

Report cmd_sweep(const RunConfig& config, const CommandOptions& options) {
  note_seedless(options);
  const SweepResult res = sweep_fidelity(config.sweep_spec(), options.jobs);
  Report r;
  std::size_t failed = 0;
  double best = -INFINITY, worst = INFINITY;
  for (const auto& pt : res.points) {
    if (pt.status != "ok") {
      ++failed;
      continue;
    }
    best = std::max(best, pt.metric);
    worst = std::min(worst, pt.metric);
  }
  std::ostringstream out;
  out << fmt::format("sweep of {} over {} point(s), {} failed\n", metric_name(config.metric), res.points.size(), failed);
  if (failed < res.points.size()) out << fmt::format("metric range [{:.10g}, {:.10g}]\n", worst, best);
  r.values["points"] = static_cast<double>(res.points.size());
  r.values["failed"] = static_cast<double>(failed);
  if (failed < res.points.size()) {
    r.values["metric_min"] = worst;
    r.values["metric_max"] = best;
  }
  r.text = out.str();
  write(r, config, options, {{"sweep.csv", render_csv(res.table, stamp_for(config))}});
  return r;
}

Report cmd_compare(const RunConfig& config, const CommandOptions& options) {
  note_seedless(options);
  const CompareResult res = compare_models(config.compare_spec(), options.jobs);
  Report r;
  std::ostringstream out;
  for (const char* scenario : {"i", "ii", "iii"}) {
    const CompareTrace* raman = res.find(scenario, ModelKind::Raman);
    for (const auto& t : res.traces) {
      if (t.scenario != scenario) continue;
      out << fmt::format("scenario {:<3} {:<17} {}", scenario, model_name(t.model), t.status);
      if (t.status == "ok" && raman && raman->status == "ok" && t.model != ModelKind::Raman) {
        const double dev = max_abs_difference(t.p_phi0, raman->p_phi0);
        out << fmt::format("  max |P_phi0 - P_phi0(raman)| = {:.4g}", dev);
        r.values[fmt::format("dev_{}_{}", scenario, model_name(t.model))] = dev;
      }
      if (t.status == "ok") {
        const double period = dominant_period(t.times, t.p_phi0);
        out << fmt::format("  period {:.6g}", period);
        r.values[fmt::format("period_{}_{}", scenario, model_name(t.model))] = period;
      }
      out << "\n";
    }
  }
  r.text = out.str();
  write(r, config, options, {{"compare.csv", render_csv(res.table, stamp_for(config))}});
  return r;
}

Report cmd_feasibility(const RunConfig& config, const CommandOptions& options) {
  note_seedless(options);
  const FeasibilityResult res = feasibility_run(config.feasibility_spec(), options.jobs);
  Report r;
  std::ostringstream out;
  for (const auto& t : res.traces) {
    out << fmt::format("Omega = {:.6g}: F(tau = {:.6g}) = {:.6f} [{}]\n", t.omega, t.duration, t.fidelity_at_duration,
                       t.status);
    r.values[fmt::format("F_tau_omega_{}", format_number(t.omega))] = t.fidelity_at_duration;
  }
  for (const auto& c : res.curves) {
    const std::string shape(pulse_kind_name(c.shape));
    out << fmt::format("{} pulse (T = {:.6g}): best F = {:.6f} at t = {:.6g} [{}]\n", shape, c.duration,
                       c.best_fidelity, c.best_time, c.status);
    r.values["best_" + shape] = c.best_fidelity;
    for (std::size_t i = 0; i < c.offsets.size(); ++i) {
      out << fmt::format("  offset {:+.3f}: F = {:.6f}\n", c.offsets[i], c.fidelity[i]);
      r.values[fmt::format("F_{}_{}", shape, format_number(c.offsets[i]))] = c.fidelity[i];
    }
  }
  r.text = out.str();
  write(r, config, options, {{"feasibility.csv", render_csv(res.table, stamp_for(config))}});
  return r;
}

}  // namespace cavnet
