#include "reporting.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <thread>

#include "error.hpp"
#include "log.hpp"

namespace cavnet {

namespace {

constexpr double kPi = std::numbers::pi;

std::string sanitize(std::string text) {
  for (char& c : text) {
    if (c == ',' || c == '\n' || c == '\r') c = ';';
  }
  return text;
}

double series_max(const Trajectory& t, std::string_view name) {
  if (!t.has(name)) return std::nan("");
  const auto& s = t.series_of(name);
  return *std::max_element(s.begin(), s.end());
}

double log10_floored(double v) { return v <= 1e-16 ? -16.0 : std::max(std::log10(v), -16.0); }

}  // namespace

// ---------------------------------------------------------------------------

SystemParams resolved_params(const RunSpec& spec) {
  SystemParams p = spec.params;
  if (spec.zeno_g) {
    const auto n = resonant_branch(p);
    if (!n || !is_full_coupling(*n)) {
      throw ArgumentError("coupling = zeno needs delta2 = delta1 - n*nu with n in {+sqrt3, -sqrt3, 0}");
    }
    p.g = couplings_for_zeno_scale(*spec.zeno_g, *n);
  }
  return p;
}

PulseShape protocol_pulse(const RunSpec& spec, const SystemParams& p) {
  const ProtocolTiming timing = ProtocolTiming::from(p);
  const double t = spec.protocol == ProtocolKind::Qesd ? timing.tau_qesd : timing.t_qst;
  if (spec.shape == PulseShape::Kind::Rectangular) return PulseShape::rectangular(p.omega, t);
  return match_from_rect(p.omega, t, spec.peak_ratio * p.omega);
}

ProtocolOutcome run_protocol(const RunSpec& spec, std::vector<double> extra_times) {
  if (!(spec.t_end_factor >= 1.0)) throw ArgumentError("t_end factor must be at least 1");
  const SystemParams p = resolved_params(spec);
  const PulseShape pulse = protocol_pulse(spec, p);
  RunOptions options;
  options.samples = spec.samples;
  if (spec.t_end_factor > 1.0) options.t_end = spec.t_end_factor * pulse.duration();
  options.extra_times = std::move(extra_times);
  options.evolve.integrator = spec.integrator;

  ProtocolOutcome out;
  if (spec.protocol == ProtocolKind::Qesd) {
    auto r = run_qesd(p, spec.dissipation, pulse, spec.model, options);
    out.trajectory = std::move(r.trajectory);
    out.fidelity = r.fidelity;
    out.duration = r.duration;
    out.duration_index = r.duration_index;
  } else {
    auto r = run_qst(p, spec.dissipation, pulse, spec.qst, spec.model, spec.phase, options);
    out.trajectory = std::move(r.trajectory);
    out.fidelity = r.fidelity;
    out.duration = r.duration;
    out.duration_index = r.duration_index;
    out.phase_angle = r.phase_angle;
  }
  return out;
}

// ---------------------------------------------------------------------------

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string csv_body(const CsvTable& table) {
  std::string out;
  for (std::size_t i = 0; i < table.columns.size(); ++i) {
    if (i) out += ',';
    out += table.columns[i];
  }
  out += '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      std::visit(
          [&](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, double>) {
              out += format_number(v);
            } else if constexpr (std::is_same_v<T, long long>) {
              out += std::to_string(v);
            } else {
              out += sanitize(v);
            }
          },
          row[i]);
    }
    out += '\n';
  }
  return out;
}

std::string render_csv(const CsvTable& table, const CsvStamp& stamp) {
  return "# cavnet-sim v" + stamp.version + " " + stamp.timestamp + " " + stamp.config_hash + "\n" + csv_body(table);
}

std::string iso8601_now() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm utc{};
  gmtime_r(&now, &utc);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &utc);
  return buf;
}

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &length, EVP_sha256(), nullptr) != 1) {
    throw IoError("SHA-256 computation failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < length; ++i) {
    out += kHex[digest[i] >> 4];
    out += kHex[digest[i] & 0xF];
  }
  return out;
}

std::string data_checksum(std::string_view content) {
  const auto nl = content.find('\n');
  return sha256_hex(nl == std::string_view::npos ? std::string_view{} : content.substr(nl + 1));
}

CsvTable trajectory_table(const Trajectory& traj) {
  CsvTable t;
  t.columns.push_back("time");
  t.columns.insert(t.columns.end(), traj.names.begin(), traj.names.end());
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    std::vector<Cell> row{traj.times[i]};
    for (const auto& s : traj.series) row.emplace_back(s[i]);
    t.rows.push_back(std::move(row));
  }
  return t;
}

// ---------------------------------------------------------------------------

void parallel_for(std::size_t count, unsigned jobs, const std::function<void(std::size_t)>& fn) {
  if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
  const std::size_t workers = std::min<std::size_t>(jobs, count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

// ---------------------------------------------------------------------------

const CompareTrace* CompareResult::find(std::string_view scenario, ModelKind model) const {
  for (const auto& t : traces) {
    if (t.scenario == scenario && t.model == model) return &t;
  }
  return nullptr;
}

CompareResult compare_models(const CompareSpec& spec, unsigned jobs) {
  if (spec.models.empty()) throw ArgumentError("compare needs at least one model");
  if (!(spec.periods > 0.0)) throw ArgumentError("compare needs a positive number of periods");
  const double root3 = std::sqrt(3.0);
  const SystemParams& b = spec.base.params;
  const std::vector<std::pair<std::string, double>> scenarios{
      {"i", b.delta1 - root3 * b.nu}, {"ii", b.delta1 + root3 * b.nu}, {"iii", b.delta1}};

  CompareResult result;
  for (const auto& [label, delta2] : scenarios) {
    for (ModelKind m : spec.models) result.traces.push_back({label, m, {}, {}, {}, "ok"});
  }
  parallel_for(result.traces.size(), jobs, [&](std::size_t i) {
    CompareTrace& trace = result.traces[i];
    RunSpec s = spec.base;
    s.params.delta2 = scenarios[i / spec.models.size()].second;
    s.model.kind = trace.model;
    s.dissipation = {};
    s.protocol = ProtocolKind::Qesd;
    s.shape = PulseShape::Kind::Rectangular;
    s.samples = spec.samples;
    s.t_end_factor = 4.0 * spec.periods;
    try {
      auto out = run_protocol(s);
      trace.times = out.trajectory.times;
      trace.p_phi0 = out.trajectory.series_of("P_gRgL");
      trace.p_phi14 = out.trajectory.series_of("P_gLgR");
    } catch (const Error& e) {
      trace.status = std::string("error: ") + e.what();
      logger()->warn("compare scenario {} model {}: {}", trace.scenario, model_name(trace.model), e.what());
    }
  });

  result.table.columns = {"scenario", "model", "time", "P_phi0", "P_phi14", "status"};
  for (const auto& t : result.traces) {
    const std::string model(model_name(t.model));
    if (t.times.empty()) {
      result.table.rows.push_back({t.scenario, model, std::nan(""), std::nan(""), std::nan(""), t.status});
      continue;
    }
    for (std::size_t k = 0; k < t.times.size(); ++k) {
      result.table.rows.push_back({t.scenario, model, t.times[k], t.p_phi0[k], t.p_phi14[k], t.status});
    }
  }
  return result;
}

// ---------------------------------------------------------------------------

std::string_view metric_name(SweepMetric m) {
  switch (m) {
    case SweepMetric::FinalFidelity: return "final_fidelity";
    case SweepMetric::MaxPA: return "max_PA";
    case SweepMetric::MaxPC: return "max_PC";
    case SweepMetric::MaxPF: return "max_PF";
  }
  return "?";
}

std::optional<SweepMetric> parse_metric(std::string_view text) {
  for (SweepMetric m : {SweepMetric::FinalFidelity, SweepMetric::MaxPA, SweepMetric::MaxPC, SweepMetric::MaxPF}) {
    if (text == metric_name(m)) return m;
  }
  return std::nullopt;
}

void apply_axis(RunSpec& spec, std::string_view name, double value) {
  SystemParams& p = spec.params;
  DissipationParams& d = spec.dissipation;
  if (name == "g") {
    spec.zeno_g = value;
  } else if (name == "nu") {
    p.nu = value;
  } else if (name == "omega") {
    p.omega = value;
  } else if (name == "delta1") {
    p.delta1 = value;
  } else if (name == "delta2") {
    p.delta2 = value;
  } else if (name == "delta") {
    p.delta1 = p.delta2 = value;
  } else if (name == "gamma") {
    d.gamma = value;
  } else if (name == "kappa") {
    d.kappa_c = d.kappa_f = value;
  } else if (name == "kappa_c") {
    d.kappa_c = value;
  } else if (name == "kappa_f") {
    d.kappa_f = value;
  } else {
    throw ArgumentError("unknown sweep axis '" + std::string(name) +
                        "' (g, nu, omega, delta1, delta2, delta, gamma, kappa, kappa_c, kappa_f)");
  }
}

void validate_axis(const SweepAxis& axis) {
  if (axis.values.empty()) throw ArgumentError("sweep axis '" + axis.name + "' has no values");
  RunSpec probe;
  apply_axis(probe, axis.name, 0.0);
  for (double v : axis.values) {
    if (!std::isfinite(v)) throw ArgumentError("sweep axis '" + axis.name + "' has a non-finite value");
  }
  if (axis.values.size() > 1) {
    const bool up = axis.values[1] > axis.values[0];
    for (std::size_t i = 1; i < axis.values.size(); ++i) {
      const bool step_up = axis.values[i] > axis.values[i - 1];
      if (axis.values[i] == axis.values[i - 1] || step_up != up) {
        throw ArgumentError("sweep axis '" + axis.name + "' must be strictly monotone");
      }
    }
  }
}

SweepResult sweep_fidelity(const SweepSpec& spec, unsigned jobs) {
  validate_axis(spec.axis1);
  if (spec.axis2) validate_axis(*spec.axis2);
  const std::size_t nx = spec.axis1.values.size();
  const std::size_t ny = spec.axis2 ? spec.axis2->values.size() : 1;

  SweepResult result;
  result.points.resize(nx * ny);
  parallel_for(nx * ny, jobs, [&](std::size_t i) {
    SweepPoint& pt = result.points[i];
    pt.x = spec.axis1.values[i / ny];
    pt.y = spec.axis2 ? spec.axis2->values[i % ny] : std::nan("");
    const auto start = std::chrono::steady_clock::now();
    try {
      RunSpec s = spec.base;
      apply_axis(s, spec.axis1.name, pt.x);
      if (spec.axis2) apply_axis(s, spec.axis2->name, pt.y);
      auto out = run_protocol(s);
      pt.fidelity = out.fidelity;
      pt.max_pa = series_max(out.trajectory, "P_A");
      pt.max_pc = series_max(out.trajectory, "P_C");
      pt.max_pf = series_max(out.trajectory, "P_F");
      pt.steps = out.trajectory.stats.steps;
      pt.rejected = out.trajectory.stats.rejected;

      RunSpec raman = s;
      raman.model.kind = ModelKind::Raman;
      raman.dissipation = {};
      auto ref = run_protocol(raman);
      const auto& a = out.trajectory.series_of("P_gRgL");
      const auto& r = ref.trajectory.series_of("P_gRgL");
      double lo = INFINITY, hi = -INFINITY;
      for (std::size_t k = 0; k < a.size(); ++k) {
        lo = std::min(lo, a[k] - r[k]);
        hi = std::max(hi, a[k] - r[k]);
      }
      pt.fluct_pp = hi - lo;
    } catch (const Error& e) {
      pt.fidelity = pt.max_pa = pt.max_pc = pt.max_pf = pt.fluct_pp = std::nan("");
      pt.status = std::string("error: ") + e.what();
      logger()->warn("sweep point {} = {}: {}", spec.axis1.name, pt.x, e.what());
    }
    pt.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    switch (spec.metric) {
      case SweepMetric::FinalFidelity: pt.metric = pt.fidelity; break;
      case SweepMetric::MaxPA: pt.metric = pt.max_pa; break;
      case SweepMetric::MaxPC: pt.metric = pt.max_pc; break;
      case SweepMetric::MaxPF: pt.metric = pt.max_pf; break;
    }
  });

  auto& t = result.table;
  t.columns.push_back(spec.axis1.name);
  if (spec.axis2) t.columns.push_back(spec.axis2->name);
  for (const char* c : {"metric", "fidelity", "max_PA", "max_PC", "max_PF", "fluct_pp", "steps", "rejected", "status"}) {
    t.columns.push_back(c);
  }
  t.columns[spec.axis2 ? 2 : 1] = std::string(metric_name(spec.metric));
  for (const auto& pt : result.points) {
    std::vector<Cell> row{pt.x};
    if (spec.axis2) row.emplace_back(pt.y);
    row.insert(row.end(), {pt.metric, pt.fidelity, pt.max_pa, pt.max_pc, pt.max_pf, pt.fluct_pp,
                           static_cast<long long>(pt.steps), static_cast<long long>(pt.rejected), pt.status});
    t.rows.push_back(std::move(row));
  }
  return result;
}

// ---------------------------------------------------------------------------

AuditResult virtual_photon_audit(const RunSpec& spec) {
  if (spec.model.kind != ModelKind::Full && spec.model.kind != ModelKind::NormalMode) {
    throw ArgumentError("the virtual-photon audit needs the full or normal-mode model");
  }
  RunSpec s = spec;
  s.protocol = ProtocolKind::Qesd;
  return audit_table(run_protocol(s));
}

AuditResult audit_table(const ProtocolOutcome& out) {
  const Trajectory& tr = out.trajectory;
  if (!tr.has("P_A") || !tr.has("P_gRgL")) throw ArgumentError("trajectory lacks the audit observables");

  AuditResult r;
  r.max_pa = series_max(tr, "P_A");
  r.max_pc = series_max(tr, "P_C");
  r.max_pf = series_max(tr, "P_F");
  r.fidelity = out.fidelity;
  r.table.columns = {"time", "log10_PA", "log10_PC", "log10_PF", "P_gRgL", "P_gLgR", "F"};
  const auto &pa = tr.series_of("P_A"), &pc = tr.series_of("P_C"), &pf = tr.series_of("P_F");
  const auto &rl = tr.series_of("P_gRgL"), &lr = tr.series_of("P_gLgR"), &f = tr.series_of("F");
  for (std::size_t i = 0; i < tr.times.size(); ++i) {
    r.table.rows.push_back({tr.times[i], log10_floored(pa[i]), log10_floored(pc[i]), log10_floored(pf[i]), rl[i],
                            lr[i], f[i]});
  }
  return r;
}

// ---------------------------------------------------------------------------

double OffsetCurve::at(double offset) const {
  for (std::size_t i = 0; i < offsets.size(); ++i) {
    if (std::abs(offsets[i] - offset) <= 1e-12) return fidelity[i];
  }
  throw ArgumentError("offset " + format_number(offset) + " was not evaluated");
}

FeasibilityResult feasibility_run(const FeasibilitySpec& spec, unsigned jobs) {
  if (spec.omegas.empty() && spec.offsets.empty()) throw ArgumentError("feasibility needs omegas or offsets");
  if (!(spec.trace_span >= 1.0)) throw ArgumentError("trace span must be at least 1");
  for (double o : spec.offsets) {
    if (!std::isfinite(o) || o <= -1.0) throw ArgumentError("timing offsets must be finite and above -1");
  }
  double max_offset = 0.0;
  for (double o : spec.offsets) max_offset = std::max(max_offset, o);

  FeasibilityResult result;
  for (double w : spec.omegas) result.traces.push_back({w, {}, {}, 0.0, 0.0, "ok"});
  if (!spec.offsets.empty()) {
    for (PulseShape::Kind k : {PulseShape::Kind::Rectangular, PulseShape::Kind::Cosine}) {
      result.curves.push_back({k, 0.0, spec.offsets, {}, 0.0, 0.0, "ok"});
    }
  }

  const std::size_t n_traces = result.traces.size();
  parallel_for(n_traces + result.curves.size(), jobs, [&](std::size_t i) {
    RunSpec s = spec.base;
    s.protocol = ProtocolKind::Qesd;
    if (i < n_traces) {
      FeasibilityTrace& tr = result.traces[i];
      s.params.omega = tr.omega;
      s.shape = PulseShape::Kind::Rectangular;
      s.t_end_factor = spec.trace_span;
      try {
        auto out = run_protocol(s);
        tr.times = out.trajectory.times;
        tr.fidelity = out.trajectory.series_of("F");
        tr.duration = out.duration;
        tr.fidelity_at_duration = out.fidelity;
      } catch (const Error& e) {
        tr.status = std::string("error: ") + e.what();
      }
      return;
    }
    OffsetCurve& c = result.curves[i - n_traces];
    s.shape = c.shape;
    s.t_end_factor = 1.0 + max_offset;
    try {
      const double duration = protocol_pulse(s, resolved_params(s)).duration();
      std::vector<double> marks;
      for (double o : spec.offsets) marks.push_back(duration * (1.0 + o));
      auto out = run_protocol(s, marks);
      c.duration = out.duration;
      const auto& f = out.trajectory.series_of("F");
      const auto& times = out.trajectory.times;
      for (double m : marks) {
        const auto it = std::lower_bound(times.begin(), times.end(), m - 1e-12 * times.back());
        c.fidelity.push_back(f[static_cast<std::size_t>(it - times.begin())]);
      }
      const auto best = std::max_element(f.begin(), f.end());
      c.best_fidelity = *best;
      c.best_time = times[static_cast<std::size_t>(best - f.begin())];
    } catch (const Error& e) {
      c.status = std::string("error: ") + e.what();
      c.fidelity.assign(c.offsets.size(), std::nan(""));
    }
  });

  auto& t = result.table;
  t.columns = {"section", "shape", "omega", "time", "rel_offset", "fidelity", "status"};
  for (const auto& tr : result.traces) {
    if (tr.times.empty()) {
      t.rows.push_back({"trace", "rect", tr.omega, std::nan(""), std::nan(""), std::nan(""), tr.status});
      continue;
    }
    for (std::size_t k = 0; k < tr.times.size(); ++k) {
      t.rows.push_back({"trace", "rect", tr.omega, tr.times[k], tr.times[k] / tr.duration - 1.0, tr.fidelity[k],
                        tr.status});
    }
  }
  for (const auto& c : result.curves) {
    for (std::size_t k = 0; k < c.offsets.size(); ++k) {
      t.rows.push_back({"offset", std::string(pulse_kind_name(c.shape)), spec.base.params.omega,
                        c.duration * (1.0 + c.offsets[k]), c.offsets[k], c.fidelity[k], c.status});
    }
  }
  return result;
}

// ---------------------------------------------------------------------------

double max_abs_difference(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) throw ArgumentError("series lengths differ");
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

double dominant_period(const std::vector<double>& times, const std::vector<double>& values) {
  if (times.size() != values.size() || times.size() < 8) throw ArgumentError("period estimate needs 8+ samples");
  const double span = times.back() - times.front();

  // Explained sum of squares of the least-squares fit c + a·cos ωt + b·sin ωt.
  auto power = [&](double w) {
    Eigen::Matrix3d m = Eigen::Matrix3d::Zero();
    Eigen::Vector3d r = Eigen::Vector3d::Zero();
    for (std::size_t i = 0; i < times.size(); ++i) {
      const Eigen::Vector3d x(1.0, std::cos(w * times[i]), std::sin(w * times[i]));
      m += x * x.transpose();
      r += values[i] * x;
    }
    const auto ldlt = m.ldlt();
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) return 0.0;
    const Eigen::Vector3d beta = ldlt.solve(r);
    return beta.dot(r);
  };

  const double dt = span / static_cast<double>(times.size() - 1);
  const double w_lo = 0.25 * 2.0 * kPi / span, w_hi = kPi / dt;
  const double step = 2.0 * kPi / (8.0 * span);
  double best_w = w_lo, best_p = -1.0;
  for (double w = w_lo; w <= w_hi; w += step) {
    const double p = power(w);
    if (p > best_p) best_p = p, best_w = w;
  }
  // Golden-section refinement around the best grid frequency.
  double a = std::max(w_lo, best_w - step), b = best_w + step;
  const double r = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = b - r * (b - a), x2 = a + r * (b - a), f1 = power(x1), f2 = power(x2);
  for (int it = 0; it < 100 && b - a > 1e-12 * best_w; ++it) {
    if (f1 > f2) {
      b = x2, x2 = x1, f2 = f1, x1 = b - r * (b - a), f1 = power(x1);
    } else {
      a = x1, x1 = x2, f1 = f2, x2 = a + r * (b - a), f2 = power(x2);
    }
  }
  return 2.0 * kPi / (0.5 * (a + b));
}

// ---------------------------------------------------------------------------

void write_outputs(const std::string& dir, const std::vector<OutputFile>& files, const nlohmann::json& config,
                   const CsvStamp& stamp) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory '" + dir + "': " + ec.message());

  nlohmann::json manifest;
  manifest["tool"] = "cavnet-sim";
  manifest["version"] = stamp.version;
  manifest["created"] = stamp.timestamp;
  manifest["config_hash"] = stamp.config_hash;
  manifest["config"] = config;
  manifest["checksum_rule"] = "sha256 of each file without its first line";
  manifest["files"] = nlohmann::json::array();

  auto write = [&](const std::string& name, const std::string& content) {
    const fs::path path = fs::path(dir) / name;
    std::ofstream out(path, std::ios::binary);
    out << content;
    out.close();
    if (!out) throw IoError("cannot write '" + path.string() + "'");
  };
  for (const auto& f : files) {
    write(f.name, f.content);
    manifest["files"].push_back({{"name", f.name}, {"sha256", data_checksum(f.content)}, {"bytes", f.content.size()}});
  }
  write("manifest.json", manifest.dump(2) + "\n");
  logger()->info("wrote {} file(s) and manifest.json to {}", files.size(), dir);
}

}  // namespace cavnet
