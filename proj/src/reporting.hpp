#pragma once

#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "protocols.hpp"

namespace cavnet {

// ---------------------------------------------------------------------------
// Run description shared by all drivers

enum class ProtocolKind { Qesd, Qst };

struct RunSpec {
  SystemParams params;
  DissipationParams dissipation;
  ModelChoice model;
  /// When set, the physical couplings follow the resonant branch from this
  /// Zeno scale g (√2ḡ₁ = ḡ₂ = ḡ₃ = g); otherwise params.g is used as given.
  std::optional<double> zeno_g;
  ProtocolKind protocol = ProtocolKind::Qesd;
  QstInput qst;
  PhaseSetting phase;
  PulseShape::Kind shape = PulseShape::Kind::Rectangular;
  double peak_ratio = 2.0;  // Ω_m/Ω for cosine pulses
  std::size_t samples = 401;
  /// Integrate to t_end_factor × pulse duration (≥ 1).
  double t_end_factor = 1.0;
  IntegratorOptions integrator;
};

/// Applies zeno_g to params.g for the resonant branch. Throws ArgumentError
/// when no full-coupling branch is resonant.
SystemParams resolved_params(const RunSpec& spec);

/// Rectangular pulse of length τ (QESD) or 2τ (QST), or its energy-matched
/// cosine with peak peak_ratio·Ω.
PulseShape protocol_pulse(const RunSpec& spec, const SystemParams& p);

struct ProtocolOutcome {
  Trajectory trajectory;
  double fidelity = 0.0;
  double duration = 0.0;
  std::size_t duration_index = 0;
  std::optional<double> phase_angle;
};

ProtocolOutcome run_protocol(const RunSpec& spec, std::vector<double> extra_times = {});

// ---------------------------------------------------------------------------
// CSV

using Cell = std::variant<double, long long, std::string>;

struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

struct CsvStamp {
  std::string version;
  std::string timestamp;  // ISO 8601, UTC
  std::string config_hash;
};

/// "%.12g"; non-finite values print as nan/inf.
std::string format_number(double v);
/// Column line and data rows.
std::string csv_body(const CsvTable& table);
/// `# cavnet-sim v<version> <timestamp> <hash>` followed by csv_body.
std::string render_csv(const CsvTable& table, const CsvStamp& stamp);

std::string iso8601_now();
std::string sha256_hex(std::string_view data);
/// SHA-256 of a rendered CSV without its first (timestamp) line.
std::string data_checksum(std::string_view content);

CsvTable trajectory_table(const Trajectory& traj);

// ---------------------------------------------------------------------------
// Worker pool

/// Runs fn(0..count−1) on up to `jobs` threads (0: hardware concurrency).
/// fn must not throw; each index is visited exactly once.
void parallel_for(std::size_t count, unsigned jobs, const std::function<void(std::size_t)>& fn);

// ---------------------------------------------------------------------------
// Drivers

/// Model comparison over the three branch scenarios: (i) Δ₂ = Δ₁ − √3ν,
/// (ii) Δ₂ = Δ₁ + √3ν, (iii) Δ₂ = Δ₁. Closed system, constant Ω.
struct CompareSpec {
  RunSpec base;
  std::vector<ModelKind> models;
  double periods = 1.0;  // in units of the Raman population period 4πΔ₁/Ω²
  std::size_t samples = 2001;
};

struct CompareTrace {
  std::string scenario;
  ModelKind model;
  std::vector<double> times;
  std::vector<double> p_phi0;
  std::vector<double> p_phi14;
  std::string status = "ok";
};

struct CompareResult {
  std::vector<CompareTrace> traces;
  CsvTable table;  // scenario, model, time, P_phi0, P_phi14

  const CompareTrace* find(std::string_view scenario, ModelKind model) const;
};

CompareResult compare_models(const CompareSpec& spec, unsigned jobs = 0);

enum class SweepMetric { FinalFidelity, MaxPA, MaxPC, MaxPF };

std::string_view metric_name(SweepMetric m);
std::optional<SweepMetric> parse_metric(std::string_view text);

struct SweepAxis {
  std::string name;  // g, nu, omega, delta1, delta2, delta, gamma, kappa, kappa_c, kappa_f
  std::vector<double> values;
};

struct SweepSpec {
  RunSpec base;
  SweepAxis axis1;
  std::optional<SweepAxis> axis2;
  SweepMetric metric = SweepMetric::FinalFidelity;
};

/// Applies one axis value to a run; throws ArgumentError for unknown names.
void apply_axis(RunSpec& spec, std::string_view name, double value);
/// Throws ArgumentError unless the values are finite and strictly monotone.
void validate_axis(const SweepAxis& axis);

struct SweepPoint {
  double x = 0.0, y = 0.0;
  double metric = 0.0, fidelity = 0.0, max_pa = 0.0, max_pc = 0.0, max_pf = 0.0, fluct_pp = 0.0;
  std::size_t steps = 0, rejected = 0;
  double wall_seconds = 0.0;
  std::string status = "ok";
};

struct SweepResult {
  std::vector<SweepPoint> points;  // axis1-major order
  CsvTable table;
};

/// Evaluates every grid point concurrently; failures are recorded in the
/// point's status and do not abort the sweep.
SweepResult sweep_fidelity(const SweepSpec& spec, unsigned jobs = 0);

struct AuditResult {
  CsvTable table;  // time, log10_PA, log10_PC, log10_PF, P_gRgL, P_gLgR, F
  double max_pa = 0.0, max_pc = 0.0, max_pf = 0.0;
  double fidelity = 0.0;  // at the end of the pulse
};

/// QESD trajectory of a network-layout model with log10 populations
/// (floored at −16).
AuditResult virtual_photon_audit(const RunSpec& spec);
/// Audit columns from an existing QESD outcome of a network-layout model.
AuditResult audit_table(const ProtocolOutcome& outcome);

struct FeasibilitySpec {
  RunSpec base;
  std::vector<double> omegas;   // Rabi frequencies for the fidelity traces
  std::vector<double> offsets;  // relative timing deviations, e.g. −0.02
  double trace_span = 1.1;      // traces run to trace_span × τ
};

struct FeasibilityTrace {
  double omega = 0.0;
  std::vector<double> times;
  std::vector<double> fidelity;
  double duration = 0.0;
  double fidelity_at_duration = 0.0;
  std::string status = "ok";
};

struct OffsetCurve {
  PulseShape::Kind shape;
  double duration = 0.0;
  std::vector<double> offsets;
  std::vector<double> fidelity;
  double best_fidelity = 0.0;  // max of F(t) over the run
  double best_time = 0.0;
  std::string status = "ok";

  /// Fidelity at a listed offset; throws ArgumentError if absent.
  double at(double offset) const;
};

struct FeasibilityResult {
  std::vector<FeasibilityTrace> traces;
  std::vector<OffsetCurve> curves;  // rectangular, cosine
  CsvTable table;  // section, shape, omega, time, rel_offset, fidelity
};

FeasibilityResult feasibility_run(const FeasibilitySpec& spec, unsigned jobs = 0);

// ---------------------------------------------------------------------------
// Analysis helpers

double max_abs_difference(const std::vector<double>& a, const std::vector<double>& b);
/// Period of the strongest sinusoid in a uniformly or non-uniformly sampled
/// series (least-squares periodogram with local refinement).
double dominant_period(const std::vector<double>& times, const std::vector<double>& values);

// ---------------------------------------------------------------------------
// Output files

struct OutputFile {
  std::string name;
  std::string content;
};

/// Writes the files and `manifest.json` (resolved config, version, SHA-256 of
/// every file excluding its first line) into `dir`. Throws IoError.
void write_outputs(const std::string& dir, const std::vector<OutputFile>& files, const nlohmann::json& config,
                   const CsvStamp& stamp);

}  // namespace cavnet
