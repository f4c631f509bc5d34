#include "protocols.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "error.hpp"
#include "log.hpp"

namespace cavnet {

namespace {

constexpr double kPi = std::numbers::pi;

// Levels of atoms 2 and 3 in the labeled φ states (index 0 is φ₁), then "dark".
constexpr Level kPhiAtoms[15][2] = {
    {Level::GR, Level::GL}, {Level::GR, Level::GL}, {Level::GR, Level::GL}, {Level::GR, Level::GL},
    {Level::E, Level::GL},  {Level::GR, Level::E},  {Level::GL, Level::GL}, {Level::GR, Level::GR},
    {Level::GL, Level::E},  {Level::E, Level::GR},  {Level::GL, Level::GR}, {Level::GL, Level::GR},
    {Level::GL, Level::GR}, {Level::GL, Level::GR}, {Level::GL, Level::GL},
};

std::optional<int> phi_label_index(std::string_view name) {
  if (name == "dark") return 14;
  if (!name.starts_with("phi")) return std::nullopt;
  const int n = std::stoi(std::string(name.substr(3)));
  if (n < 1 || n > 14) return std::nullopt;
  return n - 1;
}

StateVector unit_vector(const SpacePtr& space, std::string_view label) {
  StateVector v = StateVector::Zero(static_cast<Eigen::Index>(space->dimension()));
  v(static_cast<Eigen::Index>(space->index_of_label(label))) = 1.0;
  return v;
}

Branch require_branch(const SystemParams& p, ModelKind kind) {
  auto n = resonant_branch(p);
  if (!n) {
    throw ArgumentError(std::string(model_name(kind)) +
                        " model needs a resonant branch: choose delta2 = delta1 - n*nu for n in {+sqrt3, -sqrt3, +1, -1, 0}");
  }
  return *n;
}

std::vector<double> protocol_grid(double duration, const RunOptions& options, std::size_t& duration_index) {
  const double end = options.t_end.value_or(duration);
  if (end < duration * (1.0 - 1e-12)) throw ArgumentError("t_end is shorter than the pulse");
  std::vector<double> marks{duration};
  marks.insert(marks.end(), options.extra_times.begin(), options.extra_times.end());
  std::vector<std::size_t> indices;
  auto grid = marked_grid(std::max(end, duration), options.samples, marks, indices);
  duration_index = indices.front();
  return grid;
}

struct Driven {
  SystemParams params;
  Envelope envelope;
};

// Rectangular pulses become a constant Ω; shaped pulses an envelope.
Driven drive_for(const SystemParams& p, const PulseShape& pulse) {
  Driven d{p, {}};
  if (pulse.kind() == PulseShape::Kind::Rectangular) {
    d.params.omega = pulse.amplitude();
  } else {
    d.envelope = pulse.envelope();
  }
  return d;
}

Trajectory simulate(const ModelInstance& m, const DissipationParams& d, const StateVector& psi0,
                    const std::vector<double>& grid, const std::vector<Observable>& observables,
                    const EvolveOptions& options) {
  if (d.closed()) return evolve_schrodinger(m.hamiltonian, psi0, grid, observables, options);
  if (m.kind != ModelKind::Full) throw ArgumentError("dissipation is only supported with the full model");
  constexpr std::size_t kMaxLindbladDimension = 2000;
  if (m.space->dimension() > kMaxLindbladDimension) {
    throw ArgumentError("Lindblad evolution is limited to dimension " + std::to_string(kMaxLindbladDimension) +
                        "; use an excitation-sector truncation");
  }
  return evolve_lindblad(m.hamiltonian, collapse_operators(d, m.space), pure_density(psi0), grid, observables,
                         options);
}

}  // namespace

std::vector<double> marked_grid(double t_end, std::size_t samples, std::span<const double> marks,
                                std::vector<std::size_t>& mark_indices) {
  std::vector<double> grid = linear_grid(0.0, t_end, samples);
  const double snap = 1e-12 * t_end;
  for (double m : marks) {
    if (!(m >= 0.0) || m > t_end + snap) throw ArgumentError("grid mark lies outside [0, t_end]");
    auto it = std::lower_bound(grid.begin(), grid.end(), m - snap);
    if (it == grid.end() || std::abs(*it - m) > snap) grid.insert(it, m);
  }
  mark_indices.clear();
  for (double m : marks) {
    auto it = std::lower_bound(grid.begin(), grid.end(), m - snap);
    *it = std::min(m, t_end);
    mark_indices.push_back(static_cast<std::size_t>(it - grid.begin()));
  }
  return grid;
}

std::string_view model_name(ModelKind kind) {
  switch (kind) {
    case ModelKind::Full: return "full";
    case ModelKind::NormalMode: return "normal-mode";
    case ModelKind::BranchEffective: return "branch-effective";
    case ModelKind::SingleExciton: return "single-exciton";
    case ModelKind::Zeno: return "zeno";
    case ModelKind::Raman: return "raman";
  }
  return "?";
}

std::optional<ModelKind> parse_model(std::string_view text) {
  for (ModelKind k : kModelKinds) {
    if (text == model_name(k)) return k;
  }
  return std::nullopt;
}

ProtocolTiming ProtocolTiming::from(const SystemParams& p) {
  if (p.omega == 0.0) throw ArgumentError("protocol timing needs omega != 0");
  if (p.delta1 == 0.0) throw ArgumentError("protocol timing needs delta1 != 0 (division by delta1)");
  ProtocolTiming t;
  t.omega_eff = p.omega * p.omega / (4.0 * p.delta1);
  t.tau_qesd = kPi / (4.0 * t.omega_eff);
  t.t_qst = kPi / (2.0 * t.omega_eff);
  return t;
}

PulseShape::PulseShape(Kind kind, double amplitude, double duration)
    : kind_(kind), amplitude_(amplitude), duration_(duration) {
  if (!std::isfinite(amplitude) || !std::isfinite(duration) || !(duration > 0.0)) {
    throw ArgumentError("pulse needs a finite amplitude and a positive duration");
  }
}

PulseShape PulseShape::rectangular(double omega, double duration) { return {Kind::Rectangular, omega, duration}; }

PulseShape PulseShape::cosine(double peak, double duration) { return {Kind::Cosine, peak, duration}; }

double PulseShape::at(double t) const {
  if (kind_ == Kind::Rectangular) return amplitude_;
  return amplitude_ * (std::cos(2.0 * kPi * t / duration_ - kPi) + 1.0) / 2.0;
}

double PulseShape::energy() const {
  if (kind_ == Kind::Rectangular) return amplitude_ * amplitude_ * duration_;
  return 3.0 * amplitude_ * amplitude_ * duration_ / 8.0;
}

Envelope PulseShape::envelope() const {
  return [shape = *this](double t) { return shape.at(t); };
}

std::string_view pulse_kind_name(PulseShape::Kind kind) {
  return kind == PulseShape::Kind::Rectangular ? "rect" : "cosine";
}

PulseShape match_from_rect(double omega, double duration, double peak) {
  if (peak == 0.0) throw ArgumentError("cosine pulse peak must be nonzero");
  return PulseShape::cosine(peak, 8.0 * omega * omega * duration / (3.0 * peak * peak));
}

void check_pulse_energy(const PulseShape& pulse, const SystemParams& p, double protocol_time) {
  const double expected = p.omega * p.omega * protocol_time;
  if (std::abs(pulse.energy() - expected) > 1e-9 * std::abs(expected)) {
    throw ArgumentError("pulse area mismatch: integral of Omega^2 is " + std::to_string(pulse.energy()) +
                        ", protocol needs " + std::to_string(expected));
  }
}

ModelInstance build_model(const SystemParams& p, ModelKind kind, const Truncation& truncation, const Envelope& omega,
                          bool with_dark) {
  p.validate();
  auto composite = [&](SpacePtr space, TimeDependentHamiltonian h, std::optional<Branch> branch) {
    ModelInstance m{kind, space, std::move(h), atomic_product_state(space, Level::F, Level::GR, Level::GL),
                    atomic_product_state(space, Level::F, Level::GL, Level::GR), std::nullopt, branch};
    if (with_dark) m.dark = atomic_product_state(space, Level::F, Level::GL, Level::GL);
    return m;
  };
  auto flat = [&](TimeDependentHamiltonian h, std::optional<Branch> branch) {
    SpacePtr space = h.space();
    ModelInstance m{kind, space, std::move(h), unit_vector(space, "phi1"), unit_vector(space, "phi14"), std::nullopt,
                    branch};
    if (with_dark) m.dark = unit_vector(space, "dark");
    return m;
  };

  switch (kind) {
    case ModelKind::Full: {
      auto space = network_space(truncation);
      return composite(space, full_hamiltonian(p, space, omega), std::nullopt);
    }
    case ModelKind::NormalMode: {
      auto space = network_space(truncation);
      return composite(space, normal_mode_hamiltonian(p, space, omega), std::nullopt);
    }
    case ModelKind::BranchEffective: {
      const Branch n = require_branch(p, kind);
      auto space = reduced_space(truncation);
      return composite(space, branch_effective(p, n, space, omega), n);
    }
    case ModelKind::SingleExciton: {
      const Branch n = require_branch(p, kind);
      return flat(single_exciton_model(effective_branch(p, n), p, omega, with_dark), n);
    }
    case ModelKind::Zeno: {
      const Branch n = require_branch(p, kind);
      if (!is_full_coupling(n)) throw ArgumentError("zeno model needs branch +sqrt3, -sqrt3 or 0");
      const EffectiveBranch b = effective_branch(p, n);
      if (!b.zeno_condition()) {
        throw ArgumentError("zeno model needs sqrt2*gbar1 = gbar2 = gbar3 (use coupling = zeno in the config)");
      }
      return flat(zeno_effective(p, b.g, omega, with_dark), n);
    }
    case ModelKind::Raman:
      return flat(raman_model(p, omega, with_dark), resonant_branch(p));
  }
  throw ArgumentError("unknown model");
}

LabeledOperator phase_gate(const SpacePtr& space, int atom_id, double angle) {
  if (atom_id != 2 && atom_id != 3) throw ArgumentError("phase gate acts on atom 2 or 3");
  const auto dim = static_cast<Eigen::Index>(space->dimension());
  const Complex phase = std::polar(1.0, angle);
  SparseMatrix u(dim, dim);
  u.reserve(Eigen::VectorXi::Constant(dim, 1));
  if (space->is_composite()) {
    const std::size_t atom = space->subsystem_index("atom" + std::to_string(atom_id));
    const auto& spec = space->subsystems()[atom];
    for (Eigen::Index i = 0; i < dim; ++i) {
      const bool hit = spec.level_at(space->state(static_cast<std::size_t>(i))[atom]) == Level::GL;
      u.insert(i, i) = hit ? phase : Complex(1.0);
    }
  } else {
    for (Eigen::Index i = 0; i < dim; ++i) {
      const auto label = phi_label_index(space->describe(static_cast<std::size_t>(i)));
      const bool hit = label && kPhiAtoms[*label][atom_id - 2] == Level::GL;
      u.insert(i, i) = hit ? phase : Complex(1.0);
    }
  }
  u.makeCompressed();
  return LabeledOperator(space, std::move(u), std::sin(angle) == 0.0);
}

StateVector qesd_initial_state(const ModelInstance& m) { return m.phi1; }

StateVector qesd_target_state(const ModelInstance& m) {
  return (m.phi1 - Complex(0.0, 1.0) * m.phi14) / std::sqrt(2.0);
}

void QstInput::validate() const {
  if (std::abs(std::norm(alpha) + std::norm(beta) - 1.0) > 1e-12) {
    throw ArgumentError("state-transfer input must satisfy |alpha|^2 + |beta|^2 = 1");
  }
}

QesdResult run_qesd(const SystemParams& p, const DissipationParams& d, const PulseShape& pulse,
                    const ModelChoice& model, const RunOptions& options) {
  d.validate();
  const ProtocolTiming timing = ProtocolTiming::from(p);
  check_pulse_energy(pulse, p, timing.tau_qesd);
  const Driven drive = drive_for(p, pulse);
  const ModelInstance m = build_model(drive.params, model.kind, model.truncation, drive.envelope, false);

  QesdResult r;
  r.duration = pulse.duration();
  const auto grid = protocol_grid(r.duration, options, r.duration_index);
  auto observables = population_observables(m.space);
  observables.push_back(Observable::overlap("F", qesd_target_state(m)));
  r.trajectory = simulate(m, d, qesd_initial_state(m), grid, observables, options.evolve);
  r.fidelity = r.trajectory.series_of("F")[r.duration_index];
  return r;
}

QstResult run_qst(const SystemParams& p, const DissipationParams& d, const PulseShape& pulse, const QstInput& input,
                  const ModelChoice& model, const PhaseSetting& phase, const RunOptions& options) {
  input.validate();
  d.validate();
  const ProtocolTiming timing = ProtocolTiming::from(p);
  check_pulse_energy(pulse, p, timing.t_qst);
  const Driven drive = drive_for(p, pulse);
  const ModelInstance m = build_model(drive.params, model.kind, model.truncation, drive.envelope, true);

  QstResult r;
  r.duration = pulse.duration();
  if (phase.angle) {
    r.phase_angle = *phase.angle;
  } else {
    const std::vector<double> ends{0.0, r.duration};
    const auto moved = evolve_schrodinger(m.hamiltonian, m.phi1, ends, {}, options.evolve);
    const auto kept = evolve_schrodinger(m.hamiltonian, *m.dark, ends, {}, options.evolve);
    const Complex a = m.phi14.dot(*moved.final_psi);
    const Complex b = m.dark->dot(*kept.final_psi);
    if (std::abs(a) < 1e-6 || std::abs(b) < 1e-6) {
      throw NumericalError("phase calibration failed: basis inputs do not reach their targets");
    }
    r.phase_angle = std::arg(a) - std::arg(b);
    r.phase_angle = std::remainder(r.phase_angle, 2.0 * kPi);
  }
  logger()->info("state transfer phase gate angle {:.9f} rad", r.phase_angle);

  const LabeledOperator gate = phase_gate(m.space, 3, r.phase_angle);
  const StateVector target = input.alpha * m.phi14 + input.beta * *m.dark;
  const StateVector scored = gate.adjoint().apply(target);

  const auto grid = protocol_grid(r.duration, options, r.duration_index);
  auto observables = population_observables(m.space);
  observables.push_back(Observable::overlap("F", scored));
  const StateVector psi0 = input.alpha * m.phi1 + input.beta * *m.dark;
  r.trajectory = simulate(m, d, psi0, grid, observables, options.evolve);
  r.fidelity = r.trajectory.series_of("F")[r.duration_index];
  return r;
}

}  // namespace cavnet
