#pragma once

#include <complex>
#include <optional>
#include <span>
#include <vector>
#include <string>
#include <string_view>

#include "dynamics.hpp"
#include "hamiltonians.hpp"
#include "hilbert.hpp"
#include "params.hpp"

namespace cavnet {

enum class ModelKind { Full, NormalMode, BranchEffective, SingleExciton, Zeno, Raman };

inline constexpr std::array<ModelKind, 6> kModelKinds{ModelKind::Full,          ModelKind::NormalMode,
                                                      ModelKind::BranchEffective, ModelKind::SingleExciton,
                                                      ModelKind::Zeno,          ModelKind::Raman};

/// "full", "normal-mode", "branch-effective", "single-exciton", "zeno", "raman".
std::string_view model_name(ModelKind kind);
std::optional<ModelKind> parse_model(std::string_view text);

struct ProtocolTiming {
  double omega_eff = 0.0;  // Ω²/(4Δ₁)
  double tau_qesd = 0.0;   // π/(4ω) = πΔ₁/Ω²
  double t_qst = 0.0;      // π/(2ω)

  /// Throws ArgumentError when Ω or Δ₁ vanish.
  static ProtocolTiming from(const SystemParams& p);
};

class PulseShape {
 public:
  enum class Kind { Rectangular, Cosine };

  static PulseShape rectangular(double omega, double duration);
  /// Ω(t) = Ω_m[cos(2πt/T′ − π) + 1]/2, evaluated for all t.
  static PulseShape cosine(double peak, double duration);

  Kind kind() const { return kind_; }
  double amplitude() const { return amplitude_; }
  double duration() const { return duration_; }
  double at(double t) const;
  /// ∫₀^duration Ω(t)² dt in closed form: Ω²T or 3Ω_m²T′/8.
  double energy() const;
  Envelope envelope() const;

 private:
  PulseShape(Kind kind, double amplitude, double duration);

  Kind kind_;
  double amplitude_;
  double duration_;
};

std::string_view pulse_kind_name(PulseShape::Kind kind);

/// Cosine pulse with peak Ω_m carrying the same ∫Ω²dt as a rectangular pulse
/// (Ω, T): T′ = 8Ω²T/(3Ω_m²).
PulseShape match_from_rect(double omega, double duration, double peak);

/// A Hamiltonian from the reduction hierarchy together with the states the
/// protocols need, expressed on the model's own space.
struct ModelInstance {
  ModelKind kind;
  SpacePtr space;
  TimeDependentHamiltonian hamiltonian;
  StateVector phi1;   // |f⟩₁|g_R g_L⟩₂₃|0⟩
  StateVector phi14;  // |f⟩₁|g_L g_R⟩₂₃|0⟩
  std::optional<StateVector> dark;  // |f⟩₁|g_L g_L⟩₂₃|0⟩ when built for state transfer
  std::optional<Branch> branch;     // resonant branch label for reduced models
};

/// Builds a model. Full and normal-mode models use the network layout with the
/// given truncation, branch-effective the reduced layout; the others use flat
/// spaces. Reduced models require a resonant branch with the Zeno condition
/// (zeno, single-exciton need ḡ₂ = ḡ₃ as well).
ModelInstance build_model(const SystemParams& p, ModelKind kind, const Truncation& truncation,
                          const Envelope& omega = {}, bool with_dark = false);

/// Diagonal phase e^{iθ} on level |g_L⟩ of atom 2 or 3. On flat model spaces the
/// phase acts on the labeled states whose atomic configuration is known
/// (φ states and the dark state) and leaves Zeno eigenstates unchanged.
LabeledOperator phase_gate(const SpacePtr& space, int atom_id, double angle);

StateVector qesd_initial_state(const ModelInstance& m);
/// (|f⟩₁|g_R g_L⟩ − i|f⟩₁|g_L g_R⟩)/√2.
StateVector qesd_target_state(const ModelInstance& m);

struct QstInput {
  Complex alpha = 1.0;
  Complex beta = 0.0;

  /// Throws ArgumentError unless |α|² + |β|² = 1 to 1e−12.
  void validate() const;
};

struct ModelChoice {
  ModelKind kind = ModelKind::Full;
  Truncation truncation = ExcitationSector{1};
};

struct RunOptions {
  std::size_t samples = 401;
  /// Integrate to this time instead of the pulse duration (must not be shorter
  /// than the pulse).
  std::optional<double> t_end;
  /// Extra times (within [0, t_end]) placed exactly on the output grid.
  std::vector<double> extra_times;
  EvolveOptions evolve;
};

/// Output grid for a protocol run: `samples` evenly spaced points on
/// [0, t_end] with `marks` inserted exactly (points closer than 1e−12
/// relative are snapped). Returns the grid and the index of every mark.
std::vector<double> marked_grid(double t_end, std::size_t samples, std::span<const double> marks,
                                std::vector<std::size_t>& mark_indices);

struct QesdResult {
  Trajectory trajectory;  // P_A, P_C, P_F, P_gRgL, P_gLgR where defined, and F
  double fidelity = 0.0;  // at the end of the pulse
  double duration = 0.0;
  std::size_t duration_index = 0;
};

/// Runs entanglement distribution from |φ₀⟩. Closed systems integrate the
/// Schrödinger equation; otherwise the Lindblad equation (full model only).
QesdResult run_qesd(const SystemParams& p, const DissipationParams& d, const PulseShape& pulse,
                    const ModelChoice& model, const RunOptions& options = {});

struct PhaseSetting {
  /// Fixed gate angle; when empty it is calibrated from closed-system runs of
  /// the two basis inputs so that |g_R⟩₂ and |g_L⟩₂ arrive with equal phase.
  std::optional<double> angle;
};

struct QstResult {
  Trajectory trajectory;  // populations and F(t) with the gate applied
  double fidelity = 0.0;
  double phase_angle = 0.0;
  double duration = 0.0;
  std::size_t duration_index = 0;
};

/// State transfer of α|g_R⟩₂ + β|g_L⟩₂ to atom 3, scored against
/// |f⟩₁|g_L⟩₂(α|g_R⟩₃ + β|g_L⟩₃) after a phase gate on atom 3.
QstResult run_qst(const SystemParams& p, const DissipationParams& d, const PulseShape& pulse, const QstInput& input,
                  const ModelChoice& model, const PhaseSetting& phase = {}, const RunOptions& options = {});

/// Checks that a pulse delivers the rotation of the protocol (∫Ω²dt equal to
/// Ω²τ within 1e−9 relative); throws ArgumentError otherwise.
void check_pulse_energy(const PulseShape& pulse, const SystemParams& p, double protocol_time);

}  // namespace cavnet
