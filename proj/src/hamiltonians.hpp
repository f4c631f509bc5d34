#pragma once

#include <array>
#include <functional>
#include <optional>
#include <vector>

#include "hilbert.hpp"
#include "params.hpp"

namespace cavnet {

/// Time-dependent laser Rabi frequency Ω(t). An empty Envelope means the
/// constant SystemParams::omega.
using Envelope = std::function<double(double)>;

/// Scalar amplitude scale(t)·e^{i·frequency·t}; an empty scale is 1.
struct Drive {
  double frequency = 0.0;
  Envelope scale;

  Complex at(double t) const;
};

/// H(t) = static_part + Σ_k [f_k(t)·A_k + conj(f_k(t))·A_k†]. Every term is
/// paired with its conjugate partner, so H(t) is Hermitian by construction.
class TimeDependentHamiltonian {
 public:
  struct Term {
    LabeledOperator op;
    LabeledOperator op_adjoint;
    Drive drive;
  };

  explicit TimeDependentHamiltonian(SpacePtr space);

  const SpacePtr& space() const { return space_; }
  std::size_t dimension() const { return space_->dimension(); }
  const LabeledOperator& static_part() const { return static_; }
  const std::vector<Term>& terms() const { return terms_; }

  /// Adds a Hermitian time-independent operator.
  void add_static(const LabeledOperator& op);
  /// Adds f(t)·op + conj(f(t))·op†. Unscaled terms with equal frequency are merged.
  void add_with_conjugate(const LabeledOperator& op, Drive drive);

  LabeledOperator at(double t) const;
  /// out = H(t)·in.
  void apply(double t, const StateVector& in, StateVector& out) const;
  void apply(double t, const DenseMatrix& in, DenseMatrix& out) const;
  /// Largest |frequency| among the oscillating terms.
  double max_frequency() const;

 private:
  SpacePtr space_;
  LabeledOperator static_;
  std::vector<Term> terms_;
};

/// Interaction-picture network Hamiltonian on the 13-subsystem layout:
/// Σ g_{k,j} a_{k,j}|e⟩ₖ⟨g_j| e^{iΔ₂t} + Ω|e⟩₁⟨f| e^{iΔ₁t} + h.c. plus the
/// static hopping ν Σ b†_{k,j}(a_{1,j} + a_{k+1,j}) + h.c.
TimeDependentHamiltonian full_hamiltonian(const SystemParams& p, const SpacePtr& space, const Envelope& omega = {});

/// The same dynamics after the normal-mode transformation, in the frame
/// rotating with K = H_CF − Δ₁Σ|e⟩⟨e|: Δ₁Σ|e⟩⟨e| + Ω(|e⟩₁⟨f| + h.c.) +
/// Σₙ ḡ c_{n,j}|e⟩ₖ⟨g_j| e^{i(Δ₂−Δ₁−nν)t} + h.c. Atomic populations and the
/// amplitudes of photon-free states agree with full_hamiltonian at all times.
TimeDependentHamiltonian normal_mode_hamiltonian(const SystemParams& p, const SpacePtr& space,
                                                 const Envelope& omega = {});

/// δₙ = Δ₂ − Δ₁ + nν.
double branch_detuning(const SystemParams& p, Branch n);

/// Branch whose δₙ vanishes (|δₙ| ≤ 1e−9·ν), if any.
std::optional<Branch> resonant_branch(const SystemParams& p);

/// Collective mode that actually carries the resonant photon for branch
/// label n. In the rotating frame the phase of mode n is Δ₂ − Δ₁ − nν, so the
/// label with δₙ = 0 corresponds to mode −n.
inline Branch physical_mode(Branch n) { return mirror(n); }

struct EffectiveBranch {
  Branch n = Branch::Zero;
  double delta_n = 0.0;
  CouplingTable gbar{};  // ḡ_{k,j}
  double g_c1 = 0.0;     // ḡ₁
  double g_c2 = 0.0;     // ḡ₂ = ḡ₃
  double g = 0.0;        // Zeno scale g_c2

  /// ḡ_{k,L} = ḡ_{k,R}, ḡ₂ = ḡ₃ and √2·ḡ₁ = ḡ₂ to 1e−12 (relative).
  bool zeno_condition() const;
};

/// ḡ_{k,j} = g_{k,j}·T(n, a_k): −g₁/√3 and g_k/√3 for n = 0, g₁/√3 and
/// g_k/(2√3) for n = ±√3, 0 and (−1)^{k−1}g_k/2 for n = ±.
EffectiveBranch effective_branch(const SystemParams& p, Branch n);

/// Reduced-space model of one resonant collective mode (atoms + mode.L/R):
/// Σ ḡ_{k,j} c_j|e⟩ₖ⟨g_j| + h.c. + Δ₁Σ|e⟩⟨e| + Ω(|e⟩₁⟨f| + h.c.).
/// Throws ArgumentError if δₙ ≠ 0; warns when another branch lies within
/// 10·max(g) of resonance.
TimeDependentHamiltonian branch_effective(const SystemParams& p, Branch n, const SpacePtr& reduced,
                                          const Envelope& omega = {});

/// Flat space {phi1..phi14}, optionally with an extra "dark" state standing
/// for |f⟩₁|g_L g_L⟩₂₃|0⟩ (used by state transfer).
SpacePtr phi_space(bool with_dark = false);

/// The 14-state single-exciton Hamiltonian with g_c1 = ḡ₁, g_c2 = ḡ₂.
/// Throws ArgumentError when ḡ₂ ≠ ḡ₃ or L/R couplings differ.
LabeledOperator single_exciton_hamiltonian(const EffectiveBranch& b, const SystemParams& p, bool with_dark = false);
TimeDependentHamiltonian single_exciton_model(const EffectiveBranch& b, const SystemParams& p,
                                              const Envelope& omega = {}, bool with_dark = false);

/// 10×10 map from {φ₃..φ₁₂} to (Φ₁⁺, Φ₁⁻, …, Φ₅⁺, Φ₅⁻), Φ_m^± = (φ_{2m+1} ± φ_{2m+2})/√2.
Eigen::MatrixXd phi_pm_transform();

/// The seven chain sites {φ₂, Φ₁⁺, …, Φ₅⁺, φ₁₃} with uniform hopping g.
Eigen::Matrix<double, 7, 7> zeno_chain_hamiltonian(double g);

struct ZenoEigensystem {
  double g = 0.0;
  double xi_plus = 0.0, xi_minus = 0.0;    // √(2 ± √2)
  double eta_plus = 0.0, eta_minus = 0.0;  // 1 ± √2
  // Order: Ψ₀, Ψ₁⁺, Ψ₁⁻, Ψ₂⁺, Ψ₂⁻, Ψ₃⁺, Ψ₃⁻.
  std::array<double, 7> eigenvalues{};
  Eigen::Matrix<double, 7, 7> eigenvectors;  // columns over the chain sites
  Eigen::Matrix<double, 7, 1> numeric_eigenvalues;  // ascending
  double max_residual = 0.0;                 // max ‖H_g v − λv‖
  double max_eigenvalue_mismatch = 0.0;      // sorted closed form vs numeric
  double orthonormality_defect = 0.0;

  static constexpr const char* kLabels[7] = {"Psi0", "Psi1+", "Psi1-", "Psi2+", "Psi2-", "Psi3+", "Psi3-"};
};

/// Closed-form eigensystem of H_g cross-checked against dense diagonalization.
ZenoEigensystem zeno_eigensystem(double g);

/// 14×14 orthogonal matrix whose columns express the basis
/// {φ₁, φ₁₄, Ψ₀, Ψ₁⁺, Ψ₁⁻, Ψ₂⁺, Ψ₂⁻, Ψ₃⁺, Ψ₃⁻, Φ₁⁻, …, Φ₅⁻} in φ coordinates.
Eigen::MatrixXd zeno_basis_change();

/// Flat space {phi1, phi14, Psi0, Psi1+, …, Psi3-} (+ "dark").
SpacePtr zeno_space(bool with_dark = false);

/// Zeno-subspace Hamiltonian with drive (Ω/2)|Ψ₀⟩(⟨φ₁| − ⟨φ₁₄|) + h.c.,
/// Δ₁|Ψ₀⟩⟨Ψ₀| + (Δ₁/2)Σ|Ψ_m^±⟩⟨Ψ_m^±| and the cross terms
/// (Δ₁/2)e^{i(λ_m⁺ − λ_m⁻)t}|Ψ_m⁺⟩⟨Ψ_m⁻| + h.c. Warns when g < 10·Ω.
TimeDependentHamiltonian zeno_effective(const SystemParams& p, double g, const Envelope& omega = {},
                                        bool with_dark = false);

/// Flat space {phi1, phi14} (+ "dark").
SpacePtr raman_space(bool with_dark = false);

/// (Ω²/4Δ₁)(|φ₁⟩⟨φ₁₄| + h.c.). Throws ArgumentError for Δ₁ = 0; warns when
/// |Δ₁| < 10·Ω.
LabeledOperator raman_effective(const SystemParams& p, bool with_dark = false);
TimeDependentHamiltonian raman_model(const SystemParams& p, const Envelope& omega = {}, bool with_dark = false);

}  // namespace cavnet
