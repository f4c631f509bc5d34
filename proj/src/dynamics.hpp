#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hamiltonians.hpp"
#include "hilbert.hpp"
#include "ode.hpp"
#include "params.hpp"

namespace cavnet {

/// Real-valued observable: tr(Pρ) for an operator, or ⟨ψ_tar|ρ|ψ_tar⟩ for a
/// target state.
struct Observable {
  std::string name;
  std::optional<LabeledOperator> op;
  std::optional<StateVector> target;

  static Observable expectation(std::string name, LabeledOperator op);
  static Observable overlap(std::string name, StateVector target);

  double value(const StateVector& psi) const;
  double value(const DenseMatrix& rho) const;
};

struct EvolveOptions {
  IntegratorOptions integrator;
  /// Abort when |‖ψ‖ − 1| (or |tr ρ − 1|) exceeds this.
  double norm_tolerance = 1e-6;
  /// Grid indices at which the full state is kept.
  std::vector<std::size_t> snapshot_indices;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<std::string> names;
  std::vector<std::vector<double>> series;  // [observable][time]
  std::vector<std::size_t> snapshot_indices;
  std::vector<StateVector> psi_snapshots;
  std::vector<DenseMatrix> rho_snapshots;
  std::optional<StateVector> final_psi;
  std::optional<DenseMatrix> final_rho;
  IntegratorStats stats;
  double max_norm_drift = 0.0;  // max |‖ψ‖ − 1| or |tr ρ − 1| over accepted steps
  double max_hermiticity_defect = 0.0;  // Lindblad only, over the grid

  const std::vector<double>& series_of(std::string_view name) const;
  bool has(std::string_view name) const;
};

/// Step cap (2π/ω_max)/20 over the oscillating terms of H; 0 if none.
double default_max_step(const TimeDependentHamiltonian& h);

/// Adaptive integration of dψ/dt = −iH(t)ψ. No renormalization is applied.
Trajectory evolve_schrodinger(const TimeDependentHamiltonian& h, const StateVector& psi0,
                              const std::vector<double>& grid, const std::vector<Observable>& observables,
                              const EvolveOptions& options = {});

struct CollapseOperator {
  std::string name;
  LabeledOperator op;
};

/// The 17 jump operators on the network layout: √(γ/3)|f⟩₁⟨e|,
/// √(γ/3)|g_j⟩₁⟨e|, √(γ/2)|g_j⟩ₖ⟨e| (k = 2, 3), √(κ_c/2)a_{m,j},
/// √(κ_f/2)b_{n,j}.
std::vector<CollapseOperator> collapse_operators(const DissipationParams& d, const SpacePtr& space);

/// dρ/dt = −i[H(t), ρ] + Σ (LρL† − ½{L†L, ρ}).
Trajectory evolve_lindblad(const TimeDependentHamiltonian& h, const std::vector<CollapseOperator>& jumps,
                           const DenseMatrix& rho0, const std::vector<double>& grid,
                           const std::vector<Observable>& observables, const EvolveOptions& options = {});

double fidelity(const StateVector& psi, const StateVector& target);
double fidelity(const DenseMatrix& rho, const StateVector& target);

DenseMatrix pure_density(const StateVector& psi);

/// P_A (any atom in |e⟩), P_C (any cavity photon), P_F (any fiber photon) on
/// composite spaces where defined, and P_gRgL, P_gLgR for the states
/// |f⟩₁|g_R g_L⟩₂₃|0⟩ and |f⟩₁|g_L g_R⟩₂₃|0⟩ on every model space.
std::vector<Observable> population_observables(const SpacePtr& space);

/// Evenly spaced grid of `samples` points on [t0, t1] (samples ≥ 2).
std::vector<double> linear_grid(double t0, double t1, std::size_t samples);

}  // namespace cavnet
