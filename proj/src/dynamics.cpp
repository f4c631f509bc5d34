#include "dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "error.hpp"
#include "log.hpp"

namespace cavnet {

Observable Observable::expectation(std::string name, LabeledOperator op) {
  return Observable{std::move(name), std::move(op), std::nullopt};
}

Observable Observable::overlap(std::string name, StateVector target) {
  return Observable{std::move(name), std::nullopt, std::move(target)};
}

double Observable::value(const StateVector& psi) const {
  if (op) return op->expectation(psi).real();
  return std::norm(target->dot(psi));
}

double Observable::value(const DenseMatrix& rho) const {
  if (op) return op->expectation(rho).real();
  return target->dot(rho * *target).real();
}

const std::vector<double>& Trajectory::series_of(std::string_view name) const {
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (names[i] == name) return series[i];
  }
  throw ArgumentError("trajectory has no observable '" + std::string(name) + "'");
}

bool Trajectory::has(std::string_view name) const {
  return std::find(names.begin(), names.end(), name) != names.end();
}

double default_max_step(const TimeDependentHamiltonian& h) {
  const double w = h.max_frequency();
  return w > 0.0 ? (2.0 * std::numbers::pi / w) / 20.0 : 0.0;
}

namespace {

Trajectory prepare(const std::vector<double>& grid, const std::vector<Observable>& observables,
                   const EvolveOptions& options) {
  Trajectory traj;
  traj.times = grid;
  for (const auto& o : observables) traj.names.push_back(o.name);
  traj.series.assign(observables.size(), std::vector<double>(grid.size(), 0.0));
  traj.snapshot_indices = options.snapshot_indices;
  std::sort(traj.snapshot_indices.begin(), traj.snapshot_indices.end());
  for (auto i : traj.snapshot_indices) {
    if (i >= grid.size()) throw ArgumentError("snapshot index outside the time grid");
  }
  return traj;
}

IntegratorOptions with_step_cap(const TimeDependentHamiltonian& h, IntegratorOptions opt) {
  const double cap = default_max_step(h);
  if (cap > 0.0) opt.max_step = opt.max_step > 0.0 ? std::min(opt.max_step, cap) : cap;
  return opt;
}

void check_observables(const std::vector<Observable>& observables, std::size_t dim) {
  for (const auto& o : observables) {
    if (o.op && o.op->dimension() != dim) throw ArgumentError("observable '" + o.name + "' has the wrong dimension");
    if (o.target && static_cast<std::size_t>(o.target->size()) != dim) {
      throw ArgumentError("observable '" + o.name + "' has the wrong dimension");
    }
  }
}

}  // namespace

Trajectory evolve_schrodinger(const TimeDependentHamiltonian& h, const StateVector& psi0,
                              const std::vector<double>& grid, const std::vector<Observable>& observables,
                              const EvolveOptions& options) {
  const std::size_t dim = h.dimension();
  if (static_cast<std::size_t>(psi0.size()) != dim) throw ArgumentError("initial state has the wrong dimension");
  if (std::abs(psi0.norm() - 1.0) > 1e-8) throw ArgumentError("initial state is not normalized");
  check_observables(observables, dim);

  Trajectory traj = prepare(grid, observables, options);
  const std::function<void(double, const StateVector&, StateVector&)> rhs = [&](double t, const StateVector& y,
                                                                                StateVector& dy) {
    h.apply(t, y, dy);
    dy *= Complex(0.0, -1.0);
  };
  std::size_t snap = 0;
  const std::function<void(std::size_t, double, const StateVector&)> observe = [&](std::size_t i, double,
                                                                                   const StateVector& y) {
    for (std::size_t k = 0; k < observables.size(); ++k) traj.series[k][i] = observables[k].value(y);
    while (snap < traj.snapshot_indices.size() && traj.snapshot_indices[snap] == i) {
      traj.psi_snapshots.push_back(y);
      ++snap;
    }
    if (i + 1 == grid.size()) traj.final_psi = y;
  };
  const std::function<void(double, const StateVector&)> check = [&](double t, const StateVector& y) {
    const double drift = std::abs(y.norm() - 1.0);
    traj.max_norm_drift = std::max(traj.max_norm_drift, drift);
    if (drift > options.norm_tolerance) {
      throw NumericalError("norm drift " + std::to_string(drift) + " exceeds tolerance at t = " + std::to_string(t));
    }
  };
  traj.stats = integrate_dopri5<StateVector>(rhs, psi0, grid, with_step_cap(h, options.integrator), observe, check);
  logger()->debug("schrodinger: dim {} steps {} rejected {} rhs {}", dim, traj.stats.steps, traj.stats.rejected,
                  traj.stats.rhs_evaluations);
  return traj;
}

std::vector<CollapseOperator> collapse_operators(const DissipationParams& d, const SpacePtr& space) {
  d.validate();
  if (!is_network_layout(*space)) throw ArgumentError("collapse operators need the network layout");
  std::vector<CollapseOperator> ops;
  const double atom1 = std::sqrt(d.atom1_channel_rate());
  const double edge = std::sqrt(d.edge_atom_channel_rate());
  ops.push_back({"atom1.e->f", atom1 * atomic_transition(space, 1, Level::F, Level::E)});
  for (int k = 1; k <= 3; ++k) {
    for (Polarization j : kPolarizations) {
      const Level g = j == Polarization::L ? Level::GL : Level::GR;
      ops.push_back({"atom" + std::to_string(k) + ".e->g" + polarization_suffix(j),
                     (k == 1 ? atom1 : edge) * atomic_transition(space, k, g, Level::E)});
    }
  }
  for (PhysicalMode m : kPhysicalModes) {
    const double rate = static_cast<int>(m) < 3 ? d.cavity_mode_rate() : d.fiber_mode_rate();
    for (Polarization j : kPolarizations) {
      const auto label = physical_mode_label(m, j);
      ops.push_back({label, std::sqrt(rate) * annihilation(space, label)});
    }
  }
  return ops;
}

Trajectory evolve_lindblad(const TimeDependentHamiltonian& h, const std::vector<CollapseOperator>& jumps,
                           const DenseMatrix& rho0, const std::vector<double>& grid,
                           const std::vector<Observable>& observables, const EvolveOptions& options) {
  const std::size_t dim = h.dimension();
  if (static_cast<std::size_t>(rho0.rows()) != dim || static_cast<std::size_t>(rho0.cols()) != dim) {
    throw ArgumentError("initial density matrix has the wrong dimension");
  }
  if ((rho0 - rho0.adjoint()).cwiseAbs().maxCoeff() > 1e-12) throw ArgumentError("initial density matrix is not Hermitian");
  if (std::abs(rho0.trace() - Complex(1.0)) > 1e-8) throw ArgumentError("initial density matrix does not have unit trace");
  check_observables(observables, dim);

  // Jump operators are kept as entry lists: LρL† then costs nnz(L)² per jump.
  struct Entry {
    Eigen::Index row, col;
    Complex value;
  };
  std::vector<std::vector<Entry>> active;
  SparseMatrix decay(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  for (const auto& j : jumps) {
    if (j.op.dimension() != dim) throw ArgumentError("collapse operator '" + j.name + "' has the wrong dimension");
    if (j.op.max_abs() == 0.0) continue;
    const SparseMatrix& l = j.op.matrix();
    std::vector<Entry> entries;
    for (Eigen::Index r = 0; r < l.outerSize(); ++r) {
      for (SparseMatrix::InnerIterator it(l, r); it; ++it) {
        if (it.value() != Complex(0.0)) entries.push_back({it.row(), it.col(), it.value()});
      }
    }
    active.push_back(std::move(entries));
    decay += SparseMatrix(l.adjoint() * l);
  }
  decay *= Complex(0.5);

  Trajectory traj = prepare(grid, observables, options);
  DenseMatrix hrho;
  // dρ = Y + Y† with Y = −i(H − (i/2)ΣL†L)ρ + ½ΣLρL†, exactly Hermitian.
  const std::function<void(double, const DenseMatrix&, DenseMatrix&)> rhs = [&](double t, const DenseMatrix& rho,
                                                                                DenseMatrix& drho) {
    h.apply(t, rho, hrho);
    hrho *= Complex(0.0, -1.0);
    if (!active.empty()) {
      hrho.noalias() -= decay * rho;
      for (const auto& entries : active) {
        for (const Entry& a : entries) {
          const Complex va = 0.5 * a.value;
          for (const Entry& b : entries) hrho(a.row, b.row) += va * rho(a.col, b.col) * std::conj(b.value);
        }
      }
    }
    drho = hrho + hrho.adjoint();
  };
  std::size_t snap = 0;
  const std::function<void(std::size_t, double, const DenseMatrix&)> observe = [&](std::size_t i, double,
                                                                                   const DenseMatrix& rho) {
    for (std::size_t k = 0; k < observables.size(); ++k) traj.series[k][i] = observables[k].value(rho);
    traj.max_hermiticity_defect =
        std::max(traj.max_hermiticity_defect, (rho - rho.adjoint()).cwiseAbs().maxCoeff());
    while (snap < traj.snapshot_indices.size() && traj.snapshot_indices[snap] == i) {
      traj.rho_snapshots.push_back(rho);
      ++snap;
    }
    if (i + 1 == grid.size()) traj.final_rho = rho;
  };
  const std::function<void(double, const DenseMatrix&)> check = [&](double t, const DenseMatrix& rho) {
    const double drift = std::abs(rho.trace().real() - 1.0);
    traj.max_norm_drift = std::max(traj.max_norm_drift, drift);
    if (drift > options.norm_tolerance) {
      throw NumericalError("trace drift " + std::to_string(drift) + " exceeds tolerance at t = " + std::to_string(t));
    }
  };
  traj.stats = integrate_dopri5<DenseMatrix>(rhs, rho0, grid, with_step_cap(h, options.integrator), observe, check);
  logger()->debug("lindblad: dim {} steps {} rejected {} rhs {}", dim, traj.stats.steps, traj.stats.rejected,
                  traj.stats.rhs_evaluations);
  return traj;
}

double fidelity(const StateVector& psi, const StateVector& target) {
  if (psi.size() != target.size()) throw ArgumentError("fidelity: dimension mismatch");
  if (std::abs(target.norm() - 1.0) > 1e-8) throw ArgumentError("fidelity: target is not normalized");
  return std::norm(target.dot(psi));
}

double fidelity(const DenseMatrix& rho, const StateVector& target) {
  if (rho.rows() != target.size() || rho.cols() != target.size()) throw ArgumentError("fidelity: dimension mismatch");
  if (std::abs(target.norm() - 1.0) > 1e-8) throw ArgumentError("fidelity: target is not normalized");
  return target.dot(rho * target).real();
}

DenseMatrix pure_density(const StateVector& psi) { return psi * psi.adjoint(); }

std::vector<Observable> population_observables(const SpacePtr& space) {
  std::vector<Observable> out;
  auto unit = [&](std::size_t i) {
    StateVector v = StateVector::Zero(static_cast<Eigen::Index>(space->dimension()));
    v(static_cast<Eigen::Index>(i)) = 1.0;
    return v;
  };

  if (space->is_composite()) {
    std::vector<std::size_t> atoms, cavities, fibers;
    for (std::size_t i = 0; i < space->subsystems().size(); ++i) {
      const auto& s = space->subsystems()[i];
      if (s.kind != SubsystemKind::BosonMode) {
        atoms.push_back(i);
      } else if (s.label.starts_with("cav")) {
        cavities.push_back(i);
      } else if (s.label.starts_with("fib")) {
        fibers.push_back(i);
      }
    }
    const auto& subs = space->subsystems();
    out.push_back(Observable::expectation("P_A", diagonal_projector(space, [&](const BasisState& s) {
      return std::any_of(atoms.begin(), atoms.end(),
                         [&](std::size_t a) { return subs[a].level_at(s[a]) == Level::E; });
    })));
    if (is_network_layout(*space)) {
      out.push_back(Observable::expectation("P_C", diagonal_projector(space, [&](const BasisState& s) {
        return std::any_of(cavities.begin(), cavities.end(), [&](std::size_t m) { return s[m] > 0; });
      })));
      out.push_back(Observable::expectation("P_F", diagonal_projector(space, [&](const BasisState& s) {
        return std::any_of(fibers.begin(), fibers.end(), [&](std::size_t m) { return s[m] > 0; });
      })));
    }
    out.push_back(Observable::overlap("P_gRgL", atomic_product_state(space, Level::F, Level::GR, Level::GL)));
    out.push_back(Observable::overlap("P_gLgR", atomic_product_state(space, Level::F, Level::GL, Level::GR)));
    return out;
  }

  // The φ space labels its atomic-excitation states explicitly.
  if (space->dimension() >= 14 && space->describe(1) == "phi2") {
    const auto dim = static_cast<Eigen::Index>(space->dimension());
    SparseMatrix p(dim, dim);
    for (int i : {2, 5, 6, 9, 10, 13}) p.insert(i - 1, i - 1) = 1.0;
    out.push_back(Observable::expectation("P_A", LabeledOperator(space, std::move(p), true)));
  }
  out.push_back(Observable::overlap("P_gRgL", unit(space->index_of_label("phi1"))));
  out.push_back(Observable::overlap("P_gLgR", unit(space->index_of_label("phi14"))));
  return out;
}

std::vector<double> linear_grid(double t0, double t1, std::size_t samples) {
  if (samples < 2) throw ArgumentError("a time grid needs at least two samples");
  if (!(t1 > t0)) throw ArgumentError("time grid end must exceed its start");
  std::vector<double> grid(samples);
  for (std::size_t i = 0; i < samples; ++i) {
    grid[i] = i + 1 == samples ? t1 : t0 + (t1 - t0) * static_cast<double>(i) / static_cast<double>(samples - 1);
  }
  return grid;
}

}  // namespace cavnet
