#include "hamiltonians.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Eigenvalues>

#include "error.hpp"
#include "log.hpp"
#include "mode_transform.hpp"

namespace cavnet {

namespace {

const double kSqrt2 = std::sqrt(2.0);

Level ground_level(Polarization j) { return j == Polarization::L ? Level::GL : Level::GR; }

LabeledOperator flat_operator(const SpacePtr& space, const std::vector<Eigen::Triplet<Complex>>& entries) {
  const auto dim = static_cast<Eigen::Index>(space->dimension());
  SparseMatrix m(dim, dim);
  m.setFromTriplets(entries.begin(), entries.end());
  m.prune(Complex(0.0), 0.0);
  return LabeledOperator(space, std::move(m));
}

LabeledOperator hermitian_part(const LabeledOperator& op) {
  LabeledOperator sum = op + op.adjoint();
  return LabeledOperator(sum.space(), sum.matrix(), true);
}

// Σₖ |e⟩ₖ⟨e| on a composite space with atoms "atom1".."atom3".
LabeledOperator excited_population(const SpacePtr& space) {
  LabeledOperator sum = LabeledOperator::zero(space);
  for (int k = 1; k <= 3; ++k) sum += atomic_transition(space, k, Level::E, Level::E);
  return LabeledOperator(space, sum.matrix(), true);
}

// |e⟩₁⟨f| scaled by Ω, or unscaled when a pulse envelope supplies Ω(t).
void add_laser(TimeDependentHamiltonian& h, const LabeledOperator& raising, const SystemParams& p,
               const Envelope& omega, double frequency) {
  if (omega) {
    h.add_with_conjugate(raising, Drive{frequency, omega});
  } else if (frequency == 0.0) {
    h.add_static(hermitian_part(p.omega * raising));
  } else {
    h.add_with_conjugate(p.omega * raising, Drive{frequency, {}});
  }
}

void require_layout(const SpacePtr& space, bool network) {
  if (network ? !is_network_layout(*space) : !is_reduced_layout(*space)) {
    throw ArgumentError(network ? "model needs the 13-subsystem network layout"
                                : "model needs the reduced atoms + collective-mode layout");
  }
}

}  // namespace

Complex Drive::at(double t) const {
  const double s = scale ? scale(t) : 1.0;
  if (frequency == 0.0) return s;
  return s * std::polar(1.0, frequency * t);
}

TimeDependentHamiltonian::TimeDependentHamiltonian(SpacePtr space)
    : space_(space), static_(LabeledOperator::zero(space)) {}

void TimeDependentHamiltonian::add_static(const LabeledOperator& op) {
  if (!op.hermitian()) throw ArgumentError("static Hamiltonian terms must be Hermitian");
  static_ += op;
}

void TimeDependentHamiltonian::add_with_conjugate(const LabeledOperator& op, Drive drive) {
  if (op.space() != space_) throw ArgumentError("term acts on a different space");
  if (!drive.scale) {
    for (auto& term : terms_) {
      if (!term.drive.scale && term.drive.frequency == drive.frequency) {
        term.op += op;
        term.op_adjoint = term.op.adjoint();
        return;
      }
    }
  }
  terms_.push_back(Term{op, op.adjoint(), std::move(drive)});
}

LabeledOperator TimeDependentHamiltonian::at(double t) const {
  SparseMatrix m = static_.matrix();
  for (const auto& term : terms_) {
    const Complex f = term.drive.at(t);
    m += f * term.op.matrix() + std::conj(f) * term.op_adjoint.matrix();
  }
  m.prune(Complex(0.0), 0.0);
  return LabeledOperator(space_, std::move(m), true);
}

void TimeDependentHamiltonian::apply(double t, const StateVector& in, StateVector& out) const {
  out.noalias() = static_.matrix() * in;
  for (const auto& term : terms_) {
    const Complex f = term.drive.at(t);
    out.noalias() += f * (term.op.matrix() * in);
    out.noalias() += std::conj(f) * (term.op_adjoint.matrix() * in);
  }
}

void TimeDependentHamiltonian::apply(double t, const DenseMatrix& in, DenseMatrix& out) const {
  out.noalias() = static_.matrix() * in;
  for (const auto& term : terms_) {
    const Complex f = term.drive.at(t);
    out.noalias() += f * (term.op.matrix() * in);
    out.noalias() += std::conj(f) * (term.op_adjoint.matrix() * in);
  }
}

double TimeDependentHamiltonian::max_frequency() const {
  double m = 0.0;
  for (const auto& term : terms_) m = std::max(m, std::abs(term.drive.frequency));
  return m;
}

// ---------------------------------------------------------------------------

TimeDependentHamiltonian full_hamiltonian(const SystemParams& p, const SpacePtr& space, const Envelope& omega) {
  require_layout(space, true);
  p.validate();
  TimeDependentHamiltonian h(space);

  for (Polarization j : kPolarizations) {
    for (int k = 1; k <= 3; ++k) {
      const double g = p.coupling(k, j);
      if (g == 0.0) continue;
      const LocalFactor factors[] = {
          annihilation_factor(*space, physical_mode_label(static_cast<PhysicalMode>(k - 1), j)),
          transition_factor(*space, k, Level::E, ground_level(j))};
      h.add_with_conjugate(embed_product(space, factors, g), Drive{p.delta2, {}});
    }
  }

  add_laser(h, atomic_transition(space, 1, Level::E, Level::F), p, omega, p.delta1);

  LabeledOperator hopping = LabeledOperator::zero(space);
  for (Polarization j : kPolarizations) {
    for (int k = 1; k <= 2; ++k) {
      const auto fiber = physical_mode_label(static_cast<PhysicalMode>(2 + k), j);
      for (PhysicalMode cavity : {PhysicalMode::Cavity1, static_cast<PhysicalMode>(k)}) {
        const LocalFactor factors[] = {creation_factor(*space, fiber),
                                       annihilation_factor(*space, physical_mode_label(cavity, j))};
        hopping += embed_product(space, factors, p.nu);
      }
    }
  }
  h.add_static(hermitian_part(hopping));
  return h;
}

TimeDependentHamiltonian normal_mode_hamiltonian(const SystemParams& p, const SpacePtr& space,
                                                 const Envelope& omega) {
  require_layout(space, true);
  p.validate();
  const auto& t = mode_transform_matrix();
  TimeDependentHamiltonian h(space);

  for (Branch n : kBranches) {
    const double frequency = p.delta2 - p.delta1 - branch_value(n) * p.nu;
    LabeledOperator coupling = LabeledOperator::zero(space);
    for (Polarization j : kPolarizations) {
      for (int k = 1; k <= 3; ++k) {
        const double gbar = p.coupling(k, j) * t.cavity_weight(n, k);
        if (gbar == 0.0) continue;
        const LocalFactor transition = transition_factor(*space, k, Level::E, ground_level(j));
        for (PhysicalMode m : kPhysicalModes) {
          const double c = t.coefficient(n, m);
          if (c == 0.0) continue;
          const LocalFactor factors[] = {annihilation_factor(*space, physical_mode_label(m, j)), transition};
          coupling += embed_product(space, factors, gbar * c);
        }
      }
    }
    if (coupling.max_abs() > 0.0) h.add_with_conjugate(coupling, Drive{frequency, {}});
  }

  h.add_static(p.delta1 * excited_population(space));
  add_laser(h, atomic_transition(space, 1, Level::E, Level::F), p, omega, 0.0);
  return h;
}

double branch_detuning(const SystemParams& p, Branch n) { return p.delta2 - p.delta1 + branch_value(n) * p.nu; }

std::optional<Branch> resonant_branch(const SystemParams& p) {
  for (Branch n : kBranches) {
    if (std::abs(branch_detuning(p, n)) <= 1e-9 * p.nu) return n;
  }
  return std::nullopt;
}

bool EffectiveBranch::zeno_condition() const {
  const double scale = std::max({1.0, std::abs(g_c1), std::abs(g_c2)});
  const double tol = 1e-12 * scale;
  for (const auto& atom : gbar) {
    if (std::abs(atom[0] - atom[1]) > tol) return false;
  }
  if (std::abs(gbar[1][0] - gbar[2][0]) > tol) return false;
  return std::abs(kSqrt2 * g_c1 - g_c2) <= tol;
}

EffectiveBranch effective_branch(const SystemParams& p, Branch n) {
  const auto& t = mode_transform_matrix();
  EffectiveBranch b;
  b.n = n;
  b.delta_n = branch_detuning(p, n);
  for (int k = 1; k <= 3; ++k) {
    for (Polarization j : kPolarizations) b.gbar[k - 1][index_of(j)] = p.coupling(k, j) * t.cavity_weight(n, k);
  }
  b.g_c1 = b.gbar[0][0];
  b.g_c2 = b.gbar[1][0];
  b.g = b.g_c2;
  return b;
}

TimeDependentHamiltonian branch_effective(const SystemParams& p, Branch n, const SpacePtr& reduced,
                                          const Envelope& omega) {
  require_layout(reduced, false);
  p.validate();
  const EffectiveBranch b = effective_branch(p, n);
  if (std::abs(b.delta_n) > 1e-9 * p.nu) {
    throw ArgumentError("branch " + std::string(branch_name(n)) + " is not resonant (delta_n = " +
                        std::to_string(b.delta_n) + ")");
  }
  double gmax = 0.0;
  for (const auto& atom : b.gbar) gmax = std::max({gmax, std::abs(atom[0]), std::abs(atom[1])});
  double nearest = std::numeric_limits<double>::infinity();
  Branch nearest_branch = n;
  for (Branch m : kBranches) {
    if (m != n && std::abs(branch_detuning(p, m)) < nearest) {
      nearest = std::abs(branch_detuning(p, m));
      nearest_branch = m;
    }
  }
  if (nearest < 10.0 * gmax) {
    logger()->warn("off-resonant branch {} has |delta| = {:.6g} < 10 max(gbar) = {:.6g}; effective model may be inaccurate",
                   branch_name(nearest_branch), nearest, 10.0 * gmax);
  }

  TimeDependentHamiltonian h(reduced);
  LabeledOperator coupling = LabeledOperator::zero(reduced);
  for (Polarization j : kPolarizations) {
    const std::string mode = j == Polarization::L ? "mode.L" : "mode.R";
    for (int k = 1; k <= 3; ++k) {
      const double gbar = b.gbar[k - 1][index_of(j)];
      if (gbar == 0.0) continue;
      const LocalFactor factors[] = {annihilation_factor(*reduced, mode),
                                     transition_factor(*reduced, k, Level::E, ground_level(j))};
      coupling += embed_product(reduced, factors, gbar);
    }
  }
  h.add_static(hermitian_part(coupling));
  h.add_static(p.delta1 * excited_population(reduced));
  add_laser(h, atomic_transition(reduced, 1, Level::E, Level::F), p, omega, 0.0);
  return h;
}

// ---------------------------------------------------------------------------

SpacePtr phi_space(bool with_dark) {
  std::vector<std::string> names;
  for (int i = 1; i <= 14; ++i) names.push_back("phi" + std::to_string(i));
  if (with_dark) names.push_back("dark");
  return HilbertSpace::labeled(std::move(names));
}

namespace {

struct SingleExcitonParts {
  LabeledOperator static_part;
  LabeledOperator laser;  // unit-Ω lowering-to-raising part |φ₂⟩⟨φ₁| + |φ₁₃⟩⟨φ₁₄|
};

SingleExcitonParts single_exciton_parts(const EffectiveBranch& b, const SystemParams& p, bool with_dark) {
  if (!is_full_coupling(b.n)) throw ArgumentError("single-exciton model needs branch +sqrt3, -sqrt3 or 0");
  const double scale = std::max({1.0, std::abs(b.g_c1), std::abs(b.g_c2)});
  for (const auto& atom : b.gbar) {
    if (std::abs(atom[0] - atom[1]) > 1e-12 * scale) throw ArgumentError("single-exciton model needs equal L/R couplings");
  }
  if (std::abs(b.gbar[1][0] - b.gbar[2][0]) > 1e-12 * scale) {
    throw ArgumentError("single-exciton model needs equal couplings on atoms 2 and 3");
  }
  auto space = phi_space(with_dark);
  auto at = [](int i) { return i - 1; };
  std::vector<Eigen::Triplet<Complex>> couplings;
  auto link = [&](int a, int c, double value) { couplings.emplace_back(at(a), at(c), value); };
  const double gc1 = b.g_c1;
  const double gc2 = b.g_c2;
  link(2, 3, gc1);
  link(13, 11, gc1);
  link(2, 4, gc1);
  link(13, 12, gc1);
  link(5, 3, gc2);
  link(8, 10, gc2);
  link(5, 7, gc2);
  link(12, 10, gc2);
  link(6, 8, gc2);
  link(9, 11, gc2);
  link(6, 4, gc2);
  link(9, 7, gc2);
  LabeledOperator h = hermitian_part(flat_operator(space, couplings));

  std::vector<Eigen::Triplet<Complex>> diagonal;
  for (int i : {2, 5, 6, 9, 10, 13}) diagonal.emplace_back(at(i), at(i), p.delta1);
  h += LabeledOperator(space, flat_operator(space, diagonal).matrix(), true);

  std::vector<Eigen::Triplet<Complex>> laser{{at(2), at(1), 1.0}, {at(13), at(14), 1.0}};
  return {h, flat_operator(space, laser)};
}

}  // namespace

LabeledOperator single_exciton_hamiltonian(const EffectiveBranch& b, const SystemParams& p, bool with_dark) {
  auto parts = single_exciton_parts(b, p, with_dark);
  return parts.static_part + hermitian_part(p.omega * parts.laser);
}

TimeDependentHamiltonian single_exciton_model(const EffectiveBranch& b, const SystemParams& p, const Envelope& omega,
                                              bool with_dark) {
  auto parts = single_exciton_parts(b, p, with_dark);
  TimeDependentHamiltonian h(parts.static_part.space());
  h.add_static(parts.static_part);
  add_laser(h, parts.laser, p, omega, 0.0);
  return h;
}

Eigen::MatrixXd phi_pm_transform() {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(10, 10);
  const double r = 1.0 / kSqrt2;
  for (int pair = 0; pair < 5; ++pair) {
    m(2 * pair, 2 * pair) = r;
    m(2 * pair, 2 * pair + 1) = r;
    m(2 * pair + 1, 2 * pair) = r;
    m(2 * pair + 1, 2 * pair + 1) = -r;
  }
  return m;
}

Eigen::Matrix<double, 7, 7> zeno_chain_hamiltonian(double g) {
  Eigen::Matrix<double, 7, 7> h = Eigen::Matrix<double, 7, 7>::Zero();
  for (int i = 0; i < 6; ++i) h(i, i + 1) = h(i + 1, i) = g;
  return h;
}

ZenoEigensystem zeno_eigensystem(double g) {
  if (!std::isfinite(g) || g < 0.0) throw ArgumentError("Zeno coupling g must be finite and non-negative");
  ZenoEigensystem z;
  z.g = g;
  z.xi_plus = std::sqrt(2.0 + kSqrt2);
  z.xi_minus = std::sqrt(2.0 - kSqrt2);
  z.eta_plus = 1.0 + kSqrt2;
  z.eta_minus = 1.0 - kSqrt2;

  using Vec7 = Eigen::Matrix<double, 7, 1>;
  auto column = [&](int c, const Vec7& v, double lambda) {
    z.eigenvectors.col(c) = v;
    z.eigenvalues[c] = lambda;
  };
  column(0, (Vec7() << 1, 0, -1, 0, 1, 0, -1).finished() / 2.0, 0.0);
  for (int s : {1, -1}) {
    const int offset = s > 0 ? 0 : 1;
    column(1 + offset, (Vec7() << 1, s * kSqrt2, 1, 0, -1, -s * kSqrt2, -1).finished() / (2.0 * kSqrt2),
           s * kSqrt2 * g);
    const double xp = z.xi_plus, xm = z.xi_minus;
    column(3 + offset,
           (Vec7() << 1, s * xp, z.eta_plus, s * kSqrt2 * xp, z.eta_plus, s * xp, 1).finished() * kSqrt2 / (4.0 * xp),
           s * xp * g);
    column(5 + offset,
           (Vec7() << 1, s * xm, z.eta_minus, -s * kSqrt2 * xm, z.eta_minus, s * xm, 1).finished() * kSqrt2 /
               (4.0 * xm),
           s * xm * g);
  }

  const auto h = zeno_chain_hamiltonian(g);
  for (int c = 0; c < 7; ++c) {
    const double r = (h * z.eigenvectors.col(c) - z.eigenvalues[c] * z.eigenvectors.col(c)).norm();
    z.max_residual = std::max(z.max_residual, r);
  }
  z.orthonormality_defect =
      (z.eigenvectors.transpose() * z.eigenvectors - Eigen::Matrix<double, 7, 7>::Identity()).cwiseAbs().maxCoeff();

  Eigen::SelfAdjointEigenSolver<Eigen::Matrix<double, 7, 7>> solver(h);
  z.numeric_eigenvalues = solver.eigenvalues();
  std::array<double, 7> sorted = z.eigenvalues;
  std::sort(sorted.begin(), sorted.end());
  for (int i = 0; i < 7; ++i) {
    z.max_eigenvalue_mismatch = std::max(z.max_eigenvalue_mismatch, std::abs(sorted[i] - z.numeric_eigenvalues(i)));
  }
  return z;
}

Eigen::MatrixXd zeno_basis_change() {
  // Chain site s (φ₂, Φ₁⁺..Φ₅⁺, φ₁₃) as a vector over φ₁..φ₁₄ (0-based).
  const double r = 1.0 / kSqrt2;
  Eigen::MatrixXd chain = Eigen::MatrixXd::Zero(14, 7);
  chain(1, 0) = 1.0;
  for (int m = 1; m <= 5; ++m) chain(2 * m, m) = chain(2 * m + 1, m) = r;
  chain(12, 6) = 1.0;

  const ZenoEigensystem z = zeno_eigensystem(1.0);
  Eigen::MatrixXd u = Eigen::MatrixXd::Zero(14, 14);
  u(0, 0) = 1.0;
  u(13, 1) = 1.0;
  u.block(0, 2, 14, 7) = chain * z.eigenvectors;
  for (int m = 1; m <= 5; ++m) {
    u(2 * m, 8 + m) = r;
    u(2 * m + 1, 8 + m) = -r;
  }
  return u;
}

SpacePtr zeno_space(bool with_dark) {
  std::vector<std::string> names{"phi1", "phi14"};
  for (const char* label : ZenoEigensystem::kLabels) names.emplace_back(label);
  if (with_dark) names.push_back("dark");
  return HilbertSpace::labeled(std::move(names));
}

TimeDependentHamiltonian zeno_effective(const SystemParams& p, double g, const Envelope& omega, bool with_dark) {
  p.validate();
  if (std::abs(g) < 10.0 * std::abs(p.omega)) {
    logger()->warn("Zeno condition weak: g = {:.6g} is below 10 Omega = {:.6g}", g, 10.0 * std::abs(p.omega));
  }
  const ZenoEigensystem z = zeno_eigensystem(std::abs(g));
  auto space = zeno_space(with_dark);
  TimeDependentHamiltonian h(space);

  std::vector<Eigen::Triplet<Complex>> diagonal{{2, 2, p.delta1}};
  for (int i = 3; i < 9; ++i) diagonal.emplace_back(i, i, p.delta1 / 2.0);
  h.add_static(LabeledOperator(space, flat_operator(space, diagonal).matrix(), true));

  std::vector<Eigen::Triplet<Complex>> drive{{2, 0, 0.5}, {2, 1, -0.5}};
  add_laser(h, flat_operator(space, drive), p, omega, 0.0);

  for (int m = 0; m < 3; ++m) {
    const int plus = 3 + 2 * m;
    const double split = z.eigenvalues[1 + 2 * m] - z.eigenvalues[2 + 2 * m];
    std::vector<Eigen::Triplet<Complex>> cross{{plus, plus + 1, p.delta1 / 2.0}};
    h.add_with_conjugate(flat_operator(space, cross), Drive{split, {}});
  }
  return h;
}

SpacePtr raman_space(bool with_dark) {
  std::vector<std::string> names{"phi1", "phi14"};
  if (with_dark) names.push_back("dark");
  return HilbertSpace::labeled(std::move(names));
}

namespace {

void check_raman(const SystemParams& p) {
  p.validate();
  if (p.delta1 == 0.0) throw ArgumentError("Raman model needs delta1 != 0 (division by delta1)");
  if (std::abs(p.delta1) < 10.0 * std::abs(p.omega)) {
    logger()->warn("large-detuning condition weak: |delta1| = {:.6g} is below 10 Omega = {:.6g}", std::abs(p.delta1),
                   10.0 * std::abs(p.omega));
  }
}

}  // namespace

LabeledOperator raman_effective(const SystemParams& p, bool with_dark) {
  check_raman(p);
  auto space = raman_space(with_dark);
  const double w = p.omega * p.omega / (4.0 * p.delta1);
  return hermitian_part(flat_operator(space, {{0, 1, w}}));
}

TimeDependentHamiltonian raman_model(const SystemParams& p, const Envelope& omega, bool with_dark) {
  if (!omega) {
    LabeledOperator h0 = raman_effective(p, with_dark);
    TimeDependentHamiltonian h(h0.space());
    h.add_static(h0);
    return h;
  }
  check_raman(p);
  auto space = raman_space(with_dark);
  TimeDependentHamiltonian h(space);
  Envelope squared = [omega](double t) {
    const double w = omega(t);
    return w * w;
  };
  h.add_with_conjugate(flat_operator(space, {{0, 1, 1.0 / (4.0 * p.delta1)}}), Drive{0.0, squared});
  return h;
}

}  // namespace cavnet
