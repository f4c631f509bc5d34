#include <doctest.h>

#include <cmath>
#include <random>

#include <unsupported/Eigen/MatrixFunctions>

#include "error.hpp"
#include "hamiltonians.hpp"
#include "mode_transform.hpp"

using namespace cavnet;

namespace {

SystemParams reference_params() {
  SystemParams p;
  p.g = couplings_for_zeno_scale(30.0, Branch::Zero);
  p.nu = 50.0;
  p.omega = 1.0;
  p.delta1 = 20.0;
  p.delta2 = 20.0;
  return p;
}

double hermiticity(const TimeDependentHamiltonian& h, double t) { return h.at(t).hermiticity_defect(); }

std::vector<double> sample_times(int count) {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(0.0, 10.0);
  std::vector<double> ts;
  for (int i = 0; i < count; ++i) ts.push_back(u(rng));
  return ts;
}

double max_abs(const DenseMatrix& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("branch detuning") {
  SystemParams p = reference_params();
  CHECK(branch_detuning(p, Branch::Zero) == 0.0);
  p.delta2 = p.delta1 - std::sqrt(3.0) * p.nu;
  CHECK(std::abs(branch_detuning(p, Branch::PlusSqrt3)) <= 1e-12);
  CHECK(resonant_branch(p) == Branch::PlusSqrt3);
  p.delta2 = 3.0;
  CHECK(branch_detuning(p, Branch::Zero) == 3.0 - p.delta1);
  CHECK_FALSE(resonant_branch(p).has_value());
}

TEST_CASE("Zeno-scale couplings round trip through the effective couplings") {
  const double g = 30.0;
  for (Branch n : {Branch::PlusSqrt3, Branch::MinusSqrt3, Branch::Zero}) {
    SystemParams p = reference_params();
    p.g = couplings_for_zeno_scale(g, n);
    auto b = effective_branch(p, n);
    CHECK(b.zeno_condition());
    CHECK(b.g == doctest::Approx(g).epsilon(1e-14));
  }
  auto zero = couplings_for_zeno_scale(g, Branch::Zero);
  CHECK(zero[0][0] == doctest::Approx(-std::sqrt(6.0) * g / 2.0));
  CHECK(zero[1][1] == doctest::Approx(std::sqrt(3.0) * g));
  auto plus = couplings_for_zeno_scale(g, Branch::PlusSqrt3);
  CHECK(plus[0][0] == doctest::Approx(std::sqrt(6.0) * g / 2.0));
  CHECK(plus[2][0] == doctest::Approx(2.0 * std::sqrt(3.0) * g));
  CHECK_THROWS_AS(couplings_for_zeno_scale(g, Branch::Plus), ArgumentError);
}

TEST_CASE("effective couplings per branch") {
  SystemParams p;
  p.g = {{{1.1, 1.2}, {2.1, 2.2}, {3.1, 3.2}}};
  p.nu = 10.0;
  const double s3 = std::sqrt(3.0);
  auto zero = effective_branch(p, Branch::Zero);
  CHECK(zero.gbar[0][0] == doctest::Approx(-1.1 / s3));
  CHECK(zero.gbar[2][1] == doctest::Approx(3.2 / s3));
  auto up = effective_branch(p, Branch::PlusSqrt3);
  CHECK(up.gbar[1][0] == doctest::Approx(2.1 / (2 * s3)));
  CHECK(up.gbar[0][1] == doctest::Approx(1.2 / s3));
  auto plus = effective_branch(p, Branch::Plus);
  CHECK(plus.gbar[0][0] == 0.0);
  CHECK(plus.gbar[1][0] == doctest::Approx(-2.1 / 2));
  CHECK(plus.gbar[2][0] == doctest::Approx(3.1 / 2));
}

TEST_CASE("full Hamiltonian structure" * doctest::test_suite("properties")) {
  auto space = network_space(ExcitationSector{1});
  SystemParams p = reference_params();
  auto h = full_hamiltonian(p, space);
  for (double t : sample_times(20)) CHECK(hermiticity(h, t) <= 1e-12);
  CHECK(h.max_frequency() == doctest::Approx(20.0));

  auto number = excitation_number_operator(space);
  for (double t : {0.0, 0.37, 1.93}) CHECK(commutator(h.at(t), number).max_abs() <= 1e-10);

  SystemParams dark = p;
  dark.omega = 0.0;
  auto h0 = full_hamiltonian(dark, space);
  auto phi1 = atomic_product_state(space, Level::F, Level::GR, Level::GL);
  for (double t : {0.0, 0.37, 1.93}) {
    StateVector out;
    h0.apply(t, phi1, out);
    CHECK(out.norm() == 0.0);
  }
  CHECK_THROWS_AS(full_hamiltonian(p, reduced_space(ExcitationSector{1})), ArgumentError);
}

TEST_CASE("excitation sector is closed inside a Fock cutoff" * doctest::test_suite("properties")) {
  auto fock = network_space(FockCutoff{1});
  SystemParams p = reference_params();
  auto h = full_hamiltonian(p, fock);
  auto number = excitation_number_operator(fock);
  CHECK(commutator(h.at(0.37), number).max_abs() <= 1e-10);
  // Nothing couples N̂ ≤ 1 to N̂ ≥ 2.
  const auto m = h.at(1.1).matrix();
  double leak = 0.0;
  for (int r = 0; r < m.outerSize(); ++r) {
    for (SparseMatrix::InnerIterator it(m, r); it; ++it) {
      const int nr = fock->excitation_number(static_cast<std::size_t>(it.row()));
      const int nc = fock->excitation_number(static_cast<std::size_t>(it.col()));
      if ((nr <= 1) != (nc <= 1)) leak = std::max(leak, std::abs(it.value()));
    }
  }
  CHECK(leak == 0.0);
}

TEST_CASE("normal-mode Hamiltonian is the full Hamiltonian in a rotating frame" * doctest::test_suite("properties")) {
  auto space = network_space(ExcitationSector{1});
  SystemParams p = reference_params();
  p.g = {{{-2.0, -1.5}, {3.0, 2.5}, {1.0, 4.0}}};
  auto full = full_hamiltonian(p, space);
  auto normal = normal_mode_hamiltonian(p, space);
  for (double t : sample_times(20)) CHECK(hermiticity(normal, t) <= 1e-12);

  // K = H_CF − Δ₁Σ|e⟩⟨e|, with H_CF the static part of the full model.
  DenseMatrix k = full.static_part().dense();
  for (int a = 1; a <= 3; ++a) k -= p.delta1 * atomic_transition(space, a, Level::E, Level::E).dense();
  for (double t : {0.0, 0.37, 1.93}) {
    const DenseMatrix u = (Complex(0.0, 1.0) * t * k).exp();
    const DenseMatrix expected = u * full.at(t).dense() * u.adjoint() - k;
    CHECK(max_abs(expected - normal.at(t).dense()) <= 1e-9);
  }

  auto number = excitation_number_operator(space);
  CHECK(commutator(normal.at(0.7), number).max_abs() <= 1e-10);
}

TEST_CASE("normal-mode coupling coefficients") {
  auto space = network_space(ExcitationSector{1});
  SystemParams p = reference_params();
  p.g = {{{1.3, 1.3}, {2.0, 2.0}, {2.0, 2.0}}};
  p.delta2 = 7.0;  // keep all branch frequencies distinct
  auto normal = normal_mode_hamiltonian(p, space);
  const double s3 = std::sqrt(3.0);
  auto phi = embed_phi_basis(space, Branch::Zero);
  // ⟨φ₂| (term for c₀) |φ₃⟩ = ḡ₁ = −g₁/√3.
  bool found = false;
  for (const auto& term : normal.terms()) {
    if (std::abs(term.drive.frequency - (p.delta2 - p.delta1)) > 1e-12) continue;
    found = true;
    CHECK(std::abs(phi[1].dot(term.op.apply(phi[2])) - Complex(-1.3 / s3)) <= 1e-12);
  }
  CHECK(found);
  // c₊ on atom 2: −g₂/2 (mode label +1 has phase Δ₂ − Δ₁ − ν).
  found = false;
  auto c_plus_l = collective_mode_operator(space, Branch::Plus, Polarization::L);
  auto e2 = atomic_transition(space, 2, Level::E, Level::GL);
  for (const auto& term : normal.terms()) {
    if (std::abs(term.drive.frequency - (p.delta2 - p.delta1 - p.nu)) > 1e-12) continue;
    found = true;
    auto photon = c_plus_l.adjoint().apply(atomic_product_state(space, Level::GR, Level::GL, Level::GL));
    auto target = e2.apply(c_plus_l.apply(photon));
    CHECK(std::abs(target.dot(term.op.apply(photon)) - Complex(-2.0 / 2.0)) <= 1e-12);
  }
  CHECK(found);
}

TEST_CASE("branch-effective Hamiltonians" * doctest::test_suite("properties")) {
  auto reduced = reduced_space(ExcitationSector{1});
  SystemParams p = reference_params();
  auto h = branch_effective(p, Branch::Zero, reduced);
  for (double t : sample_times(20)) CHECK(hermiticity(h, t) <= 1e-12);
  auto number = excitation_number_operator(reduced);
  CHECK(commutator(h.at(0.0), number).max_abs() <= 1e-10);

  CHECK_THROWS_AS(branch_effective(p, Branch::PlusSqrt3, reduced), ArgumentError);

  SystemParams plus = p;
  plus.delta2 = plus.delta1 - plus.nu;
  auto hp = branch_effective(plus, Branch::Plus, reduced);
  auto phi2 = atomic_product_state(reduced, Level::E, Level::GR, Level::GL);
  StateVector out;
  hp.apply(0.0, phi2, out);
  // Atom 1 in |e⟩ only sees the laser and Δ₁: no photon emission.
  auto phi1 = atomic_product_state(reduced, Level::F, Level::GR, Level::GL);
  CHECK((out - p.delta1 * phi2 - p.omega * phi1).norm() <= 1e-12);
}

TEST_CASE("single-exciton Hamiltonian" * doctest::test_suite("properties")) {
  SystemParams p = reference_params();
  auto b = effective_branch(p, Branch::Zero);
  auto h = single_exciton_hamiltonian(b, p);
  CHECK(h.dimension() == 14);
  CHECK(h.hermiticity_defect() <= 1e-12);
  int offdiag = 0, diag = 0;
  const auto& m = h.matrix();
  for (int r = 0; r < m.outerSize(); ++r)
    for (SparseMatrix::InnerIterator it(m, r); it; ++it) (it.row() == it.col() ? diag : offdiag)++;
  CHECK(offdiag == 28);
  CHECK(diag == 6);

  // Reduced-space branch model projected on the φ basis reproduces it.
  auto reduced = reduced_space(ExcitationSector{1});
  auto phi = embed_phi_basis(reduced, Branch::Zero);
  const DenseMatrix hr = branch_effective(p, Branch::Zero, reduced).at(0.0).dense();
  DenseMatrix projected(14, 14);
  for (int i = 0; i < 14; ++i)
    for (int j = 0; j < 14; ++j) projected(i, j) = phi[i].dot(hr * phi[j]);
  CHECK(max_abs(projected - h.dense()) <= 1e-12);
  // and the φ span is invariant.
  for (int j = 0; j < 14; ++j) {
    StateVector image = hr * phi[j];
    for (int i = 0; i < 14; ++i) image -= phi[i].dot(image) * phi[i];
    CHECK(image.norm() <= 1e-12);
  }

  SystemParams bad = p;
  bad.g[2] = {1.0, 1.0};
  CHECK_THROWS_AS(single_exciton_hamiltonian(effective_branch(bad, Branch::Zero), bad), ArgumentError);
}

TEST_CASE("Phi-plus/minus rotation") {
  const Eigen::MatrixXd t = phi_pm_transform();
  CHECK((t * t.transpose() - Eigen::MatrixXd::Identity(10, 10)).cwiseAbs().maxCoeff() <= 1e-15);
  CHECK((t * t - Eigen::MatrixXd::Identity(10, 10)).cwiseAbs().maxCoeff() <= 1e-15);
  CHECK(t(0, 0) == doctest::Approx(1.0 / std::sqrt(2.0)));
  CHECK(t(0, 1) == doctest::Approx(1.0 / std::sqrt(2.0)));
  std::mt19937 rng(3);
  std::normal_distribution<double> n;
  Eigen::VectorXd v(10);
  for (int i = 0; i < 10; ++i) v(i) = n(rng);
  CHECK((t * v).norm() == doctest::Approx(v.norm()).epsilon(1e-14));

  // In the rotated basis the Hamiltonian is the chain plus a decoupled Φ⁻ block.
  SystemParams p = reference_params();
  auto b = effective_branch(p, Branch::Zero);
  const Eigen::MatrixXd h = single_exciton_hamiltonian(b, p).dense().real();
  const Eigen::MatrixXd u = zeno_basis_change();
  const Eigen::MatrixXd hz = u.transpose() * h * u;
  CHECK(hz.block(0, 9, 9, 5).cwiseAbs().maxCoeff() <= 1e-12);

  // Chain sites {φ₂, Φ₁⁺..Φ₅⁺, φ₁₃} carry uniform hopping g.
  Eigen::MatrixXd chain = Eigen::MatrixXd::Zero(14, 7);
  chain(1, 0) = 1.0;
  for (int m = 1; m <= 5; ++m) chain(2 * m, m) = chain(2 * m + 1, m) = 1.0 / std::sqrt(2.0);
  chain(12, 6) = 1.0;
  Eigen::MatrixXd hg = chain.transpose() * h * chain;
  for (int i : {0, 2, 4, 6}) hg(i, i) -= p.delta1;
  CHECK((hg - zeno_chain_hamiltonian(b.g)).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("Zeno eigensystem closed forms") {
  for (double g : {0.1, 1.0, 30.0}) {
    auto z = zeno_eigensystem(g);
    CHECK(z.max_residual <= 1e-10);
    CHECK(z.max_eigenvalue_mismatch <= 1e-10);
    CHECK(z.orthonormality_defect <= 1e-12);
  }
  auto z = zeno_eigensystem(1.0);
  CHECK(z.eigenvalues[1] == doctest::Approx(1.41421356237));
  CHECK(z.eigenvalues[3] == doctest::Approx(1.84775906502));
  CHECK(z.eigenvalues[5] == doctest::Approx(0.76536686473));
  Eigen::Matrix<double, 7, 1> psi0;
  psi0 << 0.5, 0, -0.5, 0, 0.5, 0, -0.5;
  CHECK((z.eigenvectors.col(0) - psi0).norm() <= 1e-15);
  auto zero = zeno_eigensystem(0.0);
  CHECK(zero.max_residual <= 1e-12);
  CHECK(zero.numeric_eigenvalues.cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("Zeno basis change reproduces the transformed drive") {
  const Eigen::MatrixXd u = zeno_basis_change();
  CHECK((u.transpose() * u - Eigen::MatrixXd::Identity(14, 14)).cwiseAbs().maxCoeff() <= 1e-12);
  SystemParams p = reference_params();
  auto b = effective_branch(p, Branch::Zero);
  const Eigen::MatrixXd hz = u.transpose() * single_exciton_hamiltonian(b, p).dense().real() * u;
  const double w = p.omega;
  CHECK(hz(2, 0) == doctest::Approx(w / 2));
  CHECK(hz(2, 1) == doctest::Approx(-w / 2));
  CHECK(hz(3, 0) == doctest::Approx(w / (2 * std::sqrt(2.0))));
  CHECK(hz(2, 2) == doctest::Approx(p.delta1));
  CHECK(hz(3, 3) == doctest::Approx(std::sqrt(2.0) * b.g + p.delta1 / 2));
}

TEST_CASE("Zeno effective model" * doctest::test_suite("properties")) {
  SystemParams p = reference_params();
  auto h = zeno_effective(p, 30.0);
  for (double t : sample_times(20)) CHECK(hermiticity(h, t) <= 1e-12);
  auto m = h.at(0.3);
  CHECK(m.element(0, 1) == Complex(0.0));
  CHECK(m.element(2, 0) == Complex(0.5 * p.omega));
  CHECK(m.element(2, 1) == Complex(-0.5 * p.omega));
  CHECK(h.max_frequency() == doctest::Approx(2 * 30.0 * std::sqrt(2.0 + std::sqrt(2.0))));
  SystemParams off = p;
  off.omega = 0.0;
  auto h0 = zeno_effective(off, 30.0).at(0.0);
  CHECK(h0.element(0, 0) == Complex(0.0));
  CHECK(h0.element(2, 0) == Complex(0.0));
}

TEST_CASE("Raman effective model" * doctest::test_suite("properties")) {
  SystemParams p;
  p.nu = 1.0;
  p.omega = 2.0;
  p.delta1 = 40.0;
  auto h = raman_effective(p);
  CHECK(h.element(0, 1).real() == doctest::Approx(0.025));
  CHECK(h.hermiticity_defect() <= 1e-12);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h.dense());
  CHECK(es.eigenvalues()(0) == doctest::Approx(-0.025));
  CHECK(es.eigenvalues()(1) == doctest::Approx(0.025));
  p.delta1 = 0.0;
  CHECK_THROWS_AS(raman_effective(p), ArgumentError);

  SystemParams q;
  q.nu = 1.0;
  q.omega = 2.0;
  q.delta1 = 40.0;
  auto pulsed = raman_model(q, [](double t) { return 2.0 * t; });
  CHECK(pulsed.at(1.5).element(1, 0).real() == doctest::Approx(9.0 / 160.0));
  CHECK(pulsed.at(1.5).hermiticity_defect() <= 1e-12);
}
