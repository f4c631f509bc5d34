#include <doctest.h>

#include <cmath>
#include <random>

#include "error.hpp"
#include "protocols.hpp"

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

// Composite Simpson rule, independent of the closed-form pulse energy.
double simpson(const std::function<double(double)>& f, double a, double b, int intervals) {
  const double h = (b - a) / intervals;
  double s = f(a) + f(b);
  for (int i = 1; i < intervals; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return s * h / 3.0;
}

PulseShape rect_qesd(const SystemParams& p) { return PulseShape::rectangular(p.omega, ProtocolTiming::from(p).tau_qesd); }
PulseShape rect_qst(const SystemParams& p) { return PulseShape::rectangular(p.omega, ProtocolTiming::from(p).t_qst); }

}  // namespace

TEST_CASE("protocol timing") {
  SystemParams p = reference_params();
  auto t = ProtocolTiming::from(p);
  CHECK(t.omega_eff == p.omega * p.omega / (4.0 * p.delta1));
  CHECK(t.tau_qesd == doctest::Approx(M_PI * p.delta1 / (p.omega * p.omega)).epsilon(1e-15));
  CHECK(t.t_qst == doctest::Approx(2.0 * t.tau_qesd).epsilon(1e-15));
  p.delta1 = 0.0;
  CHECK_THROWS_AS(ProtocolTiming::from(p), ArgumentError);
  p = reference_params();
  p.omega = 0.0;
  CHECK_THROWS_AS(ProtocolTiming::from(p), ArgumentError);
}

TEST_CASE("cosine pulse shape and energy matching") {
  const double omega = 1.3, t = 7.0;
  auto c = PulseShape::cosine(2.0, 5.0);
  CHECK(std::abs(c.at(0.0)) <= 1e-15);
  CHECK(std::abs(c.at(5.0)) <= 1e-15);
  CHECK(c.at(2.5) == doctest::Approx(2.0).epsilon(1e-15));

  auto same = match_from_rect(omega, t, omega);
  CHECK(same.duration() == doctest::Approx(8.0 * t / 3.0).epsilon(1e-15));
  auto fast = match_from_rect(omega, t, 2.0 * omega);
  CHECK(fast.duration() == doctest::Approx(2.0 * t / 3.0).epsilon(1e-15));
  for (double peak : {omega, 1.7 * omega, 2.0 * omega}) {
    auto m = match_from_rect(omega, t, peak);
    CHECK(std::abs(3.0 * peak * peak * m.duration() - 8.0 * omega * omega * t) <= 1e-12 * omega * omega * t);
    const double quad = simpson([&](double s) { return m.at(s) * m.at(s); }, 0.0, m.duration(), 2000);
    CHECK(std::abs(quad - omega * omega * t) <= 1e-9 * omega * omega * t);
  }
  CHECK_THROWS_AS(match_from_rect(omega, t, 0.0), ArgumentError);
  CHECK_THROWS_AS(PulseShape::rectangular(1.0, 0.0), ArgumentError);
}

TEST_CASE("pulse area must match the protocol") {
  SystemParams p = reference_params();
  auto t = ProtocolTiming::from(p);
  CHECK_NOTHROW(check_pulse_energy(rect_qesd(p), p, t.tau_qesd));
  CHECK_NOTHROW(check_pulse_energy(match_from_rect(p.omega, t.tau_qesd, 2.0), p, t.tau_qesd));
  // Half amplitude with a four-fold duration is the same rotation.
  CHECK_NOTHROW(check_pulse_energy(PulseShape::rectangular(0.5, 4.0 * t.tau_qesd), p, t.tau_qesd));
  CHECK_THROWS_AS(check_pulse_energy(PulseShape::rectangular(1.0, 1.01 * t.tau_qesd), p, t.tau_qesd), ArgumentError);
  CHECK_THROWS_AS(run_qesd(p, {}, rect_qst(p), {ModelKind::Raman}), ArgumentError);
}

TEST_CASE("QESD initial and target states") {
  SystemParams p = reference_params();
  auto m = build_model(p, ModelKind::Full, ExcitationSector{1});
  auto psi0 = qesd_initial_state(m);
  CHECK((psi0.array() != Complex(0.0)).count() == 1);
  CHECK(excitation_number_operator(m.space).expectation(psi0).real() == doctest::Approx(1.0));
  auto phi = embed_phi_basis(m.space, Branch::Zero);
  CHECK(std::norm(phi[0].dot(psi0)) == doctest::Approx(1.0));
  CHECK(std::abs(phi[13].dot(psi0)) == 0.0);
  auto target = qesd_target_state(m);
  CHECK(target.norm() == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(fidelity(psi0, target) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("phase gate") {
  for (ModelKind kind : {ModelKind::Full, ModelKind::BranchEffective, ModelKind::SingleExciton, ModelKind::Zeno,
                         ModelKind::Raman}) {
    CAPTURE(model_name(kind));
    auto m = build_model(reference_params(), kind, ExcitationSector{1}, {}, true);
    const auto dim = static_cast<Eigen::Index>(m.space->dimension());
    auto id = phase_gate(m.space, 3, 0.0);
    CHECK((id.dense() - DenseMatrix::Identity(dim, dim)).cwiseAbs().maxCoeff() == 0.0);
    auto u = phase_gate(m.space, 2, 0.7).dense();
    CHECK((u.adjoint() * u - DenseMatrix::Identity(dim, dim)).cwiseAbs().maxCoeff() <= 1e-15);

    const StateVector bell = (m.phi1 + m.phi14) / std::sqrt(2.0);
    const StateVector gated = phase_gate(m.space, 2, M_PI / 2.0).apply(qesd_target_state(m));
    CHECK(fidelity(gated, bell) == doctest::Approx(1.0).epsilon(1e-15));

    // Atom 3 is in |g_L⟩ for φ₁ and the dark state, in |g_R⟩ for φ₁₄.
    auto u3 = phase_gate(m.space, 3, 1.0);
    CHECK(std::abs(m.phi1.dot(u3.apply(m.phi1)) - std::polar(1.0, 1.0)) <= 1e-15);
    CHECK(std::abs(m.phi14.dot(u3.apply(m.phi14)) - 1.0) <= 1e-15);
    CHECK(std::abs(m.dark->dot(u3.apply(*m.dark)) - std::polar(1.0, 1.0)) <= 1e-15);
  }
  CHECK_THROWS_AS(phase_gate(raman_space(), 1, 0.1), ArgumentError);
}

TEST_CASE("model construction checks the branch") {
  SystemParams p = reference_params();
  p.delta2 = 3.0;
  CHECK_THROWS_AS(build_model(p, ModelKind::Zeno, ExcitationSector{1}), ArgumentError);
  CHECK_THROWS_AS(build_model(p, ModelKind::BranchEffective, ExcitationSector{1}), ArgumentError);
  CHECK_NOTHROW(build_model(p, ModelKind::Full, ExcitationSector{1}));
  p = reference_params();
  for (auto& row : p.g) row = {10.0, 10.0};
  CHECK_THROWS_AS(build_model(p, ModelKind::Zeno, ExcitationSector{1}), ArgumentError);
  CHECK_NOTHROW(build_model(p, ModelKind::SingleExciton, ExcitationSector{1}));
  for (ModelKind k : kModelKinds) CHECK(parse_model(model_name(k)) == k);
  CHECK_FALSE(parse_model("exact").has_value());
}

TEST_CASE("Raman QESD reaches the target exactly") {
  SystemParams p = reference_params();
  auto r = run_qesd(p, {}, rect_qesd(p), {ModelKind::Raman});
  CHECK(r.fidelity == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(r.trajectory.times[r.duration_index] == r.duration);

  // Only ∫Ω² matters for the Raman model.
  auto shaped = run_qesd(p, {}, match_from_rect(p.omega, ProtocolTiming::from(p).tau_qesd, 1.7), {ModelKind::Raman});
  CHECK(shaped.fidelity == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("Raman QST transfers arbitrary inputs") {
  SystemParams p = reference_params();
  for (QstInput in : {QstInput{1.0, 0.0}, QstInput{std::sqrt(0.5), std::sqrt(0.5)},
                      QstInput{Complex(0.6, 0.0), Complex(0.0, 0.8)}}) {
    auto r = run_qst(p, {}, rect_qst(p), in, {ModelKind::Raman});
    CHECK(r.fidelity == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(r.phase_angle == doctest::Approx(-M_PI / 2.0).epsilon(1e-8));
  }
  CHECK_THROWS_AS(run_qst(p, {}, rect_qst(p), QstInput{1.0, 1.0}, {ModelKind::Raman}), ArgumentError);
}

TEST_CASE("dissipation needs the full model") {
  SystemParams p = reference_params();
  DissipationParams d;
  d.gamma = 0.1;
  CHECK_THROWS_AS(run_qesd(p, d, rect_qesd(p), {ModelKind::Zeno}), ArgumentError);
}

TEST_CASE("model hierarchy at the weak-drive reference point") {
  SystemParams p = reference_params();
  for (ModelKind k : kModelKinds) {
    CAPTURE(model_name(k));
    auto r = run_qesd(p, {}, rect_qesd(p), {k}, {.samples = 41});
    CHECK(r.fidelity >= 0.99);
  }
}

TEST_CASE("full-model QESD: atom 1 stays in f and fidelity is converged") {
  SystemParams p = reference_params();
  RunOptions options;
  options.samples = 801;
  auto r = run_qesd(p, {}, rect_qesd(p), {ModelKind::Full}, options);
  CHECK(r.fidelity >= 0.99);

  auto m = build_model(p, ModelKind::Full, ExcitationSector{1});
  auto f1 = diagonal_projector(m.space, [&](const BasisState& s) {
    return m.space->subsystems()[0].level_at(s[0]) == Level::F;
  });
  auto traj = evolve_schrodinger(m.hamiltonian, qesd_initial_state(m), r.trajectory.times,
                                 {Observable::expectation("P_f1", f1)});
  for (double v : traj.series_of("P_f1")) CHECK(v >= 0.98);

  RunOptions tight = options;
  tight.evolve.integrator.rtol /= 2.0;
  tight.evolve.integrator.atol /= 2.0;
  auto r2 = run_qesd(p, {}, rect_qesd(p), {ModelKind::Full}, tight);
  CHECK(std::abs(r2.fidelity - r.fidelity) < 1e-4);
}

TEST_CASE("full-model QST is linear in the input" * doctest::test_suite("properties")) {
  SystemParams p = reference_params();
  auto pulse = rect_qst(p);
  RunOptions options;
  options.samples = 2;
  auto basis_r = run_qst(p, {}, pulse, QstInput{1.0, 0.0}, {ModelKind::Full}, {}, options);
  const PhaseSetting fixed{basis_r.phase_angle};
  auto basis_l = run_qst(p, {}, pulse, QstInput{0.0, 1.0}, {ModelKind::Full}, fixed, options);
  const double floor = std::min(basis_r.fidelity, basis_l.fidelity);
  CHECK(floor >= 0.99);

  std::mt19937 rng(2024);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 8; ++i) {
    const double theta = std::acos(1.0 - 2.0 * u(rng));
    const double phi = 2.0 * M_PI * u(rng);
    QstInput in{std::cos(theta / 2.0), std::polar(std::sin(theta / 2.0), phi)};
    auto r = run_qst(p, {}, pulse, in, {ModelKind::Full}, fixed, options);
    CHECK(r.fidelity >= floor - 0.01);
  }
}
