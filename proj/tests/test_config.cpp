#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "config.hpp"
#include "error.hpp"

using namespace cavnet;

namespace {

constexpr const char* kReference = R"(
[system]
unit = omega
g = 30
nu = 50
delta1 = 20
delta2 = 20
)";

RunConfig resolve(const std::string& text) { return Config::parse(text).resolve(); }

std::string config_error(const std::string& text) {
  try {
    resolve(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  FAIL("expected a ConfigError");
  return {};
}

}  // namespace

TEST_CASE("defaults") {
  const RunConfig c = resolve(kReference);
  CHECK(c.unit == FrequencyUnit::DimensionlessOmega);
  CHECK(c.run.params.omega == 1.0);
  CHECK(c.run.params.delta2 == 20.0);
  REQUIRE(c.run.zeno_g.has_value());
  CHECK(*c.run.zeno_g == 30.0);
  CHECK(c.run.model.kind == ModelKind::Full);
  CHECK(truncation_name(c.run.model.truncation) == "sector1");
  CHECK(c.run.protocol == ProtocolKind::Qesd);
  CHECK(c.run.shape == PulseShape::Kind::Rectangular);
  CHECK(c.run.peak_ratio == 2.0);
  CHECK(c.run.dissipation.closed());
  CHECK_FALSE(c.run.phase.angle.has_value());
  CHECK(c.compare_models.size() == kModelKinds.size());
  CHECK(c.feasibility_omegas == std::vector<double>{1.0});
  CHECK(c.hash.size() == 16);
  CHECK(c.resolved["system"]["branch"] == "0");
  CHECK(c.resolved["model"]["name"] == "full");
}

TEST_CASE("hash follows the resolved values, not the spelling") {
  const std::string a = resolve(kReference).hash;
  CHECK(resolve(std::string(kReference) + "[model]\nname = full\n").hash == a);
  CHECK(resolve("[system]\nnu=50\ng=30.0\ndelta1=20\n").hash == a);
  CHECK(resolve("[system]\nnu=50\ng=30\ndelta1=20\nomega=1.5\n").hash != a);
}

TEST_CASE("physical units and suffixes") {
  const RunConfig c = resolve(R"(
[system]
unit = mhz
g = 300MHz
nu = 300
delta1 = 100MHz
omega = 5MHz
[dissipation]
gamma = 3MHz
kappa_c = 1.5
kappa_f = 152kHz
)");
  CHECK(c.unit == FrequencyUnit::AngularMHz);
  CHECK(c.run.params.unit == FrequencyUnit::AngularMHz);
  CHECK(c.run.params.omega == 5.0);
  CHECK(c.run.dissipation.kappa_f == doctest::Approx(0.152).epsilon(1e-15));
  CHECK(c.run.dissipation.kappa_c == 1.5);
  CHECK(c.run.dissipation.gamma == 3.0);

  CHECK(config_error("[system]\nunit=mhz\ng=300\nnu=300\ndelta1=100\n").find("omega is required") !=
        std::string::npos);
  CHECK(config_error("[system]\ng=30MHz\nnu=50\ndelta1=20\n").find("mixing units") != std::string::npos);
  CHECK(config_error("[system]\nunit=mhz\ng=30Omega\nnu=50\ndelta1=20\nomega=1\n").find("mixing units") !=
        std::string::npos);
  CHECK_THROWS_AS(resolve("[system]\nunit=ghz\ng=30\nnu=50\ndelta1=20\n"), ConfigError);
}

TEST_CASE("branch selection") {
  const RunConfig c = resolve("[system]\ng=30\nnu=50\ndelta1=20\nbranch=+sqrt3\n");
  CHECK(c.run.params.delta2 == doctest::Approx(20.0 - std::sqrt(3.0) * 50.0));
  CHECK(c.resolved["system"]["branch"] == "+sqrt3");
  CHECK(config_error("[system]\ng=30\nnu=50\ndelta1=20\ndelta2=20\nbranch=+\n").find("contradicts") !=
        std::string::npos);
  CHECK_NOTHROW(resolve("[system]\ng=30\nnu=50\ndelta1=20\ndelta2=20\nbranch=zero\n"));
  CHECK_THROWS_AS(resolve("[system]\ng=30\nnu=50\ndelta1=20\nbranch=2\n"), ConfigError);
  // The Zeno scale needs a full-coupling branch.
  CHECK_THROWS_AS(resolve("[system]\ng=30\nnu=50\ndelta1=20\nbranch=+\n"), ConfigError);
  CHECK_THROWS_AS(resolve("[system]\ng=30\nnu=50\ndelta1=20\ndelta2=21\n"), ConfigError);
}

TEST_CASE("physical couplings") {
  const RunConfig c = resolve(R"(
[system]
coupling = physical
g1 = 1
g2 = 2
g3 = 3
nu = 50
delta1 = 20
delta2 = 21
[model]
name = full
)");
  CHECK_FALSE(c.run.zeno_g.has_value());
  CHECK(c.run.params.g[2][0] == 3.0);
  CHECK(c.run.params.g[2][1] == 3.0);
  CHECK_THROWS_AS(resolve("[system]\ncoupling=physical\ng=1\ng1=1\ng2=1\ng3=1\nnu=5\ndelta1=2\n"), ConfigError);
  CHECK_THROWS_AS(resolve("[system]\ng=1\ng1=1\nnu=5\ndelta1=2\n"), ConfigError);
  // Equal physical couplings do not meet the Zeno condition.
  CHECK(config_error("[system]\ncoupling=physical\ng1=1\ng2=1\ng3=1\nnu=50\ndelta1=20\n[model]\nname=zeno\n")
            .find("zeno") != std::string::npos);
}

TEST_CASE("structural errors") {
  CHECK(config_error(std::string(kReference) + "[extra]\nx=1\n").find("unknown section [extra]") !=
        std::string::npos);
  CHECK(config_error(std::string(kReference) + "[run]\nsteps=1\n").find("unknown key 'steps'") != std::string::npos);
  CHECK(config_error("[system]\nnu=50\ndelta1=20\n").find("[system] g is required") != std::string::npos);
  CHECK_THROWS_AS(resolve("[system]\ng=thirty\nnu=50\ndelta1=20\n"), ConfigError);
  CHECK_THROWS_AS(resolve("[system]\ng=nan\nnu=50\ndelta1=20\n"), ConfigError);
  CHECK_THROWS_AS(Config::parse("[system\ng=1\n"), ConfigError);
  CHECK_THROWS_AS(resolve(std::string(kReference) + "[model]\nname=bogus\n"), ConfigError);
  CHECK_THROWS_AS(resolve(std::string(kReference) + "[model]\ntruncation=sector0x\n"), ConfigError);
  CHECK_THROWS_AS(resolve(std::string(kReference) + "[pulse]\nshape=gauss\n"), ConfigError);
  CHECK_THROWS_AS(resolve(std::string(kReference) + "[pulse]\npeak_ratio=0\n"), ConfigError);
  CHECK_THROWS_AS(resolve(std::string(kReference) + "[run]\nsamples=1\n"), ConfigError);
  CHECK_THROWS_AS(resolve(std::string(kReference) + "[run]\nt_end_factor=0.9\n"), ConfigError);
  CHECK_THROWS_AS(resolve(std::string(kReference) + "[run]\nrtol=-1\n"), ConfigError);
}

TEST_CASE("zero detuning and drive are rejected before any simulation") {
  const std::string msg = config_error("[system]\ng=30\nnu=50\ndelta1=0\ndelta2=0\n[model]\nname=raman\n");
  CHECK(msg.find("division by delta1") != std::string::npos);
  CHECK_THROWS_AS(resolve(std::string(kReference) + "[system]\n"), ConfigError);  // duplicate section
  CHECK_THROWS_AS(resolve("[system]\ng=30\nnu=50\ndelta1=20\nomega=0\n"), ConfigError);
}

TEST_CASE("dissipation constraints") {
  const std::string base(kReference);
  const RunConfig c = resolve(base + "[dissipation]\ngamma=0.5\nkappa=0.5\n");
  CHECK(c.run.dissipation.kappa_c == 0.5);
  CHECK(c.run.dissipation.kappa_f == 0.5);
  CHECK(config_error(base + "[dissipation]\nkappa=0.5\nkappa_c=0.1\n").find("either kappa") != std::string::npos);
  CHECK(config_error(base + "[dissipation]\ngamma=0.5\n[model]\nname=raman\n").find("only supported") !=
        std::string::npos);
  CHECK(config_error(base + "[dissipation]\ngamma=0.5\n[model]\ntruncation=fock1\n").find("excitation-sector") !=
        std::string::npos);
  CHECK(config_error(base + "[dissipation]\ngamma=0.5\n[model]\ntruncation=sector3\n").find("exceeds the limit") !=
        std::string::npos);
  CHECK_THROWS_AS(resolve(base + "[dissipation]\ngamma=-1\n"), ConfigError);
}

TEST_CASE("protocol section") {
  const std::string base(kReference);
  const RunConfig c = resolve(base + "[protocol]\nkind=qst\nalpha=0.6\nbeta=0.8i\nphase=-1.5707963267948966\n");
  CHECK(c.run.protocol == ProtocolKind::Qst);
  CHECK(c.run.qst.alpha == Complex(0.6, 0.0));
  CHECK(c.run.qst.beta == Complex(0.0, 0.8));
  REQUIRE(c.run.phase.angle.has_value());
  CHECK(*c.run.phase.angle == doctest::Approx(-M_PI / 2));
  CHECK(config_error(base + "[protocol]\nkind=qst\nalpha=0.6\nbeta=0.6\n").find("|alpha|^2") != std::string::npos);
  CHECK_THROWS_AS(resolve(base + "[protocol]\nkind=teleport\n"), ConfigError);
  CHECK_THROWS_AS(resolve(base + "[protocol]\nalpha=one\n"), ConfigError);
}

TEST_CASE("complex numbers") {
  CHECK(parse_complex("0.5") == Complex(0.5, 0.0));
  CHECK(parse_complex("-2i") == Complex(0.0, -2.0));
  CHECK(parse_complex("i") == Complex(0.0, 1.0));
  CHECK(parse_complex("-i") == Complex(0.0, -1.0));
  CHECK(parse_complex("0.6+0.8i") == Complex(0.6, 0.8));
  CHECK(parse_complex("0.6-0.8i") == Complex(0.6, -0.8));
  CHECK(parse_complex("1e-3-2e+1i") == Complex(1e-3, -20.0));
  CHECK(parse_complex(" 1+i ") == Complex(1.0, 1.0));
  CHECK_FALSE(parse_complex("").has_value());
  CHECK_FALSE(parse_complex("1+2j").has_value());
  CHECK_FALSE(parse_complex("x+1i").has_value());
}

TEST_CASE("value lists") {
  CHECK(parse_value_list("1, 2.5,4") == std::vector<double>{1.0, 2.5, 4.0});
  const auto r = parse_value_list("0:1:5");
  CHECK(r == std::vector<double>{0.0, 0.25, 0.5, 0.75, 1.0});
  CHECK(parse_value_list("2:40:41").size() == 41);
  CHECK(parse_value_list("2:40:41").back() == 40.0);
  CHECK_THROWS_AS(parse_value_list("0:1:1"), ConfigError);
  CHECK_THROWS_AS(parse_value_list("0:1"), ConfigError);
  CHECK_THROWS_AS(parse_value_list("1,,2"), ConfigError);
}

TEST_CASE("sweep, compare and feasibility sections") {
  const std::string base(kReference);
  const RunConfig c = resolve(base + R"(
[sweep]
axis1 = gamma
axis1_values = 0:0.5:3
axis2 = kappa
axis2_values = 0, 0.25, 0.5
metric = max_PA
[compare]
models = full, raman
periods = 2
samples = 101
[feasibility]
omegas = 0.5, 1
offsets = -0.02:0.02:5
trace_span = 1.2
)");
  const SweepSpec s = c.sweep_spec();
  CHECK(s.axis1.name == "gamma");
  CHECK(s.axis1.values.size() == 3);
  REQUIRE(s.axis2.has_value());
  CHECK(s.axis2->values.size() == 3);
  CHECK(s.metric == SweepMetric::MaxPA);
  const CompareSpec cs = c.compare_spec();
  CHECK(cs.models == std::vector<ModelKind>{ModelKind::Full, ModelKind::Raman});
  CHECK(cs.periods == 2.0);
  CHECK(cs.samples == 101);
  const FeasibilitySpec fs = c.feasibility_spec();
  CHECK(fs.omegas == std::vector<double>{0.5, 1.0});
  CHECK(fs.offsets.size() == 5);
  CHECK(fs.trace_span == 1.2);

  CHECK_THROWS_AS(resolve(base).sweep_spec(), ConfigError);
  CHECK_THROWS_AS(resolve(base + "[sweep]\naxis1=temperature\naxis1_values=1,2\n"), ConfigError);
  CHECK_THROWS_AS(resolve(base + "[sweep]\naxis1=nu\n"), ConfigError);
  CHECK_THROWS_AS(resolve(base + "[sweep]\naxis2=nu\naxis2_values=1,2\n"), ConfigError);
  CHECK_THROWS_AS(resolve(base + "[sweep]\naxis1=nu\naxis1_values=3,2,2\n"), ConfigError);
  CHECK_THROWS_AS(resolve(base + "[sweep]\naxis1=nu\naxis1_values=1,2\nmetric=max\n"), ConfigError);
  CHECK_THROWS_AS(resolve(base + "[compare]\nmodels=full,exact\n"), ConfigError);
  CHECK_THROWS_AS(resolve(base + "[feasibility]\nomegas=0\n"), ConfigError);
  CHECK_THROWS_AS(resolve(base + "[feasibility]\noffsets=-1\n"), ConfigError);
}

TEST_CASE("model and branch consistency") {
  const std::string off_resonant = "[system]\ncoupling=physical\ng1=1\ng2=1\ng3=1\nnu=50\ndelta1=20\ndelta2=21\n";
  CHECK_NOTHROW(resolve(off_resonant));
  CHECK_NOTHROW(resolve(off_resonant + "[model]\nname=raman\n"));
  CHECK(config_error(off_resonant + "[model]\nname=branch-effective\n").find("resonant branch") != std::string::npos);
  CHECK_NOTHROW(resolve("[system]\ng=30\nnu=50\ndelta1=20\n[model]\nname=zeno\n"));
  CHECK_NOTHROW(resolve("[system]\ng=30\nnu=50\ndelta1=20\nbranch=-sqrt3\n[model]\nname=single-exciton\n"));
}

TEST_CASE("overrides and files") {
  Config c = Config::parse(kReference);
  c.set("model.name", "raman");
  c.set("system.g", "12");
  const RunConfig r = c.resolve();
  CHECK(r.run.model.kind == ModelKind::Raman);
  CHECK(*r.run.zeno_g == 12.0);
  CHECK_THROWS_AS(c.set("modelname", "full"), ConfigError);
  CHECK_THROWS_AS(c.set(".x", "1"), ConfigError);

  const auto path = std::filesystem::temp_directory_path() / "cavnet_test_config.ini";
  std::ofstream(path) << kReference;
  const Config loaded = Config::load(path.string());
  CHECK(loaded.origin() == path.string());
  CHECK(loaded.resolve().hash == resolve(kReference).hash);
  std::filesystem::remove(path);
  CHECK_THROWS_AS(Config::load(path.string()), IoError);
}
