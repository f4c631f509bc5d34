#include <doctest.h>

#include <cavnet/cavnet.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>

namespace {

constexpr const char* kRaman = R"(
[system]
g = 30
nu = 50
delta1 = 20
[model]
name = raman
[run]
samples = 51
)";

cavnet_config* parse(const char* text) {
  cavnet_config* c = nullptr;
  REQUIRE(cavnet_config_parse(text, &c) == CAVNET_OK);
  REQUIRE(c != nullptr);
  return c;
}

double value(const cavnet_report* r, const char* name) {
  double v = NAN;
  REQUIRE(cavnet_report_value(r, name, &v) == CAVNET_OK);
  return v;
}

}  // namespace

TEST_CASE("version and error state") {
  CHECK(std::strlen(cavnet_version()) > 0);
  cavnet_config* c = nullptr;
  CHECK(cavnet_config_parse(nullptr, &c) == CAVNET_ERROR_ARGUMENT);
  CHECK(std::string(cavnet_last_error()) == "null argument");
  CHECK(cavnet_config_parse("[system]\ng=1\n", &c) == CAVNET_OK);
  CHECK(std::string(cavnet_last_error()).empty());
  cavnet_config_free(c);
  cavnet_config_free(nullptr);
  cavnet_report_free(nullptr);
}

TEST_CASE("configuration errors map to status codes") {
  cavnet_config* c = nullptr;
  CHECK(cavnet_config_parse("[system\n", &c) == CAVNET_ERROR_CONFIG);
  CHECK(c == nullptr);
  CHECK(cavnet_config_load("/nonexistent/cavnet.ini", &c) == CAVNET_ERROR_IO);
  CHECK(std::string(cavnet_last_error()).find("/nonexistent/cavnet.ini") != std::string::npos);

  c = parse("[system]\ng=30\nnu=50\ndelta1=0\ndelta2=0\n[model]\nname=raman\n");
  CHECK(cavnet_config_check(c, nullptr, 0) == CAVNET_ERROR_CONFIG);
  CHECK(std::string(cavnet_last_error()).find("division by delta1") != std::string::npos);
  cavnet_report* r = nullptr;
  CHECK(cavnet_validate(c, &r) == CAVNET_ERROR_CONFIG);
  CHECK(r == nullptr);
  CHECK(cavnet_config_set(c, "nodot", "1") == CAVNET_ERROR_CONFIG);
  CHECK(cavnet_config_set(c, "system.delta1", "20") == CAVNET_OK);
  CHECK(cavnet_config_set(c, "system.delta2", "20") == CAVNET_OK);
  char hash[17] = {};
  CHECK(cavnet_config_check(c, hash, sizeof hash) == CAVNET_OK);
  CHECK(std::strlen(hash) == 16);
  char small[5] = {};
  CHECK(cavnet_config_check(c, small, sizeof small) == CAVNET_OK);
  CHECK(std::string(small) == std::string(hash).substr(0, 4));
  cavnet_config_free(c);
}

TEST_CASE("validate report") {
  cavnet_config* c = parse("[system]\ng=30\nnu=50\ndelta1=20\ndelta2=20\n");
  cavnet_report* r = nullptr;
  REQUIRE(cavnet_validate(c, &r) == CAVNET_OK);
  CHECK(cavnet_report_ok(r) == 1);
  CHECK(value(r, "delta_0") == 0.0);
  CHECK(value(r, "dimension") == 104.0);
  CHECK(value(r, "tau_qesd") == doctest::Approx(M_PI * 20.0));
  CHECK(std::string(cavnet_report_text(r)).find("Hilbert dimension 104") != std::string::npos);
  double v = 0;
  CHECK(cavnet_report_value(r, "no_such_value", &v) == CAVNET_ERROR_ARGUMENT);
  CHECK(cavnet_report_file_count(r) == 0);
  CHECK(cavnet_report_file(r, 0) == nullptr);
  cavnet_report_free(r);
  cavnet_config_free(c);
}

TEST_CASE("eigencheck report") {
  cavnet_report* r = nullptr;
  REQUIRE(cavnet_eigencheck(1.0, &r) == CAVNET_OK);
  CHECK(cavnet_report_ok(r) == 1);
  CHECK(value(r, "lambda_Psi1+") == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
  CHECK(value(r, "lambda_Psi2+") == doctest::Approx(std::sqrt(2.0 + std::sqrt(2.0))).epsilon(1e-14));
  CHECK(value(r, "lambda_Psi3+") == doctest::Approx(std::sqrt(2.0 - std::sqrt(2.0))).epsilon(1e-14));
  CHECK(value(r, "max_residual") <= 1e-10);
  cavnet_report_free(r);
  CHECK(cavnet_eigencheck(NAN, &r) == CAVNET_ERROR_ARGUMENT);
  CHECK(cavnet_eigencheck(1.0, nullptr) == CAVNET_ERROR_ARGUMENT);
}

TEST_CASE("run writes outputs and reports the fidelity") {
  const auto dir = std::filesystem::temp_directory_path() / "cavnet_test_c_api";
  std::filesystem::remove_all(dir);
  const std::string out = dir.string();
  cavnet_config* c = parse(kRaman);
  const cavnet_run_options options{out.c_str(), 1, 1};
  cavnet_report* r = nullptr;
  REQUIRE(cavnet_run(c, &options, &r) == CAVNET_OK);
  CHECK(value(r, "fidelity") == doctest::Approx(1.0).epsilon(1e-8));
  REQUIRE(cavnet_report_file_count(r) == 2);
  CHECK(std::string(cavnet_report_file(r, 0)) == "trajectory.csv");
  CHECK(std::string(cavnet_report_file(r, 1)) == "manifest.json");
  CHECK(std::filesystem::exists(dir / "trajectory.csv"));
  CHECK(std::filesystem::exists(dir / "manifest.json"));
  cavnet_report_free(r);

  // An output path below a regular file cannot be created.
  std::ofstream(dir / "blocker") << "x";
  const std::string blocked = (dir / "blocker" / "sub").string();
  const cavnet_run_options bad{blocked.c_str(), 1, 0};
  CHECK(cavnet_run(c, &bad, &r) == CAVNET_ERROR_IO);
  CHECK(r == nullptr);
  CHECK(cavnet_run(nullptr, &options, &r) == CAVNET_ERROR_ARGUMENT);
  cavnet_config_free(c);
  std::filesystem::remove_all(dir);
}

TEST_CASE("sweep without axes is a configuration error") {
  cavnet_config* c = parse(kRaman);
  cavnet_report* r = nullptr;
  const cavnet_run_options options{nullptr, 1, 0};
  CHECK(cavnet_sweep(c, &options, &r) == CAVNET_ERROR_CONFIG);
  CHECK(std::string(cavnet_last_error()).find("axis1") != std::string::npos);
  cavnet_config_free(c);
}
