#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <boost/property_tree/ptree.hpp>
#include <json.hpp>

#include "reporting.hpp"

namespace cavnet {

/// Fully resolved and validated configuration.
struct RunConfig {
  FrequencyUnit unit = FrequencyUnit::DimensionlessOmega;
  RunSpec run;

  std::optional<SweepAxis> axis1;
  std::optional<SweepAxis> axis2;
  SweepMetric metric = SweepMetric::FinalFidelity;

  std::vector<ModelKind> compare_models;
  double compare_periods = 1.0;
  std::size_t compare_samples = 2001;

  std::vector<double> feasibility_omegas;
  std::vector<double> feasibility_offsets;
  double trace_span = 1.1;

  nlohmann::json resolved;  // every value after defaults and unit handling
  std::string hash;         // first 16 hex digits of SHA-256(resolved)

  SweepSpec sweep_spec() const;
  CompareSpec compare_spec() const;
  FeasibilitySpec feasibility_spec() const;
};

/// INI configuration with sections [system], [dissipation], [model],
/// [protocol], [pulse], [run], [sweep], [compare], [feasibility].
///
/// Frequencies are plain numbers in the file's unit ([system] unit = omega:
/// multiples of the reference Rabi frequency; unit = mhz: f/2π in MHz, used
/// as rates per µs). A value may carry an explicit suffix ("Omega", "MHz",
/// "kHz"); a suffix that disagrees with the file unit is a config error.
class Config {
 public:
  static Config parse(std::string_view text, std::string origin = "<string>");
  /// Throws IoError when the file cannot be read.
  static Config load(const std::string& path);

  /// Overrides "section.key"; validation happens in resolve().
  void set(const std::string& key, const std::string& value);

  /// Applies defaults, converts units and checks cross-field constraints.
  /// Throws ConfigError.
  RunConfig resolve() const;

  const std::string& origin() const { return origin_; }

 private:
  boost::property_tree::ptree tree_;
  std::string origin_;
};

/// Parses "x", "yi", "x+yi" or "x-yi".
std::optional<Complex> parse_complex(std::string_view text);

/// "start:stop:count" (inclusive, count ≥ 2) or a comma-separated list.
std::vector<double> parse_value_list(std::string_view text);

}  // namespace cavnet
