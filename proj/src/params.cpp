#include "params.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "error.hpp"
#include "mode_transform.hpp"

namespace cavnet {

std::string_view unit_name(FrequencyUnit unit) {
  return unit == FrequencyUnit::AngularMHz ? "mhz" : "omega";
}

double branch_value(Branch branch) {
  switch (branch) {
    case Branch::PlusSqrt3: return std::sqrt(3.0);
    case Branch::MinusSqrt3: return -std::sqrt(3.0);
    case Branch::Plus: return 1.0;
    case Branch::Minus: return -1.0;
    case Branch::Zero: return 0.0;
  }
  return 0.0;
}

std::string_view branch_name(Branch branch) {
  switch (branch) {
    case Branch::PlusSqrt3: return "+sqrt3";
    case Branch::MinusSqrt3: return "-sqrt3";
    case Branch::Plus: return "+";
    case Branch::Minus: return "-";
    case Branch::Zero: return "0";
  }
  return "?";
}

std::optional<Branch> parse_branch(std::string_view text) {
  for (Branch b : kBranches) {
    if (text == branch_name(b)) return b;
  }
  if (text == "plus_sqrt3" || text == "sqrt3") return Branch::PlusSqrt3;
  if (text == "minus_sqrt3") return Branch::MinusSqrt3;
  if (text == "plus") return Branch::Plus;
  if (text == "minus") return Branch::Minus;
  if (text == "zero") return Branch::Zero;
  return std::nullopt;
}

Branch mirror(Branch branch) {
  switch (branch) {
    case Branch::PlusSqrt3: return Branch::MinusSqrt3;
    case Branch::MinusSqrt3: return Branch::PlusSqrt3;
    case Branch::Plus: return Branch::Minus;
    case Branch::Minus: return Branch::Plus;
    case Branch::Zero: return Branch::Zero;
  }
  return branch;
}

double SystemParams::max_coupling() const {
  double m = 0.0;
  for (const auto& atom : g) {
    for (double v : atom) m = std::max(m, std::abs(v));
  }
  return m;
}

void SystemParams::validate() const {
  auto finite = [](double v) { return std::isfinite(v); };
  for (const auto& atom : g) {
    for (double v : atom) {
      if (!finite(v)) throw ConfigError("atom-cavity coupling is not finite");
    }
  }
  if (!finite(nu) || !finite(omega) || !finite(delta1) || !finite(delta2)) {
    throw ConfigError("system frequencies must be finite");
  }
  if (!(nu > 0.0)) throw ConfigError("cavity-fiber hopping nu must be positive");
}

CouplingTable couplings_for_zeno_scale(double g, Branch branch) {
  if (!is_full_coupling(branch)) {
    throw ArgumentError("Zeno coupling scale is only defined for branches +sqrt3, -sqrt3 and 0");
  }
  const auto& t = mode_transform_matrix();
  const double target[3] = {g / std::sqrt(2.0), g, g};
  CouplingTable table{};
  for (int k = 1; k <= 3; ++k) {
    const double physical = target[k - 1] / t.cavity_weight(branch, k);
    table[k - 1] = {physical, physical};
  }
  return table;
}

void DissipationParams::validate() const {
  for (double rate : {gamma, kappa_c, kappa_f}) {
    if (!std::isfinite(rate) || rate < 0.0) throw ConfigError("dissipation rates must be finite and non-negative");
  }
}

}  // namespace cavnet
