#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>

namespace cavnet {

enum class FrequencyUnit {
  DimensionlessOmega,  // frequencies in multiples of a reference Rabi frequency, time in its inverse
  AngularMHz,          // quoted f/2π values in MHz used as rates per microsecond
};

std::string_view unit_name(FrequencyUnit unit);

enum class Polarization : int { L = 0, R = 1 };

inline constexpr std::array<Polarization, 2> kPolarizations{Polarization::L, Polarization::R};

inline constexpr int index_of(Polarization p) { return static_cast<int>(p); }
inline constexpr char polarization_suffix(Polarization p) { return p == Polarization::L ? 'L' : 'R'; }

// Collective normal modes of the cavity-fiber hopping network, in the row
// order used by ModeTransform.
enum class Branch : int { PlusSqrt3 = 0, MinusSqrt3 = 1, Plus = 2, Minus = 3, Zero = 4 };

inline constexpr std::array<Branch, 5> kBranches{Branch::PlusSqrt3, Branch::MinusSqrt3, Branch::Plus,
                                                 Branch::Minus, Branch::Zero};

/// Signed branch index n ∈ {+√3, −√3, +1, −1, 0}.
double branch_value(Branch branch);
std::string_view branch_name(Branch branch);
std::optional<Branch> parse_branch(std::string_view text);

/// Branches where atom 1 couples to the collective mode.
inline constexpr bool is_full_coupling(Branch b) { return b == Branch::PlusSqrt3 || b == Branch::MinusSqrt3 || b == Branch::Zero; }

/// Branch with the opposite sign of n (Zero maps to itself).
Branch mirror(Branch branch);

using CouplingTable = std::array<std::array<double, 2>, 3>;  // [atom k-1][polarization]

struct SystemParams {
  CouplingTable g{};    // physical atom-cavity couplings g_{k,j}
  double nu = 0.0;      // cavity-fiber hopping
  double omega = 1.0;   // laser Rabi frequency (peak value when pulsed)
  double delta1 = 0.0;  // laser detuning
  double delta2 = 0.0;  // cavity detuning
  FrequencyUnit unit = FrequencyUnit::DimensionlessOmega;

  double coupling(int atom, Polarization p) const { return g.at(atom - 1)[index_of(p)]; }
  double max_coupling() const;

  /// Finite frequencies and ν > 0; throws ConfigError otherwise.
  void validate() const;
};

/// Physical couplings that realise the Zeno condition √2·ḡ₁ = ḡ₂ = ḡ₃ = g on
/// a full-coupling branch (for n = 0 this gives g₁ = −√6g/2, g₂,₃ = √3g).
CouplingTable couplings_for_zeno_scale(double g, Branch branch);

struct DissipationParams {
  double gamma = 0.0;    // total spontaneous emission rate per atom
  double kappa_c = 0.0;  // cavity leakage
  double kappa_f = 0.0;  // fiber leakage

  double atom1_channel_rate() const { return gamma / 3.0; }   // e -> f, g_L, g_R
  double edge_atom_channel_rate() const { return gamma / 2.0; }  // e -> g_L, g_R on atoms 2 and 3
  double cavity_mode_rate() const { return kappa_c / 2.0; }
  double fiber_mode_rate() const { return kappa_f / 2.0; }
  bool closed() const { return gamma == 0.0 && kappa_c == 0.0 && kappa_f == 0.0; }

  void validate() const;
};

}  // namespace cavnet
