#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "mode_transform.hpp"
#include "params.hpp"

namespace cavnet {

using Complex = std::complex<double>;
using SparseMatrix = Eigen::SparseMatrix<Complex, Eigen::RowMajor>;
using DenseMatrix = Eigen::MatrixXcd;
using StateVector = Eigen::VectorXcd;

enum class Level : std::uint8_t { F, E, GL, GR };

std::string_view level_name(Level level);

enum class SubsystemKind { Atom1, Atom23, BosonMode };

struct SubsystemSpec {
  SubsystemKind kind;
  std::string label;
  int n_max = 0;  // BosonMode only

  int dimension() const;
  /// Local index of an atomic level; nullopt if the kind has no such level.
  std::optional<int> level_index(Level level) const;
  Level level_at(int local) const;
  /// Excitations carried by local state `local`: photons, or 1 for |e⟩ and |f⟩.
  int excitation(int local) const;

  static SubsystemSpec atom1(std::string label) { return {SubsystemKind::Atom1, std::move(label), 0}; }
  static SubsystemSpec atom23(std::string label) { return {SubsystemKind::Atom23, std::move(label), 0}; }
  static SubsystemSpec boson(std::string label, int n_max) { return {SubsystemKind::BosonMode, std::move(label), n_max}; }
};

struct FockCutoff {
  int n_max = 1;
};
struct ExcitationSector {
  int n_total = 1;
};
using Truncation = std::variant<FockCutoff, ExcitationSector>;

std::string truncation_name(const Truncation& t);
/// Accepts "sector<N>" and "fock<N>".
std::optional<Truncation> parse_truncation(std::string_view text);

using BasisState = std::vector<std::uint8_t>;

class HilbertSpace;
using SpacePtr = std::shared_ptr<const HilbertSpace>;

/// Either a composite space of atoms and bosonic modes with a truncated
/// product basis, or a flat space of named states (used by the reduced
/// models). Immutable after construction.
class HilbertSpace {
 public:
  /// Basis enumerated lexicographically over subsystem indices, first
  /// subsystem varying slowest. Boson cutoffs are taken from the specs; under
  /// ExcitationSector(N) only states with excitation number ≤ N are kept.
  static SpacePtr composite(std::vector<SubsystemSpec> subsystems, Truncation truncation);
  static SpacePtr labeled(std::vector<std::string> names);

  std::size_t dimension() const { return basis_.size(); }
  bool is_composite() const { return !subsystems_.empty(); }
  const std::vector<SubsystemSpec>& subsystems() const { return subsystems_; }
  const std::optional<Truncation>& truncation() const { return truncation_; }

  const BasisState& state(std::size_t index) const { return basis_.at(index); }
  std::optional<std::size_t> index_of(const BasisState& state) const;
  std::size_t subsystem_index(std::string_view label) const;
  bool has_subsystem(std::string_view label) const;
  int excitation_number(std::size_t index) const;
  std::string describe(std::size_t index) const;

  /// Index of a named state in a labeled space.
  std::size_t index_of_label(std::string_view name) const;

 private:
  HilbertSpace() = default;
  std::uint64_t encode(const BasisState& s) const;

  std::vector<SubsystemSpec> subsystems_;
  std::optional<Truncation> truncation_;
  std::vector<BasisState> basis_;
  std::vector<std::string> names_;
  std::vector<std::uint64_t> radix_;
  std::unordered_map<std::uint64_t, std::size_t> index_;
};

/// The 13-subsystem network layout: atom1, atom2, atom3, cav1.L, cav1.R,
/// cav2.L, cav2.R, cav3.L, cav3.R, fib1.L, fib1.R, fib2.L, fib2.R. Under
/// ExcitationSector(N) the boson cutoff is N.
SpacePtr network_space(Truncation truncation);

/// Three atoms plus one bimodal collective mode ("mode.L", "mode.R").
SpacePtr reduced_space(Truncation truncation);

bool is_network_layout(const HilbertSpace& space);
bool is_reduced_layout(const HilbertSpace& space);

/// Sparse complex matrix bound to a space. The hermitian flag is verified at
/// construction (1e-12) and propagated through linear combinations.
class LabeledOperator {
 public:
  LabeledOperator(SpacePtr space, SparseMatrix matrix, bool hermitian = false);

  static LabeledOperator zero(SpacePtr space);
  static LabeledOperator identity(SpacePtr space);
  static LabeledOperator from_dense(SpacePtr space, const DenseMatrix& m, bool hermitian = false);

  const SpacePtr& space() const { return space_; }
  const SparseMatrix& matrix() const { return matrix_; }
  bool hermitian() const { return hermitian_; }
  std::size_t dimension() const { return static_cast<std::size_t>(matrix_.rows()); }

  LabeledOperator adjoint() const;
  DenseMatrix dense() const { return DenseMatrix(matrix_); }
  StateVector apply(const StateVector& v) const { return matrix_ * v; }
  Complex element(std::size_t row, std::size_t col) const;
  double max_abs() const;
  double hermiticity_defect() const;
  /// ⟨v|O|v⟩.
  Complex expectation(const StateVector& v) const;
  /// tr(O ρ).
  Complex expectation(const DenseMatrix& rho) const;

  LabeledOperator& operator+=(const LabeledOperator& other);
  LabeledOperator& operator-=(const LabeledOperator& other);
  LabeledOperator& operator*=(Complex scale);

  friend LabeledOperator operator+(LabeledOperator a, const LabeledOperator& b) { return a += b; }
  friend LabeledOperator operator-(LabeledOperator a, const LabeledOperator& b) { return a -= b; }
  friend LabeledOperator operator*(LabeledOperator a, Complex s) { return a *= s; }
  friend LabeledOperator operator*(Complex s, LabeledOperator a) { return a *= s; }
  friend LabeledOperator operator*(LabeledOperator a, double s) { return a *= Complex(s); }
  friend LabeledOperator operator*(double s, LabeledOperator a) { return a *= Complex(s); }
  friend LabeledOperator operator*(const LabeledOperator& a, const LabeledOperator& b);

 private:
  void require_same_space(const LabeledOperator& other) const;

  SpacePtr space_;
  SparseMatrix matrix_;
  bool hermitian_ = false;
};

LabeledOperator commutator(const LabeledOperator& a, const LabeledOperator& b);

/// Single-subsystem factor of a product operator: a list of local
/// (to, from, value) transitions.
struct LocalFactor {
  struct Entry {
    int to;
    int from;
    Complex value;
  };
  std::size_t subsystem;
  std::vector<Entry> entries;
};

/// Embeds a product of local factors acting on distinct subsystems. Products
/// are formed locally before truncation, so intermediate states outside an
/// excitation sector do not truncate the product.
LabeledOperator embed_product(const SpacePtr& space, std::span<const LocalFactor> factors, Complex coefficient = 1.0);

LocalFactor annihilation_factor(const HilbertSpace& space, std::string_view mode_label);
LocalFactor creation_factor(const HilbertSpace& space, std::string_view mode_label);
/// |upper⟩⟨lower| on atom `atom_id` (1-based; label "atom<k>").
LocalFactor transition_factor(const HilbertSpace& space, int atom_id, Level upper, Level lower);

LabeledOperator annihilation(const SpacePtr& space, std::string_view mode_label);
LabeledOperator atomic_transition(const SpacePtr& space, int atom_id, Level upper, Level lower);
/// Σ_i T(n, i)·a_{i,j} over the five physical modes of polarization j; the
/// space must contain those five mode subsystems.
LabeledOperator collective_mode_operator(const SpacePtr& space, Branch n, Polarization j);

/// N̂ = boson numbers + Σ|e⟩⟨e| + |f⟩₁⟨f|, diagonal.
LabeledOperator excitation_number_operator(const SpacePtr& space);

/// Diagonal projector onto basis states satisfying a predicate.
template <typename Pred>
LabeledOperator diagonal_projector(const SpacePtr& space, Pred&& pred) {
  std::vector<Eigen::Triplet<Complex>> triplets;
  for (std::size_t i = 0; i < space->dimension(); ++i) {
    if (pred(space->state(i))) triplets.emplace_back(static_cast<int>(i), static_cast<int>(i), 1.0);
  }
  SparseMatrix m(space->dimension(), space->dimension());
  m.setFromTriplets(triplets.begin(), triplets.end());
  return LabeledOperator(space, std::move(m), true);
}

/// Basis vector for an atomic configuration (atom1, atom2, atom3) with all
/// modes empty.
StateVector atomic_product_state(const SpacePtr& space, Level atom1, Level atom2, Level atom3);

/// The fourteen single-exciton states |φ₁⟩…|φ₁₄⟩. On the network layout the
/// photon kets |R⟩, |L⟩ are one quantum in c_{n,R}, c_{n,L}; on the reduced
/// layout they are one quantum in mode.R, mode.L. Only n ∈ {+√3, −√3, 0}.
std::vector<StateVector> embed_phi_basis(const SpacePtr& space, Branch n);

}  // namespace cavnet
