#include "hilbert.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>
#include <sstream>

#include "error.hpp"

namespace cavnet {

namespace {

constexpr std::size_t kMaxDimension = 5'000'000;

constexpr Level kAtom1Levels[] = {Level::F, Level::E, Level::GL, Level::GR};
constexpr Level kAtom23Levels[] = {Level::E, Level::GL, Level::GR};

}  // namespace

std::string_view level_name(Level level) {
  switch (level) {
    case Level::F: return "f";
    case Level::E: return "e";
    case Level::GL: return "gL";
    case Level::GR: return "gR";
  }
  return "?";
}

int SubsystemSpec::dimension() const {
  switch (kind) {
    case SubsystemKind::Atom1: return 4;
    case SubsystemKind::Atom23: return 3;
    case SubsystemKind::BosonMode: return n_max + 1;
  }
  return 0;
}

std::optional<int> SubsystemSpec::level_index(Level level) const {
  std::span<const Level> levels;
  if (kind == SubsystemKind::Atom1) {
    levels = kAtom1Levels;
  } else if (kind == SubsystemKind::Atom23) {
    levels = kAtom23Levels;
  } else {
    return std::nullopt;
  }
  auto it = std::find(levels.begin(), levels.end(), level);
  if (it == levels.end()) return std::nullopt;
  return static_cast<int>(it - levels.begin());
}

Level SubsystemSpec::level_at(int local) const {
  if (kind == SubsystemKind::Atom1) return kAtom1Levels[local];
  if (kind == SubsystemKind::Atom23) return kAtom23Levels[local];
  throw ArgumentError("subsystem '" + label + "' is not an atom");
}

int SubsystemSpec::excitation(int local) const {
  if (kind == SubsystemKind::BosonMode) return local;
  const Level l = level_at(local);
  return (l == Level::E || l == Level::F) ? 1 : 0;
}

std::string truncation_name(const Truncation& t) {
  if (const auto* f = std::get_if<FockCutoff>(&t)) return "fock" + std::to_string(f->n_max);
  return "sector" + std::to_string(std::get<ExcitationSector>(t).n_total);
}

std::optional<Truncation> parse_truncation(std::string_view text) {
  auto number = [](std::string_view digits) -> std::optional<int> {
    if (digits.empty() || digits.size() > 3) return std::nullopt;
    int v = 0;
    for (char c : digits) {
      if (c < '0' || c > '9') return std::nullopt;
      v = v * 10 + (c - '0');
    }
    return v;
  };
  if (text.starts_with("sector")) {
    if (auto n = number(text.substr(6))) return ExcitationSector{*n};
  } else if (text.starts_with("fock")) {
    if (auto n = number(text.substr(4)); n && *n >= 1) return FockCutoff{*n};
  }
  return std::nullopt;
}

SpacePtr HilbertSpace::composite(std::vector<SubsystemSpec> subsystems, Truncation truncation) {
  if (subsystems.empty()) throw ArgumentError("composite space needs at least one subsystem");
  std::set<std::string> labels;
  for (const auto& s : subsystems) {
    if (!labels.insert(s.label).second) throw ArgumentError("duplicate subsystem label '" + s.label + "'");
    if (s.kind == SubsystemKind::BosonMode && s.n_max < 0) throw ArgumentError("negative boson cutoff");
  }

  std::optional<int> budget;
  if (const auto* sector = std::get_if<ExcitationSector>(&truncation)) {
    int capacity = 0;
    for (const auto& s : subsystems) capacity += s.kind == SubsystemKind::BosonMode ? s.n_max : 1;
    if (sector->n_total < 0) throw ArgumentError("excitation sector must be non-negative");
    if (sector->n_total > capacity) {
      throw ArgumentError("excitation sector " + std::to_string(sector->n_total) + " exceeds total capacity " +
                          std::to_string(capacity));
    }
    budget = sector->n_total;
  } else if (std::get<FockCutoff>(truncation).n_max < 1) {
    throw ArgumentError("Fock cutoff must be at least 1");
  }

  auto space = std::shared_ptr<HilbertSpace>(new HilbertSpace());
  space->subsystems_ = std::move(subsystems);
  space->truncation_ = truncation;

  const std::size_t count = space->subsystems_.size();
  space->radix_.assign(count, 1);
  for (std::size_t i = count - 1; i > 0; --i) {
    space->radix_[i - 1] = space->radix_[i] * static_cast<std::uint64_t>(space->subsystems_[i].dimension());
  }

  BasisState current(count, 0);
  std::function<void(std::size_t, int)> enumerate = [&](std::size_t pos, int used) {
    if (pos == count) {
      if (space->basis_.size() >= kMaxDimension) {
        throw ArgumentError("Hilbert space dimension exceeds " + std::to_string(kMaxDimension));
      }
      space->index_.emplace(space->encode(current), space->basis_.size());
      space->basis_.push_back(current);
      return;
    }
    const auto& spec = space->subsystems_[pos];
    for (int local = 0; local < spec.dimension(); ++local) {
      const int next = used + spec.excitation(local);
      if (budget && next > *budget) continue;
      current[pos] = static_cast<std::uint8_t>(local);
      enumerate(pos + 1, next);
    }
  };
  enumerate(0, 0);
  return space;
}

SpacePtr HilbertSpace::labeled(std::vector<std::string> names) {
  if (names.empty()) throw ArgumentError("labeled space needs at least one state");
  auto space = std::shared_ptr<HilbertSpace>(new HilbertSpace());
  std::set<std::string> seen;
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (!seen.insert(names[i]).second) throw ArgumentError("duplicate state name '" + names[i] + "'");
    space->basis_.push_back(BasisState{});
    space->index_.emplace(i, i);
  }
  space->names_ = std::move(names);
  return space;
}

std::uint64_t HilbertSpace::encode(const BasisState& s) const {
  std::uint64_t code = 0;
  for (std::size_t i = 0; i < s.size(); ++i) code += radix_[i] * s[i];
  return code;
}

std::optional<std::size_t> HilbertSpace::index_of(const BasisState& s) const {
  if (!is_composite() || s.size() != subsystems_.size()) return std::nullopt;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] >= subsystems_[i].dimension()) return std::nullopt;
  }
  auto it = index_.find(encode(s));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t HilbertSpace::subsystem_index(std::string_view label) const {
  for (std::size_t i = 0; i < subsystems_.size(); ++i) {
    if (subsystems_[i].label == label) return i;
  }
  throw ArgumentError("unknown subsystem label '" + std::string(label) + "'");
}

bool HilbertSpace::has_subsystem(std::string_view label) const {
  return std::any_of(subsystems_.begin(), subsystems_.end(), [&](const auto& s) { return s.label == label; });
}

int HilbertSpace::excitation_number(std::size_t index) const {
  const auto& s = basis_.at(index);
  int n = 0;
  for (std::size_t i = 0; i < s.size(); ++i) n += subsystems_[i].excitation(s[i]);
  return n;
}

std::string HilbertSpace::describe(std::size_t index) const {
  if (!is_composite()) return names_.at(index);
  const auto& s = basis_.at(index);
  std::ostringstream out;
  out << '|';
  bool first = true;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const auto& spec = subsystems_[i];
    if (spec.kind == SubsystemKind::BosonMode) {
      if (s[i] == 0) continue;
      out << (first ? "" : ",") << spec.label << '=' << int(s[i]);
    } else {
      out << (first ? "" : ",") << level_name(spec.level_at(s[i]));
    }
    first = false;
  }
  out << '>';
  return out.str();
}

std::size_t HilbertSpace::index_of_label(std::string_view name) const {
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (names_[i] == name) return i;
  }
  throw ArgumentError("unknown state '" + std::string(name) + "'");
}

SpacePtr network_space(Truncation truncation) {
  const int n_max = std::holds_alternative<FockCutoff>(truncation) ? std::get<FockCutoff>(truncation).n_max
                                                                    : std::get<ExcitationSector>(truncation).n_total;
  std::vector<SubsystemSpec> subsystems{SubsystemSpec::atom1("atom1"), SubsystemSpec::atom23("atom2"),
                                        SubsystemSpec::atom23("atom3")};
  for (const char* base : {"cav1", "cav2", "cav3", "fib1", "fib2"}) {
    for (Polarization p : kPolarizations) {
      subsystems.push_back(SubsystemSpec::boson(std::string(base) + '.' + polarization_suffix(p), n_max));
    }
  }
  return HilbertSpace::composite(std::move(subsystems), truncation);
}

SpacePtr reduced_space(Truncation truncation) {
  const int n_max = std::holds_alternative<FockCutoff>(truncation) ? std::get<FockCutoff>(truncation).n_max
                                                                    : std::get<ExcitationSector>(truncation).n_total;
  std::vector<SubsystemSpec> subsystems{SubsystemSpec::atom1("atom1"), SubsystemSpec::atom23("atom2"),
                                        SubsystemSpec::atom23("atom3"), SubsystemSpec::boson("mode.L", n_max),
                                        SubsystemSpec::boson("mode.R", n_max)};
  return HilbertSpace::composite(std::move(subsystems), truncation);
}

bool is_network_layout(const HilbertSpace& space) {
  return space.is_composite() && space.subsystems().size() == 13 && space.has_subsystem("fib2.R");
}

bool is_reduced_layout(const HilbertSpace& space) {
  return space.is_composite() && space.subsystems().size() == 5 && space.has_subsystem("mode.R");
}

// ---------------------------------------------------------------------------

LabeledOperator::LabeledOperator(SpacePtr space, SparseMatrix matrix, bool hermitian)
    : space_(std::move(space)), matrix_(std::move(matrix)), hermitian_(hermitian) {
  if (!space_) throw ArgumentError("operator needs a space");
  const auto dim = static_cast<Eigen::Index>(space_->dimension());
  if (matrix_.rows() != dim || matrix_.cols() != dim) throw ArgumentError("operator dimension does not match its space");
  matrix_.makeCompressed();
  if (hermitian_ && hermiticity_defect() > 1e-12) throw ArgumentError("operator flagged hermitian is not");
}

LabeledOperator LabeledOperator::zero(SpacePtr space) {
  const auto dim = static_cast<Eigen::Index>(space->dimension());
  return LabeledOperator(std::move(space), SparseMatrix(dim, dim), true);
}

LabeledOperator LabeledOperator::identity(SpacePtr space) {
  const auto dim = static_cast<Eigen::Index>(space->dimension());
  SparseMatrix m(dim, dim);
  m.setIdentity();
  return LabeledOperator(std::move(space), std::move(m), true);
}

LabeledOperator LabeledOperator::from_dense(SpacePtr space, const DenseMatrix& m, bool hermitian) {
  SparseMatrix s = m.sparseView(Complex(0.0), 0.0);
  return LabeledOperator(std::move(space), std::move(s), hermitian);
}

LabeledOperator LabeledOperator::adjoint() const {
  SparseMatrix adj = matrix_.adjoint();
  return LabeledOperator(space_, std::move(adj), hermitian_);
}

Complex LabeledOperator::element(std::size_t row, std::size_t col) const {
  return matrix_.coeff(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col));
}

double LabeledOperator::max_abs() const {
  double m = 0.0;
  for (int k = 0; k < matrix_.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(matrix_, k); it; ++it) m = std::max(m, std::abs(it.value()));
  }
  return m;
}

double LabeledOperator::hermiticity_defect() const {
  SparseMatrix diff = matrix_ - SparseMatrix(matrix_.adjoint());
  double m = 0.0;
  for (int k = 0; k < diff.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(diff, k); it; ++it) m = std::max(m, std::abs(it.value()));
  }
  return m;
}

Complex LabeledOperator::expectation(const StateVector& v) const { return v.dot(matrix_ * v); }

Complex LabeledOperator::expectation(const DenseMatrix& rho) const {
  Complex sum = 0.0;
  for (int r = 0; r < matrix_.outerSize(); ++r) {
    for (SparseMatrix::InnerIterator it(matrix_, r); it; ++it) sum += it.value() * rho(it.col(), r);
  }
  return sum;
}

void LabeledOperator::require_same_space(const LabeledOperator& other) const {
  if (space_ != other.space_) throw ArgumentError("operators act on different spaces");
}

LabeledOperator& LabeledOperator::operator+=(const LabeledOperator& other) {
  require_same_space(other);
  matrix_ += other.matrix_;
  matrix_.prune(Complex(0.0), 0.0);
  hermitian_ = hermitian_ && other.hermitian_;
  return *this;
}

LabeledOperator& LabeledOperator::operator-=(const LabeledOperator& other) {
  require_same_space(other);
  matrix_ -= other.matrix_;
  matrix_.prune(Complex(0.0), 0.0);
  hermitian_ = hermitian_ && other.hermitian_;
  return *this;
}

LabeledOperator& LabeledOperator::operator*=(Complex scale) {
  matrix_ *= scale;
  hermitian_ = hermitian_ && scale.imag() == 0.0;
  return *this;
}

LabeledOperator operator*(const LabeledOperator& a, const LabeledOperator& b) {
  a.require_same_space(b);
  SparseMatrix product = a.matrix_ * b.matrix_;
  return LabeledOperator(a.space_, std::move(product), false);
}

LabeledOperator commutator(const LabeledOperator& a, const LabeledOperator& b) { return a * b - b * a; }

// ---------------------------------------------------------------------------

LabeledOperator embed_product(const SpacePtr& space, std::span<const LocalFactor> factors, Complex coefficient) {
  if (!space->is_composite()) throw ArgumentError("product operators need a composite space");
  std::set<std::size_t> seen;
  for (const auto& f : factors) {
    if (f.subsystem >= space->subsystems().size()) throw ArgumentError("factor subsystem out of range");
    if (!seen.insert(f.subsystem).second) throw ArgumentError("factors must act on distinct subsystems");
  }

  std::vector<Eigen::Triplet<Complex>> triplets;
  BasisState target;
  for (std::size_t col = 0; col < space->dimension(); ++col) {
    const BasisState& source = space->state(col);
    target = source;
    std::function<void(std::size_t, Complex)> expand = [&](std::size_t which, Complex value) {
      if (which == factors.size()) {
        if (auto row = space->index_of(target)) {
          triplets.emplace_back(static_cast<int>(*row), static_cast<int>(col), coefficient * value);
        }
        return;
      }
      const auto& factor = factors[which];
      for (const auto& e : factor.entries) {
        if (source[factor.subsystem] != e.from) continue;
        target[factor.subsystem] = static_cast<std::uint8_t>(e.to);
        expand(which + 1, value * e.value);
      }
      target[factor.subsystem] = source[factor.subsystem];
    };
    expand(0, 1.0);
  }
  const auto dim = static_cast<Eigen::Index>(space->dimension());
  SparseMatrix m(dim, dim);
  m.setFromTriplets(triplets.begin(), triplets.end());
  m.prune(Complex(0.0), 0.0);
  return LabeledOperator(space, std::move(m), false);
}

LocalFactor annihilation_factor(const HilbertSpace& space, std::string_view mode_label) {
  const std::size_t idx = space.subsystem_index(mode_label);
  const auto& spec = space.subsystems()[idx];
  if (spec.kind != SubsystemKind::BosonMode) throw ArgumentError("'" + spec.label + "' is not a bosonic mode");
  LocalFactor f{idx, {}};
  for (int n = 1; n <= spec.n_max; ++n) f.entries.push_back({n - 1, n, std::sqrt(static_cast<double>(n))});
  return f;
}

LocalFactor creation_factor(const HilbertSpace& space, std::string_view mode_label) {
  const std::size_t idx = space.subsystem_index(mode_label);
  const auto& spec = space.subsystems()[idx];
  if (spec.kind != SubsystemKind::BosonMode) throw ArgumentError("'" + spec.label + "' is not a bosonic mode");
  LocalFactor f{idx, {}};
  for (int n = 0; n < spec.n_max; ++n) f.entries.push_back({n + 1, n, std::sqrt(static_cast<double>(n + 1))});
  return f;
}

LocalFactor transition_factor(const HilbertSpace& space, int atom_id, Level upper, Level lower) {
  if (atom_id < 1 || atom_id > 3) throw ArgumentError("atom id must be 1, 2 or 3");
  const std::size_t idx = space.subsystem_index("atom" + std::to_string(atom_id));
  const auto& spec = space.subsystems()[idx];
  const auto u = spec.level_index(upper);
  const auto l = spec.level_index(lower);
  if (!u || !l) {
    throw ArgumentError("level " + std::string(level_name(!u ? upper : lower)) + " does not exist on atom " +
                        std::to_string(atom_id));
  }
  return LocalFactor{idx, {{*u, *l, 1.0}}};
}

LabeledOperator annihilation(const SpacePtr& space, std::string_view mode_label) {
  const LocalFactor f = annihilation_factor(*space, mode_label);
  return embed_product(space, std::span(&f, 1));
}

LabeledOperator atomic_transition(const SpacePtr& space, int atom_id, Level upper, Level lower) {
  const LocalFactor f = transition_factor(*space, atom_id, upper, lower);
  return embed_product(space, std::span(&f, 1));
}

LabeledOperator collective_mode_operator(const SpacePtr& space, Branch n, Polarization j) {
  for (PhysicalMode m : kPhysicalModes) {
    if (!space->has_subsystem(physical_mode_label(m, j))) {
      throw ArgumentError("collective mode needs subsystem " + physical_mode_label(m, j));
    }
  }
  const auto& t = mode_transform_matrix();
  LabeledOperator sum = LabeledOperator::zero(space);
  for (PhysicalMode m : kPhysicalModes) {
    const double c = t.coefficient(n, m);
    if (c == 0.0) continue;
    sum += c * annihilation(space, physical_mode_label(m, j));
  }
  return sum;
}

LabeledOperator excitation_number_operator(const SpacePtr& space) {
  if (!space->is_composite()) throw ArgumentError("excitation number needs a composite space");
  std::vector<Eigen::Triplet<Complex>> triplets;
  for (std::size_t i = 0; i < space->dimension(); ++i) {
    const int n = space->excitation_number(i);
    if (n != 0) triplets.emplace_back(static_cast<int>(i), static_cast<int>(i), static_cast<double>(n));
  }
  const auto dim = static_cast<Eigen::Index>(space->dimension());
  SparseMatrix m(dim, dim);
  m.setFromTriplets(triplets.begin(), triplets.end());
  return LabeledOperator(space, std::move(m), true);
}

namespace {

BasisState atoms_only(const HilbertSpace& space, Level a1, Level a2, Level a3) {
  BasisState s(space.subsystems().size(), 0);
  const Level levels[3] = {a1, a2, a3};
  for (int k = 0; k < 3; ++k) {
    const auto& spec = space.subsystems().at(space.subsystem_index("atom" + std::to_string(k + 1)));
    auto local = spec.level_index(levels[k]);
    if (!local) throw ArgumentError("level " + std::string(level_name(levels[k])) + " not on atom " + std::to_string(k + 1));
    s[space.subsystem_index(spec.label)] = static_cast<std::uint8_t>(*local);
  }
  return s;
}

std::size_t require_index(const HilbertSpace& space, const BasisState& s) {
  auto idx = space.index_of(s);
  if (!idx) throw ArgumentError("state lies outside the truncated space");
  return *idx;
}

}  // namespace

StateVector atomic_product_state(const SpacePtr& space, Level atom1, Level atom2, Level atom3) {
  StateVector v = StateVector::Zero(static_cast<Eigen::Index>(space->dimension()));
  v(static_cast<Eigen::Index>(require_index(*space, atoms_only(*space, atom1, atom2, atom3)))) = 1.0;
  return v;
}

std::vector<StateVector> embed_phi_basis(const SpacePtr& space, Branch n) {
  if (!is_full_coupling(n)) {
    throw ArgumentError("the single-exciton basis is only defined for branches +sqrt3, -sqrt3 and 0");
  }
  const bool network = is_network_layout(*space);
  if (!network && !is_reduced_layout(*space)) throw ArgumentError("single-exciton basis needs the network or reduced layout");

  struct PhiSpec {
    Level a1, a2, a3;
    int photon;  // 0 none, 1 L, 2 R
  };
  using L = Level;
  static constexpr PhiSpec kPhi[14] = {
      {L::F, L::GR, L::GL, 0},  {L::E, L::GR, L::GL, 0},  {L::GR, L::GR, L::GL, 2}, {L::GL, L::GR, L::GL, 1},
      {L::GR, L::E, L::GL, 0},  {L::GL, L::GR, L::E, 0},  {L::GR, L::GL, L::GL, 1}, {L::GL, L::GR, L::GR, 2},
      {L::GR, L::GL, L::E, 0},  {L::GL, L::E, L::GR, 0},  {L::GR, L::GL, L::GR, 2}, {L::GL, L::GL, L::GR, 1},
      {L::E, L::GL, L::GR, 0},  {L::F, L::GL, L::GR, 0},
  };

  const auto& t = mode_transform_matrix();
  const auto dim = static_cast<Eigen::Index>(space->dimension());
  std::vector<StateVector> basis;
  basis.reserve(14);
  for (const auto& phi : kPhi) {
    StateVector v = StateVector::Zero(dim);
    BasisState s = atoms_only(*space, phi.a1, phi.a2, phi.a3);
    if (phi.photon == 0) {
      v(static_cast<Eigen::Index>(require_index(*space, s))) = 1.0;
    } else {
      const Polarization p = phi.photon == 1 ? Polarization::L : Polarization::R;
      if (network) {
        for (PhysicalMode m : kPhysicalModes) {
          const double c = t.coefficient(n, m);
          if (c == 0.0) continue;
          BasisState with_photon = s;
          with_photon[space->subsystem_index(physical_mode_label(m, p))] = 1;
          v(static_cast<Eigen::Index>(require_index(*space, with_photon))) = c;
        }
      } else {
        s[space->subsystem_index(p == Polarization::L ? "mode.L" : "mode.R")] = 1;
        v(static_cast<Eigen::Index>(require_index(*space, s))) = 1.0;
      }
    }
    basis.push_back(std::move(v));
  }
  return basis;
}

}  // namespace cavnet
