#include "config.hpp"

#include <boost/property_tree/ini_parser.hpp>

#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "error.hpp"

namespace cavnet {

namespace pt = boost::property_tree;

namespace {

constexpr std::size_t kMaxLindbladDimension = 2000;

std::string trim(std::string_view s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string_view::npos) return {};
  const auto b = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(a, b - a + 1));
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

bool parse_double(std::string_view text, double& out) {
  const std::string s = trim(text);
  if (s.empty()) return false;
  char* end = nullptr;
  out = std::strtod(s.c_str(), &end);
  return end == s.c_str() + s.size();
}

// Reads sections and keys, remembering which ones were consumed.
class Reader {
 public:
  explicit Reader(const pt::ptree& tree) : tree_(tree) {
    for (const auto& [section, body] : tree) {
      if (body.empty() && !body.data().empty()) {
        throw ConfigError("key '" + section + "' must be inside a [section]");
      }
    }
  }

  std::optional<std::string> get(const std::string& section, const std::string& key) {
    used_.insert(section + "." + key);
    auto s = tree_.get_child_optional(section);
    if (!s) return std::nullopt;
    auto v = s->get_optional<std::string>(key);
    if (!v) return std::nullopt;
    return trim(*v);
  }

  bool has_section(const std::string& section) const { return tree_.get_child_optional(section).has_value(); }

  void reject_unknown() const {
    static const std::set<std::string> kSections{"system", "dissipation", "model",   "protocol",   "pulse",
                                                 "run",    "sweep",       "compare", "feasibility"};
    for (const auto& [section, body] : tree_) {
      if (!kSections.count(section)) throw ConfigError("unknown section [" + section + "]");
      for (const auto& [key, value] : body) {
        if (!used_.count(section + "." + key)) throw ConfigError("unknown key '" + key + "' in [" + section + "]");
      }
    }
  }

 private:
  const pt::ptree& tree_;
  std::set<std::string> used_;
};

std::string where(const std::string& section, const std::string& key) { return "[" + section + "] " + key; }

double number(const std::string& text, const std::string& section, const std::string& key) {
  double v = 0.0;
  if (!parse_double(text, v) || !std::isfinite(v)) {
    throw ConfigError(where(section, key) + ": '" + text + "' is not a finite number");
  }
  return v;
}

// Converts a frequency value in the file unit, honoring an explicit suffix.
double frequency(const std::string& text, FrequencyUnit unit, const std::string& section, const std::string& key) {
  struct Suffix {
    const char* name;
    FrequencyUnit unit;
    double scale;
  };
  static constexpr Suffix kSuffixes[] = {{"MHz", FrequencyUnit::AngularMHz, 1.0},
                                         {"kHz", FrequencyUnit::AngularMHz, 1e-3},
                                         {"Omega", FrequencyUnit::DimensionlessOmega, 1.0}};
  for (const auto& s : kSuffixes) {
    const std::string_view name(s.name);
    if (text.size() > name.size() && std::string_view(text).substr(text.size() - name.size()) == name) {
      if (s.unit != unit) {
        throw ConfigError(where(section, key) + ": value '" + text + "' is given in " + std::string(unit_name(s.unit)) +
                          " units but the file uses unit = " + std::string(unit_name(unit)) +
                          "; mixing units is not allowed");
      }
      return s.scale * number(text.substr(0, text.size() - name.size()), section, key);
    }
  }
  return number(text, section, key);
}

std::size_t count(const std::string& text, const std::string& section, const std::string& key) {
  const double v = number(text, section, key);
  if (v < 0 || v != std::floor(v) || v > 1e8) throw ConfigError(where(section, key) + ": expected a count");
  return static_cast<std::size_t>(v);
}

bool is_frequency_axis(std::string_view name) { return name != "none"; }

}  // namespace

std::optional<Complex> parse_complex(std::string_view text) {
  std::string s = trim(text);
  if (s.empty()) return std::nullopt;
  if (s.back() != 'i') {
    double re = 0.0;
    if (!parse_double(s, re)) return std::nullopt;
    return Complex(re, 0.0);
  }
  s.pop_back();
  // Split at the last sign that is not an exponent sign or the leading sign.
  std::size_t split_at = std::string::npos;
  for (std::size_t i = s.size(); i-- > 1;) {
    if ((s[i] == '+' || s[i] == '-') && s[i - 1] != 'e' && s[i - 1] != 'E') {
      split_at = i;
      break;
    }
  }
  double re = 0.0, im = 0.0;
  if (split_at == std::string::npos) {
    if (s.empty() || s == "+" || s == "-") {
      im = s == "-" ? -1.0 : 1.0;
    } else if (!parse_double(s, im)) {
      return std::nullopt;
    }
    return Complex(0.0, im);
  }
  const std::string imag = s.substr(split_at);
  if (!parse_double(s.substr(0, split_at), re)) return std::nullopt;
  if (imag == "+" || imag == "-") {
    im = imag == "-" ? -1.0 : 1.0;
  } else if (!parse_double(imag, im)) {
    return std::nullopt;
  }
  return Complex(re, im);
}

std::vector<double> parse_value_list(std::string_view text) {
  const std::string s = trim(text);
  std::vector<double> out;
  if (s.find(':') != std::string::npos) {
    const auto parts = split(s, ':');
    double a = 0, b = 0, n = 0;
    if (parts.size() != 3 || !parse_double(parts[0], a) || !parse_double(parts[1], b) || !parse_double(parts[2], n) ||
        n < 2 || n != std::floor(n)) {
      throw ConfigError("range '" + s + "' must be start:stop:count with count >= 2");
    }
    const auto k = static_cast<std::size_t>(n);
    for (std::size_t i = 0; i < k; ++i) {
      out.push_back(i + 1 == k ? b : a + (b - a) * static_cast<double>(i) / static_cast<double>(k - 1));
    }
    return out;
  }
  for (const auto& part : split(s, ',')) {
    double v = 0.0;
    if (!parse_double(part, v)) throw ConfigError("'" + part + "' in list '" + s + "' is not a number");
    out.push_back(v);
  }
  return out;
}

Config Config::parse(std::string_view text, std::string origin) {
  Config c;
  c.origin_ = std::move(origin);
  std::istringstream in{std::string(text)};
  try {
    pt::ini_parser::read_ini(in, c.tree_);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(c.origin_ + ":" + std::to_string(e.line()) + ": " + e.message());
  }
  return c;
}

Config Config::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str(), path);
}

void Config::set(const std::string& key, const std::string& value) {
  const auto dot = key.find('.');
  if (dot == std::string::npos || dot == 0 || dot + 1 == key.size()) {
    throw ConfigError("override key '" + key + "' must look like section.key");
  }
  tree_.put(pt::ptree::path_type(key, '.'), value);
}

RunConfig Config::resolve() const {
  RunConfig cfg;
  Reader r(tree_);
  nlohmann::json& j = cfg.resolved;
  RunSpec& run = cfg.run;
  SystemParams& p = run.params;

  try {
    // [system]
    const std::string unit = r.get("system", "unit").value_or("omega");
    if (unit == "omega") {
      cfg.unit = FrequencyUnit::DimensionlessOmega;
    } else if (unit == "mhz") {
      cfg.unit = FrequencyUnit::AngularMHz;
    } else {
      throw ConfigError("[system] unit must be omega or mhz, not '" + unit + "'");
    }
    p.unit = cfg.unit;
    auto freq = [&](const std::string& section, const std::string& key) -> std::optional<double> {
      auto v = r.get(section, key);
      if (!v) return std::nullopt;
      return frequency(*v, cfg.unit, section, key);
    };
    auto required = [&](const std::string& section, const std::string& key) {
      auto v = freq(section, key);
      if (!v) throw ConfigError(where(section, key) + " is required");
      return *v;
    };

    p.nu = required("system", "nu");
    p.delta1 = required("system", "delta1");
    if (auto w = freq("system", "omega")) {
      p.omega = *w;
    } else if (cfg.unit == FrequencyUnit::AngularMHz) {
      throw ConfigError("[system] omega is required with unit = mhz");
    } else {
      p.omega = 1.0;
    }
    const auto branch_text = r.get("system", "branch");
    const auto delta2 = freq("system", "delta2");
    if (branch_text) {
      const auto n = parse_branch(*branch_text);
      if (!n) throw ConfigError("[system] branch must be one of +sqrt3, -sqrt3, +, -, 0");
      const double implied = p.delta1 - branch_value(*n) * p.nu;
      if (delta2 && std::abs(*delta2 - implied) > 1e-9 * std::max(1.0, std::abs(p.nu))) {
        throw ConfigError("[system] delta2 contradicts branch " + *branch_text + " (expected " +
                          format_number(implied) + ")");
      }
      p.delta2 = implied;
    } else {
      p.delta2 = delta2.value_or(p.delta1);
    }

    const std::string coupling = r.get("system", "coupling").value_or("zeno");
    if (coupling == "zeno") {
      run.zeno_g = required("system", "g");
      for (const char* k : {"g1", "g2", "g3"}) {
        if (r.get("system", k)) throw ConfigError(std::string("[system] ") + k + " is only used with coupling = physical");
      }
    } else if (coupling == "physical") {
      if (r.get("system", "g")) throw ConfigError("[system] g is the Zeno scale; use g1, g2, g3 with coupling = physical");
      for (int k = 1; k <= 3; ++k) {
        const double gk = required("system", "g" + std::to_string(k));
        p.g[k - 1] = {gk, gk};
      }
    } else {
      throw ConfigError("[system] coupling must be zeno or physical, not '" + coupling + "'");
    }

    // [dissipation]
    DissipationParams& d = run.dissipation;
    d.gamma = freq("dissipation", "gamma").value_or(0.0);
    const auto kappa = freq("dissipation", "kappa");
    const auto kappa_c = freq("dissipation", "kappa_c");
    const auto kappa_f = freq("dissipation", "kappa_f");
    if (kappa && (kappa_c || kappa_f)) throw ConfigError("[dissipation] give either kappa or kappa_c/kappa_f");
    d.kappa_c = kappa ? *kappa : kappa_c.value_or(0.0);
    d.kappa_f = kappa ? *kappa : kappa_f.value_or(0.0);
    d.validate();

    // [model]
    const std::string model = r.get("model", "name").value_or("full");
    const auto kind = parse_model(model);
    if (!kind) {
      throw ConfigError("unknown model '" + model + "' (full, normal-mode, branch-effective, single-exciton, zeno, raman)");
    }
    run.model.kind = *kind;
    const std::string trunc = r.get("model", "truncation").value_or("sector1");
    const auto t = parse_truncation(trunc);
    if (!t) throw ConfigError("[model] truncation must be sector<N> or fock<N>, not '" + trunc + "'");
    run.model.truncation = *t;

    // [protocol]
    const std::string proto = r.get("protocol", "kind").value_or("qesd");
    if (proto == "qesd") {
      run.protocol = ProtocolKind::Qesd;
    } else if (proto == "qst") {
      run.protocol = ProtocolKind::Qst;
    } else {
      throw ConfigError("[protocol] kind must be qesd or qst");
    }
    auto amplitude = [&](const char* key, Complex fallback) {
      auto v = r.get("protocol", key);
      if (!v) return fallback;
      auto c = parse_complex(*v);
      if (!c) throw ConfigError(std::string("[protocol] ") + key + ": '" + *v + "' is not a complex number");
      return *c;
    };
    run.qst.alpha = amplitude("alpha", 1.0);
    run.qst.beta = amplitude("beta", 0.0);
    if (std::abs(std::norm(run.qst.alpha) + std::norm(run.qst.beta) - 1.0) > 1e-12) {
      throw ConfigError("[protocol] alpha and beta must satisfy |alpha|^2 + |beta|^2 = 1");
    }
    const std::string phase = r.get("protocol", "phase").value_or("calibrated");
    if (phase != "calibrated") run.phase.angle = number(phase, "protocol", "phase");

    // [pulse]
    const std::string shape = r.get("pulse", "shape").value_or("rect");
    if (shape == "rect") {
      run.shape = PulseShape::Kind::Rectangular;
    } else if (shape == "cosine") {
      run.shape = PulseShape::Kind::Cosine;
    } else {
      throw ConfigError("[pulse] shape must be rect or cosine");
    }
    if (auto v = r.get("pulse", "peak_ratio")) run.peak_ratio = number(*v, "pulse", "peak_ratio");
    if (!(run.peak_ratio > 0.0)) throw ConfigError("[pulse] peak_ratio must be positive");

    // [run]
    if (auto v = r.get("run", "samples")) run.samples = count(*v, "run", "samples");
    if (run.samples < 2) throw ConfigError("[run] samples must be at least 2");
    if (auto v = r.get("run", "t_end_factor")) run.t_end_factor = number(*v, "run", "t_end_factor");
    if (!(run.t_end_factor >= 1.0)) throw ConfigError("[run] t_end_factor must be at least 1");
    if (auto v = r.get("run", "rtol")) run.integrator.rtol = number(*v, "run", "rtol");
    if (auto v = r.get("run", "atol")) run.integrator.atol = number(*v, "run", "atol");
    if (!(run.integrator.rtol > 0.0) || !(run.integrator.atol > 0.0)) {
      throw ConfigError("[run] tolerances must be positive");
    }

    // [sweep]
    auto axis = [&](const char* name_key, const char* values_key) -> std::optional<SweepAxis> {
      auto name = r.get("sweep", name_key);
      auto values = r.get("sweep", values_key);
      if (!name && !values) return std::nullopt;
      if (!name || !values) throw ConfigError(std::string("[sweep] ") + name_key + " and " + values_key + " go together");
      SweepAxis a{*name, parse_value_list(*values)};
      if (is_frequency_axis(a.name)) {
        const bool mhz_suffix = values->find("Hz") != std::string::npos;
        if (mhz_suffix) throw ConfigError("[sweep] list values take the file unit; suffixes are not allowed");
      }
      validate_axis(a);
      return a;
    };
    cfg.axis1 = axis("axis1", "axis1_values");
    cfg.axis2 = axis("axis2", "axis2_values");
    if (cfg.axis2 && !cfg.axis1) throw ConfigError("[sweep] axis2 needs axis1");
    if (auto m = r.get("sweep", "metric")) {
      auto metric = parse_metric(*m);
      if (!metric) throw ConfigError("[sweep] metric must be final_fidelity, max_PA, max_PC or max_PF");
      cfg.metric = *metric;
    }

    // [compare]
    if (auto v = r.get("compare", "models")) {
      for (const auto& name : split(*v, ',')) {
        auto k = parse_model(name);
        if (!k) throw ConfigError("[compare] unknown model '" + name + "'");
        cfg.compare_models.push_back(*k);
      }
    } else {
      cfg.compare_models.assign(kModelKinds.begin(), kModelKinds.end());
    }
    if (auto v = r.get("compare", "periods")) cfg.compare_periods = number(*v, "compare", "periods");
    if (!(cfg.compare_periods > 0.0)) throw ConfigError("[compare] periods must be positive");
    if (auto v = r.get("compare", "samples")) cfg.compare_samples = count(*v, "compare", "samples");
    if (cfg.compare_samples < 8) throw ConfigError("[compare] samples must be at least 8");

    // [feasibility]
    if (auto v = r.get("feasibility", "omegas")) {
      for (const auto& part : split(*v, ',')) {
        const double w = frequency(part, cfg.unit, "feasibility", "omegas");
        if (!(w > 0.0)) throw ConfigError("[feasibility] omegas must be positive");
        cfg.feasibility_omegas.push_back(w);
      }
    } else {
      cfg.feasibility_omegas.push_back(p.omega);
    }
    if (auto v = r.get("feasibility", "offsets")) {
      cfg.feasibility_offsets = parse_value_list(*v);
    } else {
      cfg.feasibility_offsets = {-0.02, -0.01, 0.0, 0.01, 0.02};
    }
    for (double o : cfg.feasibility_offsets) {
      if (!(o > -1.0) || !std::isfinite(o)) throw ConfigError("[feasibility] offsets must be finite and above -1");
    }
    if (auto v = r.get("feasibility", "trace_span")) cfg.trace_span = number(*v, "feasibility", "trace_span");
    if (!(cfg.trace_span >= 1.0)) throw ConfigError("[feasibility] trace_span must be at least 1");

    r.reject_unknown();

    // Cross-field checks.
    p.validate();
    if (p.delta1 == 0.0) throw ConfigError("delta1 = 0: protocol timing involves a division by delta1");
    if (p.omega == 0.0) throw ConfigError("omega = 0: the laser does not drive the protocol");
    const SystemParams resolved = resolved_params(run);
    const auto n = resonant_branch(resolved);
    const ModelKind mk = run.model.kind;
    if (mk == ModelKind::BranchEffective || mk == ModelKind::SingleExciton || mk == ModelKind::Zeno) {
      if (!n) throw ConfigError(std::string(model_name(mk)) + " model needs a resonant branch (delta2 = delta1 - n*nu)");
      if (mk != ModelKind::BranchEffective && !is_full_coupling(*n)) {
        throw ConfigError(std::string(model_name(mk)) + " model needs branch +sqrt3, -sqrt3 or 0");
      }
      if (mk == ModelKind::Zeno && !effective_branch(resolved, *n).zeno_condition()) {
        throw ConfigError("zeno model needs sqrt2*gbar1 = gbar2 = gbar3; use coupling = zeno");
      }
    }
    if (!d.closed()) {
      if (mk != ModelKind::Full) throw ConfigError("dissipation is only supported with model = full");
      const auto* sector = std::get_if<ExcitationSector>(&run.model.truncation);
      if (!sector) throw ConfigError("dissipative runs need an excitation-sector truncation (sector1)");
      const std::size_t dim = network_space(run.model.truncation)->dimension();
      if (dim > kMaxLindbladDimension) {
        throw ConfigError("Lindblad dimension " + std::to_string(dim) + " exceeds the limit " +
                          std::to_string(kMaxLindbladDimension));
      }
    }
  } catch (const ArgumentError& e) {
    throw ConfigError(e.what());
  }

  // Resolved view for manifests and hashing.
  j["system"] = {{"unit", unit_name(cfg.unit)},
                 {"nu", p.nu},
                 {"omega", p.omega},
                 {"delta1", p.delta1},
                 {"delta2", p.delta2}};
  const SystemParams resolved = resolved_params(run);
  if (run.zeno_g) j["system"]["g"] = *run.zeno_g;
  j["system"]["coupling"] = run.zeno_g ? "zeno" : "physical";
  j["system"]["g_physical"] = {resolved.g[0][0], resolved.g[1][0], resolved.g[2][0]};
  if (auto n = resonant_branch(resolved)) j["system"]["branch"] = branch_name(*n);
  j["dissipation"] = {{"gamma", run.dissipation.gamma},
                      {"kappa_c", run.dissipation.kappa_c},
                      {"kappa_f", run.dissipation.kappa_f}};
  j["model"] = {{"name", model_name(run.model.kind)}, {"truncation", truncation_name(run.model.truncation)}};
  j["protocol"] = {{"kind", run.protocol == ProtocolKind::Qesd ? "qesd" : "qst"},
                   {"alpha", {run.qst.alpha.real(), run.qst.alpha.imag()}},
                   {"beta", {run.qst.beta.real(), run.qst.beta.imag()}}};
  if (run.phase.angle) {
    j["protocol"]["phase"] = *run.phase.angle;
  } else {
    j["protocol"]["phase"] = "calibrated";
  }
  j["pulse"] = {{"shape", pulse_kind_name(run.shape)}, {"peak_ratio", run.peak_ratio}};
  j["run"] = {{"samples", run.samples},
              {"t_end_factor", run.t_end_factor},
              {"rtol", run.integrator.rtol},
              {"atol", run.integrator.atol}};
  if (cfg.axis1) {
    j["sweep"]["axis1"] = {{"name", cfg.axis1->name}, {"values", cfg.axis1->values}};
    if (cfg.axis2) j["sweep"]["axis2"] = {{"name", cfg.axis2->name}, {"values", cfg.axis2->values}};
    j["sweep"]["metric"] = metric_name(cfg.metric);
  }
  std::vector<std::string> models;
  for (ModelKind k : cfg.compare_models) models.emplace_back(model_name(k));
  j["compare"] = {{"models", models}, {"periods", cfg.compare_periods}, {"samples", cfg.compare_samples}};
  j["feasibility"] = {{"omegas", cfg.feasibility_omegas},
                      {"offsets", cfg.feasibility_offsets},
                      {"trace_span", cfg.trace_span}};
  cfg.hash = sha256_hex(j.dump()).substr(0, 16);
  return cfg;
}

SweepSpec RunConfig::sweep_spec() const {
  if (!axis1) throw ConfigError("the sweep needs [sweep] axis1 and axis1_values");
  SweepSpec s;
  s.base = run;
  s.axis1 = *axis1;
  s.axis2 = axis2;
  s.metric = metric;
  return s;
}

CompareSpec RunConfig::compare_spec() const {
  CompareSpec s;
  s.base = run;
  s.models = compare_models;
  s.periods = compare_periods;
  s.samples = compare_samples;
  return s;
}

FeasibilitySpec RunConfig::feasibility_spec() const {
  FeasibilitySpec s;
  s.base = run;
  s.omegas = feasibility_omegas;
  s.offsets = feasibility_offsets;
  s.trace_span = trace_span;
  return s;
}

}  // namespace cavnet
