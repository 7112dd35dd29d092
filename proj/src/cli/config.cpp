#include "relbelief/cli/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "relbelief/errors.hpp"

namespace relbelief::cli {

using nlohmann::json;

namespace {

// A JSON object whose keys must all be consumed.
class Section {
 public:
  Section(const json& j, std::string name) : j_(j), name_(std::move(name)) {
    if (!j_.is_object()) throw ConfigError("'" + name_ + "' must be an object");
  }

  bool has(const std::string& key) const { return j_.contains(key); }

  const json& at(const std::string& key) {
    seen_.insert(key);
    if (!j_.contains(key)) throw ConfigError("missing key '" + path(key) + "'");
    return j_.at(key);
  }

  double number(const std::string& key) {
    const json& v = at(key);
    if (!v.is_number()) throw ConfigError("'" + path(key) + "' must be a number");
    return v.get<double>();
  }
  std::optional<double> opt_number(const std::string& key) {
    if (!has(key)) return std::nullopt;
    return number(key);
  }
  std::int64_t integer(const std::string& key) {
    const json& v = at(key);
    if (!v.is_number_integer()) throw ConfigError("'" + path(key) + "' must be an integer");
    return v.get<std::int64_t>();
  }
  std::string string(const std::string& key) {
    const json& v = at(key);
    if (!v.is_string()) throw ConfigError("'" + path(key) + "' must be a string");
    return v.get<std::string>();
  }
  bool boolean(const std::string& key) {
    const json& v = at(key);
    if (!v.is_boolean()) throw ConfigError("'" + path(key) + "' must be true or false");
    return v.get<bool>();
  }
  template <class T>
  std::vector<T> list(const std::string& key) {
    const json& v = at(key);
    if (!v.is_array()) throw ConfigError("'" + path(key) + "' must be an array");
    try {
      return v.get<std::vector<T>>();
    } catch (const json::exception&) {
      throw ConfigError("'" + path(key) + "' has elements of the wrong type");
    }
  }
  Section sub(const std::string& key) { return Section(at(key), path(key)); }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!seen_.count(it.key())) throw ConfigError("unknown key '" + path(it.key()) + "'");
  }

  std::string path(const std::string& key) const { return name_.empty() ? key : name_ + "." + key; }

 private:
  const json& j_;
  std::string name_;
  std::set<std::string> seen_;
};

PsiValue psi_of(const json& v, const std::string& where) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) return v.get<std::string>();
  throw ConfigError("'" + where + "' must be a number or a label");
}

ModelConfig parse_model(Section s) {
  ModelConfig m;
  const std::string kind = s.string("kind");
  if (kind == "location_normal") {
    m.kind = ModelKind::LocationNormal;
    auto& spec = m.location_normal;
    spec.n = s.integer("n");
    spec.sigma0_sq = s.opt_number("sigma0_sq").value_or(1.0);
    spec.mu_star = s.number("mu_star");
    spec.tau_star_sq = s.number("tau_star_sq");
  } else if (kind == "beta_binomial") {
    m.kind = ModelKind::BetaBinomial;
    auto& spec = m.beta_binomial;
    spec.n = s.integer("n");
    spec.alpha = s.opt_number("alpha").value_or(1.0);
    spec.beta = s.opt_number("beta").value_or(1.0);
  } else if (kind == "finite") {
    m.kind = ModelKind::Finite;
    auto& spec = m.finite;
    spec.theta_labels = s.list<std::string>("theta");
    spec.prior = s.list<double>("prior");
    spec.x_labels = s.list<std::string>("x");
    spec.likelihood = s.list<std::vector<double>>("likelihood");
    if (s.has("psi")) spec.psi_labels = s.list<std::string>("psi");
    if (s.has("psi_of_theta")) spec.psi_of_theta = s.list<std::string>("psi_of_theta");
    if (s.has("psi_values")) spec.psi_values = s.list<double>("psi_values");
  } else {
    throw ConfigError("model.kind must be location_normal, beta_binomial or finite, not '" + kind + "'");
  }
  s.finish();
  return m;
}

std::vector<double> read_sample_file(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("data.sample_file '" + path.string() + "' cannot be read");
  std::vector<double> values;
  std::string tok;
  while (f >> tok) {
    if (tok.front() == '#') {
      std::getline(f, tok);
      continue;
    }
    for (auto& c : tok)
      if (c == ',') c = ' ';
    std::istringstream parts(tok);
    double v;
    while (parts >> v) values.push_back(v);
    if (!parts.eof()) throw ConfigError("data.sample_file holds a non-numeric entry '" + tok + "'");
  }
  return values;
}

Data parse_data(Section s, ModelKind kind, const std::filesystem::path& base) {
  std::vector<std::string> given;
  for (const char* k : {"xbar", "sample", "sample_file", "successes", "x"})
    if (s.has(k)) given.emplace_back(k);
  if (given.size() != 1)
    throw ConfigError("data must hold exactly one of xbar, sample, sample_file, successes, x");
  const std::string& key = given.front();
  Data d;
  if (key == "xbar") {
    if (kind != ModelKind::LocationNormal) throw ConfigError("data.xbar needs a location_normal model");
    d = Statistic{s.number("xbar")};
  } else if (key == "successes") {
    if (kind != ModelKind::BetaBinomial) throw ConfigError("data.successes needs a beta_binomial model");
    d = Statistic{static_cast<double>(s.integer("successes"))};
  } else if (key == "x") {
    if (kind != ModelKind::Finite) throw ConfigError("data.x needs a finite model");
    d = Outcome{s.string("x")};
  } else {
    if (kind == ModelKind::Finite) throw ConfigError("finite models take data.x");
    if (key == "sample") {
      d = Sample{s.list<double>("sample")};
    } else {
      std::filesystem::path p = s.string("sample_file");
      if (p.is_relative()) p = base / p;
      d = Sample{read_sample_file(p)};
    }
  }
  s.finish();
  return d;
}

Discretization parse_disc(Section s) {
  Discretization disc;
  disc.delta = s.number("delta");
  if (!(disc.delta > 0.0)) throw ConfigError("discretization.delta must be positive");
  if (s.has("range")) {
    const auto r = s.list<double>("range");
    if (r.size() != 2 || !(r[0] < r[1])) throw ConfigError("discretization.range must be [lo, hi] with lo < hi");
    disc.lo = r[0];
    disc.hi = r[1];
  }
  if (s.has("anchor")) disc.anchor = s.number("anchor");
  s.finish();
  return disc;
}

Method parse_method(const std::string& m) {
  if (m == "auto") return Method::Auto;
  if (m == "exact") return Method::Exact;
  if (m == "monte_carlo") return Method::MonteCarlo;
  throw ConfigError("task.method must be auto, exact or monte_carlo");
}

TaskConfig parse_task(Section s) {
  TaskConfig t;
  if (s.has("psi0")) t.psi0 = psi_of(s.at("psi0"), "task.psi0");
  t.gamma = s.opt_number("gamma");
  if (t.gamma && !(*t.gamma > 0.0 && *t.gamma < 1.0)) throw ConfigError("task.gamma must lie in (0,1)");
  t.delta = s.opt_number("delta");
  if (t.delta && !(*t.delta > 0.0)) throw ConfigError("task.delta must be positive");
  if (s.has("targets")) {
    Section ts = s.sub("targets");
    t.targets.max_bias_against = ts.opt_number("max_bias_against");
    t.targets.max_bias_in_favor = ts.opt_number("max_bias_in_favor");
    ts.finish();
  }
  if (s.has("n_grid")) t.n_grid = s.list<std::int64_t>("n_grid");
  t.threshold = s.opt_number("threshold");
  if (t.threshold && !(*t.threshold > 0.0 && *t.threshold < 1.0))
    throw ConfigError("task.threshold must lie in (0,1)");
  if (s.has("monotone_boundary")) t.monotone_boundary = s.boolean("monotone_boundary");
  if (s.has("method")) t.method = parse_method(s.string("method"));
  if (s.has("hypothesis")) {
    const auto h = s.string("hypothesis");
    if (h != "point" && h != "cell") throw ConfigError("task.hypothesis must be point or cell");
    t.cell_hypothesis = h == "cell";
  }
  if (s.has("scope")) {
    const auto sc = s.string("scope");
    if (sc != "hypothesis" && sc != "estimation") throw ConfigError("task.scope must be hypothesis or estimation");
    t.estimation = sc == "estimation";
  }
  if (s.has("sup_grid")) t.sup_grid = s.list<double>("sup_grid");
  if (s.has("factorization")) {
    const auto f = s.string("factorization");
    if (f == "single") t.factorization = Factorization::SingleFactor;
    else if (f == "hierarchical") t.factorization = Factorization::Hierarchical;
    else if (f == "component") t.factorization = Factorization::Component;
    else throw ConfigError("task.factorization must be single, hierarchical or component");
  }
  s.finish();
  return t;
}

McConfig parse_mc(Section s) {
  McConfig mc;
  auto positive = [&](const char* key, std::uint64_t& dst) {
    if (!s.has(key)) return;
    const auto v = s.integer(key);
    if (v < 1) throw ConfigError("mc." + std::string(key) + " must be >= 1");
    dst = static_cast<std::uint64_t>(v);
  };
  positive("n_sim", mc.n_sim);
  positive("n_outer", mc.n_outer);
  if (s.has("seed")) {
    const json& v = s.at("seed");
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0))
      throw ConfigError("mc.seed must be a nonnegative integer");
    mc.seed = v.get<std::uint64_t>();
  }
  if (s.has("threads")) {
    const auto v = s.integer("threads");
    if (v < 1 || v > 1024) throw ConfigError("mc.threads must lie in [1, 1024]");
    mc.threads = static_cast<unsigned>(v);
  }
  s.finish();
  return mc;
}

}  // namespace

RunConfig parse_config(const std::string& text, const std::filesystem::path& base_dir) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  Section s(root, "");
  RunConfig cfg;
  cfg.model = parse_model(s.sub("model"));
  try {
    (void)make_bundle(cfg.model);
  } catch (const DomainError& e) {
    throw ConfigError(std::string("invalid model: ") + e.what());
  }
  if (s.has("data")) cfg.data = parse_data(s.sub("data"), cfg.model.kind, base_dir);
  if (s.has("discretization")) cfg.discretization = parse_disc(s.sub("discretization"));
  if (s.has("task")) cfg.task = parse_task(s.sub("task"));
  if (s.has("mc")) cfg.mc = parse_mc(s.sub("mc"));
  if (s.has("output")) {
    Section o = s.sub("output");
    cfg.output_dir = o.string("dir");
    if (cfg.output_dir->is_relative()) cfg.output_dir = base_dir / *cfg.output_dir;
    o.finish();
  }
  s.finish();
  cfg.canonical = root.dump();
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("config file '" + path.string() + "' cannot be read");
  std::stringstream buf;
  buf << f.rdbuf();
  return parse_config(buf.str(), path.has_parent_path() ? path.parent_path() : std::filesystem::path("."));
}

InferenceBundle make_bundle(const ModelConfig& model) {
  switch (model.kind) {
    case ModelKind::LocationNormal: return make_location_normal(model.location_normal);
    case ModelKind::BetaBinomial:
      return make_beta_binomial(model.beta_binomial.n, model.beta_binomial.alpha, model.beta_binomial.beta);
    case ModelKind::Finite: return make_finite(model.finite);
  }
  throw ConfigError("unknown model kind");
}

InferenceBundle make_bundle_with_n(const ModelConfig& model, std::int64_t n) {
  ModelConfig copy = model;
  switch (model.kind) {
    case ModelKind::LocationNormal: copy.location_normal.n = n; break;
    case ModelKind::BetaBinomial: copy.beta_binomial.n = n; break;
    case ModelKind::Finite: throw DomainError("finite models have no sample size to vary");
  }
  return make_bundle(copy);
}

}  // namespace relbelief::cli
