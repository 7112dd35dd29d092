#include "relbelief/cli/commands.hpp"

#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>

#include <CLI11.hpp>
#include <json.hpp>

#include "relbelief/cli/config.hpp"
#include "relbelief/cli/csv.hpp"
#include "relbelief/errors.hpp"

namespace relbelief::cli {

using nlohmann::ordered_json;
namespace fs = std::filesystem;

namespace {

constexpr const char* kVersion = "1.0.0";

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> sims;
  std::optional<unsigned> threads;
  std::optional<double> threshold;
  std::optional<std::string> out;
};

struct Run {
  std::string command;
  std::optional<RunConfig> cfg;
  McConfig mc;
  fs::path out_dir;
  std::ostream& out;
  std::vector<std::string> outputs;
  bool fallback = false;

  void emit(const std::string& name, const std::string& text) {
    write_text(out_dir / name, text);
    outputs.push_back(name);
  }
  void emit(const std::string& name, const CsvTable& table) { emit(name, table.str()); }
  void emit(const std::string& name, const ordered_json& j) { emit(name, j.dump(2) + "\n"); }

  void manifest() {
    ordered_json m;
    m["tool"] = "relbelief";
    m["version"] = kVersion;
    m["command"] = command;
    if (cfg) {
      char hex[17];
      std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(stream_tag(cfg->canonical)));
      m["config_digest"] = hex;
    } else {
      m["config_digest"] = nullptr;
    }
    m["seed"] = mc.seed;
    m["n_sim"] = mc.n_sim;
    m["n_outer"] = mc.n_outer;
    m["outputs"] = outputs;
    write_text(out_dir / "manifest.json", m.dump(2) + "\n");
  }

  const RunConfig& config() const {
    if (!cfg) throw ConfigError("--config is required for '" + command + "'");
    return *cfg;
  }
};

std::string psi_text(const PsiValue& v) {
  if (const auto* d = std::get_if<double>(&v)) return fmt(*d);
  return std::get<std::string>(v);
}

ordered_json psi_json(const PsiValue& v) {
  if (const auto* d = std::get_if<double>(&v)) return *d;
  return std::get<std::string>(v);
}

std::string n_text(const InferenceBundle& b) {
  if (const auto* ln = std::get_if<LocationNormal>(&b)) return std::to_string(ln->spec().n);
  if (const auto* bb = std::get_if<BetaBinomial>(&b)) return std::to_string(bb->spec().n);
  return "";
}

const Data& require_data(const RunConfig& cfg) {
  if (!cfg.data) throw ConfigError("this command needs a 'data' section");
  return *cfg.data;
}

std::optional<Discretization> disc_for(const RunConfig& cfg, const std::optional<PsiValue>& anchor) {
  if (cfg.model.kind == ModelKind::Finite) return cfg.discretization;
  if (!cfg.discretization) throw ConfigError("discretization.delta is required for a continuous interest");
  Discretization d = *cfg.discretization;
  if (anchor && !d.anchor) {
    if (const auto* v = std::get_if<double>(&*anchor)) d.anchor = *v;
  }
  return d;
}

CsvTable profile_table(const EvidenceProfile& p) {
  CsvTable t({"psi", "cell_lo", "cell_hi", "prior", "posterior", "rb", "usable"});
  for (const auto& c : p.cells)
    t.add_row({p.categorical ? c.label : fmt(c.center), fmt(c.lo), fmt(c.hi), fmt(c.prior), fmt(c.posterior),
               fmt(c.rb), c.usable ? "1" : "0"});
  return t;
}

ordered_json region_json(const EvidenceProfile& p, const std::vector<std::size_t>& cells) {
  ordered_json arr = ordered_json::array();
  for (auto i : cells) {
    const auto& c = p.cells[i];
    if (p.categorical) arr.push_back(c.label);
    else arr.push_back({c.lo, c.hi});
  }
  return arr;
}

// merges adjacent interval cells into maximal intervals
ordered_json intervals_json(const EvidenceProfile& p, const std::vector<std::size_t>& cells) {
  if (p.categorical) return region_json(p, cells);
  ordered_json arr = ordered_json::array();
  for (std::size_t i = 0; i < cells.size();) {
    std::size_t j = i;
    while (j + 1 < cells.size() && cells[j + 1] == cells[j] + 1) ++j;
    arr.push_back({p.cells[cells[i]].lo, p.cells[cells[j]].hi});
    i = j + 1;
  }
  return arr;
}

BiasOptions bias_options(const RunConfig& cfg, const McConfig& mc) {
  BiasOptions o;
  o.method = cfg.task.method;
  o.mc = mc;
  o.monotone_boundary = cfg.task.monotone_boundary;
  o.sup_grid = cfg.task.sup_grid;
  if (cfg.task.cell_hypothesis) {
    if (!cfg.discretization) throw ConfigError("task.hypothesis = cell needs discretization.delta");
    o.cell_half_width = cfg.discretization->delta;
  }
  return o;
}

double require_delta(const RunConfig& cfg) {
  if (!cfg.task.delta) throw ConfigError("task.delta (the difference that matters) is required");
  return *cfg.task.delta;
}

PsiValue require_psi0(const RunConfig& cfg) {
  if (!cfg.task.psi0) throw ConfigError("task.psi0 is required");
  return *cfg.task.psi0;
}

// ---------------------------------------------------------------------------

int cmd_analyze(Run& run) {
  const auto& cfg = run.config();
  const auto bundle = make_bundle(cfg.model);
  const auto& data = require_data(cfg);
  const auto disc = disc_for(cfg, std::nullopt);
  const auto profile = rb_profile(bundle, data, disc);
  const auto rep = estimate(profile, cfg.task.gamma);

  ordered_json j;
  j["psi_hat"] = profile.categorical ? ordered_json(rep.psi_hat_label) : ordered_json(rep.psi_hat);
  j["max_rb"] = rep.max_rb;
  j["tied_cells"] = rep.tied_cells.size();
  j["plausible_region"] = intervals_json(profile, rep.plausible_region);
  j["plausible_posterior_content"] = rep.pl_posterior_content;
  j["plausible_prior_content"] = rep.pl_prior_content;
  if (rep.credible) {
    ordered_json c;
    c["gamma"] = rep.credible->gamma;
    c["rb_cutoff"] = rep.credible->cutoff;
    c["region"] = intervals_json(profile, rep.credible->cells);
    c["posterior_content"] = rep.credible->posterior_content;
    c["prior_content"] = rep.credible->prior_content;
    j["credible_region"] = c;
  }
  j["t_obs"] = profile.t_obs;
  j["unusable_cells"] = profile.unusable.size();
  run.emit("profile.csv", profile_table(profile));
  run.emit("estimate.json", j);
  run.out << j.dump(2) << '\n';
  return kExitOk;
}

int cmd_assess(Run& run) {
  const auto& cfg = run.config();
  const auto psi0 = require_psi0(cfg);
  const auto bundle = make_bundle(cfg.model);
  const auto profile = rb_profile(bundle, require_data(cfg), disc_for(cfg, psi0));
  const auto a = assess(profile, psi0);

  ordered_json j;
  j["psi0"] = psi_json(psi0);
  const auto& cell = profile.cells[a.cell];
  j["cell"] = profile.categorical ? ordered_json(cell.label) : ordered_json({cell.lo, cell.hi});
  j["rb"] = a.rb0;
  j["verdict"] = to_string(a.verdict.kind);
  j["strength"] = a.strength;
  j["posterior_lower_bound"] = a.markov_lower;
  j["posterior_upper_bound"] = a.markov_upper;
  run.emit("profile.csv", profile_table(profile));
  run.emit("assessment.json", j);
  run.out << j.dump(2) << '\n';
  return kExitOk;
}

int cmd_bias(Run& run) {
  const auto& cfg = run.config();
  const double delta = require_delta(cfg);
  const auto bundle = make_bundle(cfg.model);
  const auto opts = bias_options(cfg, run.mc);
  CsvTable t = cfg.task.estimation
                   ? CsvTable({"n", "delta", "avg_bias_against", "se_avg_bias_against", "sup_bias_against",
                               "se_sup_bias_against", "sup_location", "avg_bias_in_favor",
                               "se_avg_bias_in_favor", "implied_coverage", "method"})
                   : CsvTable({"n", "psi0", "delta", "bias_against", "se_bias_against", "bias_in_favor",
                               "se_bias_in_favor", "favor_argsup", "method"});
  if (cfg.task.estimation) {
    const auto r = bias_e(bundle, delta, opts);
    t.add_row({n_text(bundle), fmt(delta), fmt(r.avg_bias_against), fmt(r.se_avg_against),
               fmt(r.sup_bias_against), fmt(r.se_sup_against), psi_text(r.sup_location),
               fmt(r.avg_bias_in_favor), fmt(r.se_avg_in_favor), fmt(r.implied_coverage), to_string(r.method)});
    run.fallback = r.fallback;
    for (const auto& w : r.warnings) run.out << "warning: " << w << '\n';
  } else {
    const auto psi0 = require_psi0(cfg);
    const auto r = bias_h(bundle, psi0, delta, opts);
    t.add_row({n_text(bundle), psi_text(psi0), fmt(delta), fmt(r.bias_against), fmt(r.se_against),
               fmt(r.bias_in_favor), fmt(r.se_in_favor), r.favor_argsup ? psi_text(*r.favor_argsup) : "",
               to_string(r.method)});
  }
  run.emit("bias.csv", t);
  run.out << t.str();
  return run.fallback ? kExitFallback : kExitOk;
}

int cmd_design(Run& run) {
  const auto& cfg = run.config();
  const double delta = require_delta(cfg);
  const auto psi0 = require_psi0(cfg);
  if (cfg.task.n_grid.empty()) throw ConfigError("task.n_grid is required for design");
  const auto& targets = cfg.task.targets;
  if (!targets.max_bias_against && !targets.max_bias_in_favor)
    throw ConfigError("task.targets needs max_bias_against and/or max_bias_in_favor");
  if (cfg.model.kind == ModelKind::Finite) throw ConfigError("design needs a model with a sample size");
  const auto opts = bias_options(cfg, run.mc);

  auto table = [&](const std::vector<DesignRow>& rows) {
    CsvTable t({"n", "bias_against", "se_bias_against", "bias_in_favor", "se_bias_in_favor", "admissible"});
    for (const auto& r : rows)
      t.add_row({std::to_string(r.n), fmt(r.report.bias_against), fmt(r.report.se_against),
                 fmt(r.report.bias_in_favor), fmt(r.report.se_in_favor), r.admissible ? "1" : "0"});
    return t;
  };
  try {
    const auto res = design_sample_size([&](std::int64_t n) { return make_bundle_with_n(cfg.model, n); },
                                        psi0, delta, targets, cfg.task.n_grid, opts);
    run.emit("design.csv", table(res.table));
    ordered_json j;
    j["n"] = res.n;
    run.emit("design.json", j);
    run.out << "n = " << res.n << '\n';
    return kExitOk;
  } catch (const DesignError& e) {
    run.emit("design.csv", table(e.table()));
    throw;
  }
}

int cmd_check(Run& run, const Overrides& ov) {
  const auto& cfg = run.config();
  ConflictOptions o;
  o.threshold = ov.threshold.value_or(cfg.task.threshold.value_or(0.05));
  o.method = cfg.task.method;
  o.mc = run.mc;
  o.factorization = cfg.task.factorization;
  const auto r = conflict_check(make_bundle(cfg.model), require_data(cfg), o);
  CsvTable t({"t_obs", "tail_prob", "se_tail_prob", "threshold", "verdict", "method"});
  t.add_row({r.t_label.empty() ? fmt(r.t_obs) : r.t_label, fmt(r.tail_prob), fmt(r.se), fmt(r.threshold),
             to_string(r.verdict), to_string(r.method)});
  run.emit("conflict.csv", t);
  run.out << t.str();
  return kExitOk;
}

// ---------------------------------------------------------------------------
// reference tables and figure curves, settings fixed

const std::vector<std::int64_t> kTableN{5, 10, 20, 50, 100};

LocationNormal locnormal(std::int64_t n, double mu_star, double tau_star_sq) {
  return LocationNormal({n, 1.0, mu_star, tau_star_sq});
}

CsvTable hypothesis_table(const McConfig& mc, bool in_favor) {
  const std::string q = in_favor ? "bias_in_favor" : "bias_against";
  const std::vector<std::pair<double, std::string>> priors{{1.0, "prior_1_1"}, {0.0, "prior_0_1"}};
  std::vector<std::string> header{"n"};
  for (const auto& p : priors) header.push_back(q + "_" + p.second);
  for (const auto& p : priors) {
    header.push_back("mc_" + q + "_" + p.second);
    header.push_back("mc_se_" + q + "_" + p.second);
  }
  CsvTable t(header);
  BiasOptions exact;
  exact.method = Method::Exact;
  BiasOptions sim;
  sim.method = Method::MonteCarlo;
  sim.mc = mc;
  for (auto n : kTableN) {
    std::vector<std::string> row{std::to_string(n)};
    std::vector<std::string> mc_cells;
    for (const auto& p : priors) {
      const InferenceBundle b = locnormal(n, p.first, 1.0);
      ProbEstimate e, m;
      if (in_favor) {
        e = bias_in_favor_h(b, 0.0, 0.5, exact).first;
        m = bias_in_favor_h(b, 0.0, 0.5, sim).first;
      } else {
        e = bias_against_h(b, 0.0, exact);
        m = bias_against_h(b, 0.0, sim);
      }
      row.push_back(fmt(e.value));
      mc_cells.push_back(fmt(m.value));
      mc_cells.push_back(fmt(m.se));
    }
    row.insert(row.end(), mc_cells.begin(), mc_cells.end());
    t.add_row(row);
  }
  return t;
}

CsvTable estimation_table(Run& run, bool in_favor) {
  BiasOptions opts;
  opts.mc = run.mc;
  std::vector<double> settings = in_favor ? std::vector<double>{1.0, 0.5} : std::vector<double>{1.0, 0.25};
  std::vector<std::string> header{"n"};
  for (double s : settings)
    header.push_back(in_favor ? "avg_bias_in_favor_delta_" + fmt(s) : "avg_bias_against_tau_star_sq_" + fmt(s));
  if (!in_favor)
    for (double s : settings) header.push_back("implied_coverage_tau_star_sq_" + fmt(s));
  CsvTable t(header);
  for (auto n : kTableN) {
    std::vector<std::string> row{std::to_string(n)};
    std::vector<std::string> coverage;
    for (double s : settings) {
      const BiasEReport r = in_favor ? bias_in_favor_e(locnormal(n, 0.0, 1.0), s, opts)
                                     : bias_against_e(locnormal(n, 0.0, s), opts);
      run.fallback = run.fallback || r.fallback;
      for (const auto& w : r.warnings) run.out << "warning: n=" << n << ": " << w << '\n';
      row.push_back(fmt(in_favor ? r.avg_bias_in_favor : r.avg_bias_against));
      coverage.push_back(fmt(r.implied_coverage));
    }
    if (!in_favor) row.insert(row.end(), coverage.begin(), coverage.end());
    t.add_row(row);
  }
  return t;
}

constexpr int kCurvePoints = 201;

CsvTable curve(double lo, double hi, const std::string& column, const std::function<double(double)>& f) {
  CsvTable t({"mu", column});
  for (int k = 0; k < kCurvePoints; ++k) {
    const double mu = lo + (hi - lo) * k / (kCurvePoints - 1);
    t.add_row({fmt(mu), fmt(f(mu))});
  }
  return t;
}

int cmd_reproduce(Run& run, const std::string& target) {
  CsvTable t({""});
  if (target == "table1") {
    t = hypothesis_table(run.mc, false);
  } else if (target == "table2") {
    t = hypothesis_table(run.mc, true);
  } else if (target == "table3") {
    t = estimation_table(run, false);
  } else if (target == "table5") {
    t = estimation_table(run, true);
  } else if (target == "fig1") {
    const LocationNormalSpec spec{20, 1.0, 1.0, 1.0};
    t = curve(-3.0, 5.0, "prob_evidence_in_favor_of_0",
              [&](double mu) { return favor_prob_locnormal(spec, 0.0, mu); });
  } else if (target == "fig3") {
    const LocationNormalSpec spec{20, 1.0, 0.0, 1.0};
    const double delta = 0.5;
    t = curve(-4.0, 4.0, "bias_in_favor_boundary_sup", [&](double mu) {
      return std::max(favor_prob_locnormal(spec, mu, mu - delta), favor_prob_locnormal(spec, mu, mu + delta));
    });
  } else {
    throw ConfigError("unknown reproduce target '" + target + "' (table1, table2, table3, table5, fig1, fig3)");
  }
  run.emit(target + ".csv", t);
  run.out << t.str();
  return run.fallback ? kExitFallback : kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Relative belief inference: evidence, estimation, bias and prior-data conflict"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  std::optional<std::string> config_path;
  Overrides ov;
  std::string target;
  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON run configuration");
    sub->add_option("--out", ov.out, "output directory");
    sub->add_option("--seed", ov.seed, "Monte Carlo master seed");
    sub->add_option("--sims", ov.sims, "Monte Carlo replications")->check(CLI::PositiveNumber);
    sub->add_option("--threads", ov.threads, "worker threads")->check(CLI::Range(1u, 1024u));
    sub->add_option("--threshold", ov.threshold, "conflict threshold")->check(CLI::Range(0.0, 1.0));
  };
  std::map<std::string, CLI::App*> subs;
  for (const char* name : {"analyze", "assess", "bias", "design", "check", "reproduce"}) {
    subs[name] = app.add_subcommand(name);
    common(subs[name]);
  }
  subs["analyze"]->description("relative belief profile, estimate, plausible and credible regions");
  subs["assess"]->description("evidence for or against psi0 and its strength");
  subs["bias"]->description("a priori bias against and in favor");
  subs["design"]->description("smallest sample size meeting bias targets");
  subs["check"]->description("prior-data conflict check");
  subs["reproduce"]->description("regenerate the published tables and figure data");
  subs["reproduce"]->add_option("target", target, "table1|table2|table3|table5|fig1|fig3")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << '\n';
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }

  std::string command;
  for (const auto& [name, sub] : subs)
    if (sub->parsed()) command = name;

  try {
    Run run{command, std::nullopt, {}, {}, out, {}, false};
    if (config_path) run.cfg = load_config(*config_path);
    run.mc = run.cfg ? run.cfg->mc : McConfig{};
    if (ov.seed) run.mc.seed = *ov.seed;
    if (ov.sims) run.mc.n_sim = *ov.sims;
    if (ov.threads) run.mc.threads = *ov.threads;
    run.out_dir = ov.out ? fs::path(*ov.out) : run.cfg && run.cfg->output_dir ? *run.cfg->output_dir : fs::path("relbelief_out");
    if (ov.threshold && !(*ov.threshold > 0.0 && *ov.threshold < 1.0))
      throw ConfigError("--threshold must lie in (0,1)");

    int code = kExitOk;
    if (command == "analyze") code = cmd_analyze(run);
    else if (command == "assess") code = cmd_assess(run);
    else if (command == "bias") code = cmd_bias(run);
    else if (command == "design") code = cmd_design(run);
    else if (command == "check") code = cmd_check(run, ov);
    else code = cmd_reproduce(run, target);
    run.manifest();
    if (code == kExitFallback) err << "warning: numerical fallback to Monte Carlo was used\n";
    return code;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return kExitDomain;
  }
}

}  // namespace relbelief::cli
