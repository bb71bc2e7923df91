#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "blowup/barometer.hpp"
#include "blowup/classifier.hpp"
#include "blowup/dsl.hpp"
#include "blowup/ensemble.hpp"
#include "blowup/error.hpp"
#include "blowup/model.hpp"
#include "blowup/ode.hpp"
#include "blowup/phases.hpp"
#include "json.hpp"
#include "output.hpp"

namespace blowup::cli {
namespace {

using Json = nlohmann::ordered_json;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

Json jnum(double v) {
  if (!std::isfinite(v)) return nullptr;
  return v;
}

Json jopt(const std::optional<double>& v) {
  return v ? jnum(*v) : Json(nullptr);
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

// ------------------------------------------------------------ flags

struct ParamFlags {
  std::optional<double> k, I, R, n_exp, sigma, c, k1, k2, A0, Y0;
  std::vector<std::string> extra;

  // k defaults to the calibrated ln R / I.
  [[nodiscard]] ScenarioParams resolve() const {
    ScenarioParams p;
    p.R = R.value_or(p.R);
    p.I = I.value_or(p.I);
    p.k = k ? *k : calibrate_k(p.R, p.I);
    p.n_exp = n_exp.value_or(p.n_exp);
    p.sigma = sigma.value_or(p.sigma);
    p.c = c.value_or(p.c);
    p.k1 = k1.value_or(p.k1);
    p.k2 = k2.value_or(p.k2);
    p.A0 = A0.value_or(p.A0);
    p.Y0 = Y0.value_or(p.Y0);
    return p;
  }

  [[nodiscard]] dsl::Bindings bindings() const {
    const ScenarioParams p = resolve();
    dsl::Bindings b{{"k", p.k},         {"I", p.I},   {"R", p.R},
                    {"n_exp", p.n_exp}, {"sigma", p.sigma}, {"c", p.c},
                    {"k1", p.k1},       {"k2", p.k2}};
    for (const auto& [name, value] : assignments(extra, "--param")) {
      b[name] = value;
    }
    return b;
  }

  static std::vector<std::pair<std::string, double>> assignments(
      const std::vector<std::string>& items, const std::string& flag) {
    std::vector<std::pair<std::string, double>> out;
    for (const auto& item : items) {
      const auto eq = item.find('=');
      if (eq == std::string::npos || eq == 0) {
        throw UsageError(flag + ": expected NAME=VALUE, got '" + item + "'");
      }
      const std::string value = item.substr(eq + 1);
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(value, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != value.size() || value.empty()) {
        throw UsageError(flag + ": '" + value + "' is not a number");
      }
      out.emplace_back(item.substr(0, eq), v);
    }
    return out;
  }
};

void add_param_flags(CLI::App& app, ParamFlags& p) {
  app.add_option("--k", p.k, "Growth coefficient (default ln(R)/I)");
  app.add_option("--I", p.I, "Engineer-to-AI intelligence ratio (default 100)");
  app.add_option("--R", p.R, "Annual growth factor (default 1.5872)");
  app.add_option("--n-exp,--n_exp", p.n_exp, "Power-law exponent (default 2)");
  app.add_option("--sigma", p.sigma, "Volatility (default 0)");
  app.add_option("--c", p.c, "Integration constant (default 1)");
  app.add_option("--k1", p.k1, "Coupled GDP coefficient");
  app.add_option("--k2", p.k2, "Coupled AI coefficient");
  app.add_option("--A0", p.A0, "Initial AI level or lower limit (default 1)");
  app.add_option("--Y0", p.Y0, "Initial GDP level (default 1)");
  app.add_option("--param", p.extra, "Extra DSL parameter NAME=VALUE")
      ->delimiter(',');
}

struct Global {
  std::string out;
  std::string format;
  std::uint64_t seed = 42;
};

struct Output {
  std::vector<Artifact> artifacts;
  std::string default_format;
};

void emit(const Output& result, const Global& g, std::ostream& out) {
  if (!g.out.empty()) {
    for (const auto& a : result.artifacts) {
      write_artifact(g.out, a);
      out << "wrote " << (std::filesystem::path(g.out) / a.name).string()
          << "\n";
    }
    return;
  }
  const std::string format = g.format.empty() ? result.default_format : g.format;
  for (const auto& a : result.artifacts) {
    if (a.is_json() == (format == "json")) {
      out << a.content;
      return;
    }
  }
  throw UsageError("this command has no " + format + " output");
}

// ----------------------------------------------------- model sources

struct ModelSource {
  std::string model;
  std::string dsl;
  std::string dsl_file;

  void add_flags(CLI::App& app, const std::string& model_help) {
    app.add_option("--model", model, model_help);
    app.add_option("--dsl", dsl, "Growth law or system in the DSL");
    app.add_option("--dsl-file", dsl_file, "File holding DSL text");
  }

  [[nodiscard]] std::size_t count() const {
    return static_cast<std::size_t>(!model.empty()) +
           static_cast<std::size_t>(!dsl.empty()) +
           static_cast<std::size_t>(!dsl_file.empty());
  }
};

std::string read_text(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw UsageError("cannot open " + path);
  return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

std::string builtin_system(const std::string& model) {
  if (model == "exponential") return "dA = k*I*A";
  if (model == "hyperbolic") return "dA = k*A^2";
  if (model == "powerlaw") return "dA = k*A^n_exp";
  if (model == "loglaw") return "dA = k*ln(A)*A";
  if (model == "coupled-gdp") return "dY = k1*Y*A; dA = k2*Y*A";
  throw UsageError("unknown model '" + model +
                   "' (exponential, hyperbolic, powerlaw, loglaw, coupled-gdp)");
}

std::string dsl_text(const ModelSource& src) {
  if (src.count() != 1) {
    throw UsageError("give exactly one of --model, --dsl, --dsl-file");
  }
  if (!src.model.empty()) return builtin_system(src.model);
  if (!src.dsl.empty()) return src.dsl;
  return read_text(src.dsl_file);
}

// Keeps only the parameters the equations mention, so a state variable
// may reuse a parameter name.
dsl::SystemSpec bind_system(const std::string& text, const ParamFlags& params) {
  auto parsed = dsl::parse(text);
  dsl::SystemSpec spec;
  if (auto* expr = std::get_if<dsl::ExprPtr>(&parsed)) {
    spec.equations.push_back({"A", *expr, 1});
  } else {
    spec = std::get<dsl::SystemSpec>(parsed);
  }
  const std::vector<std::string> vars = spec.variables();
  const dsl::Bindings all = params.bindings();
  for (const auto& eq : spec.equations) {
    for (const auto& name : dsl::free_names(*eq.rate)) {
      if (std::find(vars.begin(), vars.end(), name) != vars.end()) continue;
      const auto it = all.find(name);
      if (it != all.end()) spec.parameters[name] = it->second;
    }
  }
  return spec;
}

GrowthLaw bind_law(const std::string& text, const ParamFlags& params) {
  const dsl::SystemSpec spec = bind_system(text, params);
  if (spec.equations.size() != 1) {
    throw UsageError("expected a single growth law F(A)");
  }
  const auto& eq = spec.equations[0];
  dsl::CompiledExpr rate(eq.rate, {eq.variable}, spec.parameters);
  return GrowthLaw(dsl::to_string(*eq.rate), [rate](double A) {
    return rate(std::span<const double>(&A, 1));
  });
}

// ------------------------------------------------------------ solve

struct SolveOpts {
  std::string model;
  double t_max = kNaN;
  std::size_t steps = 100;
};

Output cmd_solve(const SolveOpts& o, const ParamFlags& pf) {
  if (!(o.t_max > 0.0)) throw UsageError("--t-max must be positive");
  if (o.steps < 2) throw UsageError("--steps must be at least 2");
  const ScenarioParams p = pf.resolve();

  std::vector<std::string> header{"t", "A"};
  std::function<std::vector<double>(double)> level;
  if (o.model == "exponential") {
    level = [&](double t) { return std::vector{exp_phase_solution(p, t)}; };
  } else if (o.model == "hyperbolic") {
    level = [&](double t) { return std::vector{hyperbolic_solution(p.k, p.I, t)}; };
  } else if (o.model == "powerlaw") {
    level = [&](double t) {
      return std::vector{powerlaw_solution(p.k, p.I, p.n_exp, t)};
    };
  } else if (o.model == "loglaw") {
    level = [&](double t) { return std::vector{loglaw_solution(p.c, p.k, t)}; };
  } else if (o.model == "coupled-gdp") {
    header = {"t", "Y", "A"};
    level = [&](double t) {
      const double A = coupled_gdp_solution(p.k1, t);
      return std::vector{coupled_gdp_initial_gdp(p.k1, p.k2) * A, A};
    };
  } else {
    throw UsageError("unknown closed-form model '" + o.model +
                     "' (exponential, hyperbolic, powerlaw, loglaw, coupled-gdp)");
  }

  Csv csv(header);
  Json j;
  j["model"] = o.model;
  for (const auto& h : header) j[h] = Json::array();
  for (std::size_t i = 0; i < o.steps; ++i) {
    const double t = o.t_max * static_cast<double>(i) /
                     static_cast<double>(o.steps - 1);
    std::vector<double> row{t};
    const std::vector<double> values = level(t);
    row.insert(row.end(), values.begin(), values.end());
    csv.row(row);
    for (std::size_t c = 0; c < header.size(); ++c) j[header[c]].push_back(row[c]);
  }
  return {{{"solution.csv", csv.str()}, {"solution.json", dump(j)}}, "csv"};
}

// --------------------------------------------------------- simulate

struct SimulateOpts {
  ModelSource source;
  std::vector<std::string> init;
  double t_max = 100.0;
  std::size_t steps = 0;
  double rel_tol = 1e-8;
  double abs_tol = 1e-10;
  double threshold = 1e9;
  std::optional<double> blowup_tol;
};

Json event_json(const BlowUpEvent& ev, const std::vector<std::string>& names) {
  Json j;
  j["estimate"] = ev.estimate;
  j["t_low"] = ev.t_low;
  j["t_high"] = ev.t_high;
  j["method"] = to_string(ev.method);
  j["component"] = names.at(ev.component);
  j["threshold_time"] = ev.threshold_time;
  return j;
}

Output cmd_simulate(const SimulateOpts& o, const ParamFlags& pf) {
  if (!(o.t_max > 0.0)) throw UsageError("--t-max must be positive");
  const std::string text = dsl_text(o.source);
  const dsl::SystemSpec spec = bind_system(text, pf);
  const VectorField field = dsl::to_field(spec);
  const std::vector<std::string> vars = spec.variables();

  const ScenarioParams p = pf.resolve();
  const auto given = ParamFlags::assignments(o.init, "--init");
  std::vector<double> state0;
  for (const auto& v : vars) {
    double x = v == "A" ? p.A0 : v == "Y" ? p.Y0 : 1.0;
    for (const auto& [name, value] : given) {
      if (name == v) x = value;
    }
    state0.push_back(x);
  }
  for (const auto& [name, value] : given) {
    if (std::find(vars.begin(), vars.end(), name) == vars.end()) {
      throw UsageError("--init: '" + name + "' is not a state variable");
    }
  }

  IntegrationOptions opts;
  opts.rel_tol = o.rel_tol;
  opts.abs_tol = o.abs_tol;
  opts.blowup_threshold = o.threshold;
  opts.blowup_tol = o.blowup_tol;
  // The initial state is always recorded, so the grid starts one step in.
  if (o.steps == 1) throw UsageError("--steps must be 0 or at least 2");
  for (std::size_t i = 1; i < o.steps; ++i) {
    opts.sample_times.push_back(o.t_max * static_cast<double>(i) /
                                static_cast<double>(o.steps - 1));
  }
  const Trajectory traj = integrate(field, state0, o.t_max, opts);

  std::vector<std::string> header{"t"};
  header.insert(header.end(), vars.begin(), vars.end());
  Csv csv(header);
  for (std::size_t i = 0; i < traj.size(); ++i) {
    std::vector<double> row{traj.times[i]};
    row.insert(row.end(), traj.states[i].begin(), traj.states[i].end());
    csv.row(row);
  }

  Json j;
  Json eqs = Json::array();
  for (const auto& eq : spec.equations) {
    eqs.push_back("d" + eq.variable + " = " + dsl::to_string(*eq.rate));
  }
  j["equations"] = eqs;
  j["parameters"] = Json::object();
  for (const auto& [name, value] : spec.parameters) j["parameters"][name] = value;
  j["initial"] = Json::object();
  for (std::size_t i = 0; i < vars.size(); ++i) j["initial"][vars[i]] = state0[i];
  j["t_max"] = o.t_max;
  j["termination"] = to_string(traj.termination);
  j["samples"] = traj.size();
  j["blowup"] = traj.blowup ? event_json(*traj.blowup, vars) : Json(nullptr);
  Json last;
  last["t"] = traj.times.back();
  for (std::size_t i = 0; i < vars.size(); ++i) {
    last[vars[i]] = jnum(traj.states.back()[i]);
  }
  j["final"] = last;
  return {{{"trajectory.csv", csv.str()}, {"summary.json", dump(j)}}, "csv"};
}

// --------------------------------------------------------- ensemble

struct EnsembleOpts {
  std::string model = "hyperbolic-sde";
  std::string drift;
  std::string diffusion;
  double periods = 200.0;
  double dt = 0.01;
  std::size_t paths = 1000;
  unsigned threads = 0;
  double threshold = 1e9;
  std::vector<double> scan_sigmas;
  double sample_interval = 1.0;
  std::size_t window = 0;
  double z = kDefaultBarometerZ;
};

StochasticModel ensemble_model(const EnsembleOpts& o, const ParamFlags& pf) {
  if (!o.drift.empty() || !o.diffusion.empty()) {
    if (o.drift.empty() || o.diffusion.empty()) {
      throw UsageError("--drift and --diffusion go together");
    }
    return dsl::stochastic_model_from_dsl(o.drift, o.diffusion, pf.bindings());
  }
  const ScenarioParams p = pf.resolve();
  if (o.model == "hyperbolic-sde") return hyperbolic_sde_model(p.k, p.sigma);
  if (o.model == "gbm") return gbm_model(p.k, p.I, p.sigma);
  throw UsageError("unknown stochastic model '" + o.model +
                   "' (hyperbolic-sde, gbm)");
}

Output masking_scan(const EnsembleOpts& o, const ParamFlags& pf,
                    const Global& g) {
  const ScenarioParams p = pf.resolve();
  MaskingScanSpec spec;
  spec.k = p.k;
  spec.sigmas = o.scan_sigmas;
  spec.A0 = p.A0;
  spec.dt = o.dt;
  spec.t_end = o.periods;
  spec.n_paths = o.paths;
  spec.master_seed = g.seed;
  spec.explosion_threshold = o.threshold;
  spec.sample_interval = o.sample_interval;
  spec.window = o.window;
  spec.z_threshold = o.z;
  const auto rows = volatility_masking_scan(spec, ExecutionOptions{o.threads});

  Csv csv({"sigma", "paths", "exploded", "absorbed", "analyzed", "flagged",
           "flagged_fraction"});
  Json j;
  j["k"] = spec.k;
  j["A0"] = spec.A0;
  j["periods"] = spec.t_end;
  j["dt"] = spec.dt;
  j["seed"] = g.seed;
  j["rows"] = Json::array();
  for (const auto& r : rows) {
    csv.row({r.sigma, static_cast<double>(r.paths), static_cast<double>(r.exploded),
             static_cast<double>(r.absorbed), static_cast<double>(r.analyzed),
             static_cast<double>(r.flagged), r.flagged_fraction});
    Json row;
    row["sigma"] = r.sigma;
    row["paths"] = r.paths;
    row["exploded"] = r.exploded;
    row["absorbed"] = r.absorbed;
    row["analyzed"] = r.analyzed;
    row["flagged"] = r.flagged;
    row["flagged_fraction"] = jnum(r.flagged_fraction);
    j["rows"].push_back(row);
  }
  return {{{"masking.json", dump(j)}, {"masking.csv", csv.str()}}, "json"};
}

Output cmd_ensemble(const EnsembleOpts& o, const ParamFlags& pf,
                    const Global& g) {
  if (o.paths == 0) throw UsageError("--paths must be at least 1");
  if (!o.scan_sigmas.empty()) return masking_scan(o, pf, g);

  EnsembleSpec spec;
  spec.model = ensemble_model(o, pf);
  spec.A0 = pf.resolve().A0;
  spec.dt = o.dt;
  spec.t_end = o.periods;
  spec.n_paths = o.paths;
  spec.master_seed = g.seed;
  spec.explosion_threshold = o.threshold;
  const EnsembleStats st = run_ensemble(spec, ExecutionOptions{o.threads});

  Json j;
  j["model"] = spec.model.description;
  j["A0"] = spec.A0;
  j["dt"] = spec.dt;
  j["periods"] = spec.t_end;
  j["paths"] = spec.n_paths;
  j["seed"] = g.seed;
  j["explosion_threshold"] = spec.explosion_threshold;
  j["exploded"] = st.exploded;
  j["absorbed"] = st.absorbed;
  j["completed"] = st.n_paths - st.exploded - st.absorbed;
  j["exploded_fraction"] = st.exploded_fraction;
  j["absorbed_fraction"] = st.absorbed_fraction;
  if (st.blowup_quantiles) {
    const Quantiles& q = *st.blowup_quantiles;
    j["blowup_time_quantiles"] = {{"q05", q.q05}, {"q25", q.q25}, {"q50", q.q50},
                                  {"q75", q.q75}, {"q95", q.q95}};
    j["blowup_time_iqr"] = q.interquartile_range();
  } else {
    j["blowup_time_quantiles"] = nullptr;
    j["blowup_time_iqr"] = nullptr;
  }
  j["log_slope"] = {{"count", st.slope_count},
                    {"mean", jnum(st.slope_mean)},
                    {"stddev", jnum(st.slope_stddev)}};

  Csv csv({"index", "seed", "outcome", "event_time", "terminal_value",
           "log_slope"});
  for (const PathSummary& s : st.paths) {
    csv.text_row({std::to_string(s.index), std::to_string(s.seed),
                  to_string(s.outcome), s.event_time ? num(*s.event_time) : "",
                  num(s.terminal_value), s.log_slope ? num(*s.log_slope) : ""});
  }
  return {{{"ensemble.json", dump(j)}, {"paths.csv", csv.str()}}, "json"};
}

// --------------------------------------------------------- classify

Json verdict_json(const ConvergenceVerdict& v, const std::string& law) {
  Json j;
  j["law"] = law;
  j["A0"] = v.A0;
  j["verdict"] = to_string(v.verdict);
  j["singularity_time_estimate"] = jopt(v.singularity_time_estimate);
  j["tail_exponent"] = jnum(v.tail_exponent);
  j["monotone"] = v.monotone;
  Json q;
  q["verdict"] = to_string(v.quadrature.verdict);
  q["reason"] = v.quadrature.reason;
  q["ladder"] = v.quadrature.ladder;
  q["increments"] = v.quadrature.increments;
  q["partial_integral"] = v.quadrature.partial_integral;
  Json t;
  t["verdict"] = to_string(v.tail.verdict);
  t["reason"] = v.tail.reason;
  t["grid"] = v.tail.grid;
  t["local_exponents"] = v.tail.local_exponents;
  t["limit_exponent"] = jnum(v.tail.limit_exponent);
  t["log_exponent"] = jnum(v.tail.log_exponent);
  j["evidence"] = {{"quadrature", q}, {"tail_exponent", t}};
  return j;
}

Output cmd_classify(const ModelSource& src, const ParamFlags& pf) {
  if (!src.model.empty()) throw UsageError("classify takes --dsl or --dsl-file");
  const GrowthLaw law = bind_law(dsl_text(src), pf);
  const ConvergenceVerdict v = classify_growth_law(law, pf.A0);
  return {{{"classify.json", dump(verdict_json(v, law.name()))}}, "json"};
}

// -------------------------------------------------------- barometer

struct BarometerOpts {
  std::string input;
  std::string column;
  std::size_t window = 32;
  double z = kDefaultBarometerZ;
};

Output cmd_barometer(const BarometerOpts& o) {
  if (o.input.empty()) throw UsageError("barometer needs an input CSV file");
  const Series s = read_series(o.input, o.column);
  const BarometerReport r = barometer(s.times, s.values, o.window, o.z);
  Json j;
  j["input"] = std::filesystem::path(o.input).filename().string();
  j["column"] = s.column;
  j["samples"] = s.values.size();
  j["window"] = {{"begin", r.window_begin}, {"end", r.window_end}};
  j["intercept"] = r.intercept;
  j["linear_coeff"] = r.linear_coeff;
  j["quadratic_coeff"] = r.quadratic_coeff;
  j["quadratic_stderr"] = r.quadratic_stderr;
  j["z_score"] = jnum(r.z_score);
  j["z_threshold"] = o.z;
  j["flagged"] = r.flagged;
  return {{{"barometer.json", dump(j)}}, "json"};
}

// -------------------------------------------------------- reproduce

struct ReproduceOpts {
  std::string target;
  std::size_t steps = 200;
  std::size_t paths = 20;
  double periods = 200.0;
  double dt = 0.01;
};

Csv log_series(const std::vector<double>& t, const std::vector<double>& A) {
  Csv csv({"t", "A", "ln_A"});
  for (std::size_t i = 0; i < t.size(); ++i) csv.row({t[i], A[i], std::log(A[i])});
  return csv;
}

Output fig1(const ReproduceOpts& o, const ParamFlags& pf) {
  const ScenarioParams p = pf.resolve();
  const double t1 = phase1_duration(p.R, p.I);
  std::vector<double> t, A;
  for (std::size_t i = 0; i < o.steps; ++i) {
    t.push_back(t1 * static_cast<double>(i) / static_cast<double>(o.steps - 1));
    A.push_back(exp_phase_solution(1.0, p.k, p.I, t.back()));
  }
  return {{{"fig1.csv", log_series(t, A).str()}}, "csv"};
}

// Hyperbolic phase from A = I up to 1e-4 of t_star before the singularity.
Output fig2(const ReproduceOpts& o, const ParamFlags& pf) {
  const ScenarioParams p = pf.resolve();
  const double t_star = hyperbolic_blowup_time(p.k, p.I).t_star();
  const double t_last = t_star * (1.0 - 1e-4);
  std::vector<double> t, A;
  for (std::size_t i = 0; i < o.steps; ++i) {
    t.push_back(t_last * static_cast<double>(i) / static_cast<double>(o.steps - 1));
    A.push_back(hyperbolic_solution(p.k, p.I, t.back()));
  }
  return {{{"fig2.csv", log_series(t, A).str()}}, "csv"};
}

// Both parameter readings of the stochastic figure. Paths that explode
// are left out of the CSV; absorbed paths appear up to absorption.
Output fig3(const ReproduceOpts& o, const ParamFlags& pf, const Global& g) {
  struct Reading {
    double k, sigma;
  };
  const std::vector<Reading> readings{{0.01, 0.1}, {0.05, 0.05}};
  const double A0 = pf.resolve().A0;
  const auto stride = static_cast<std::size_t>(std::llround(1.0 / o.dt));

  Output result;
  result.default_format = "json";
  Json summary;
  summary["periods"] = o.periods;
  summary["dt"] = o.dt;
  summary["paths"] = o.paths;
  summary["seed"] = g.seed;
  summary["readings"] = Json::array();
  for (const Reading& r : readings) {
    const StochasticModel model = hyperbolic_sde_model(r.k, r.sigma);
    std::ostringstream name;
    name << "fig3_k" << num(r.k) << "_sigma" << num(r.sigma) << ".csv";
    Csv csv({"path", "t", "A", "ln_A"});
    Json outcomes = Json::array();
    std::size_t completed = 0;
    for (std::size_t i = 0; i < o.paths; ++i) {
      PathOptions opts;
      opts.record_every = std::max<std::size_t>(1, stride);
      const PathResult path =
          em_path(model, A0, o.dt, o.periods, path_seed(g.seed, i), opts);
      Json po;
      po["path"] = i;
      po["outcome"] = to_string(path.outcome);
      po["event_time"] =
          jopt(path.explosion_time ? path.explosion_time : path.absorption_time);
      outcomes.push_back(po);
      if (path.exploded()) continue;
      if (path.outcome == PathOutcome::kCompleted) ++completed;
      for (std::size_t s = 0; s < path.times.size(); ++s) {
        csv.text_row({std::to_string(i), num(path.times[s]), num(path.values[s]),
                      num(std::log(path.values[s]))});
      }
    }
    Json rj;
    rj["k"] = r.k;
    rj["sigma"] = r.sigma;
    rj["file"] = name.str();
    rj["deterministic_blowup_time"] = 1.0 / (r.k * A0);
    rj["completed_paths"] = completed;
    rj["outcomes"] = outcomes;
    summary["readings"].push_back(rj);
    result.artifacts.push_back({name.str(), csv.str()});
  }
  result.artifacts.insert(result.artifacts.begin(),
                          Artifact{"fig3.json", dump(summary)});
  return result;
}

Output headline(const ParamFlags& pf) {
  const ScenarioParams p = pf.resolve();
  const double k = calibrate_k(p.R, p.I);
  const double t1 = phase1_duration(p.R, p.I);
  const double t2 = hyperbolic_blowup_time(k, p.I).t_star();
  const PhasePlan plan = compose_phases(p.R, p.I, laws::hyperbolic(k));
  Json j;
  j["R"] = p.R;
  j["I"] = p.I;
  j["k"] = k;
  j["t1"] = t1;
  j["t2"] = t2;
  j["t_s"] = t1 + t2;
  j["t_s_numerical"] = jopt(plan.total_blowup_time);
  j["formula"] = {{"k", "ln(R) / I"},
                  {"t1", "ln(I) / ln(R)"},
                  {"t2", "1 / (k * I)"},
                  {"t_s", "t1 + t2 = (ln(I) + 1) / ln(R)"},
                  {"t_s_numerical",
                   "closed-form phase 1, then dA = k*A^2 integrated from A = I"}};
  return {{{"headline.json", dump(j)}}, "json"};
}

Output cmd_reproduce(const ReproduceOpts& o, const ParamFlags& pf,
                     const Global& g) {
  if (o.steps < 2) throw UsageError("--steps must be at least 2");
  if (o.target == "fig1") return fig1(o, pf);
  if (o.target == "fig2") return fig2(o, pf);
  if (o.target == "fig3") return fig3(o, pf, g);
  if (o.target == "headline") return headline(pf);
  throw UsageError("unknown target '" + o.target +
                   "' (fig1, fig2, fig3, headline)");
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"Finite-time blow-up growth laboratory. Time is in periods "
               "(years) throughout."};
  app.name("blowup");
  app.require_subcommand(1);
  app.fallthrough();

  Global g;
  app.add_option("--out", g.out, "Write all outputs into this directory");
  app.add_option("--format", g.format, "Output printed to stdout")
      ->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--seed", g.seed, "Master seed (default 42)");
  ParamFlags pf;
  add_param_flags(app, pf);

  SolveOpts solve;
  auto* c_solve = app.add_subcommand("solve", "Closed-form solution on a time grid");
  c_solve->add_option("--model", solve.model,
                      "exponential, hyperbolic, powerlaw, loglaw, coupled-gdp")
      ->required();
  c_solve->add_option("--t-max", solve.t_max, "Last grid time")->required();
  c_solve->add_option("--steps", solve.steps, "Number of grid points (default 100)");

  SimulateOpts sim;
  auto* c_sim = app.add_subcommand("simulate", "Adaptive ODE integration");
  sim.source.add_flags(*c_sim,
                       "exponential, hyperbolic, powerlaw, loglaw, coupled-gdp");
  c_sim->add_option("--init", sim.init, "Initial values VAR=VALUE,...")
      ->delimiter(',');
  c_sim->add_option("--t-max", sim.t_max, "Integration end (default 100)");
  c_sim->add_option("--steps", sim.steps,
                    "Uniform output grid points including t = 0 (default: every accepted step)");
  c_sim->add_option("--rtol", sim.rel_tol, "Relative tolerance (default 1e-8)");
  c_sim->add_option("--atol", sim.abs_tol, "Absolute tolerance (default 1e-10)");
  c_sim->add_option("--threshold", sim.threshold, "Blow-up level (default 1e9)");
  c_sim->add_option("--blowup-tol", sim.blowup_tol,
                    "Blow-up bracket width (default 1e-3 of the estimate)");

  EnsembleOpts ens;
  auto* c_ens = app.add_subcommand("ensemble", "Monte Carlo ensemble of SDE paths");
  c_ens->add_option("--model", ens.model, "hyperbolic-sde (default) or gbm");
  c_ens->add_option("--drift", ens.drift, "Drift a(A) in the DSL");
  c_ens->add_option("--diffusion", ens.diffusion, "Diffusion b(A) in the DSL");
  c_ens->add_option("--periods", ens.periods, "Horizon (default 200)");
  c_ens->add_option("--dt", ens.dt, "Time step (default 0.01)");
  c_ens->add_option("--paths", ens.paths, "Number of paths (default 1000)");
  c_ens->add_option("--threads", ens.threads, "Worker threads (0 = all cores)");
  c_ens->add_option("--threshold", ens.threshold, "Explosion level (default 1e9)");
  c_ens->add_option("--scan-sigmas", ens.scan_sigmas,
                    "Volatility masking scan over these sigmas")
      ->delimiter(',');
  c_ens->add_option("--sample-interval", ens.sample_interval,
                    "Scan: spacing of barometer samples (default 1)");
  c_ens->add_option("--window", ens.window,
                    "Scan: barometer window (default whole path)");
  c_ens->add_option("--z", ens.z, "Scan: barometer z threshold (default 3)");

  ModelSource cls;
  auto* c_cls = app.add_subcommand("classify",
                                   "Does dA = F(A) dt blow up in finite time?");
  cls.add_flags(*c_cls, "unused; give the law with --dsl");

  BarometerOpts bar;
  auto* c_bar = app.add_subcommand("barometer",
                                   "Positive curvature test on ln A vs t");
  c_bar->add_option("input,--input", bar.input, "CSV file with a t column first");
  c_bar->add_option("--column", bar.column, "Value column (default: second)");
  c_bar->add_option("--window", bar.window, "Trailing samples (default 32)");
  c_bar->add_option("--z", bar.z, "z threshold (default 3)");

  ReproduceOpts rep;
  auto* c_rep = app.add_subcommand("reproduce", "Figure data and headline numbers");
  c_rep->add_option("target", rep.target, "fig1, fig2, fig3 or headline")
      ->required();
  c_rep->add_option("--steps", rep.steps, "Grid points for fig1/fig2 (default 200)");
  c_rep->add_option("--paths", rep.paths, "Paths per reading for fig3 (default 20)");
  c_rep->add_option("--periods", rep.periods, "Horizon for fig3 (default 200)");
  c_rep->add_option("--dt", rep.dt, "Time step for fig3 (default 0.01)");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    Output result;
    if (c_solve->parsed()) {
      result = cmd_solve(solve, pf);
    } else if (c_sim->parsed()) {
      result = cmd_simulate(sim, pf);
    } else if (c_ens->parsed()) {
      result = cmd_ensemble(ens, pf, g);
    } else if (c_cls->parsed()) {
      result = cmd_classify(cls, pf);
    } else if (c_bar->parsed()) {
      result = cmd_barometer(bar);
    } else {
      result = cmd_reproduce(rep, pf, g);
    }
    emit(result, g, out);
    return kOk;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << "\n";
    return kModelError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kModelError;
  }
}

}  // namespace blowup::cli
