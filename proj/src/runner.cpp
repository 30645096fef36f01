#include "e2m/runner.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "e2m/errors.hpp"
#include "e2m/io.hpp"

#ifndef E2M_VERSION
#define E2M_VERSION "0.0.0"
#endif

namespace e2m {

using nlohmann::json;

namespace {

const std::vector<double> kFigure1Grid{0.0, 0.1, 0.2, 0.3, 0.4, 0.5};
const std::vector<double> kFigure2Grid{100, 200, 300, 400, 500, 800};

json defaults() {
  return json{{"lambdas", {1.0 / 3, 1.0 / 3, 1.0 / 3}},
              {"xis", {4.0, 0.5, 0.8}},
              {"n", 500},
              {"censor_frac", 0.4},
              {"rho", 0.1},
              {"sd", 0.2},
              {"methods", {"uncertain", "noisy", "unknown"}},
              {"reps", 20},
              {"seed", 1},
              {"out", "."},
              {"tol", 1e-8},
              {"max_iters", 1000},
              {"floor", 1e-10},
              {"init", "quantile"},
              {"init_offset", 0.01},
              {"svg", false}};
}

// Runs `f`, turning library errors into ConfigError prefixed with the field.
// Scheme errors keep their kind.
template <class F>
auto field(const std::string& name, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const ConfigError&) {
    throw;
  } catch (const SchemeInvalid& e) {
    throw SchemeInvalid(name + ": " + e.what());
  } catch (const json::exception& e) {
    throw ConfigError(name + ": wrong type (" + e.what() + ")");
  } catch (const std::exception& e) {
    throw ConfigError(name + ": " + e.what());
  }
}

std::vector<LabelMethod> parse_methods(const json& v) {
  std::vector<std::string> names;
  if (v.is_string()) {
    names.push_back(v.get<std::string>());
  } else {
    names = v.get<std::vector<std::string>>();
  }
  std::vector<LabelMethod> out;
  for (const auto& s : names) {
    if (s == "all") {
      out = {LabelMethod::Uncertain, LabelMethod::Noisy, LabelMethod::Unknown};
      continue;
    }
    const LabelMethod m = parse_label_method(s);
    if (std::find(out.begin(), out.end(), m) == out.end()) out.push_back(m);
  }
  if (out.empty()) throw ConfigError("methods: at least one method is required");
  return out;
}

void write_manifest(const RunConfig& cfg, json extra) {
  json m{{"version", version()},
         {"command", to_string(cfg.command)},
         {"config", cfg.resolved},
         {"master_seed", cfg.seed}};
  for (auto& [k, v] : extra.items()) m[k] = v;
  io::write_file(cfg.out / "manifest.json", m.dump(2) + "\n");
}

void ensure_out_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) {
    throw IoError("cannot create output directory '" + dir.string() + "'");
  }
}

}  // namespace

std::string_view version() { return E2M_VERSION; }

std::string_view to_string(Command c) {
  switch (c) {
    case Command::Generate: return "generate";
    case Command::Fit: return "fit";
    case Command::Sweep: return "sweep";
  }
  return "fit";
}

Command parse_command(std::string_view s) {
  if (s == "generate") return Command::Generate;
  if (s == "fit") return Command::Fit;
  if (s == "sweep") return Command::Sweep;
  throw ConfigError("command: unknown command '" + std::string(s) + "'");
}

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys{
      "command", "lambdas",   "xis",     "n",           "J",         "R",         "censor_frac",
      "rho",     "sd",        "methods", "reps",        "seed",      "out",       "workers",
      "tol",     "max_iters", "floor",   "data",        "labels",    "soft_labels", "sweep",
      "preset",  "svg",       "init",    "init_lambdas", "init_xis", "init_offset"};
  return keys;
}

SweepSpec RunConfig::sweep_spec() const {
  SweepSpec spec;
  spec.variable = sweep_variable;
  spec.grid = grid;
  spec.reps = reps;
  spec.base = experiment;
  spec.methods = methods;
  spec.master_seed = seed;
  spec.workers = workers;
  return spec;
}

json load_config_file(const std::filesystem::path& path) {
  const std::string text = io::read_file(path);
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("config file '" + path.string() + "' is not valid JSON: " + e.what());
  }
}

RunConfig parse_config(const json& file, const json& overrides, std::optional<Command> command) {
  for (const json* src : {&file, &overrides}) {
    if (!src->is_null() && !src->is_object()) throw ConfigError("config must be a JSON object");
  }
  std::vector<std::string> unknown;
  for (const json* src : {&file, &overrides}) {
    if (src->is_null()) continue;
    for (const auto& [k, v] : src->items()) {
      const auto& keys = config_keys();
      if (std::find(keys.begin(), keys.end(), k) == keys.end()) unknown.push_back(k);
    }
  }
  if (!unknown.empty()) {
    std::string msg = "unknown config keys:";
    for (const auto& k : unknown) msg += " " + k;
    throw ConfigError(msg);
  }

  json user = file.is_null() ? json::object() : file;
  if (!overrides.is_null()) user.merge_patch(overrides);

  // Presets fill sweep settings the user did not give explicitly.
  if (user.contains("preset")) {
    const std::string preset = field("preset", [&] { return user["preset"].get<std::string>(); });
    if (preset == "figure1") {
      if (!user.contains("sweep")) user["sweep"] = {{"variable", "rho"}, {"grid", kFigure1Grid}};
    } else if (preset == "figure2") {
      if (!user.contains("sweep")) user["sweep"] = {{"variable", "n"}, {"grid", kFigure2Grid}};
      if (!user.contains("rho")) user["rho"] = 0.1;
    } else {
      throw ConfigError("preset: expected 'figure1' or 'figure2', got '" + preset + "'");
    }
  }

  json r = defaults();
  r.merge_patch(user);
  if (!r.contains("workers")) r["workers"] = std::max(1u, std::thread::hardware_concurrency());

  RunConfig cfg;
  if (command) {
    cfg.command = *command;
  } else if (r.contains("command")) {
    cfg.command = field("command", [&] { return parse_command(r["command"].get<std::string>()); });
  } else {
    throw ConfigError("command: no command given");
  }
  r["command"] = to_string(cfg.command);

  auto& ex = cfg.experiment;
  ex.truth = field("lambdas/xis", [&] {
    return MixtureParams(r["lambdas"].get<std::vector<double>>(), r["xis"].get<std::vector<double>>());
  });
  ex.n = field("n", [&] {
    const auto n = r["n"].get<long long>();
    if (n < 1) throw ConfigError("n: must be at least 1");
    return static_cast<std::size_t>(n);
  });
  ex.censor_frac = field("censor_frac", [&] {
    const double c = r["censor_frac"].get<double>();
    if (!(c >= 0.0 && c < 1.0)) throw ConfigError("censor_frac: must lie in [0, 1)");
    return c;
  });
  if (r.contains("R")) {
    ex.scheme = field("R", [&] {
      CensoringScheme s{ex.n, r["R"].get<std::vector<std::size_t>>()};
      if (r.contains("J") && r["J"].get<std::size_t>() != s.failures()) {
        throw ConfigError("J: disagrees with the length of R");
      }
      validate(s);
      return s;
    });
  } else if (r.contains("J")) {
    ex.scheme = field("J", [&] {
      const auto j = r["J"].get<std::size_t>();
      if (j < 1 || j > ex.n) throw ConfigError("J: must lie in [1, n]");
      CensoringScheme s{ex.n, std::vector<std::size_t>(j, 0)};
      s.removals.back() = ex.n - j;
      return s;
    });
  }
  field("censor_frac", [&] { return ex.resolved_scheme(); });

  ex.corruption.rho = field("rho", [&] { return r["rho"].get<double>(); });
  ex.corruption.sd = field("sd", [&] { return r["sd"].get<double>(); });
  field("rho", [&] { ex.corruption.validate(); return 0; });
  ex.e2m.tol = field("tol", [&] { return r["tol"].get<double>(); });
  ex.e2m.max_iters = field("max_iters", [&] {
    const auto m = r["max_iters"].get<long long>();
    if (m < 1) throw ConfigError("max_iters: must be at least 1");
    return static_cast<std::size_t>(m);
  });
  ex.e2m.floor = field("floor", [&] { return r["floor"].get<double>(); });
  field("tol", [&] { ex.e2m.validate(); return 0; });
  ex.init_offset = field("init_offset", [&] { return r["init_offset"].get<double>(); });

  cfg.methods = field("methods", [&] { return parse_methods(r["methods"]); });
  json names = json::array();
  for (auto m : cfg.methods) names.push_back(to_string(m));
  r["methods"] = names;
  cfg.reps = field("reps", [&] {
    const auto v = r["reps"].get<long long>();
    if (v < 1) throw ConfigError("reps: must be at least 1");
    return static_cast<std::size_t>(v);
  });
  cfg.seed = field("seed", [&] { return r["seed"].get<std::uint64_t>(); });
  cfg.out = field("out", [&] { return std::filesystem::path(r["out"].get<std::string>()); });
  cfg.workers = field("workers", [&] {
    const auto v = r["workers"].get<long long>();
    if (v < 1) throw ConfigError("workers: must be at least 1");
    return static_cast<std::size_t>(v);
  });
  cfg.svg = field("svg", [&] { return r["svg"].get<bool>(); });

  if (r.contains("data")) cfg.data = field("data", [&] { return r["data"].get<std::string>(); });
  if (r.contains("labels")) cfg.labels = field("labels", [&] { return r["labels"].get<std::string>(); });
  if (r.contains("soft_labels")) {
    cfg.inline_labels = field("soft_labels", [&] {
      std::vector<ContourFunction> out;
      for (const auto& row : r["soft_labels"]) out.emplace_back(row.get<std::vector<double>>());
      return out;
    });
  }
  const std::string init = field("init", [&] { return r["init"].get<std::string>(); });
  if (init == "quantile") {
    cfg.init = InitRule::QuantileSpread;
  } else if (init == "offset") {
    cfg.init = InitRule::Offset;
    cfg.init_params = field("init_offset", [&] { return offset_init(ex.truth, ex.init_offset); });
  } else if (init == "explicit") {
    cfg.init = InitRule::Explicit;
    cfg.init_params = field("init_lambdas/init_xis", [&] {
      if (!r.contains("init_lambdas") || !r.contains("init_xis")) {
        throw ConfigError("init_lambdas/init_xis: required when init is 'explicit'");
      }
      return MixtureParams(r["init_lambdas"].get<std::vector<double>>(), r["init_xis"].get<std::vector<double>>());
    });
  } else {
    throw ConfigError("init: expected 'quantile', 'offset' or 'explicit', got '" + init + "'");
  }

  if (cfg.command == Command::Sweep) {
    if (!r.contains("sweep")) throw ConfigError("sweep: a sweep needs 'sweep' settings or a preset");
    const json& sw = r["sweep"];
    cfg.sweep_variable = field("sweep.variable", [&] {
      return parse_sweep_variable(sw.at("variable").get<std::string>());
    });
    cfg.grid = field("sweep.grid", [&] { return sw.at("grid").get<std::vector<double>>(); });
    if (cfg.sweep_variable == SweepVariable::SampleSize && ex.scheme) {
      throw ConfigError("R: an explicit scheme cannot be combined with a sample-size sweep; use censor_frac");
    }
    field("sweep", [&] { cfg.sweep_spec().validate(); return 0; });
  } else if (cfg.command == Command::Generate) {
    field("lambdas", [&] { ex.validate(); return 0; });
  }
  if (cfg.command == Command::Fit && !cfg.data) {
    throw ConfigError("data: fit needs a dataset file");
  }
  if (cfg.command == Command::Fit && !cfg.labels && !cfg.inline_labels) {
    throw ConfigError("labels: fit needs a soft-label file or inline soft_labels");
  }

  cfg.resolved = r;
  return cfg;
}

RunOutcome cmd_generate(const RunConfig& cfg) {
  ensure_out_dir(cfg.out);
  const std::uint64_t data_seed = replication_seed(cfg.seed, 0, 0);
  const SimulatedExperiment sim = simulate_experiment(cfg.experiment, data_seed);

  RunOutcome out;
  out.files.push_back(cfg.out / "dataset.csv");
  io::write_file(out.files.back(), io::dataset_csv(sim.data));
  for (LabelMethod m : cfg.methods) {
    const SoftLabeledDataset ds = sim.soft_labeled(m);
    out.files.push_back(cfg.out / ("soft_labels_" + std::string(to_string(m)) + ".csv"));
    io::write_file(out.files.back(), io::soft_labels_csv(sim.data, ds.soft_labels()));
  }
  write_manifest(cfg, {{"data_seed", data_seed},
                       {"effective_sd", effective_sd(cfg.experiment.corruption)},
                       {"scheme", {{"n", sim.data.scheme.n}, {"J", sim.data.scheme.failures()},
                                   {"R", sim.data.scheme.removals}}}});
  out.files.push_back(cfg.out / "manifest.json");
  return out;
}

RunOutcome cmd_fit(const RunConfig& cfg) {
  CensoredDataset data = io::parse_dataset_csv(io::read_file(*cfg.data));
  std::vector<ContourFunction> labels =
      cfg.inline_labels ? *cfg.inline_labels : io::parse_soft_labels_csv(io::read_file(*cfg.labels));
  SoftLabeledDataset ds(std::move(data), std::move(labels));

  MixtureParams theta0 = cfg.init_params ? *cfg.init_params : quantile_spread_init(ds.data(), ds.components());
  if (theta0.components() != ds.components()) {
    throw ConfigError("init: starting point has " + std::to_string(theta0.components()) +
                      " components but the soft labels have " + std::to_string(ds.components()));
  }

  ensure_out_dir(cfg.out);
  const std::string method = cfg.methods.size() == 1 ? std::string(to_string(cfg.methods.front())) : "e2m";
  RunOutcome out;
  try {
    const FitResult res = fit(ds, theta0, cfg.experiment.e2m);
    out.files.push_back(cfg.out / "fit.csv");
    io::write_file(out.files.back(), io::fit_csv(method, 0, res));
    out.files.push_back(cfg.out / "trace.csv");
    io::write_file(out.files.back(), io::trace_csv(res.trace));
    out.converged = res.trace.converged;
  } catch (const FitAborted& e) {
    if (!e.trace().iterates.empty()) io::write_file(cfg.out / "trace.csv", io::trace_csv(e.trace()));
    throw;
  }
  write_manifest(cfg, {{"converged", out.converged}});
  out.files.push_back(cfg.out / "manifest.json");
  return out;
}

RunOutcome cmd_sweep(const RunConfig& cfg) {
  const SweepSpec spec = cfg.sweep_spec();
  ensure_out_dir(cfg.out);
  const SweepOutcome res = run_sweep(spec);

  RunOutcome out;
  auto emit = [&](const std::string& name, const std::string& text) {
    out.files.push_back(cfg.out / name);
    io::write_file(out.files.back(), text);
  };
  emit("results.csv", io::results_csv(spec, res.rows));
  emit("summary.csv", io::summary_csv(spec, res.report));
  for (std::size_t z = 0; z < spec.base.truth.components(); ++z) {
    const std::string stem = "figure_xi_" + std::to_string(z + 1);
    emit(stem + ".csv", io::figure_csv(spec, res.report, z));
    if (cfg.svg) emit(stem + ".svg", io::figure_svg(spec, res.report, z));
  }

  json seeds = json::array();
  for (std::size_t g = 0; g < spec.grid.size(); ++g) {
    json per_rep = json::array();
    for (std::size_t r = 0; r < spec.reps; ++r) per_rep.push_back(replication_seed(spec.master_seed, g, r));
    seeds.push_back(per_rep);
  }
  json unreliable = json::array();
  for (const auto& c : res.report.cells) {
    if (c.unreliable) unreliable.push_back({{"grid_value", c.grid_value}, {"method", to_string(c.method)}});
  }
  write_manifest(cfg, {{"effective_sd", res.report.effective_sd},
                       {"replication_seeds", seeds},
                       {"unreliable_cells", unreliable}});
  out.files.push_back(cfg.out / "manifest.json");
  return out;
}

RunOutcome run_command(const RunConfig& cfg) {
  switch (cfg.command) {
    case Command::Generate: return cmd_generate(cfg);
    case Command::Fit: return cmd_fit(cfg);
    case Command::Sweep: return cmd_sweep(cfg);
  }
  throw ConfigError("command: unknown command");
}

}  // namespace e2m
