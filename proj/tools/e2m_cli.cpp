// Command-line front end: `e2m generate|fit|sweep [flags]`.

#include <algorithm>
#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "e2m/e2m.h"

namespace {

enum ExitCode : int {
  kOk = 0,
  kOther = 1,
  kConfig = 2,
  kNotConverged = 3,
  kDegenerate = 4,
  kIo = 5,
};

int exit_code(e2m_status s) {
  switch (s) {
    case E2M_OK: return kOk;
    case E2M_ERR_INVALID_ARGUMENT:
    case E2M_ERR_CONFIG:
    case E2M_ERR_SCHEME_INVALID: return kConfig;
    case E2M_ERR_NOT_CONVERGED: return kNotConverged;
    case E2M_ERR_DEGENERATE:
    case E2M_ERR_TOTAL_CONFLICT:
    case E2M_ERR_COMPONENT_STARVED: return kDegenerate;
    case E2M_ERR_IO: return kIo;
    case E2M_ERR_INTERNAL: return kOther;
  }
  return kOther;
}

struct Flags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<long long> n;
  std::optional<double> censor_frac;
  std::optional<double> rho;
  std::optional<double> sd;
  std::optional<long long> reps;
  std::optional<std::string> method;
  std::optional<std::string> out;
  std::optional<long long> workers;
  std::optional<double> tol;
  std::optional<long long> max_iters;
  std::optional<std::string> data;
  std::optional<std::string> labels;
  std::optional<std::string> preset;
  std::optional<std::string> init;
  bool svg = false;
};

void add_common(CLI::App* cmd, Flags& f) {
  cmd->add_option("--config", f.config, "JSON run-config file");
  cmd->add_option("--seed", f.seed, "master seed");
  cmd->add_option("--n", f.n, "number of units on test");
  cmd->add_option("--censor-frac", f.censor_frac, "fraction of units censored at the last failure");
  cmd->add_option("--rho", f.rho, "mean label error probability");
  cmd->add_option("--sd", f.sd, "standard deviation of the error-probability Beta draw");
  cmd->add_option("--reps", f.reps, "repetitions per sweep point");
  cmd->add_option("--method", f.method, "label regime")
      ->check(CLI::IsMember({"uncertain", "noisy", "unknown", "all"}));
  cmd->add_option("--out", f.out, "output directory");
  cmd->add_option("--workers", f.workers, "sweep worker threads (default: number of processors)");
  cmd->add_option("--tol", f.tol, "relative log-likelihood improvement threshold");
  cmd->add_option("--max-iters", f.max_iters, "iteration limit");
}

template <class T>
e2m_status set_if(e2m_config* cfg, const char* key, const std::optional<T>& v) {
  if (!v) return E2M_OK;
  return e2m_config_set(cfg, key, nlohmann::json(*v).dump().c_str());
}

int run(const Flags& f, e2m_command command) {
  e2m_config* cfg = nullptr;
  e2m_status s = e2m_config_create(&cfg);
  if (s == E2M_OK && !f.config.empty()) s = e2m_config_load_file(cfg, f.config.c_str());

  std::optional<long long> workers = f.workers;
  if (!workers && command == E2M_CMD_SWEEP) workers = std::max(1u, std::thread::hardware_concurrency());

  const std::vector<e2m_status> sets{
      set_if(cfg, "seed", f.seed),       set_if(cfg, "n", f.n),
      set_if(cfg, "censor_frac", f.censor_frac), set_if(cfg, "rho", f.rho),
      set_if(cfg, "sd", f.sd),           set_if(cfg, "reps", f.reps),
      set_if(cfg, "methods", f.method),  set_if(cfg, "out", f.out),
      set_if(cfg, "workers", workers),   set_if(cfg, "tol", f.tol),
      set_if(cfg, "max_iters", f.max_iters), set_if(cfg, "data", f.data),
      set_if(cfg, "labels", f.labels),   set_if(cfg, "preset", f.preset),
      set_if(cfg, "init", f.init),
      set_if(cfg, "svg", f.svg ? std::optional<bool>(true) : std::nullopt)};
  for (e2m_status v : sets) {
    if (s == E2M_OK && v != E2M_OK) s = v;
  }

  if (s == E2M_OK) s = e2m_run(cfg, command);
  if (s != E2M_OK) {
    std::cerr << "e2m: " << e2m_status_name(s) << ": " << e2m_last_error() << '\n';
  }
  e2m_config_destroy(cfg);
  return exit_code(s);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Evidential EM for progressively censored Rayleigh mixtures"};
  app.set_version_flag("--version", std::string(e2m_version()));
  app.require_subcommand(1);

  Flags f;
  auto* gen = app.add_subcommand("generate", "simulate a censored data set with soft labels");
  add_common(gen, f);

  auto* fit = app.add_subcommand("fit", "fit a data set given its soft labels");
  add_common(fit, f);
  fit->add_option("--data", f.data, "dataset CSV");
  fit->add_option("--labels", f.labels, "soft-label CSV");
  fit->add_option("--init", f.init, "starting point rule")->check(CLI::IsMember({"quantile", "offset", "explicit"}));

  auto* sweep = app.add_subcommand("sweep", "Monte-Carlo bias study over rho or n");
  add_common(sweep, f);
  sweep->add_option("--preset", f.preset, "figure1 (rho grid) or figure2 (n grid)")
      ->check(CLI::IsMember({"figure1", "figure2"}));
  sweep->add_flag("--svg", f.svg, "also write SVG charts");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kConfig;
  }

  if (gen->parsed()) return run(f, E2M_CMD_GENERATE);
  if (fit->parsed()) return run(f, E2M_CMD_FIT);
  return run(f, E2M_CMD_SWEEP);
}
