#include "e2m/e2m.h"

#include <algorithm>
#include <cstring>
#include <memory>
#include <new>
#include <string>

#include "e2m/errors.hpp"
#include "e2m/estimator.hpp"
#include "e2m/io.hpp"
#include "e2m/runner.hpp"

struct e2m_config {
  nlohmann::json file = nullptr;
  nlohmann::json overrides = nlohmann::json::object();
};

struct e2m_dataset {
  e2m::SoftLabeledDataset ds;
};

struct e2m_fit_result {
  e2m::FitResult res;
};

namespace {

thread_local std::string g_last_error;

e2m_status fail(e2m_status s, const std::string& msg) {
  g_last_error = msg;
  return s;
}

template <class F>
e2m_status guarded(F&& f) {
  g_last_error.clear();
  try {
    return f();
  } catch (const e2m::Error& e) {
    return fail(static_cast<e2m_status>(e.code()), e.what());
  } catch (const nlohmann::json::exception& e) {
    return fail(E2M_ERR_CONFIG, e.what());
  } catch (const std::bad_alloc&) {
    return fail(E2M_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(E2M_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(E2M_ERR_INTERNAL, "unknown error");
  }
}

e2m::Command to_command(e2m_command c) {
  switch (c) {
    case E2M_CMD_GENERATE: return e2m::Command::Generate;
    case E2M_CMD_FIT: return e2m::Command::Fit;
    case E2M_CMD_SWEEP: return e2m::Command::Sweep;
  }
  throw e2m::ConfigError("command: unknown command code");
}

#define E2M_REQUIRE(cond, what) \
  if (!(cond)) return fail(E2M_ERR_INVALID_ARGUMENT, what)

}  // namespace

extern "C" {

const char* e2m_version(void) { return e2m::version().data(); }

const char* e2m_last_error(void) { return g_last_error.c_str(); }

const char* e2m_status_name(e2m_status status) {
  switch (status) {
    case E2M_OK: return "ok";
    case E2M_ERR_INVALID_ARGUMENT: return "invalid argument";
    case E2M_ERR_CONFIG: return "config error";
    case E2M_ERR_NOT_CONVERGED: return "not converged";
    case E2M_ERR_DEGENERATE: return "degenerate estimation";
    case E2M_ERR_IO: return "I/O error";
    case E2M_ERR_SCHEME_INVALID: return "invalid censoring scheme";
    case E2M_ERR_TOTAL_CONFLICT: return "total conflict";
    case E2M_ERR_COMPONENT_STARVED: return "component starved";
    case E2M_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

e2m_status e2m_config_create(e2m_config** out) {
  E2M_REQUIRE(out, "e2m_config_create: null output");
  return guarded([&] {
    *out = new e2m_config();
    return E2M_OK;
  });
}

void e2m_config_destroy(e2m_config* cfg) { delete cfg; }

e2m_status e2m_config_load_file(e2m_config* cfg, const char* path) {
  E2M_REQUIRE(cfg && path, "e2m_config_load_file: null argument");
  return guarded([&] {
    cfg->file = e2m::load_config_file(path);
    return E2M_OK;
  });
}

e2m_status e2m_config_set(e2m_config* cfg, const char* key, const char* json_value) {
  E2M_REQUIRE(cfg && key && json_value, "e2m_config_set: null argument");
  return guarded([&] {
    nlohmann::json v;
    try {
      v = nlohmann::json::parse(json_value);
    } catch (const nlohmann::json::parse_error&) {
      throw e2m::ConfigError(std::string(key) + ": value is not valid JSON: " + json_value);
    }
    cfg->overrides[key] = std::move(v);
    return E2M_OK;
  });
}

e2m_status e2m_config_resolve(const e2m_config* cfg, e2m_command command, char* buf, size_t cap, size_t* needed) {
  E2M_REQUIRE(cfg, "e2m_config_resolve: null config");
  return guarded([&] {
    const e2m::RunConfig rc = e2m::parse_config(cfg->file, cfg->overrides, to_command(command));
    const std::string text = rc.resolved.dump(2);
    if (needed) *needed = text.size() + 1;
    if (buf && cap >= text.size() + 1) std::memcpy(buf, text.c_str(), text.size() + 1);
    return E2M_OK;
  });
}

e2m_status e2m_run(const e2m_config* cfg, e2m_command command) {
  E2M_REQUIRE(cfg, "e2m_run: null config");
  return guarded([&] {
    const e2m::RunConfig rc = e2m::parse_config(cfg->file, cfg->overrides, to_command(command));
    const e2m::RunOutcome out = e2m::run_command(rc);
    if (!out.converged) {
      return fail(E2M_ERR_NOT_CONVERGED, "iteration limit reached before convergence");
    }
    return E2M_OK;
  });
}

e2m_status e2m_dataset_load(const char* dataset_csv, const char* soft_labels_csv, e2m_dataset** out) {
  E2M_REQUIRE(dataset_csv && soft_labels_csv && out, "e2m_dataset_load: null argument");
  return guarded([&] {
    auto data = e2m::io::parse_dataset_csv(e2m::io::read_file(dataset_csv));
    auto labels = e2m::io::parse_soft_labels_csv(e2m::io::read_file(soft_labels_csv));
    *out = new e2m_dataset{e2m::SoftLabeledDataset(std::move(data), std::move(labels))};
    return E2M_OK;
  });
}

void e2m_dataset_destroy(e2m_dataset* ds) { delete ds; }

size_t e2m_dataset_size(const e2m_dataset* ds) { return ds ? ds->ds.size() : 0; }

size_t e2m_dataset_components(const e2m_dataset* ds) { return ds ? ds->ds.components() : 0; }

size_t e2m_dataset_observed(const e2m_dataset* ds) { return ds ? ds->ds.data().observed_count() : 0; }

e2m_status e2m_fit(const e2m_dataset* ds, const double* lambda0, const double* xi0, size_t p, size_t max_iters,
                   double tol, e2m_fit_result** out) {
  E2M_REQUIRE(ds && out, "e2m_fit: null argument");
  E2M_REQUIRE((lambda0 == nullptr) == (xi0 == nullptr), "e2m_fit: give both lambda0 and xi0 or neither");
  return guarded([&] {
    const std::size_t k = ds->ds.components();
    e2m::MixtureParams theta0 = e2m::quantile_spread_init(ds->ds.data(), k);
    if (lambda0) {
      if (p != k) throw e2m::InvalidArgument("e2m_fit: p differs from the soft-label frame size");
      theta0 = e2m::MixtureParams(std::vector<double>(lambda0, lambda0 + p), std::vector<double>(xi0, xi0 + p));
    }
    e2m::E2MConfig cfg;
    if (max_iters > 0) cfg.max_iters = max_iters;
    if (tol > 0.0) cfg.tol = tol;
    *out = new e2m_fit_result{e2m::fit(ds->ds, theta0, cfg)};
    return (*out)->res.trace.converged ? E2M_OK
                                       : fail(E2M_ERR_NOT_CONVERGED, "iteration limit reached before convergence");
  });
}

void e2m_fit_result_destroy(e2m_fit_result* res) { delete res; }

size_t e2m_fit_result_components(const e2m_fit_result* res) { return res ? res->res.params.components() : 0; }

e2m_status e2m_fit_result_params(const e2m_fit_result* res, double* lambdas, double* xis, size_t p) {
  E2M_REQUIRE(res && lambdas && xis, "e2m_fit_result_params: null argument");
  E2M_REQUIRE(p == res->res.params.components(), "e2m_fit_result_params: wrong component count");
  std::copy(res->res.params.lambdas().begin(), res->res.params.lambdas().end(), lambdas);
  std::copy(res->res.params.xis().begin(), res->res.params.xis().end(), xis);
  return E2M_OK;
}

size_t e2m_fit_result_iterations(const e2m_fit_result* res) { return res ? res->res.trace.iterations_used : 0; }

int e2m_fit_result_converged(const e2m_fit_result* res) { return res && res->res.trace.converged ? 1 : 0; }

double e2m_fit_result_gll(const e2m_fit_result* res) { return res ? res->res.gll() : 0.0; }

size_t e2m_fit_result_trace_length(const e2m_fit_result* res) { return res ? res->res.trace.iterates.size() : 0; }

double e2m_fit_result_trace_gll(const e2m_fit_result* res, size_t k) {
  if (!res || k >= res->res.trace.iterates.size()) return 0.0;
  return res->res.trace.iterates[k].gll;
}

e2m_status e2m_bayes_contour_combine(const double* p1, const double* pl2, size_t p, double* out, double* conflict) {
  E2M_REQUIRE(p1 && pl2 && out, "e2m_bayes_contour_combine: null argument");
  return guarded([&] {
    const auto r = e2m::bayes_contour_combine(e2m::ProbabilityVector(std::vector<double>(p1, p1 + p)),
                                              e2m::ContourFunction(std::vector<double>(pl2, pl2 + p)));
    std::copy(r.p.values().begin(), r.p.values().end(), out);
    if (conflict) *conflict = r.conflict;
    return E2M_OK;
  });
}

e2m_status e2m_rayleigh_pdf(double xi, double x, double* out) {
  E2M_REQUIRE(out, "e2m_rayleigh_pdf: null output");
  return guarded([&] {
    *out = e2m::pdf(e2m::RayleighParam(xi), x);
    return E2M_OK;
  });
}

e2m_status e2m_rayleigh_survival(double xi, double x, double* out) {
  E2M_REQUIRE(out, "e2m_rayleigh_survival: null output");
  return guarded([&] {
    *out = e2m::survival(e2m::RayleighParam(xi), x);
    return E2M_OK;
  });
}

e2m_status e2m_rayleigh_quantile(double xi, double u, double* out) {
  E2M_REQUIRE(out, "e2m_rayleigh_quantile: null output");
  return guarded([&] {
    *out = e2m::quantile(e2m::RayleighParam(xi), u);
    return E2M_OK;
  });
}

}  // extern "C"
