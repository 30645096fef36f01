#include "e2m/monte_carlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <thread>

#include "e2m/errors.hpp"

namespace e2m {

void CorruptionConfig::validate() const {
  if (!(rho >= 0.0 && rho <= 1.0)) throw InvalidArgument("rho must lie in [0, 1]");
  if (!(sd >= 0.0) || !std::isfinite(sd)) throw InvalidArgument("sd must be finite and nonnegative");
}

double effective_sd(const CorruptionConfig& cfg) {
  return std::min(cfg.sd, 0.95 * std::sqrt(cfg.rho * (1.0 - cfg.rho)));
}

std::optional<BetaShape> beta_shape(double mean, double sd) {
  if (sd <= 0.0) return std::nullopt;
  const double common = mean * (1.0 - mean) / (sd * sd) - 1.0;
  if (!(common > 0.0)) {
    std::ostringstream os;
    os << "no Beta distribution has mean " << mean << " and sd " << sd;
    throw InvalidArgument(os.str());
  }
  return BetaShape{mean * common, (1.0 - mean) * common};
}

std::vector<double> draw_error_probs(const CorruptionConfig& cfg, std::size_t n, Rng& rng) {
  cfg.validate();
  if (n == 0) throw InvalidArgument("draw_error_probs: n must be at least 1");
  const auto shape = beta_shape(cfg.rho, effective_sd(cfg));
  if (!shape) return std::vector<double>(n, cfg.rho);

  std::gamma_distribution<double> ga(shape->alpha, 1.0);
  std::gamma_distribution<double> gb(shape->beta, 1.0);
  std::vector<double> q(n);
  for (double& v : q) {
    const double x = ga(rng);
    const double y = gb(rng);
    v = (x + y) > 0.0 ? x / (x + y) : cfg.rho;
  }
  return q;
}

CorruptedLabels corrupt_labels(std::span<const std::size_t> true_labels, std::span<const double> q, std::size_t p,
                               Rng& rng) {
  if (true_labels.size() != q.size()) throw InvalidArgument("corrupt_labels: length mismatch");
  if (p == 0) throw InvalidArgument("corrupt_labels: p must be at least 1");
  CorruptedLabels out;
  out.corruption.error_probs.assign(q.begin(), q.end());
  out.corruption.noisy_labels.reserve(q.size());
  out.plausibilities.reserve(q.size());
  std::uniform_int_distribution<std::size_t> any_class(0, p - 1);
  for (std::size_t j = 0; j < q.size(); ++j) {
    if (true_labels[j] >= p) throw InvalidArgument("corrupt_labels: label outside the frame");
    std::size_t z = true_labels[j];
    if (uniform_open(rng) < q[j]) z = any_class(rng);
    out.corruption.noisy_labels.push_back(z);
    out.plausibilities.push_back(uncertain_contour(p, z, q[j]));
  }
  return out;
}

double rabias(double estimate, double truth) {
  if (truth == 0.0) throw InvalidArgument("rabias: truth must be nonzero");
  return std::abs((estimate - truth) / truth);
}

std::vector<std::size_t> align_to_truth(const MixtureParams& estimate, const MixtureParams& truth) {
  const std::size_t p = truth.components();
  if (estimate.components() != p) throw InvalidArgument("align_to_truth: component counts differ");
  std::vector<std::size_t> perm(p), best;
  std::iota(perm.begin(), perm.end(), 0);
  double best_cost = std::numeric_limits<double>::infinity();
  do {
    double cost = 0.0;
    for (std::size_t z = 0; z < p; ++z) cost += rabias(estimate.xis()[perm[z]], truth.xis()[z]);
    if (cost < best_cost) {
      best_cost = cost;
      best = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

MixtureParams permute(const MixtureParams& params, std::span<const std::size_t> perm) {
  std::vector<double> l(perm.size()), x(perm.size());
  for (std::size_t z = 0; z < perm.size(); ++z) {
    l[z] = params.lambdas()[perm[z]];
    x[z] = params.xis()[perm[z]];
  }
  return MixtureParams(std::move(l), std::move(x));
}

void ExperimentConfig::validate() const {
  if (n < 1) throw InvalidArgument("n must be at least 1");
  const CensoringScheme s = resolved_scheme();
  e2m::validate(s);
  if (s.n != n) throw SchemeInvalid("explicit censoring scheme disagrees with n");
  corruption.validate();
  e2m.validate();
  for (double l : truth.lambdas()) {
    if (!(l > 0.0)) throw InvalidArgument("true mixing weights must be positive for bias studies");
  }
  offset_init(truth, init_offset);
}

CensoringScheme ExperimentConfig::resolved_scheme() const {
  return scheme ? *scheme : scheme_from_censor_frac(n, censor_frac);
}

std::string_view to_string(ReplicationStatus s) {
  switch (s) {
    case ReplicationStatus::Ok: return "ok";
    case ReplicationStatus::ComponentStarved: return "component_starved";
    case ReplicationStatus::Degenerate: return "degenerate";
    case ReplicationStatus::Failed: return "failed";
  }
  return "failed";
}

SoftLabeledDataset SimulatedExperiment::soft_labeled(LabelMethod method) const {
  const std::size_t p = labels.plausibilities.empty() ? 0 : labels.plausibilities.front().size();
  if (method == LabelMethod::Uncertain) return SoftLabeledDataset(data, labels.plausibilities);
  return SoftLabeledDataset(data, make_soft_labels(method, p, data.records.size(), &labels.corruption));
}

SimulatedExperiment simulate_experiment(const ExperimentConfig& cfg, std::uint64_t data_seed) {
  Rng rng(data_seed);
  const auto lifetimes = sample_labeled(cfg.truth, cfg.n, rng);
  CensoredDataset data = run_life_test(lifetimes, cfg.resolved_scheme(), rng);
  const auto q = draw_error_probs(cfg.corruption, cfg.n, rng);
  std::vector<std::size_t> truth_labels;
  truth_labels.reserve(cfg.n);
  for (const auto& r : data.records) truth_labels.push_back(*r.true_label);
  CorruptedLabels labels = corrupt_labels(truth_labels, q, cfg.truth.components(), rng);
  return {std::move(data), std::move(labels)};
}

ReplicationResult run_replication(const ExperimentConfig& cfg, LabelMethod method, std::uint64_t data_seed,
                                  std::size_t rep) {
  ReplicationResult out;
  out.method = method;
  out.rep = rep;
  try {
    const SimulatedExperiment sim = simulate_experiment(cfg, data_seed);
    const SoftLabeledDataset ds = sim.soft_labeled(method);
    FitResult res = fit(ds, offset_init(cfg.truth, cfg.init_offset), cfg.e2m);
    const auto perm = align_to_truth(res.params, cfg.truth);
    MixtureParams aligned = permute(res.params, perm);
    for (std::size_t z = 0; z < aligned.components(); ++z) {
      out.rabias_lambda.push_back(rabias(aligned.lambdas()[z], cfg.truth.lambdas()[z]));
      out.rabias_xi.push_back(rabias(aligned.xis()[z], cfg.truth.xis()[z]));
    }
    out.estimate = std::move(aligned);
    out.iterations = res.trace.iterations_used;
    out.converged = res.trace.converged;
    out.gll = res.gll();
  } catch (const ComponentStarved& e) {
    out.status = ReplicationStatus::ComponentStarved;
    out.message = e.what();
  } catch (const DegenerateEstimation& e) {
    out.status = ReplicationStatus::Degenerate;
    out.message = e.what();
  } catch (const std::exception& e) {
    out.status = ReplicationStatus::Failed;
    out.message = e.what();
  }
  return out;
}

std::string_view to_string(SweepVariable v) { return v == SweepVariable::Rho ? "rho" : "n"; }

SweepVariable parse_sweep_variable(std::string_view s) {
  if (s == "rho") return SweepVariable::Rho;
  if (s == "n" || s == "sample_size") return SweepVariable::SampleSize;
  throw InvalidArgument("unknown sweep variable '" + std::string(s) + "' (expected rho or n)");
}

void SweepSpec::validate() const {
  if (grid.empty()) throw InvalidArgument("sweep grid must not be empty");
  if (reps < 1) throw InvalidArgument("reps must be at least 1");
  if (methods.empty()) throw InvalidArgument("sweep needs at least one method");
  for (std::size_t g = 0; g < grid.size(); ++g) {
    if (variable == SweepVariable::SampleSize &&
        (grid[g] < 1.0 || grid[g] != std::floor(grid[g]))) {
      throw InvalidArgument("sample-size grid values must be positive integers");
    }
    at(g).validate();
  }
}

ExperimentConfig SweepSpec::at(std::size_t grid_index) const {
  ExperimentConfig cfg = base;
  if (variable == SweepVariable::Rho) {
    cfg.corruption.rho = grid.at(grid_index);
  } else {
    cfg.n = static_cast<std::size_t>(grid.at(grid_index));
    cfg.scheme.reset();
  }
  return cfg;
}

const ReportCell& RABiasReport::cell(std::size_t grid_index, LabelMethod method) const {
  for (const auto& c : cells) {
    if (c.grid_index == grid_index && c.method == method) return c;
  }
  throw InvalidArgument("report has no such cell");
}

std::uint64_t replication_seed(std::uint64_t master, std::size_t grid_index, std::size_t rep) {
  return substream_seed(master, {grid_index, rep});
}

namespace {

ParamStat summarize(std::string name, const std::vector<double>& v) {
  ParamStat s{std::move(name), 0.0, 0.0};
  if (v.empty()) {
    s.mean = s.sd = std::numeric_limits<double>::quiet_NaN();
    return s;
  }
  for (double x : v) s.mean += x;
  s.mean /= static_cast<double>(v.size());
  if (v.size() > 1) {
    double ss = 0.0;
    for (double x : v) ss += (x - s.mean) * (x - s.mean);
    s.sd = std::sqrt(ss / static_cast<double>(v.size() - 1));
  }
  return s;
}

}  // namespace

RABiasReport aggregate(const SweepSpec& spec, std::span<const SweepRow> rows) {
  RABiasReport report;
  const std::size_t p = spec.base.truth.components();
  for (std::size_t g = 0; g < spec.grid.size(); ++g) {
    report.effective_sd.push_back(effective_sd(spec.at(g).corruption));
    for (LabelMethod m : spec.methods) {
      ReportCell cell;
      cell.grid_index = g;
      cell.grid_value = spec.grid[g];
      cell.method = m;
      std::vector<std::vector<double>> xi(p), lambda(p);
      for (const auto& row : rows) {
        if (row.grid_index != g || row.result.method != m) continue;
        if (row.result.status != ReplicationStatus::Ok) {
          ++cell.failures;
          continue;
        }
        ++cell.successes;
        for (std::size_t z = 0; z < p; ++z) {
          xi[z].push_back(row.result.rabias_xi[z]);
          lambda[z].push_back(row.result.rabias_lambda[z]);
        }
      }
      cell.unreliable = 2 * cell.failures > cell.successes + cell.failures;
      for (std::size_t z = 0; z < p; ++z) {
        cell.xi.push_back(summarize("xi_" + std::to_string(z + 1), xi[z]));
        cell.lambda.push_back(summarize("lambda_" + std::to_string(z + 1), lambda[z]));
      }
      report.cells.push_back(std::move(cell));
    }
  }
  return report;
}

SweepOutcome run_sweep(const SweepSpec& spec) {
  spec.validate();
  struct Task {
    std::size_t grid_index;
    LabelMethod method;
    std::size_t rep;
  };
  std::vector<Task> tasks;
  for (std::size_t g = 0; g < spec.grid.size(); ++g) {
    for (LabelMethod m : spec.methods) {
      for (std::size_t r = 0; r < spec.reps; ++r) tasks.push_back({g, m, r});
    }
  }

  std::vector<SweepRow> rows(tasks.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < tasks.size(); i = next++) {
      const Task& t = tasks[i];
      rows[i] = {t.grid_index, spec.grid[t.grid_index],
                 run_replication(spec.at(t.grid_index), t.method,
                                 replication_seed(spec.master_seed, t.grid_index, t.rep), t.rep)};
    }
  };

  const std::size_t n_workers = std::clamp<std::size_t>(spec.workers, 1, tasks.size());
  if (n_workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(n_workers);
    for (std::size_t w = 0; w < n_workers; ++w) pool.emplace_back(worker);
  }

  SweepOutcome out;
  out.report = aggregate(spec, rows);
  out.rows = std::move(rows);
  return out;
}

}  // namespace e2m
