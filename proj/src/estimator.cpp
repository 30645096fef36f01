#include "e2m/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace e2m {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// log(lambda_z) + log f(y; xi_z) or log S(y; xi_z) for one record.
void fill_log_base(const Record& r, const MixtureParams& theta, std::span<double> out) {
  for (std::size_t z = 0; z < theta.components(); ++z) {
    if (theta.lambda(z) <= 0.0) {
      out[z] = kNegInf;
      continue;
    }
    const double comp = r.status == Status::Observed ? log_pdf(theta.component(z), r.y_star)
                                                     : log_survival(theta.component(z), r.y_star);
    out[z] = std::log(theta.lambda(z)) + comp;
  }
}

void check_shapes(const SoftLabeledDataset& ds, const MixtureParams& theta) {
  if (theta.components() != ds.components()) {
    std::ostringstream os;
    os << "parameter vector has " << theta.components() << " components but soft labels have "
       << ds.components();
    throw InvalidArgument(os.str());
  }
}

}  // namespace

SoftLabeledDataset::SoftLabeledDataset(CensoredDataset data, std::vector<ContourFunction> soft_labels)
    : data_(std::move(data)), soft_labels_(std::move(soft_labels)) {
  if (data_.records.empty()) throw InvalidArgument("dataset has no records");
  if (soft_labels_.size() != data_.records.size()) {
    std::ostringstream os;
    os << "dataset has " << data_.records.size() << " records but " << soft_labels_.size() << " soft labels";
    throw InvalidArgument(os.str());
  }
  const std::size_t p = soft_labels_.front().size();
  for (const auto& c : soft_labels_) {
    if (c.size() != p) throw InvalidArgument("soft labels must share one frame");
  }
  for (std::size_t j = 0; j < data_.records.size(); ++j) {
    const Record& r = data_.records[j];
    if (r.status == Status::Observed ? !(r.y_star > 0.0) : !(r.y_star >= 0.0)) {
      std::ostringstream os;
      os << "record " << j << " has an invalid time " << r.y_star;
      throw InvalidArgument(os.str());
    }
  }
}

void E2MConfig::validate() const {
  if (max_iters < 1) throw InvalidArgument("max_iters must be at least 1");
  if (!(tol > 0.0)) throw InvalidArgument("tol must be positive");
  if (!(floor >= 0.0)) throw InvalidArgument("floor must be nonnegative");
}

GeneralizedLogLik generalized_loglik(const SoftLabeledDataset& ds, const MixtureParams& theta) {
  check_shapes(ds, theta);
  const std::size_t p = theta.components();
  std::vector<double> log_base(p), scratch(p);
  double total = 0.0;
  for (std::size_t j = 0; j < ds.size(); ++j) {
    fill_log_base(ds.data().records[j], theta, log_base);
    const double term = combine_log_weights(log_base, ds.soft_labels()[j].values(), scratch);
    if (term == kNegInf) return {kNegInf, j};
    total += term;
  }
  return {total, std::nullopt};
}

EStepResult e_step(const SoftLabeledDataset& ds, const MixtureParams& theta) {
  check_shapes(ds, theta);
  const std::size_t p = theta.components();
  EStepResult out{PosteriorMatrix(ds.size(), p), 0.0};
  std::vector<double> log_base(p);
  for (std::size_t j = 0; j < ds.size(); ++j) {
    fill_log_base(ds.data().records[j], theta, log_base);
    const double term = combine_log_weights(log_base, ds.soft_labels()[j].values(), out.weights.row(j));
    if (term == kNegInf) {
      std::ostringstream os;
      os << "total conflict between the model posterior and the soft label of record " << j;
      throw DegenerateEstimation(os.str(), j);
    }
    out.gll += term;
  }
  return out;
}

MixtureParams m_step(const SoftLabeledDataset& ds, const PosteriorMatrix& weights, const MixtureParams& theta,
                     double floor) {
  check_shapes(ds, theta);
  const std::size_t n = ds.size();
  const std::size_t p = theta.components();
  if (weights.rows() != n || weights.cols() != p) throw InvalidArgument("posterior matrix shape mismatch");

  std::vector<double> mass(p, 0.0), second_moment(p, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    const Record& r = ds.data().records[j];
    for (std::size_t z = 0; z < p; ++z) {
      const double w = weights(j, z);
      mass[z] += w;
      second_moment[z] += r.status == Status::Observed
                              ? w * r.y_star * r.y_star
                              : w * truncated_second_moment(theta.component(z), r.y_star);
    }
  }

  std::vector<double> lambdas(p), xis(p);
  for (std::size_t z = 0; z < p; ++z) {
    if (mass[z] < floor * static_cast<double>(n) || !(second_moment[z] > 0.0)) {
      std::ostringstream os;
      os << "component " << z + 1 << " is starved (posterior mass " << mass[z] << ")";
      throw ComponentStarved(os.str(), z);
    }
    lambdas[z] = mass[z] / static_cast<double>(n);
    xis[z] = std::sqrt(2.0 * mass[z] / second_moment[z]);
  }
  return MixtureParams(std::move(lambdas), std::move(xis));
}

FitResult fit(const SoftLabeledDataset& ds, const MixtureParams& theta0, const E2MConfig& cfg) {
  cfg.validate();
  E2MTrace trace;
  EStepResult e = e_step(ds, theta0);
  trace.iterates.push_back({theta0, e.gll});

  MixtureParams theta = theta0;
  for (std::size_t k = 0; k < cfg.max_iters; ++k) {
    theta = m_step(ds, e.weights, theta, cfg.floor);
    const double previous = e.gll;
    try {
      e = e_step(ds, theta);
    } catch (const DegenerateEstimation& err) {
      throw FitAborted(err.what(), err.record(), trace);
    }
    trace.iterates.push_back({theta, e.gll});
    trace.iterations_used = k + 1;
    if (!std::isfinite(e.gll)) {
      throw FitAborted("generalized log-likelihood is not finite", 0, trace);
    }
    if ((e.gll - previous) / std::abs(previous) < cfg.tol) {
      trace.converged = true;
      break;
    }
  }
  return {theta, std::move(trace), std::move(e.weights)};
}

std::string_view to_string(LabelMethod m) {
  switch (m) {
    case LabelMethod::Uncertain: return "uncertain";
    case LabelMethod::Noisy: return "noisy";
    case LabelMethod::Unknown: return "unknown";
  }
  return "unknown";
}

LabelMethod parse_label_method(std::string_view s) {
  if (s == "uncertain") return LabelMethod::Uncertain;
  if (s == "noisy") return LabelMethod::Noisy;
  if (s == "unknown") return LabelMethod::Unknown;
  throw InvalidArgument("unknown label method '" + std::string(s) + "'");
}

ContourFunction uncertain_contour(std::size_t p, std::size_t noisy_label, double q) {
  if (noisy_label >= p) throw InvalidArgument("noisy label outside the frame");
  if (!(q >= 0.0 && q <= 1.0)) throw InvalidArgument("error probability must lie in [0, 1]");
  std::vector<double> pl(p, q / static_cast<double>(p));
  pl[noisy_label] += 1.0 - q;
  return ContourFunction(std::move(pl));
}

std::vector<ContourFunction> make_soft_labels(LabelMethod method, std::size_t p, std::size_t n,
                                              const LabelCorruption* corruption) {
  std::vector<ContourFunction> out;
  out.reserve(n);
  if (method == LabelMethod::Unknown) {
    for (std::size_t j = 0; j < n; ++j) out.push_back(ContourFunction::vacuous(p));
    return out;
  }
  if (corruption == nullptr || corruption->noisy_labels.size() != n ||
      (method == LabelMethod::Uncertain && corruption->error_probs.size() != n)) {
    throw InvalidArgument("make_soft_labels: corruption output missing or of the wrong length");
  }
  for (std::size_t j = 0; j < n; ++j) {
    out.push_back(method == LabelMethod::Noisy
                      ? ContourFunction::certain(p, corruption->noisy_labels[j])
                      : uncertain_contour(p, corruption->noisy_labels[j], corruption->error_probs[j]));
  }
  return out;
}

MixtureParams quantile_spread_init(const CensoredDataset& data, std::size_t p) {
  std::vector<double> t = data.observed_times();
  if (t.empty()) throw InvalidArgument("quantile_spread_init: no observed failures");
  if (p == 0) throw InvalidArgument("quantile_spread_init: p must be at least 1");
  std::sort(t.begin(), t.end());
  const double median_factor = std::sqrt(2.0 * std::log(2.0));
  std::vector<double> xis(p);
  for (std::size_t z = 0; z < p; ++z) {
    const double pos = (static_cast<double>(z) + 0.5) / static_cast<double>(p) * static_cast<double>(t.size() - 1);
    const double q = t[static_cast<std::size_t>(std::lround(pos))];
    xis[z] = median_factor / std::max(q, 1e-300);
  }
  return MixtureParams(std::vector<double>(p, 1.0 / static_cast<double>(p)), std::move(xis));
}

MixtureParams offset_init(const MixtureParams& truth, double offset) {
  std::vector<double> xis = truth.xis();
  for (double& x : xis) x -= offset;
  return MixtureParams(truth.lambdas(), std::move(xis));
}

}  // namespace e2m
