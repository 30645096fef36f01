#include "e2m/rayleigh.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "e2m/errors.hpp"

namespace e2m {

namespace {

double log_sum_exp(const double* v, std::size_t n) {
  double mx = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) mx = std::max(mx, v[i]);
  if (!std::isfinite(mx)) return mx;
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += std::exp(v[i] - mx);
  return mx + std::log(s);
}

}  // namespace

RayleighParam::RayleighParam(double xi) : xi_(xi) {
  if (!(xi > 0.0) || !std::isfinite(xi)) {
    std::ostringstream os;
    os << "Rayleigh parameter must be positive and finite, got " << xi;
    throw InvalidArgument(os.str());
  }
}

double log_pdf(RayleighParam param, double x) {
  if (!(x > 0.0)) throw InvalidArgument("pdf: x must be positive");
  const double xi = param.xi();
  return 2.0 * std::log(xi) + std::log(x) - 0.5 * xi * xi * x * x;
}

double pdf(RayleighParam param, double x) { return std::exp(log_pdf(param, x)); }

double log_survival(RayleighParam param, double x) {
  if (!(x >= 0.0)) throw InvalidArgument("survival: x must be nonnegative");
  const double xi = param.xi();
  return -0.5 * xi * xi * x * x;
}

double survival(RayleighParam param, double x) { return std::exp(log_survival(param, x)); }

double cdf(RayleighParam param, double x) { return -std::expm1(log_survival(param, x)); }

double quantile(RayleighParam param, double u) {
  if (!(u > 0.0 && u < 1.0)) throw InvalidArgument("quantile: u must lie in (0, 1)");
  return std::sqrt(-2.0 * std::log1p(-u)) / param.xi();
}

double truncated_second_moment(RayleighParam param, double y) {
  if (!(y >= 0.0)) throw InvalidArgument("truncated_second_moment: y must be nonnegative");
  const double xi = param.xi();
  return y * y + 2.0 / (xi * xi);
}

MixtureParams::MixtureParams(std::vector<double> lambdas, std::vector<double> xis)
    : lambdas_(std::move(lambdas)), xis_(std::move(xis)) {
  if (lambdas_.empty() || lambdas_.size() != xis_.size()) {
    throw InvalidArgument("mixture needs matching, nonempty lambda and xi vectors");
  }
  double total = 0.0;
  for (double l : lambdas_) {
    if (!(l >= 0.0) || !std::isfinite(l)) throw InvalidArgument("mixing weights must be nonnegative");
    total += l;
  }
  if (std::abs(total - 1.0) > kSumTolerance) {
    std::ostringstream os;
    os << "mixing weights must sum to 1, got " << total;
    throw InvalidArgument(os.str());
  }
  for (double xi : xis_) RayleighParam{xi};
}

double mixture_log_pdf(const MixtureParams& params, double x) {
  const std::size_t p = params.components();
  std::vector<double> terms(p);
  for (std::size_t z = 0; z < p; ++z) {
    terms[z] = params.lambda(z) > 0.0
                   ? std::log(params.lambda(z)) + log_pdf(params.component(z), x)
                   : -std::numeric_limits<double>::infinity();
  }
  return log_sum_exp(terms.data(), p);
}

double mixture_pdf(const MixtureParams& params, double x) {
  double s = 0.0;
  for (std::size_t z = 0; z < params.components(); ++z) {
    s += params.lambda(z) * pdf(params.component(z), x);
  }
  return s;
}

double mixture_log_survival(const MixtureParams& params, double x) {
  const std::size_t p = params.components();
  std::vector<double> terms(p);
  for (std::size_t z = 0; z < p; ++z) {
    terms[z] = params.lambda(z) > 0.0
                   ? std::log(params.lambda(z)) + log_survival(params.component(z), x)
                   : -std::numeric_limits<double>::infinity();
  }
  return log_sum_exp(terms.data(), p);
}

double mixture_survival(const MixtureParams& params, double x) {
  double s = 0.0;
  for (std::size_t z = 0; z < params.components(); ++z) {
    s += params.lambda(z) * survival(params.component(z), x);
  }
  return s;
}

std::vector<LabeledLifetime> sample_labeled(const MixtureParams& params, std::size_t n, Rng& rng) {
  if (n == 0) throw InvalidArgument("sample_labeled: n must be at least 1");
  const std::size_t p = params.components();
  std::vector<double> cumulative(p);
  double acc = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t z = 0; z < p; ++z) {
    acc += params.lambda(z);
    cumulative[z] = acc;
    if (params.lambda(z) > 0.0) last_positive = z;
  }

  std::vector<LabeledLifetime> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double u = uniform_open(rng) * acc;
    std::size_t label = last_positive;
    for (std::size_t z = 0; z < p; ++z) {
      if (params.lambda(z) > 0.0 && u < cumulative[z]) {
        label = z;
        break;
      }
    }
    out.push_back({quantile(params.component(label), uniform_open(rng)), label});
  }
  return out;
}

}  // namespace e2m
