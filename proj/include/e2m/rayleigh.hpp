#pragma once

// Rayleigh lifetimes and their finite mixtures.
//
// Component density: f(x; xi) = xi^2 x exp(-xi^2 x^2 / 2), x > 0.
// Survival:          S(x; xi) = exp(-xi^2 x^2 / 2).
// X^2 is exponential with rate xi^2 / 2, which gives the closed-form
// truncated moment E[X^2 | X > y] = y^2 + 2 / xi^2.

#include <cstddef>
#include <vector>

#include "e2m/random.hpp"

namespace e2m {

class RayleighParam {
 public:
  explicit RayleighParam(double xi);
  double xi() const noexcept { return xi_; }

 private:
  double xi_;
};

double pdf(RayleighParam param, double x);
double log_pdf(RayleighParam param, double x);
double cdf(RayleighParam param, double x);
double survival(RayleighParam param, double x);
double log_survival(RayleighParam param, double x);
double quantile(RayleighParam param, double u);
double truncated_second_moment(RayleighParam param, double y);

class MixtureParams {
 public:
  static constexpr double kSumTolerance = 1e-12;

  MixtureParams(std::vector<double> lambdas, std::vector<double> xis);

  std::size_t components() const noexcept { return lambdas_.size(); }
  const std::vector<double>& lambdas() const noexcept { return lambdas_; }
  const std::vector<double>& xis() const noexcept { return xis_; }
  double lambda(std::size_t z) const { return lambdas_[z]; }
  RayleighParam component(std::size_t z) const { return RayleighParam(xis_[z]); }

  friend bool operator==(const MixtureParams&, const MixtureParams&) = default;

 private:
  std::vector<double> lambdas_;
  std::vector<double> xis_;
};

double mixture_pdf(const MixtureParams& params, double x);
double mixture_log_pdf(const MixtureParams& params, double x);
double mixture_survival(const MixtureParams& params, double x);
double mixture_log_survival(const MixtureParams& params, double x);

struct LabeledLifetime {
  double time;
  std::size_t label;
};

std::vector<LabeledLifetime> sample_labeled(const MixtureParams& params, std::size_t n, Rng& rng);

}  // namespace e2m
