#pragma once

#include <random>
#include <vector>

#include "e2m/censoring.hpp"
#include "e2m/estimator.hpp"
#include "e2m/rayleigh.hpp"
#include "oracles.hpp"

namespace fixtures {

inline e2m::MixtureParams random_params(std::size_t p, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> uw(0.5, 1.5), ux(0.3, 4.0);
  std::vector<double> l(p), x(p);
  double s = 0.0;
  for (auto& v : l) s += (v = uw(rng));
  for (auto& v : l) v /= s;
  for (auto& v : x) v = ux(rng);
  double total = 0.0;
  for (std::size_t z = 0; z + 1 < p; ++z) total += l[z];
  l.back() = 1.0 - total;
  return e2m::MixtureParams(l, x);
}

enum class Labels { Vacuous, Random, TrueCertain };

inline e2m::SoftLabeledDataset random_instance(std::mt19937_64& rng, std::size_t n, const e2m::MixtureParams& truth,
                                               double censor_frac, Labels labels) {
  e2m::Rng gen(rng());
  const auto lifetimes = e2m::sample_labeled(truth, n, gen);
  auto data = e2m::run_life_test(lifetimes, e2m::scheme_from_censor_frac(n, censor_frac), gen);
  const std::size_t p = truth.components();
  std::vector<e2m::ContourFunction> pl;
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (const auto& r : data.records) {
    switch (labels) {
      case Labels::Vacuous: pl.push_back(e2m::ContourFunction::vacuous(p)); break;
      case Labels::TrueCertain: pl.push_back(e2m::ContourFunction::certain(p, *r.true_label)); break;
      case Labels::Random: {
        std::vector<double> v(p);
        for (auto& x : v) x = u(rng);
        v[*r.true_label] = std::max(v[*r.true_label], 0.05);
        pl.emplace_back(v);
        break;
      }
    }
  }
  return e2m::SoftLabeledDataset(std::move(data), std::move(pl));
}

inline std::vector<oracle::Obs> plain_records(const e2m::SoftLabeledDataset& ds) {
  std::vector<oracle::Obs> out;
  for (const auto& r : ds.data().records) out.push_back({r.y_star, r.status == e2m::Status::Censored});
  return out;
}

inline oracle::Theta plain_theta(const e2m::MixtureParams& t) { return {t.lambdas(), t.xis()}; }

// Q(theta | theta_k) for the Rayleigh mixture up to terms constant in theta.
// The censored expectation E[X^2 | X > y] under xi_k is integrated numerically.
struct QFunction {
  std::vector<double> mass;    // sum_j W_jz
  std::vector<double> moment;  // sum_j W_jz * E[X^2 | record j]

  QFunction(const e2m::SoftLabeledDataset& ds, const e2m::PosteriorMatrix& w, const e2m::MixtureParams& theta_k) {
    const std::size_t p = theta_k.components();
    mass.assign(p, 0.0);
    moment.assign(p, 0.0);
    for (std::size_t j = 0; j < ds.size(); ++j) {
      const auto& r = ds.data().records[j];
      for (std::size_t z = 0; z < p; ++z) {
        double second = r.y_star * r.y_star;
        if (r.status == e2m::Status::Censored) {
          const double xk = theta_k.xis()[z];
          const double tail = oracle::integrate([&](double x) { return x * x * oracle::rayleigh_pdf(xk, x); },
                                                r.y_star, std::numeric_limits<double>::infinity());
          second = tail / oracle::rayleigh_sf(xk, r.y_star);
        }
        mass[z] += w(j, z);
        moment[z] += w(j, z) * second;
      }
    }
  }

  // xi-dependent part for component z: mass * 2 log xi - xi^2 / 2 * moment.
  double xi_part(std::size_t z, double xi) const { return mass[z] * 2.0 * std::log(xi) - 0.5 * xi * xi * moment[z]; }
};

}  // namespace fixtures
