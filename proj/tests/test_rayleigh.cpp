#include <doctest.h>

#include <cmath>
#include <random>

#include "e2m/errors.hpp"
#include "e2m/rayleigh.hpp"
#include "oracles.hpp"

using namespace e2m;

TEST_CASE("pdf") {
  CHECK_THROWS_AS(pdf(RayleighParam(1.0), 0.0), InvalidArgument);
  CHECK_THROWS_AS(pdf(RayleighParam(1.0), -1.0), InvalidArgument);
  CHECK_THROWS_AS(RayleighParam(0.0), InvalidArgument);
  CHECK_THROWS_AS(RayleighParam(std::nan("")), InvalidArgument);
  CHECK(pdf(RayleighParam(1.0), 1e-12) < 1e-11);
  CHECK(pdf(RayleighParam(2.0), 0.5) == doctest::Approx(1.2130613194252668).epsilon(1e-14));
  for (double xi : {0.5, 1.0, 4.0}) {
    const double mass = oracle::integrate([&](double x) { return x > 0 ? pdf(RayleighParam(xi), x) : 0.0; }, 0.0,
                                          std::numeric_limits<double>::infinity());
    CHECK(std::abs(mass - 1.0) < 1e-9);
  }
}

TEST_CASE("survival") {
  CHECK(survival(RayleighParam(3.0), 0.0) == 1.0);
  CHECK(survival(RayleighParam(1.0), std::sqrt(2.0 * std::log(2.0))) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(survival(RayleighParam(0.5), 2.0) == doctest::Approx(0.6065306597126334).epsilon(1e-14));
}

TEST_CASE("quantile") {
  CHECK_THROWS_AS(quantile(RayleighParam(1.0), 0.0), InvalidArgument);
  CHECK_THROWS_AS(quantile(RayleighParam(1.0), 1.0), InvalidArgument);
  CHECK(quantile(RayleighParam(1.0), 1e-300) < 1e-149);
  CHECK(quantile(RayleighParam(1.0), -std::expm1(-0.5)) == doctest::Approx(1.0).epsilon(1e-14));
  const double x = quantile(RayleighParam(4.0), 0.9);
  CHECK(x == doctest::Approx(0.5364915065723368).epsilon(1e-14));
  CHECK(survival(RayleighParam(4.0), x) == doctest::Approx(0.1).epsilon(1e-12));
}

TEST_CASE("truncated second moment") {
  CHECK(truncated_second_moment(RayleighParam(2.0), 0.0) == doctest::Approx(0.5));
  CHECK(truncated_second_moment(RayleighParam(1.0), 1.0) == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(truncated_second_moment(RayleighParam(0.8), 2.0) == doctest::Approx(7.125).epsilon(1e-14));
  CHECK_THROWS_AS(truncated_second_moment(RayleighParam(1.0), -1.0), InvalidArgument);
}

TEST_CASE("distributional identities at random points") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> uxi(0.3, 5.0), uq(0.02, 0.98);
  for (int t = 0; t < 100; ++t) {
    const RayleighParam param(uxi(rng));
    const double x = quantile(param, uq(rng));
    const double cdf_quad = oracle::integrate([&](double s) { return s > 0 ? pdf(param, s) : 0.0; }, 0.0, x);
    CHECK(std::abs(survival(param, x) - (1.0 - cdf_quad)) < 1e-8);

    const double tail = oracle::integrate([&](double s) { return s * s * pdf(param, s); }, x,
                                          std::numeric_limits<double>::infinity());
    const double ref = tail / survival(param, x);
    CHECK(std::abs(truncated_second_moment(param, x) - ref) <= 1e-6 * ref);
  }
  for (double u = 0.001; u < 0.999; u += 0.0137) {
    const RayleighParam param(1.7);
    CHECK(std::abs(cdf(param, quantile(param, u)) - u) < 1e-10);
  }
}

TEST_CASE("mixture params invariants") {
  CHECK_THROWS_AS(MixtureParams({0.5, 0.6}, {1.0, 2.0}), InvalidArgument);
  CHECK_THROWS_AS(MixtureParams({0.5, 0.5}, {1.0, -2.0}), InvalidArgument);
  CHECK_THROWS_AS(MixtureParams({0.5, 0.5}, {1.0}), InvalidArgument);
  CHECK_THROWS_AS(MixtureParams({}, {}), InvalidArgument);
}

TEST_CASE("mixture pdf") {
  const MixtureParams one({1.0}, {1.3});
  CHECK(mixture_pdf(one, 0.7) == doctest::Approx(pdf(RayleighParam(1.3), 0.7)).epsilon(1e-15));

  const MixtureParams standard({1.0 / 3, 1.0 / 3, 1.0 / 3}, {4.0, 0.5, 0.8});
  CHECK(mixture_pdf(standard, 1.0) == doctest::Approx(0.23024233713991707).epsilon(1e-14));
  CHECK(std::exp(mixture_log_pdf(standard, 1.0)) == doctest::Approx(0.23024233713991707).epsilon(1e-14));
  const double mass = oracle::integrate([&](double x) { return x > 0 ? mixture_pdf(standard, x) : 0.0; }, 0.0,
                                        std::numeric_limits<double>::infinity());
  CHECK(std::abs(mass - 1.0) < 1e-9);

  // Far tail: the linear form underflows, the log form does not.
  CHECK(std::isfinite(mixture_log_pdf(MixtureParams({0.5, 0.5}, {4.0, 4.0}), 12.0)));
  CHECK(std::exp(mixture_log_survival(standard, 1.5)) == doctest::Approx(mixture_survival(standard, 1.5)).epsilon(1e-14));
}

TEST_CASE("mixture pdf is linear in each weight") {
  // Finite difference in lambda_z recovers the component density exactly.
  const std::vector<double> xis{4.0, 0.5, 0.8};
  auto unnormalized = [&](std::vector<double> l, double x) {
    double s = 0.0;
    for (std::size_t z = 0; z < 3; ++z) s += l[z] * pdf(RayleighParam(xis[z]), x);
    return s;
  };
  const std::vector<double> base{0.2, 0.3, 0.5};
  const MixtureParams params(base, xis);
  for (double x : {0.1, 0.6, 2.0}) {
    CHECK(unnormalized(base, x) == doctest::Approx(mixture_pdf(params, x)).epsilon(1e-14));
    for (std::size_t z = 0; z < 3; ++z) {
      auto up = base, dn = base;
      up[z] += 1e-3;
      dn[z] -= 1e-3;
      const double fd = (unnormalized(up, x) - unnormalized(dn, x)) / 2e-3;
      CHECK(fd == doctest::Approx(pdf(RayleighParam(xis[z]), x)).epsilon(1e-9));
      auto doubled = base;
      doubled[z] *= 2.0;
      CHECK(unnormalized(doubled, x) - unnormalized(base, x) ==
            doctest::Approx(base[z] * pdf(RayleighParam(xis[z]), x)).epsilon(1e-12));
    }
  }
}

TEST_CASE("sample_labeled") {
  Rng rng(99);
  const auto all_first = sample_labeled(MixtureParams({1.0, 0.0}, {1.0, 2.0}), 1000, rng);
  for (const auto& s : all_first) CHECK(s.label == 0);
  CHECK_THROWS_AS(sample_labeled(MixtureParams({1.0}, {1.0}), 0, rng), InvalidArgument);

  const std::size_t n = 50000;
  const auto mix = sample_labeled(MixtureParams({1.0 / 3, 1.0 / 3, 1.0 / 3}, {4.0, 0.5, 0.8}), n, rng);
  std::vector<double> freq(3, 0.0);
  for (const auto& s : mix) freq[s.label] += 1.0 / n;
  const double sigma = std::sqrt((1.0 / 3) * (2.0 / 3) / n);
  for (double f : freq) CHECK(std::abs(f - 1.0 / 3) < 3 * sigma);

  const auto single = sample_labeled(MixtureParams({1.0}, {1.0}), n, rng);
  double m2 = 0.0;
  for (const auto& s : single) m2 += s.time * s.time / n;
  // X^2 ~ Exp(rate 1/2): mean 2, sd 2.
  CHECK(std::abs(m2 - 2.0) < 3 * 2.0 / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("sampler passes a KS test against the component CDF") {
  Rng rng(2024);
  const RayleighParam param(0.8);
  const auto draws = sample_labeled(MixtureParams({1.0}, {0.8}), 5000, rng);
  std::vector<double> x;
  for (const auto& d : draws) x.push_back(d.time);
  CHECK(oracle::ks_statistic(x, [&](double t) { return cdf(param, t); }) < oracle::ks_critical_99(5000));
}
