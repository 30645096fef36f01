#include <doctest.h>

#include <cmath>
#include <random>

#include "e2m/belief.hpp"
#include "e2m/errors.hpp"
#include "oracles.hpp"

using namespace e2m;

namespace {

constexpr Subset S(std::initializer_list<int> elems) {
  Subset s = 0;
  for (int e : elems) s |= Subset{1} << e;
  return s;
}

MassFunction random_mass(std::size_t p, std::mt19937_64& rng, bool allow_empty = false) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::bernoulli_distribution keep(0.5);
  const std::size_t n_subsets = std::size_t{1} << p;
  std::map<Subset, double> m;
  double total = 0.0;
  for (std::size_t a = allow_empty ? 0 : 1; a < n_subsets; ++a) {
    if (!keep(rng) && a != n_subsets - 1) continue;
    const double v = u(rng);
    m[a] = v;
    total += v;
  }
  for (auto& [a, v] : m) v /= total;
  // Absorb rounding into the full set so the sum is exactly representable.
  double s = 0.0;
  for (auto& [a, v] : m) if (a != n_subsets - 1) s += v;
  m[n_subsets - 1] = 1.0 - s;
  return MassFunction(Frame(p), m);
}

oracle::DenseMass dense(const MassFunction& m) {
  oracle::DenseMass d(std::size_t{1} << m.frame().size(), 0.0);
  for (const auto& [a, v] : m.masses()) d[a] += v;
  return d;
}

std::vector<double> random_probs(std::size_t p, std::mt19937_64& rng) {
  std::gamma_distribution<double> g(1.0, 1.0);
  std::vector<double> v(p);
  double s = 0.0;
  for (double& x : v) s += (x = g(rng));
  for (double& x : v) x /= s;
  return v;
}

}  // namespace

TEST_CASE("frame bounds") {
  CHECK_THROWS_AS(Frame(0), InvalidArgument);
  CHECK_THROWS_AS(Frame(65), InvalidArgument);
  CHECK(Frame(64).full() == ~Subset{0});
  CHECK(Frame(3).full() == 0b111);
}

TEST_CASE("mass function invariants") {
  const Frame f(3);
  CHECK_THROWS_AS(MassFunction(f, {{S({0}), 0.5}}), InvalidArgument);
  CHECK_THROWS_AS(MassFunction(f, {{S({0}), 1.5}, {S({1}), -0.5}}), InvalidArgument);
  CHECK_THROWS_AS(MassFunction(f, {{S({3}), 1.0}}), InvalidArgument);
  CHECK_NOTHROW(MassFunction(f, {{S({0}), 0.25}, {f.full(), 0.75}}));
}

TEST_CASE("contour and probability vector invariants") {
  CHECK_THROWS_AS(ContourFunction({0.0, 0.0}), InvalidArgument);
  CHECK_THROWS_AS(ContourFunction({1.2, 0.0}), InvalidArgument);
  CHECK_NOTHROW(ContourFunction({0.3, 0.3, 0.3}));  // need not sum to 1
  CHECK_THROWS_AS(ProbabilityVector({0.5, 0.6}), InvalidArgument);
  CHECK_THROWS_AS(ProbabilityVector({1.5, -0.5}), InvalidArgument);
}

TEST_CASE("bel") {
  const Frame f(3);
  CHECK(bel(MassFunction::categorical(f, S({0})), S({0})) == 1.0);
  const auto vac = MassFunction::vacuous(f);
  for (Subset a : {S({0}), S({1}), S({0, 2}), S({1, 2})}) CHECK(bel(vac, a) == 0.0);
  const MassFunction m(f, {{S({0}), 0.5}, {S({0, 1}), 0.5}});
  CHECK(bel(m, S({0, 1})) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(bel(m, S({0})) == doctest::Approx(0.5));
  CHECK_THROWS_AS(bel(m, 0), InvalidArgument);
}

TEST_CASE("pl") {
  const Frame f(3);
  const auto vac = MassFunction::vacuous(f);
  for (Subset a = 1; a <= f.full(); ++a) CHECK(pl(vac, a) == 1.0);
  const auto bayes = bayesian_mass(ProbabilityVector({0.2, 0.3, 0.5}));
  CHECK(pl(bayes, S({1, 2})) == doctest::Approx(0.8).epsilon(1e-15));
  const MassFunction m(f, {{S({0}), 0.5}, {S({0, 1}), 0.5}});
  CHECK(pl(m, S({1})) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK_THROWS_AS(pl(m, 0), InvalidArgument);
}

TEST_CASE("contour_of") {
  const Frame f(3);
  const auto c_vac = contour_of(MassFunction::vacuous(f));
  for (std::size_t z = 0; z < 3; ++z) CHECK(c_vac[z] == 1.0);
  const auto c_bayes = contour_of(bayesian_mass(ProbabilityVector({0.2, 0.3, 0.5})));
  CHECK(c_bayes[0] == doctest::Approx(0.2));
  CHECK(c_bayes[1] == doctest::Approx(0.3));
  CHECK(c_bayes[2] == doctest::Approx(0.5));
  const auto c = contour_of(MassFunction(f, {{S({0}), 0.5}, {S({0, 1}), 0.5}}));
  CHECK(c[0] == doctest::Approx(1.0));
  CHECK(c[1] == doctest::Approx(0.5));
  CHECK(c[2] == 0.0);
}

TEST_CASE("bel <= pl and duality on random mass functions") {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 200; ++t) {
    const std::size_t p = 1 + t % 4;
    const auto m = random_mass(p, rng);
    const auto d = dense(m);
    for (Subset a = 1; a <= m.frame().full(); ++a) {
      const double b = bel(m, a);
      CHECK(b == doctest::Approx(oracle::dense_bel(d, a)).epsilon(1e-13));
      CHECK(b <= pl(m, a) + 1e-15);
      const Subset comp = m.frame().full() & ~a;
      if (comp != 0) CHECK(pl(m, a) == doctest::Approx(1.0 - bel(m, comp)).epsilon(1e-13));
    }
  }
}

TEST_CASE("dempster_combine examples") {
  const Frame f2(2);
  std::mt19937_64 rng(3);
  const auto m1 = random_mass(2, rng);
  const auto neutral = dempster_combine(m1, MassFunction::vacuous(f2));
  CHECK(neutral.conflict == 0.0);
  for (Subset a = 1; a <= f2.full(); ++a) CHECK(neutral.mass.mass(a) == doctest::Approx(m1.mass(a)).epsilon(1e-15));

  CHECK_THROWS_AS(dempster_combine(MassFunction::categorical(f2, S({0})), MassFunction::categorical(f2, S({1}))),
                  TotalConflict);

  const MassFunction a(f2, {{S({0}), 0.6}, {f2.full(), 0.4}});
  const MassFunction b(f2, {{S({1}), 0.5}, {f2.full(), 0.5}});
  const auto r = dempster_combine(a, b);
  CHECK(r.conflict == doctest::Approx(0.30).epsilon(1e-15));
  CHECK(r.mass.mass(S({0})) == doctest::Approx(0.30 / 0.70).epsilon(1e-14));
  CHECK(r.mass.mass(S({1})) == doctest::Approx(0.20 / 0.70).epsilon(1e-14));
  CHECK(r.mass.mass(f2.full()) == doctest::Approx(0.20 / 0.70).epsilon(1e-14));
  CHECK(r.mass.mass(0) == 0.0);
}

TEST_CASE("dempster_combine is commutative and associative") {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 300; ++t) {
    const std::size_t p = 1 + t % 4;
    const auto a = random_mass(p, rng), b = random_mass(p, rng), c = random_mass(p, rng);
    try {
      const auto ab = dempster_combine(a, b).mass;
      const auto ba = dempster_combine(b, a).mass;
      const auto left = dempster_combine(ab, c).mass;
      const auto right = dempster_combine(a, dempster_combine(b, c).mass).mass;
      for (Subset s = 0; s <= a.frame().full(); ++s) {
        CHECK(std::abs(ab.mass(s) - ba.mass(s)) <= 1e-12);
        CHECK(std::abs(left.mass(s) - right.mass(s)) <= 1e-12);
      }
    } catch (const TotalConflict&) {
      // Random triples can be totally conflicting on tiny frames.
    }
  }
}

TEST_CASE("bayes_contour_combine examples") {
  const ProbabilityVector p1({1.0 / 3, 1.0 / 3, 1.0 / 3});
  const auto vac = bayes_contour_combine(p1, ContourFunction::vacuous(3));
  CHECK(vac.conflict == doctest::Approx(0.0));
  for (std::size_t z = 0; z < 3; ++z) CHECK(vac.p[z] == doctest::Approx(1.0 / 3).epsilon(1e-15));

  const auto certain = bayes_contour_combine(p1, ContourFunction({1.0, 0.0, 0.0}));
  CHECK(certain.p[0] == 1.0);
  CHECK(certain.p[1] == 0.0);
  CHECK(certain.conflict == doctest::Approx(2.0 / 3).epsilon(1e-15));

  CHECK_THROWS_AS(bayes_contour_combine(ProbabilityVector({1.0, 0.0}), ContourFunction({0.0, 1.0})), TotalConflict);
}

TEST_CASE("bayes_contour_combine matches power-set Dempster combination") {
  std::mt19937_64 rng(17);
  for (int t = 0; t < 500; ++t) {
    const std::size_t p = 1 + t % 4;
    const ProbabilityVector p1(random_probs(p, rng));
    const auto m2 = random_mass(p, rng, /*allow_empty=*/t % 3 == 0);
    const auto pl2 = contour_of(m2);
    const auto fast = bayes_contour_combine(p1, pl2);
    const auto brute = oracle::dempster(dense(bayesian_mass(p1)), dense(m2));
    CHECK(std::abs(fast.conflict - brute.conflict) <= 1e-12);
    for (std::size_t z = 0; z < p; ++z) {
      CHECK(std::abs(fast.p[z] - brute.m[Frame::singleton(z)]) <= 1e-12);
    }
    double sum = 0.0;
    for (double v : fast.p.values()) sum += v;
    CHECK(std::abs(sum - 1.0) <= 1e-12);

    // Same answer through a consonant mass function realizing pl2.
    const auto cons = consonant_mass(pl2);
    const auto cc = contour_of(cons);
    for (std::size_t z = 0; z < p; ++z) CHECK(std::abs(cc[z] - pl2[z]) <= 1e-12);
    const auto brute_cons = oracle::dempster(dense(bayesian_mass(p1)), dense(cons));
    for (std::size_t z = 0; z < p; ++z) {
      CHECK(std::abs(fast.p[z] - brute_cons.m[Frame::singleton(z)]) <= 1e-12);
    }
  }
}

TEST_CASE("combine_log_weights agrees with the linear-domain combination") {
  const std::vector<double> p1{0.2, 0.5, 0.3};
  const std::vector<double> pl2{0.4, 0.0, 1.0};
  std::vector<double> logs(3), out(3);
  for (std::size_t z = 0; z < 3; ++z) logs[z] = std::log(p1[z]) + 700.0;  // far outside exp range
  const double lse = combine_log_weights(logs, pl2, out);
  const auto ref = bayes_contour_combine(ProbabilityVector(p1), ContourFunction(pl2));
  for (std::size_t z = 0; z < 3; ++z) CHECK(out[z] == doctest::Approx(ref.p[z]).epsilon(1e-14));
  CHECK(lse == doctest::Approx(700.0 + std::log(1.0 - ref.conflict)).epsilon(1e-14));

  const std::vector<double> zero_pl{0.0, 0.0, 0.0};
  CHECK(combine_log_weights(logs, zero_pl, out) == -std::numeric_limits<double>::infinity());
}
