#pragma once

// Type-II progressive censoring: n units on test, J failures observed, and
// R_j surviving units withdrawn at random right after the j-th failure.

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "e2m/random.hpp"
#include "e2m/rayleigh.hpp"

namespace e2m {

struct CensoringScheme {
  std::size_t n = 0;
  std::vector<std::size_t> removals;  // R_1..R_J

  std::size_t failures() const noexcept { return removals.size(); }
};

// Throws SchemeInvalid naming both totals when sum(R) + J != n.
void validate(const CensoringScheme& scheme);

// R = (0, ..., 0, n - J) with J = ceil(n * (1 - censor_frac)).
CensoringScheme scheme_from_censor_frac(std::size_t n, double censor_frac);

enum class Status { Observed, Censored };

struct Record {
  std::size_t item_id = 0;
  double y_star = 0.0;
  Status status = Status::Observed;
  // 1-based failure index: the failure this unit is (Observed) or the failure
  // at which it was withdrawn (Censored).
  std::size_t failure_index = 0;
  std::optional<std::size_t> true_label;
};

struct CensoredDataset {
  CensoringScheme scheme;
  std::vector<Record> records;  // event order: failure j, then its R_j withdrawals

  std::size_t observed_count() const;
  std::size_t censored_count() const;
  std::vector<double> observed_times() const;
};

// Replays the life test on the given lifetimes. Ties are broken by input order.
CensoredDataset run_life_test(std::span<const LabeledLifetime> lifetimes, const CensoringScheme& scheme,
                              Rng& rng);

// log C with C = prod_j (n - j + 1 - sum_{i<j} R_i).
double log_scheme_constant(const CensoringScheme& scheme);

using LogDensity = std::function<double(double)>;

// log C + sum_j [log f(x_j) + R_j log S(x_j)]. The observed times are sorted
// internally. Returns -inf when S(x_j) = 0 for some j with R_j > 0.
double progressive_loglik(const CensoringScheme& scheme, std::span<const double> observed_times,
                          const LogDensity& log_f, const LogDensity& log_s);

double progressive_loglik(const CensoringScheme& scheme, std::span<const double> observed_times,
                          const MixtureParams& params);

}  // namespace e2m
