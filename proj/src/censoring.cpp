#include "e2m/censoring.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "e2m/errors.hpp"

namespace e2m {

void validate(const CensoringScheme& scheme) {
  const std::size_t j = scheme.failures();
  if (j < 1 || j > scheme.n) {
    std::ostringstream os;
    os << "censoring scheme needs 1 <= J <= n, got J=" << j << " n=" << scheme.n;
    throw SchemeInvalid(os.str());
  }
  const std::size_t removed = std::accumulate(scheme.removals.begin(), scheme.removals.end(), std::size_t{0});
  if (removed + j != scheme.n) {
    std::ostringstream os;
    os << "censoring scheme totals disagree: sum(R)+J=" << removed + j << " but n=" << scheme.n;
    throw SchemeInvalid(os.str());
  }
}

CensoringScheme scheme_from_censor_frac(std::size_t n, double censor_frac) {
  if (n == 0) throw SchemeInvalid("censoring scheme needs n >= 1");
  if (!(censor_frac >= 0.0 && censor_frac < 1.0)) {
    throw SchemeInvalid("censor_frac must lie in [0, 1)");
  }
  // The small offset keeps n*(1-c) from rounding up when it is an integer.
  auto j = static_cast<std::size_t>(std::ceil(static_cast<double>(n) * (1.0 - censor_frac) - 1e-9));
  j = std::clamp<std::size_t>(j, 1, n);
  CensoringScheme s{n, std::vector<std::size_t>(j, 0)};
  s.removals.back() = n - j;
  return s;
}

std::size_t CensoredDataset::observed_count() const {
  return static_cast<std::size_t>(std::count_if(records.begin(), records.end(),
                                                [](const Record& r) { return r.status == Status::Observed; }));
}

std::size_t CensoredDataset::censored_count() const { return records.size() - observed_count(); }

std::vector<double> CensoredDataset::observed_times() const {
  std::vector<double> t;
  for (const auto& r : records) {
    if (r.status == Status::Observed) t.push_back(r.y_star);
  }
  return t;
}

CensoredDataset run_life_test(std::span<const LabeledLifetime> lifetimes, const CensoringScheme& scheme,
                              Rng& rng) {
  validate(scheme);
  if (lifetimes.size() != scheme.n) {
    std::ostringstream os;
    os << "run_life_test: " << lifetimes.size() << " lifetimes for a scheme with n=" << scheme.n;
    throw InvalidArgument(os.str());
  }

  // Units still on test, ordered by (lifetime, input index).
  std::vector<std::size_t> alive(scheme.n);
  std::iota(alive.begin(), alive.end(), 0);
  std::stable_sort(alive.begin(), alive.end(),
                   [&](std::size_t a, std::size_t b) { return lifetimes[a].time < lifetimes[b].time; });

  CensoredDataset out{scheme, {}};
  out.records.reserve(scheme.n);
  for (std::size_t j = 0; j < scheme.failures(); ++j) {
    const std::size_t failed = alive.front();
    alive.erase(alive.begin());
    const double t = lifetimes[failed].time;
    out.records.push_back({failed, t, Status::Observed, j + 1, lifetimes[failed].label});

    // Draw R_j withdrawals uniformly without replacement (partial Fisher-Yates
    // over positions), then record them in position order.
    const std::size_t r = scheme.removals[j];
    std::vector<std::size_t> pos(alive.size());
    std::iota(pos.begin(), pos.end(), 0);
    for (std::size_t k = 0; k < r; ++k) {
      std::uniform_int_distribution<std::size_t> pick(k, pos.size() - 1);
      std::swap(pos[k], pos[pick(rng)]);
    }
    std::vector<std::size_t> chosen(pos.begin(), pos.begin() + static_cast<std::ptrdiff_t>(r));
    std::sort(chosen.begin(), chosen.end());
    for (std::size_t c : chosen) {
      const std::size_t unit = alive[c];
      out.records.push_back({unit, t, Status::Censored, j + 1, lifetimes[unit].label});
    }
    for (auto it = chosen.rbegin(); it != chosen.rend(); ++it) {
      alive.erase(alive.begin() + static_cast<std::ptrdiff_t>(*it));
    }
  }
  return out;
}

double log_scheme_constant(const CensoringScheme& scheme) {
  double log_c = 0.0;
  std::size_t removed_before = 0;
  for (std::size_t j = 0; j < scheme.failures(); ++j) {
    log_c += std::log(static_cast<double>(scheme.n - j - removed_before));
    removed_before += scheme.removals[j];
  }
  return log_c;
}

double progressive_loglik(const CensoringScheme& scheme, std::span<const double> observed_times,
                          const LogDensity& log_f, const LogDensity& log_s) {
  validate(scheme);
  if (observed_times.size() != scheme.failures()) {
    throw InvalidArgument("progressive_loglik: need exactly J observed times");
  }
  std::vector<double> x(observed_times.begin(), observed_times.end());
  std::sort(x.begin(), x.end());

  double ll = log_scheme_constant(scheme);
  for (std::size_t j = 0; j < x.size(); ++j) {
    ll += log_f(x[j]);
    if (scheme.removals[j] > 0) {
      const double ls = log_s(x[j]);
      if (ls == -std::numeric_limits<double>::infinity()) return ls;
      ll += static_cast<double>(scheme.removals[j]) * ls;
    }
  }
  return ll;
}

double progressive_loglik(const CensoringScheme& scheme, std::span<const double> observed_times,
                          const MixtureParams& params) {
  return progressive_loglik(
      scheme, observed_times, [&](double x) { return mixture_log_pdf(params, x); },
      [&](double x) { return mixture_log_survival(params, x); });
}

}  // namespace e2m
