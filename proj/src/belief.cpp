#include "e2m/belief.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "e2m/errors.hpp"

namespace e2m {

Frame::Frame(std::size_t size) : size_(size) {
  if (size == 0 || size > kMaxSize) {
    throw InvalidArgument("frame size must lie in [1, 64], got " + std::to_string(size));
  }
}

Subset Frame::full() const noexcept {
  return size_ == 64 ? ~Subset{0} : (Subset{1} << size_) - 1;
}

MassFunction::MassFunction(Frame frame, std::map<Subset, double> masses)
    : frame_(frame), masses_(std::move(masses)) {
  double total = 0.0;
  for (auto it = masses_.begin(); it != masses_.end();) {
    const auto [a, m] = *it;
    if (!frame_.contains(a)) {
      throw InvalidArgument("mass assigned outside the frame");
    }
    if (!(m >= 0.0) || !std::isfinite(m)) {
      throw InvalidArgument("masses must be finite and nonnegative");
    }
    total += m;
    it = (m == 0.0) ? masses_.erase(it) : std::next(it);
  }
  if (std::abs(total - 1.0) > 1e-12) {
    std::ostringstream os;
    os << "masses must sum to 1, got " << total;
    throw InvalidArgument(os.str());
  }
}

MassFunction MassFunction::vacuous(Frame frame) {
  return MassFunction(frame, {{frame.full(), 1.0}});
}

MassFunction MassFunction::categorical(Frame frame, Subset focal) {
  if (focal == 0) throw InvalidArgument("categorical focal set must be nonempty");
  return MassFunction(frame, {{focal, 1.0}});
}

double MassFunction::mass(Subset a) const noexcept {
  auto it = masses_.find(a);
  return it == masses_.end() ? 0.0 : it->second;
}

ContourFunction::ContourFunction(std::vector<double> pl) : pl_(std::move(pl)) {
  if (pl_.empty() || pl_.size() > Frame::kMaxSize) {
    throw InvalidArgument("contour function size must lie in [1, 64]");
  }
  bool any_positive = false;
  for (double v : pl_) {
    if (!(v >= 0.0 && v <= 1.0)) throw InvalidArgument("plausibilities must lie in [0, 1]");
    any_positive |= v > 0.0;
  }
  if (!any_positive) throw InvalidArgument("contour function must have a positive entry");
}

ContourFunction ContourFunction::vacuous(std::size_t p) {
  return ContourFunction(std::vector<double>(p, 1.0));
}

ContourFunction ContourFunction::certain(std::size_t p, std::size_t z) {
  if (z >= p) throw InvalidArgument("label outside the frame");
  std::vector<double> v(p, 0.0);
  v[z] = 1.0;
  return ContourFunction(std::move(v));
}

ProbabilityVector::ProbabilityVector(std::vector<double> p) : p_(std::move(p)) {
  if (p_.empty() || p_.size() > Frame::kMaxSize) {
    throw InvalidArgument("probability vector size must lie in [1, 64]");
  }
  double total = 0.0;
  for (double v : p_) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw InvalidArgument("probabilities must be finite and nonnegative");
    }
    total += v;
  }
  if (std::abs(total - 1.0) > kSumTolerance) {
    std::ostringstream os;
    os << "probabilities must sum to 1, got " << total;
    throw InvalidArgument(os.str());
  }
}

double bel(const MassFunction& m, Subset a) {
  if (a == 0) throw InvalidArgument("bel: empty subset");
  if (!m.frame().contains(a)) throw InvalidArgument("bel: subset outside the frame");
  double s = 0.0;
  for (const auto& [b, v] : m.masses()) {
    if (b != 0 && (b & ~a) == 0) s += v;
  }
  return s;
}

double pl(const MassFunction& m, Subset a) {
  if (a == 0) throw InvalidArgument("pl: empty subset");
  if (!m.frame().contains(a)) throw InvalidArgument("pl: subset outside the frame");
  double s = 0.0;
  for (const auto& [b, v] : m.masses()) {
    if ((b & a) != 0) s += v;
  }
  return s;
}

ContourFunction contour_of(const MassFunction& m) {
  const std::size_t p = m.frame().size();
  std::vector<double> out(p);
  for (std::size_t z = 0; z < p; ++z) out[z] = std::min(1.0, pl(m, Frame::singleton(z)));
  return ContourFunction(std::move(out));
}

MassFunction bayesian_mass(const ProbabilityVector& p) {
  std::map<Subset, double> masses;
  for (std::size_t z = 0; z < p.size(); ++z) masses[Frame::singleton(z)] = p[z];
  return MassFunction(Frame(p.size()), std::move(masses));
}

MassFunction consonant_mass(const ContourFunction& pl) {
  const std::size_t p = pl.size();
  std::vector<std::size_t> order(p);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return pl[a] > pl[b]; });

  std::map<Subset, double> masses;
  Subset nested = 0;
  for (std::size_t i = 0; i < p; ++i) {
    nested |= Frame::singleton(order[i]);
    const double next = (i + 1 < p) ? pl[order[i + 1]] : 0.0;
    const double m = pl[order[i]] - next;
    if (m > 0.0) masses[nested] += m;
  }
  const double empty = 1.0 - pl[order.front()];
  if (empty > 0.0) masses[0] = empty;
  return MassFunction(Frame(p), std::move(masses));
}

Combination dempster_combine(const MassFunction& m1, const MassFunction& m2) {
  if (!(m1.frame() == m2.frame())) throw InvalidArgument("dempster_combine: frames differ");
  std::map<Subset, double> joint;
  double conflict = 0.0;
  for (const auto& [a, va] : m1.masses()) {
    for (const auto& [b, vb] : m2.masses()) {
      const Subset c = a & b;
      if (c == 0) {
        conflict += va * vb;
      } else {
        joint[c] += va * vb;
      }
    }
  }
  if (conflict > kTotalConflictThreshold) {
    throw TotalConflict("dempster_combine: totally conflicting evidence");
  }
  // Renormalize from the retained mass so rounding in 1-k does not leak.
  double kept = 0.0;
  for (const auto& [c, v] : joint) kept += v;
  for (auto& [c, v] : joint) v /= kept;
  return {MassFunction(m1.frame(), std::move(joint)), conflict};
}

double combine_log_weights(std::span<const double> log_base, std::span<const double> pl,
                           std::span<double> out) {
  const std::size_t p = log_base.size();
  double mx = -std::numeric_limits<double>::infinity();
  for (std::size_t z = 0; z < p; ++z) {
    out[z] = pl[z] > 0.0 ? log_base[z] + std::log(pl[z])
                         : -std::numeric_limits<double>::infinity();
    mx = std::max(mx, out[z]);
  }
  if (!std::isfinite(mx)) {
    std::fill(out.begin(), out.end(), 0.0);
    return -std::numeric_limits<double>::infinity();
  }
  double s = 0.0;
  for (std::size_t z = 0; z < p; ++z) {
    out[z] = std::exp(out[z] - mx);
    s += out[z];
  }
  for (std::size_t z = 0; z < p; ++z) out[z] /= s;
  return mx + std::log(s);
}

BayesCombination bayes_contour_combine(const ProbabilityVector& p1, const ContourFunction& pl2) {
  if (p1.size() != pl2.size()) throw InvalidArgument("bayes_contour_combine: frames differ");
  const std::size_t p = p1.size();
  double expectation = 0.0;
  std::vector<double> out(p);
  for (std::size_t z = 0; z < p; ++z) {
    out[z] = p1[z] * pl2[z];
    expectation += out[z];
  }
  const double conflict = 1.0 - expectation;
  if (expectation <= 0.0 || conflict > kTotalConflictThreshold) {
    throw TotalConflict("bayes_contour_combine: totally conflicting evidence");
  }
  for (double& v : out) v /= expectation;
  return {ProbabilityVector(std::move(out)), conflict};
}

}  // namespace e2m
