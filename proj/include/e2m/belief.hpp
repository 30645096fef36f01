#pragma once

// Finite-frame Dempster-Shafer primitives.
//
// Subsets of the label frame are bitmasks: bit z set <=> element z belongs to
// the subset. Frames hold at most 64 elements.

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <utility>
#include <vector>

namespace e2m {

using Subset = std::uint64_t;

class Frame {
 public:
  static constexpr std::size_t kMaxSize = 64;

  explicit Frame(std::size_t size);

  std::size_t size() const noexcept { return size_; }
  Subset full() const noexcept;
  bool contains(Subset a) const noexcept { return (a & ~full()) == 0; }
  static Subset singleton(std::size_t z) noexcept { return Subset{1} << z; }

  friend bool operator==(const Frame&, const Frame&) = default;

 private:
  std::size_t size_;
};

// Basic belief assignment. Mass on the empty set is allowed on input (it
// behaves as conflict under combination); combination outputs never carry it.
class MassFunction {
 public:
  MassFunction(Frame frame, std::map<Subset, double> masses);

  static MassFunction vacuous(Frame frame);
  static MassFunction categorical(Frame frame, Subset focal);

  const Frame& frame() const noexcept { return frame_; }
  const std::map<Subset, double>& masses() const noexcept { return masses_; }
  double mass(Subset a) const noexcept;

 private:
  Frame frame_;
  std::map<Subset, double> masses_;
};

// Plausibility of each singleton. Not normalized.
class ContourFunction {
 public:
  explicit ContourFunction(std::vector<double> pl);

  static ContourFunction vacuous(std::size_t p);
  static ContourFunction certain(std::size_t p, std::size_t z);

  std::size_t size() const noexcept { return pl_.size(); }
  double operator[](std::size_t z) const { return pl_[z]; }
  std::span<const double> values() const noexcept { return pl_; }

 private:
  std::vector<double> pl_;
};

class ProbabilityVector {
 public:
  static constexpr double kSumTolerance = 1e-12;

  explicit ProbabilityVector(std::vector<double> p);

  std::size_t size() const noexcept { return p_.size(); }
  double operator[](std::size_t z) const { return p_[z]; }
  std::span<const double> values() const noexcept { return p_; }

 private:
  std::vector<double> p_;
};

double bel(const MassFunction& m, Subset a);
double pl(const MassFunction& m, Subset a);
ContourFunction contour_of(const MassFunction& m);

MassFunction bayesian_mass(const ProbabilityVector& p);
// Consonant (nested focal sets) mass function whose contour is `pl`. When
// max(pl) < 1 the remainder sits on the empty set.
MassFunction consonant_mass(const ContourFunction& pl);

struct Combination {
  MassFunction mass;
  double conflict;
};

struct BayesCombination {
  ProbabilityVector p;
  double conflict;
};

// Conflict at or above this is reported as total conflict.
inline constexpr double kTotalConflictThreshold = 1.0 - 1e-12;

Combination dempster_combine(const MassFunction& m1, const MassFunction& m2);
BayesCombination bayes_contour_combine(const ProbabilityVector& p1, const ContourFunction& pl2);

// Log-domain kernel of bayes_contour_combine used on the estimation hot path.
// `log_base` holds unnormalized log-probabilities; `out` receives the
// normalized combination. Returns log(sum_z exp(log_base[z]) * pl[z]), which
// is -inf when the two pieces of evidence are totally conflicting.
double combine_log_weights(std::span<const double> log_base, std::span<const double> pl,
                           std::span<double> out);

}  // namespace e2m
