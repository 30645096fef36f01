#pragma once

// Evidential EM for Rayleigh mixtures under progressive censoring.
//
// Each record carries a contour function pl_j over component labels. The
// E-step combines the classical posterior (density-based for observed
// records, survival-based for censored ones) with pl_j by Dempster's rule;
// the M-step is closed form.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "e2m/belief.hpp"
#include "e2m/censoring.hpp"
#include "e2m/errors.hpp"
#include "e2m/rayleigh.hpp"

namespace e2m {

class SoftLabeledDataset {
 public:
  SoftLabeledDataset(CensoredDataset data, std::vector<ContourFunction> soft_labels);

  const CensoredDataset& data() const noexcept { return data_; }
  const std::vector<ContourFunction>& soft_labels() const noexcept { return soft_labels_; }
  std::size_t size() const noexcept { return data_.records.size(); }
  std::size_t components() const noexcept { return soft_labels_.front().size(); }

 private:
  CensoredDataset data_;
  std::vector<ContourFunction> soft_labels_;
};

struct E2MConfig {
  std::size_t max_iters = 1000;
  double tol = 1e-8;
  // A component whose total posterior weight falls below floor * n is starved.
  double floor = 1e-10;

  void validate() const;
};

// Row-major n x p matrix of combined posterior weights.
class PosteriorMatrix {
 public:
  PosteriorMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), w_(rows * cols, 0.0) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  double& operator()(std::size_t j, std::size_t z) { return w_[j * cols_ + z]; }
  double operator()(std::size_t j, std::size_t z) const { return w_[j * cols_ + z]; }
  std::span<double> row(std::size_t j) { return {w_.data() + j * cols_, cols_}; }
  std::span<const double> row(std::size_t j) const { return {w_.data() + j * cols_, cols_}; }

 private:
  std::size_t rows_, cols_;
  std::vector<double> w_;
};

struct GeneralizedLogLik {
  double value;
  std::optional<std::size_t> degenerate_record;  // set when value is -inf
};

GeneralizedLogLik generalized_loglik(const SoftLabeledDataset& ds, const MixtureParams& theta);

struct EStepResult {
  PosteriorMatrix weights;
  double gll;  // generalized log-likelihood at the parameters used
};

// Throws DegenerateEstimation naming the record on total conflict.
EStepResult e_step(const SoftLabeledDataset& ds, const MixtureParams& theta);

// Throws ComponentStarved when a column of `weights` sums below floor * n.
MixtureParams m_step(const SoftLabeledDataset& ds, const PosteriorMatrix& weights, const MixtureParams& theta,
                     double floor = E2MConfig{}.floor);

struct TraceEntry {
  MixtureParams params;
  double gll;
};

struct E2MTrace {
  std::vector<TraceEntry> iterates;  // iterates[0] is the starting point
  bool converged = false;
  std::size_t iterations_used = 0;
};

struct FitResult {
  MixtureParams params;
  E2MTrace trace;
  PosteriorMatrix posterior;  // E-step weights at the final parameters

  double gll() const { return trace.iterates.back().gll; }
};

// Raised when the likelihood stops being finite mid-fit; keeps the trace so far.
class FitAborted : public DegenerateEstimation {
 public:
  FitAborted(const std::string& what, std::size_t record, E2MTrace trace)
      : DegenerateEstimation(what, record), trace_(std::move(trace)) {}
  const E2MTrace& trace() const noexcept { return trace_; }

 private:
  E2MTrace trace_;
};

FitResult fit(const SoftLabeledDataset& ds, const MixtureParams& theta0, const E2MConfig& cfg);

enum class LabelMethod { Uncertain, Noisy, Unknown };

std::string_view to_string(LabelMethod m);
LabelMethod parse_label_method(std::string_view s);

struct LabelCorruption {
  std::vector<std::size_t> noisy_labels;  // z*_j, 0-based
  std::vector<double> error_probs;        // q_j
};

// pl(z) = q/p + (1 - q) 1{z = noisy}.
ContourFunction uncertain_contour(std::size_t p, std::size_t noisy_label, double q);

// Unknown ignores `corruption`; the other modes require it.
std::vector<ContourFunction> make_soft_labels(LabelMethod method, std::size_t p, std::size_t n,
                                              const LabelCorruption* corruption);

// Uniform weights and xi spread over the quantiles of the observed times.
MixtureParams quantile_spread_init(const CensoredDataset& data, std::size_t p);

// Reproduction-run starting point: true weights, true xi minus `offset`.
MixtureParams offset_init(const MixtureParams& truth, double offset = 0.01);

}  // namespace e2m
