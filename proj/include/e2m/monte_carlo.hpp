#pragma once

// Bias studies: label corruption with Beta-distributed error probabilities,
// one estimation per label regime, and RABias aggregation across repetitions.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "e2m/belief.hpp"
#include "e2m/estimator.hpp"
#include "e2m/random.hpp"
#include "e2m/rayleigh.hpp"

namespace e2m {

struct CorruptionConfig {
  double rho = 0.0;
  double sd = 0.2;

  void validate() const;
};

// A Beta with mean rho needs sd^2 < rho (1 - rho); the requested sd is capped
// at 0.95 sqrt(rho (1 - rho)).
double effective_sd(const CorruptionConfig& cfg);

struct BetaShape {
  double alpha;
  double beta;
};

// Moment-matched shape; nullopt when the effective sd is zero (point mass).
std::optional<BetaShape> beta_shape(double mean, double sd);

std::vector<double> draw_error_probs(const CorruptionConfig& cfg, std::size_t n, Rng& rng);

struct CorruptedLabels {
  LabelCorruption corruption;
  std::vector<ContourFunction> plausibilities;
};

// With probability q_j the label is redrawn uniformly over all p classes
// (possibly landing on the true one).
CorruptedLabels corrupt_labels(std::span<const std::size_t> true_labels, std::span<const double> q, std::size_t p,
                               Rng& rng);

double rabias(double estimate, double truth);

// Permutation perm with estimate component perm[z] matched to true component
// z, minimizing the summed xi RABias. Exhaustive over p! orderings.
std::vector<std::size_t> align_to_truth(const MixtureParams& estimate, const MixtureParams& truth);
MixtureParams permute(const MixtureParams& params, std::span<const std::size_t> perm);

struct ExperimentConfig {
  std::size_t n = 500;
  double censor_frac = 0.4;
  // Overrides censor_frac when set.
  std::optional<CensoringScheme> scheme;
  MixtureParams truth{{1.0 / 3, 1.0 / 3, 1.0 / 3}, {4.0, 0.5, 0.8}};
  CorruptionConfig corruption{};
  E2MConfig e2m{};
  double init_offset = 0.01;

  CensoringScheme resolved_scheme() const;
  void validate() const;
};

enum class ReplicationStatus { Ok, ComponentStarved, Degenerate, Failed };
std::string_view to_string(ReplicationStatus s);

struct ReplicationResult {
  LabelMethod method = LabelMethod::Unknown;
  std::size_t rep = 0;
  ReplicationStatus status = ReplicationStatus::Ok;
  std::string message;
  // Populated when status == Ok; components aligned to the truth.
  std::optional<MixtureParams> estimate;
  std::size_t iterations = 0;
  bool converged = false;
  double gll = 0.0;
  std::vector<double> rabias_lambda;
  std::vector<double> rabias_xi;
};

struct SimulatedExperiment {
  CensoredDataset data;
  CorruptedLabels labels;

  SoftLabeledDataset soft_labeled(LabelMethod method) const;
};

// Sample -> life test -> error probabilities -> corruption, all drawn from one
// generator seeded with data_seed. Independent of the label method.
SimulatedExperiment simulate_experiment(const ExperimentConfig& cfg, std::uint64_t data_seed);

ReplicationResult run_replication(const ExperimentConfig& cfg, LabelMethod method, std::uint64_t data_seed,
                                  std::size_t rep = 0);

enum class SweepVariable { Rho, SampleSize };
std::string_view to_string(SweepVariable v);
SweepVariable parse_sweep_variable(std::string_view s);

struct SweepSpec {
  SweepVariable variable = SweepVariable::Rho;
  std::vector<double> grid;
  std::size_t reps = 20;
  ExperimentConfig base;
  std::vector<LabelMethod> methods{LabelMethod::Uncertain, LabelMethod::Noisy, LabelMethod::Unknown};
  std::uint64_t master_seed = 1;
  std::size_t workers = 1;

  void validate() const;
  ExperimentConfig at(std::size_t grid_index) const;
};

struct ParamStat {
  std::string name;  // "xi_1", "lambda_2", ...
  double mean = 0.0;
  double sd = 0.0;
};

struct ReportCell {
  std::size_t grid_index = 0;
  double grid_value = 0.0;
  LabelMethod method = LabelMethod::Unknown;
  std::size_t successes = 0;
  std::size_t failures = 0;
  bool unreliable = false;  // more than half the replications failed
  std::vector<ParamStat> xi;
  std::vector<ParamStat> lambda;
};

struct RABiasReport {
  std::vector<ReportCell> cells;  // grid-major, then method in spec order
  std::vector<double> effective_sd;  // per grid point

  const ReportCell& cell(std::size_t grid_index, LabelMethod method) const;
};

struct SweepRow {
  std::size_t grid_index;
  double grid_value;
  ReplicationResult result;
};

struct SweepOutcome {
  std::vector<SweepRow> rows;  // grid-major, then method, then rep
  RABiasReport report;
};

std::uint64_t replication_seed(std::uint64_t master, std::size_t grid_index, std::size_t rep);

SweepOutcome run_sweep(const SweepSpec& spec);

RABiasReport aggregate(const SweepSpec& spec, std::span<const SweepRow> rows);

}  // namespace e2m
