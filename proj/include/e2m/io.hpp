#pragma once

// CSV and SVG output for data sets, soft labels, fits and sweeps. Doubles are
// written with 17 significant digits so reruns compare byte for byte.

#include <filesystem>
#include <string>
#include <vector>

#include "e2m/belief.hpp"
#include "e2m/censoring.hpp"
#include "e2m/estimator.hpp"
#include "e2m/monte_carlo.hpp"

namespace e2m::io {

std::string format_double(double v);

// item_id,y_star,status,censored_at_failure,true_label
// Labels are 1-based; censored_at_failure and true_label are empty when not
// applicable.
std::string dataset_csv(const CensoredDataset& data);
CensoredDataset parse_dataset_csv(const std::string& text);

// item_id,pl_1,...,pl_p
std::string soft_labels_csv(const CensoredDataset& data, const std::vector<ContourFunction>& labels);
std::vector<ContourFunction> parse_soft_labels_csv(const std::string& text);

// method,rep,lambda_1..p,xi_1..p,iterations,converged,gll
std::string fit_csv(const std::string& method, std::size_t rep, const FitResult& result);
// iteration,gll,lambda_1..p,xi_1..p
std::string trace_csv(const E2MTrace& trace);

// grid_value,method,rep,status,lambda_1..p,xi_1..p,iterations,converged,gll,rabias_xi_1..p
std::string results_csv(const SweepSpec& spec, const std::vector<SweepRow>& rows);
// grid_value,method,successes,failures,unreliable,effective_sd,
// then mean/sd of RABias for each xi and lambda
std::string summary_csv(const SweepSpec& spec, const RABiasReport& report);
// One table per xi component: grid_value,method,mean,lower,upper,failures
std::string figure_csv(const SweepSpec& spec, const RABiasReport& report, std::size_t component);
// Line chart with +-1 sd bands, one line per method.
std::string figure_svg(const SweepSpec& spec, const RABiasReport& report, std::size_t component);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& contents);

}  // namespace e2m::io
