#include "e2m/io.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "e2m/errors.hpp"

namespace e2m::io {

namespace {

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_row(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) cells.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

std::vector<std::vector<std::string>> rows_of(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::stringstream ss(text);
  std::string line;
  while (std::getline(ss, line)) {
    if (trim(line).empty()) continue;
    rows.push_back(split_row(line));
  }
  return rows;
}

double to_double(const std::string& s, std::size_t line) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw IoError("line " + std::to_string(line) + ": '" + s + "' is not a number");
  }
}

std::size_t to_index(const std::string& s, std::size_t line) {
  const double v = to_double(s, line);
  if (v < 0.0 || v != std::floor(v)) {
    throw IoError("line " + std::to_string(line) + ": '" + s + "' is not a nonnegative integer");
  }
  return static_cast<std::size_t>(v);
}

void params_header(std::ostringstream& os, std::size_t p) {
  for (std::size_t z = 1; z <= p; ++z) os << ",lambda_" << z;
  for (std::size_t z = 1; z <= p; ++z) os << ",xi_" << z;
}

void params_row(std::ostringstream& os, const MixtureParams& params) {
  for (double l : params.lambdas()) os << ',' << format_double(l);
  for (double x : params.xis()) os << ',' << format_double(x);
}

}  // namespace

std::string format_double(double v) {
  std::array<char, 40> buf{};
  std::snprintf(buf.data(), buf.size(), "%.17g", v);
  return buf.data();
}

std::string dataset_csv(const CensoredDataset& data) {
  std::ostringstream os;
  os << "item_id,y_star,status,censored_at_failure,true_label\n";
  for (const auto& r : data.records) {
    os << r.item_id << ',' << format_double(r.y_star) << ','
       << (r.status == Status::Observed ? "observed" : "censored") << ',';
    if (r.status == Status::Censored) os << r.failure_index;
    os << ',';
    if (r.true_label) os << *r.true_label + 1;
    os << '\n';
  }
  return os.str();
}

CensoredDataset parse_dataset_csv(const std::string& text) {
  const auto rows = rows_of(text);
  const std::vector<std::string> header{"item_id", "y_star", "status", "censored_at_failure", "true_label"};
  if (rows.empty() || rows.front() != header) {
    throw IoError("dataset CSV must start with header 'item_id,y_star,status,censored_at_failure,true_label'");
  }
  CensoredDataset data;
  std::size_t failures = 0;
  std::vector<std::size_t> removals;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& c = rows[i];
    const std::size_t line = i + 1;
    if (c.size() != header.size()) throw IoError("line " + std::to_string(line) + ": expected 5 fields");
    Record r;
    r.item_id = to_index(c[0], line);
    r.y_star = to_double(c[1], line);
    if (c[2] == "observed") {
      r.status = Status::Observed;
      r.failure_index = ++failures;
      removals.push_back(0);
    } else if (c[2] == "censored") {
      r.status = Status::Censored;
      r.failure_index = c[3].empty() ? failures : to_index(c[3], line);
      if (r.failure_index < 1 || r.failure_index > removals.size()) {
        throw IoError("line " + std::to_string(line) + ": censored unit refers to failure " +
                      std::to_string(r.failure_index) + " which has not occurred");
      }
      ++removals[r.failure_index - 1];
    } else {
      throw IoError("line " + std::to_string(line) + ": status must be 'observed' or 'censored'");
    }
    if (!c[4].empty()) {
      const std::size_t label = to_index(c[4], line);
      if (label < 1) throw IoError("line " + std::to_string(line) + ": labels are 1-based");
      r.true_label = label - 1;
    }
    data.records.push_back(r);
  }
  if (data.records.empty()) throw IoError("dataset CSV has no records");
  if (removals.empty()) throw IoError("dataset CSV has no observed failures");
  data.scheme = CensoringScheme{data.records.size(), std::move(removals)};
  return data;
}

std::string soft_labels_csv(const CensoredDataset& data, const std::vector<ContourFunction>& labels) {
  if (labels.size() != data.records.size()) throw InvalidArgument("soft label count differs from record count");
  std::ostringstream os;
  os << "item_id";
  const std::size_t p = labels.empty() ? 0 : labels.front().size();
  for (std::size_t z = 1; z <= p; ++z) os << ",pl_" << z;
  os << '\n';
  for (std::size_t j = 0; j < labels.size(); ++j) {
    os << data.records[j].item_id;
    for (double v : labels[j].values()) os << ',' << format_double(v);
    os << '\n';
  }
  return os.str();
}

std::vector<ContourFunction> parse_soft_labels_csv(const std::string& text) {
  const auto rows = rows_of(text);
  if (rows.empty() || rows.front().size() < 2 || rows.front()[0] != "item_id") {
    throw IoError("soft-label CSV must start with header 'item_id,pl_1,...,pl_p'");
  }
  const std::size_t p = rows.front().size() - 1;
  std::vector<ContourFunction> out;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const std::size_t line = i + 1;
    if (rows[i].size() != p + 1) {
      throw IoError("line " + std::to_string(line) + ": expected " + std::to_string(p + 1) + " fields");
    }
    std::vector<double> pl(p);
    for (std::size_t z = 0; z < p; ++z) pl[z] = to_double(rows[i][z + 1], line);
    try {
      out.emplace_back(std::move(pl));
    } catch (const InvalidArgument& e) {
      throw IoError("line " + std::to_string(line) + ": " + e.what());
    }
  }
  return out;
}

std::string fit_csv(const std::string& method, std::size_t rep, const FitResult& result) {
  std::ostringstream os;
  os << "method,rep";
  params_header(os, result.params.components());
  os << ",iterations,converged,gll\n";
  os << method << ',' << rep;
  params_row(os, result.params);
  os << ',' << result.trace.iterations_used << ',' << (result.trace.converged ? "true" : "false") << ','
     << format_double(result.gll()) << '\n';
  return os.str();
}

std::string trace_csv(const E2MTrace& trace) {
  std::ostringstream os;
  os << "iteration,gll";
  params_header(os, trace.iterates.front().params.components());
  os << '\n';
  for (std::size_t k = 0; k < trace.iterates.size(); ++k) {
    os << k << ',' << format_double(trace.iterates[k].gll);
    params_row(os, trace.iterates[k].params);
    os << '\n';
  }
  return os.str();
}

std::string results_csv(const SweepSpec& spec, const std::vector<SweepRow>& rows) {
  const std::size_t p = spec.base.truth.components();
  std::ostringstream os;
  os << "grid_value,method,rep,status";
  params_header(os, p);
  os << ",iterations,converged,gll";
  for (std::size_t z = 1; z <= p; ++z) os << ",rabias_xi_" << z;
  os << '\n';
  for (const auto& row : rows) {
    const auto& r = row.result;
    os << format_double(row.grid_value) << ',' << to_string(r.method) << ',' << r.rep << ',' << to_string(r.status);
    if (r.estimate) {
      params_row(os, *r.estimate);
      os << ',' << r.iterations << ',' << (r.converged ? "true" : "false") << ',' << format_double(r.gll);
      for (double b : r.rabias_xi) os << ',' << format_double(b);
    } else {
      for (std::size_t k = 0; k < 3 * p + 3; ++k) os << ',';
    }
    os << '\n';
  }
  return os.str();
}

std::string summary_csv(const SweepSpec& spec, const RABiasReport& report) {
  const std::size_t p = spec.base.truth.components();
  std::ostringstream os;
  os << "grid_value,method,successes,failures,unreliable,effective_sd";
  for (std::size_t z = 1; z <= p; ++z) os << ",mean_rabias_xi_" << z << ",sd_rabias_xi_" << z;
  for (std::size_t z = 1; z <= p; ++z) os << ",mean_rabias_lambda_" << z << ",sd_rabias_lambda_" << z;
  os << '\n';
  for (const auto& c : report.cells) {
    os << format_double(c.grid_value) << ',' << to_string(c.method) << ',' << c.successes << ',' << c.failures << ','
       << (c.unreliable ? "true" : "false") << ',' << format_double(report.effective_sd[c.grid_index]);
    for (const auto& s : c.xi) os << ',' << format_double(s.mean) << ',' << format_double(s.sd);
    for (const auto& s : c.lambda) os << ',' << format_double(s.mean) << ',' << format_double(s.sd);
    os << '\n';
  }
  return os.str();
}

std::string figure_csv(const SweepSpec& spec, const RABiasReport& report, std::size_t component) {
  std::ostringstream os;
  os << to_string(spec.variable) << ",method,mean_rabias,lower,upper,failures\n";
  for (const auto& c : report.cells) {
    const auto& s = c.xi.at(component);
    os << format_double(c.grid_value) << ',' << to_string(c.method) << ',' << format_double(s.mean) << ','
       << format_double(s.mean - s.sd) << ',' << format_double(s.mean + s.sd) << ',' << c.failures << '\n';
  }
  return os.str();
}

std::string figure_svg(const SweepSpec& spec, const RABiasReport& report, std::size_t component) {
  constexpr double kWidth = 640, kHeight = 420, kLeft = 70, kRight = 150, kTop = 40, kBottom = 60;
  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;

  const double x_min = *std::min_element(spec.grid.begin(), spec.grid.end());
  double x_max = *std::max_element(spec.grid.begin(), spec.grid.end());
  if (x_max == x_min) x_max = x_min + 1.0;
  double y_max = 0.0;
  for (const auto& c : report.cells) {
    const auto& s = c.xi.at(component);
    if (std::isfinite(s.mean)) y_max = std::max(y_max, s.mean + s.sd);
  }
  if (y_max <= 0.0) y_max = 1.0;
  y_max *= 1.05;

  auto sx = [&](double x) { return kLeft + (x - x_min) / (x_max - x_min) * plot_w; };
  auto sy = [&](double y) { return kTop + plot_h - std::max(0.0, y) / y_max * plot_h; };
  auto num = [](double v) {
    std::array<char, 32> buf{};
    std::snprintf(buf.data(), buf.size(), "%.2f", v);
    return std::string(buf.data());
  };
  auto tick = [](double v) {
    std::array<char, 32> buf{};
    std::snprintf(buf.data(), buf.size(), "%.3g", v);
    return std::string(buf.data());
  };

  const std::array<const char*, 3> colors{"#1f77b4", "#d62728", "#2ca02c"};
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
     << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << kLeft + plot_w / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">Estimation of xi_"
     << component + 1 << "</text>\n";
  os << "<line x1=\"" << kLeft << "\" y1=\"" << kTop + plot_h << "\" x2=\"" << kLeft + plot_w << "\" y2=\""
     << kTop + plot_h << "\" stroke=\"black\"/>\n";
  os << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft << "\" y2=\"" << kTop + plot_h
     << "\" stroke=\"black\"/>\n";
  for (double g : spec.grid) {
    os << "<text x=\"" << num(sx(g)) << "\" y=\"" << kTop + plot_h + 18 << "\" text-anchor=\"middle\">" << tick(g)
       << "</text>\n";
  }
  for (int i = 0; i <= 4; ++i) {
    const double y = y_max * i / 4.0;
    os << "<text x=\"" << kLeft - 6 << "\" y=\"" << num(sy(y) + 4) << "\" text-anchor=\"end\">" << tick(y)
       << "</text>\n";
  }
  os << "<text x=\"" << kLeft + plot_w / 2 << "\" y=\"" << kHeight - 15 << "\" text-anchor=\"middle\">"
     << (spec.variable == SweepVariable::Rho ? "error probability rho" : "sample size n") << "</text>\n";
  os << "<text x=\"18\" y=\"" << kTop + plot_h / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
     << kTop + plot_h / 2 << ")\">RABias</text>\n";

  for (std::size_t mi = 0; mi < spec.methods.size(); ++mi) {
    const char* color = colors[mi % colors.size()];
    std::vector<std::array<double, 3>> pts;  // x, mean - sd, mean + sd
    std::ostringstream mean;
    bool first = true;
    for (const auto& c : report.cells) {
      if (c.method != spec.methods[mi]) continue;
      const auto& s = c.xi.at(component);
      if (!std::isfinite(s.mean)) continue;
      pts.push_back({c.grid_value, s.mean - s.sd, s.mean + s.sd});
      mean << (first ? "" : " ") << num(sx(c.grid_value)) << ',' << num(sy(s.mean));
      first = false;
    }
    if (pts.empty()) continue;
    os << "<polygon fill=\"" << color << "\" fill-opacity=\"0.15\" stroke=\"none\" points=\"";
    for (const auto& p : pts) os << num(sx(p[0])) << ',' << num(sy(p[2])) << ' ';
    for (auto it = pts.rbegin(); it != pts.rend(); ++it) os << num(sx((*it)[0])) << ',' << num(sy((*it)[1])) << ' ';
    os << "\"/>\n";
    os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"" << mean.str() << "\"/>\n";
    const double ly = kTop + 10 + 20.0 * static_cast<double>(mi);
    os << "<line x1=\"" << kLeft + plot_w + 15 << "\" y1=\"" << ly << "\" x2=\"" << kLeft + plot_w + 40 << "\" y2=\""
       << ly << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    os << "<text x=\"" << kLeft + plot_w + 46 << "\" y=\"" << ly + 4 << "\">" << to_string(spec.methods[mi])
       << " labels</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << contents;
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

}  // namespace e2m::io
