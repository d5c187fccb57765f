#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "arcoord/report.hpp"
#include "arcoord/trajectory.hpp"

namespace arcoord {

/// Five-number error summary in the units of the input samples.
struct ErrorSummary {
  double rmse = 0.0;
  double mean = 0.0;
  double median = 0.0;  // lower middle for even counts
  double max = 0.0;
  double sd = 0.0;      // population standard deviation
};

struct RpeErrors {
  std::vector<double> translational;  // meters
  std::vector<double> rotational;     // degrees
};

inline constexpr double kTimestampTolerance = 1e-3;

/// Relative pose error over a fixed frame step:
///   E_k = (ref_k^-1 ref_{k+delta})^-1 (est_k^-1 est_{k+delta})
/// Samples are paired by timestamp (within 1 ms); unmatched samples are
/// skipped. Throws EmptyOverlap or DeltaTooLarge.
RpeErrors rpe(const Trajectory& estimate, const Trajectory& reference, std::size_t delta = 1);

/// Throws EmptyInput for an empty list, InvalidArgument for negative or
/// non-finite samples.
ErrorSummary summarize(std::span<const double> errors);

struct MetricSummary {
  std::string metric;
  ErrorSummary summary;
};

/// Per-session metrics over client reports: each client's own trajectory
/// before and after scale calibration, and every recovered peer avatar
/// against that peer's ground truth.
std::vector<MetricSummary> evaluate_reports(std::span<const ClientReport> reports, std::size_t delta = 1);

/// `metric,statistic,value` rows; statistics are RMSE, Mean, Median, Max, S.D.
void write_summary_csv(const std::filesystem::path& path, std::span<const MetricSummary> rows);

/// Trajectory CSVs per client plus a gnuplot script plotting them.
void write_plots(const std::filesystem::path& out_dir, std::span<const ClientReport> reports);

}  // namespace arcoord
