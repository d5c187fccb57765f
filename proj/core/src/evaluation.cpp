#include "arcoord/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <numeric>

#include "arcoord/error.hpp"

namespace arcoord {

namespace {

struct Pair {
  const RigidTransform* est;
  const RigidTransform* ref;
};

std::vector<Pair> associate(const Trajectory& estimate, const Trajectory& reference) {
  std::vector<Pair> pairs;
  const auto& ref = reference.samples();
  std::size_t j = 0;
  for (const auto& e : estimate) {
    while (j < ref.size() && ref[j].timestamp < e.timestamp - kTimestampTolerance) ++j;
    if (j == ref.size()) break;
    // Nearest of the candidates that fall within tolerance.
    std::size_t best = j;
    if (j + 1 < ref.size() && std::abs(ref[j + 1].timestamp - e.timestamp) < std::abs(ref[j].timestamp - e.timestamp)) {
      best = j + 1;
    }
    if (std::abs(ref[best].timestamp - e.timestamp) <= kTimestampTolerance) {
      pairs.push_back({&e.pose, &ref[best].pose});
      j = best + 1;
    }
  }
  return pairs;
}

void append(std::vector<double>& dst, const std::vector<double>& src) { dst.insert(dst.end(), src.begin(), src.end()); }

const ClientReport* find_user(std::span<const ClientReport> reports, int user_id) {
  for (const auto& r : reports) {
    if (r.user_id == user_id) return &r;
  }
  return nullptr;
}

}  // namespace

RpeErrors rpe(const Trajectory& estimate, const Trajectory& reference, std::size_t delta) {
  if (delta == 0) throw Error(ErrorCode::InvalidArgument, "RPE delta must be at least one frame");
  const std::vector<Pair> pairs = associate(estimate, reference);
  if (pairs.empty()) throw Error(ErrorCode::EmptyOverlap, "no time-aligned samples");
  if (pairs.size() <= delta) {
    throw Error(ErrorCode::DeltaTooLarge,
                "delta " + std::to_string(delta) + " needs more than " + std::to_string(pairs.size()) + " samples");
  }

  RpeErrors out;
  out.translational.reserve(pairs.size() - delta);
  out.rotational.reserve(pairs.size() - delta);
  for (std::size_t k = 0; k + delta < pairs.size(); ++k) {
    const RigidTransform ref_motion = compose(invert(*pairs[k].ref), *pairs[k + delta].ref);
    const RigidTransform est_motion = compose(invert(*pairs[k].est), *pairs[k + delta].est);
    const RigidTransform err = compose(invert(ref_motion), est_motion);
    out.translational.push_back(err.translation.norm());
    out.rotational.push_back(rotation_angle_between(RigidTransform::identity(), err));
  }
  return out;
}

ErrorSummary summarize(std::span<const double> errors) {
  if (errors.empty()) throw Error(ErrorCode::EmptyInput, "no error samples");
  for (double e : errors) {
    if (!std::isfinite(e) || e < 0.0) throw Error(ErrorCode::InvalidArgument, "error samples must be finite and >= 0");
  }
  const double n = static_cast<double>(errors.size());
  ErrorSummary s;
  double sum = 0.0, sum_sq = 0.0;
  for (double e : errors) {
    sum += e;
    sum_sq += e * e;
  }
  s.mean = sum / n;
  s.rmse = std::sqrt(sum_sq / n);
  s.max = *std::max_element(errors.begin(), errors.end());

  std::vector<double> sorted(errors.begin(), errors.end());
  std::sort(sorted.begin(), sorted.end());
  s.median = sorted[(sorted.size() - 1) / 2];

  double var = 0.0;
  for (double e : errors) var += (e - s.mean) * (e - s.mean);
  s.sd = std::sqrt(var / n);
  return s;
}

std::vector<MetricSummary> evaluate_reports(std::span<const ClientReport> reports, std::size_t delta) {
  std::vector<double> t_before, t_after, r_before, r_after, avatar_t, avatar_r;
  for (const auto& r : reports) {
    const RpeErrors before = rpe(r.slam_raw, r.ground_truth, delta);
    const RpeErrors after = rpe(r.slam_metric, r.ground_truth, delta);
    append(t_before, before.translational);
    append(r_before, before.rotational);
    append(t_after, after.translational);
    append(r_after, after.rotational);

    for (const auto& [peer_id, avatar] : r.peers) {
      const ClientReport* peer = find_user(reports, peer_id);
      if (!peer || avatar.size() <= delta) continue;
      const RpeErrors e = rpe(avatar, peer->ground_truth, delta);
      append(avatar_t, e.translational);
      append(avatar_r, e.rotational);
    }
  }

  std::vector<MetricSummary> rows;
  auto add = [&](const char* name, const std::vector<double>& v) {
    if (!v.empty()) rows.push_back({name, summarize(v)});
  };
  add("translational_before_scaling_m", t_before);
  add("translational_after_scaling_m", t_after);
  add("rotational_before_scaling_deg", r_before);
  add("rotational_after_scaling_deg", r_after);
  add("avatar_translational_m", avatar_t);
  add("avatar_rotational_deg", avatar_r);
  return rows;
}

void write_summary_csv(const std::filesystem::path& path, std::span<const MetricSummary> rows) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  out << "metric,statistic,value\n" << std::setprecision(10);
  for (const auto& r : rows) {
    out << r.metric << ",RMSE," << r.summary.rmse << '\n';
    out << r.metric << ",Mean," << r.summary.mean << '\n';
    out << r.metric << ",Median," << r.summary.median << '\n';
    out << r.metric << ",Max," << r.summary.max << '\n';
    out << r.metric << ",S.D.," << r.summary.sd << '\n';
  }
}

void write_plots(const std::filesystem::path& out_dir, std::span<const ClientReport> reports) {
  std::filesystem::create_directories(out_dir);
  std::ofstream gp(out_dir / "plot.gp");
  if (!gp) throw Error(ErrorCode::Io, "cannot write plot script in " + out_dir.string());
  gp << "set datafile separator ','\n"
     << "set terminal pngcairo size 1000,800\n"
     << "set xlabel 'x [m]'\nset ylabel 'z [m]'\nset size ratio -1\n";

  for (const auto& r : reports) {
    const std::string stem = "user" + std::to_string(r.user_id);
    std::ofstream csv(out_dir / (stem + "_trajectory.csv"));
    if (!csv) throw Error(ErrorCode::Io, "cannot write trajectory csv in " + out_dir.string());
    csv << "time,gt_x,gt_y,gt_z,raw_x,raw_y,raw_z,metric_x,metric_y,metric_z\n" << std::setprecision(10);
    // The SLAM frame is anchored at the first camera pose; re-anchor ground
    // truth the same way so the curves overlay.
    const RigidTransform anchor = r.ground_truth.empty() ? RigidTransform{} : invert(r.ground_truth[0].pose);
    const std::size_t n = std::min({r.ground_truth.size(), r.slam_raw.size(), r.slam_metric.size()});
    for (std::size_t i = 0; i < n; ++i) {
      const Point3 g = compose(anchor, r.ground_truth[i].pose).translation;
      const Point3& raw = r.slam_raw[i].pose.translation;
      const Point3& met = r.slam_metric[i].pose.translation;
      csv << r.ground_truth[i].timestamp << ',' << g.x() << ',' << g.y() << ',' << g.z() << ',' << raw.x() << ','
          << raw.y() << ',' << raw.z() << ',' << met.x() << ',' << met.y() << ',' << met.z() << '\n';
    }
    gp << "set output '" << stem << "_trajectory.png'\n"
       << "set title 'user " << r.user_id << " trajectory before and after scaling'\n"
       << "plot '" << stem << "_trajectory.csv' every ::1 using 2:4 with lines title 'ground truth', \\\n"
       << "     '' every ::1 using 5:7 with lines title 'before scaling', \\\n"
       << "     '' every ::1 using 8:10 with lines title 'after scaling'\n";
  }
}

}  // namespace arcoord
