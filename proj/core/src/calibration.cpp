#include "arcoord/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>

#include "arcoord/error.hpp"

namespace arcoord {

namespace {

constexpr double kMapPointEps = 1e-12;

bool pixel_less(const Vec2& a, const Vec2& b) { return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y()); }

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

}  // namespace

void MarkerSpec::validate() const {
  for (double v : {width_pixels, height_pixels, width_meters, height_meters}) {
    if (!std::isfinite(v) || v <= 0.0) throw Error(ErrorCode::InvalidArgument, "marker dimensions must be positive");
  }
}

std::optional<std::string> anisotropy_warning(const MarkerSpec& marker) {
  const double mx = marker.width_meters / marker.width_pixels;
  const double my = marker.height_meters / marker.height_pixels;
  if (std::abs(mx - my) > 0.01 * std::max(mx, my)) {
    return "marker meters-per-pixel differs between width (" + std::to_string(mx) + ") and height (" +
           std::to_string(my) + "); using width";
  }
  return std::nullopt;
}

MarkerSpec load_marker_spec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open marker spec " + path.string());

  std::map<std::string, double> values;
  std::string line;
  while (std::getline(in, line)) {
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      if (!trim(line).empty()) throw Error(ErrorCode::Io, "marker spec line without '=': " + line);
      continue;
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    try {
      values[key] = std::stod(value);
    } catch (const std::exception&) {
      throw Error(ErrorCode::Io, "marker spec value for '" + key + "' is not a number");
    }
  }

  auto get = [&](const char* key) {
    auto it = values.find(key);
    if (it == values.end()) throw Error(ErrorCode::Io, std::string("marker spec missing ") + key);
    return it->second;
  };
  MarkerSpec m{get("width_pixels"), get("height_pixels"), get("width_meters"), get("height_meters")};
  m.validate();
  return m;
}

std::pair<Correspondence, Correspondence> select_top_pair(std::span<const Correspondence> matches) {
  if (matches.size() < 2) throw Error(ErrorCode::TooFewMatches, "need at least two correspondences");

  std::vector<Correspondence> ranked(matches.begin(), matches.end());
  std::stable_sort(ranked.begin(), ranked.end(), [](const Correspondence& a, const Correspondence& b) {
    if (a.similarity != b.similarity) return a.similarity > b.similarity;
    return pixel_less(a.marker_pixel, b.marker_pixel);
  });

  const Correspondence& best = ranked.front();
  for (std::size_t i = 1; i < ranked.size(); ++i) {
    if (ranked[i].marker_pixel != best.marker_pixel) return {best, ranked[i]};
  }
  throw Error(ErrorCode::CoincidentPoints, "all correspondences share one marker pixel");
}

double physical_distance(const MarkerSpec& marker, const Vec2& p1, const Vec2& p2) {
  marker.validate();
  if (p1 == p2) throw Error(ErrorCode::CoincidentPoints, "marker pixels coincide");
  return marker.width_meters / marker.width_pixels * (p1 - p2).norm();
}

double scale_factor(double physical_distance, const Point3& p1, const Point3& p2) {
  const double slam_distance = (p1 - p2).norm();
  if (!(slam_distance > kMapPointEps)) throw Error(ErrorCode::DegenerateMapPoints, "map points coincide");
  return physical_distance / slam_distance;
}

RigidTransform apply_scale(double s, const RigidTransform& t) {
  if (!(s > 0.0)) throw Error(ErrorCode::NonPositiveScale, "scale must be positive");
  RigidTransform out = t;
  out.translation *= s;
  return out;
}

Point3 apply_scale(double s, const Point3& p) {
  if (!(s > 0.0)) throw Error(ErrorCode::NonPositiveScale, "scale must be positive");
  return p * s;
}

ScaleCalibration calibrate_scale(const MarkerSpec& marker, std::span<const Correspondence> matches) {
  auto [first, second] = select_top_pair(matches);
  ScaleCalibration out;
  out.physical_distance = physical_distance(marker, first.marker_pixel, second.marker_pixel);
  out.scale = scale_factor(out.physical_distance, first.map_point, second.map_point);
  out.first = first;
  out.second = second;
  return out;
}

}  // namespace arcoord
