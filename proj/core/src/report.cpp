#include "arcoord/report.hpp"

#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "arcoord/error.hpp"

namespace arcoord {

namespace {

using json = nlohmann::ordered_json;

// Rotation stored row-major as nine numbers so files round-trip exactly.
json pose_json(const RigidTransform& t) {
  json r = json::array();
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) r.push_back(t.rotation(i, j));
  }
  return json{{"rotation", r}, {"translation", {t.translation.x(), t.translation.y(), t.translation.z()}}};
}

RigidTransform pose_from(const json& j) {
  const auto& r = j.at("rotation");
  const auto& t = j.at("translation");
  if (r.size() != 9 || t.size() != 3) throw Error(ErrorCode::InvalidArgument, "pose needs 9 rotation and 3 translation values");
  RigidTransform out;
  for (int i = 0; i < 3; ++i) {
    for (int k = 0; k < 3; ++k) out.rotation(i, k) = r.at(static_cast<std::size_t>(3 * i + k)).get<double>();
  }
  out.translation = {t[0].get<double>(), t[1].get<double>(), t[2].get<double>()};
  return out;
}

json polygon_json(const Polygon2& p) {
  json arr = json::array();
  for (const auto& v : p.vertices()) arr.push_back({v.x(), v.y()});
  return arr;
}

Polygon2 polygon_from(const json& j) {
  std::vector<Vec2> vs;
  for (const auto& v : j) vs.emplace_back(v.at(0).get<double>(), v.at(1).get<double>());
  return Polygon2(std::move(vs));
}

json trajectory_json(const Trajectory& tr) {
  json arr = json::array();
  for (const auto& s : tr) {
    json item = pose_json(s.pose);
    json entry{{"time", s.timestamp}};
    entry.update(item);
    arr.push_back(std::move(entry));
  }
  return arr;
}

Trajectory trajectory_from(const json& j) {
  Trajectory tr;
  for (const auto& s : j) tr.push_back(s.at("time").get<double>(), pose_from(s));
  return tr;
}

json trajectory_map_json(const std::map<int, Trajectory>& m) {
  json obj = json::object();
  for (const auto& [id, tr] : m) obj[std::to_string(id)] = trajectory_json(tr);
  return obj;
}

std::map<int, Trajectory> trajectory_map_from(const json& j) {
  std::map<int, Trajectory> out;
  for (const auto& [key, value] : j.items()) out[std::stoi(key)] = trajectory_from(value);
  return out;
}

}  // namespace

std::string report_to_json(const ClientReport& r) {
  json j;
  j["user_id"] = r.user_id;
  j["total_users"] = r.total_users;
  j["mode"] = std::string(to_string(r.mode));
  j["scale"] = r.scale;
  j["true_scale"] = r.true_scale;
  j["plane_pose"] = pose_json(r.plane.pose);
  j["effective_plane_pose"] = pose_json(r.effective_plane);
  j["boundary"] = polygon_json(r.boundary);
  j["intersection"] = polygon_json(r.intersection);
  j["ground_truth"] = trajectory_json(r.ground_truth);
  j["slam_raw"] = trajectory_json(r.slam_raw);
  j["slam_metric"] = trajectory_json(r.slam_metric);
  j["relative"] = trajectory_json(r.relative);
  j["peers"] = trajectory_map_json(r.peers);
  j["peer_relative"] = trajectory_map_json(r.peer_relative);
  return j.dump(1);
}

ClientReport report_from_json(const std::string& text) {
  try {
    const json j = json::parse(text);
    ClientReport r;
    r.user_id = j.at("user_id").get<int>();
    r.total_users = j.at("total_users").get<int>();
    auto mode = parse_session_mode(j.at("mode").get<std::string>());
    if (!mode) throw Error(ErrorCode::InvalidArgument, "unknown mode in report");
    r.mode = *mode;
    r.scale = j.at("scale").get<double>();
    r.true_scale = j.at("true_scale").get<double>();
    r.plane.pose = pose_from(j.at("plane_pose"));
    r.effective_plane = pose_from(j.at("effective_plane_pose"));
    r.boundary = polygon_from(j.at("boundary"));
    r.intersection = polygon_from(j.at("intersection"));
    r.ground_truth = trajectory_from(j.at("ground_truth"));
    r.slam_raw = trajectory_from(j.at("slam_raw"));
    r.slam_metric = trajectory_from(j.at("slam_metric"));
    r.relative = trajectory_from(j.at("relative"));
    r.peers = trajectory_map_from(j.at("peers"));
    r.peer_relative = trajectory_map_from(j.at("peer_relative"));
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidArgument, std::string("bad report: ") + e.what());
  }
}

void write_report(const std::filesystem::path& path, const ClientReport& report) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::Io, "cannot write report " + path.string());
  out << report_to_json(report) << '\n';
}

ClientReport read_report(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open report " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return report_from_json(ss.str());
}

}  // namespace arcoord
