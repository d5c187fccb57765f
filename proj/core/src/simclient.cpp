#include "arcoord/simclient.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <fstream>
#include <array>
#include <functional>
#include <map>
#include <future>
#include <memory>
#include <nlohmann/json.hpp>
#include <random>
#include <set>
#include <sstream>
#include <thread>

#include "arcoord/error.hpp"
#include "arcoord/server.hpp"

namespace arcoord::sim {

namespace {

using json = nlohmann::json;
using Clock = std::chrono::steady_clock;

constexpr double kTimeEps = 1e-9;

enum class Stream : std::uint32_t { Scene = 1, Pose = 2, Pixel = 3, Keypoints = 4 };

std::mt19937_64 stream_rng(std::uint64_t seed, Stream stream, std::uint64_t index = 0) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(index),
                    static_cast<std::uint32_t>(index >> 32)};
  return std::mt19937_64(seq);
}

Eigen::Matrix3d look_at(const Point3& eye, const Point3& target) {
  // Camera axes: x right, y down, z forward.
  const Eigen::Vector3d forward = (target - eye).normalized();
  const Eigen::Vector3d right = forward.cross(Eigen::Vector3d::UnitY()).normalized();
  const Eigen::Vector3d down = forward.cross(right);
  Eigen::Matrix3d r;
  r.col(0) = right;
  r.col(1) = down;
  r.col(2) = forward;
  return r;
}

RigidTransform interpolate(const RigidTransform& a, const RigidTransform& b, double alpha) {
  const Eigen::Quaterniond qa(a.rotation), qb(b.rotation);
  RigidTransform out;
  out.rotation = qa.slerp(alpha, qb).normalized().toRotationMatrix();
  out.translation = (1.0 - alpha) * a.translation + alpha * b.translation;
  return out;
}

Point3 vec3_from(const json& j) {
  if (!j.is_array() || j.size() != 3) throw Error(ErrorCode::InvalidArgument, "expected a 3-vector");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

RigidTransform pose_from(const json& j) {
  RigidTransform t;
  const auto& r = j.at("rotation");
  if (r.size() == 9) {
    for (int i = 0; i < 3; ++i) {
      for (int k = 0; k < 3; ++k) t.rotation(i, k) = r.at(static_cast<std::size_t>(3 * i + k)).get<double>();
    }
  } else if (r.size() == 4) {
    t.rotation = Eigen::Quaterniond(r[0].get<double>(), r[1].get<double>(), r[2].get<double>(), r[3].get<double>())
                     .normalized()
                     .toRotationMatrix();
  } else {
    throw Error(ErrorCode::InvalidArgument, "rotation needs 9 matrix entries or a (w,x,y,z) quaternion");
  }
  t.translation = vec3_from(j.at("translation"));
  if (!t.is_valid(1e-6)) throw Error(ErrorCode::InvalidArgument, "pose rotation is not a proper rotation");
  t.rotation = nearest_rotation(t.rotation);
  return t;
}

template <class T>
void read_opt(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

// ---------------------------------------------------------------------------
// Scenario

void Scenario::validate() const {
  auto fail = [](const std::string& what) { throw Error(ErrorCode::InvalidArgument, "scenario: " + what); };
  if (!(table.width > 0.0) || !(table.depth > 0.0) || !(table.height > 0.0)) fail("table dimensions must be positive");
  if (!(slam_scale > 0.0)) fail("slam_scale must be positive");
  if (noise.outlier_fraction < 0.0 || noise.outlier_fraction > 1.0) fail("outlier_fraction must be in [0, 1]");
  if (noise.pose_sigma_t < 0.0 || noise.pose_sigma_r < 0.0 || noise.point_sigma < 0.0 || noise.pixel_sigma < 0.0) {
    fail("noise sigmas must be non-negative");
  }
  if (calibration_frames < 1) fail("calibration_frames must be positive");
  if (trajectory.size() < static_cast<std::size_t>(calibration_frames)) {
    fail("trajectory is shorter than the calibration phase");
  }
  if (scene_points < 3) fail("scene_points must be at least 3");
  if (marker_keypoints < 2) fail("marker_keypoints must be at least 2");
  marker.validate();
}

RoomBox Scenario::room_box() const {
  if (room) return *room;
  const Point3 c = table.top_center();
  const Point3 half(table.width / 2 + 0.2, 0.5, table.depth / 2 + 0.2);
  return {c - half, c + half};
}

RigidTransform Scenario::slam_from_room() const {
  if (slam_origin) return invert(*slam_origin);
  return trajectory.empty() ? RigidTransform{} : invert(trajectory[0].pose);
}

Trajectory make_arc_trajectory(const TableSpec& table, const ArcSpec& arc) {
  if (arc.frames < 1 || !(arc.rate_hz > 0.0) || !(arc.radius > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "arc needs frames >= 1, positive rate and radius");
  }
  const Point3 target = table.top_center();
  Trajectory out;
  for (int k = 0; k < arc.frames; ++k) {
    const double phase = 2.0 * kPi * k / std::max(arc.frames, 2);
    const double bearing = deg_to_rad(arc.bearing_deg + 0.5 * arc.sweep_deg * std::sin(phase));
    const double lift = 0.05 * std::sin(2.0 * phase);
    const Point3 eye = target + Point3(arc.radius * std::cos(bearing), arc.camera_height + lift,
                                       -arc.radius * std::sin(bearing));
    out.push_back(k / arc.rate_hz, {look_at(eye, target), eye});
  }
  return out;
}

Scenario default_scenario(std::uint64_t seed) {
  Scenario s;
  s.rng_seed = seed;
  s.trajectory = make_arc_trajectory(s.table, ArcSpec{});
  return s;
}

Scenario scenario_from_json(const std::string& text) {
  try {
    const json j = json::parse(text);
    Scenario s;
    read_opt(j, "seed", s.rng_seed);
    read_opt(j, "slam_scale", s.slam_scale);
    read_opt(j, "scene_points", s.scene_points);
    read_opt(j, "calibration_frames", s.calibration_frames);
    read_opt(j, "marker_keypoints", s.marker_keypoints);

    if (j.contains("table")) {
      const auto& t = j.at("table");
      if (t.contains("center")) s.table.center = vec3_from(t.at("center"));
      read_opt(t, "width", s.table.width);
      read_opt(t, "depth", s.table.depth);
      read_opt(t, "height", s.table.height);
    }
    if (j.contains("room")) s.room = RoomBox{vec3_from(j.at("room").at("min")), vec3_from(j.at("room").at("max"))};
    if (j.contains("marker")) {
      const auto& m = j.at("marker");
      read_opt(m, "width_pixels", s.marker.width_pixels);
      read_opt(m, "height_pixels", s.marker.height_pixels);
      read_opt(m, "width_meters", s.marker.width_meters);
      read_opt(m, "height_meters", s.marker.height_meters);
    }
    if (j.contains("noise")) {
      const auto& n = j.at("noise");
      read_opt(n, "pose_sigma_t", s.noise.pose_sigma_t);
      read_opt(n, "pose_sigma_r", s.noise.pose_sigma_r);
      read_opt(n, "point_sigma", s.noise.point_sigma);
      read_opt(n, "outlier_fraction", s.noise.outlier_fraction);
      read_opt(n, "pixel_sigma", s.noise.pixel_sigma);
    }
    if (j.contains("ransac")) {
      const auto& r = j.at("ransac");
      read_opt(r, "iterations", s.ransac.iterations);
      read_opt(r, "inlier_threshold", s.ransac.inlier_threshold);
      read_opt(r, "min_inliers", s.ransac.min_inliers);
    }
    s.ransac.seed = s.rng_seed;
    if (j.contains("slam_origin")) s.slam_origin = pose_from(j.at("slam_origin"));

    const json traj = j.contains("trajectory") ? j.at("trajectory") : json::object();
    if (traj.contains("poses")) {
      for (const auto& p : traj.at("poses")) s.trajectory.push_back(p.at("time").get<double>(), pose_from(p));
    } else {
      ArcSpec arc;
      read_opt(traj, "radius", arc.radius);
      read_opt(traj, "camera_height", arc.camera_height);
      read_opt(traj, "bearing", arc.bearing_deg);
      read_opt(traj, "sweep", arc.sweep_deg);
      read_opt(traj, "frames", arc.frames);
      read_opt(traj, "rate_hz", arc.rate_hz);
      s.trajectory = make_arc_trajectory(s.table, arc);
    }
    s.validate();
    return s;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidArgument, std::string("scenario: ") + e.what());
  }
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open scenario " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return scenario_from_json(ss.str());
}

// ---------------------------------------------------------------------------
// Scene and frames

std::vector<Point3> generate_scene(const Scenario& scenario) {
  scenario.validate();
  auto rng = stream_rng(scenario.rng_seed, Stream::Scene);
  const auto n = static_cast<std::size_t>(scenario.scene_points);
  const auto outliers = static_cast<std::size_t>(std::llround(n * scenario.noise.outlier_fraction));
  const std::size_t on_table = n - outliers;

  const TableSpec& t = scenario.table;
  std::uniform_real_distribution<double> ux(-t.width / 2, t.width / 2);
  std::uniform_real_distribution<double> uz(-t.depth / 2, t.depth / 2);
  std::normal_distribution<double> noise(0.0, 1.0);

  std::vector<Point3> points;
  points.reserve(n);
  const Point3 top = t.top_center();
  for (std::size_t i = 0; i < on_table; ++i) {
    const double x = ux(rng);
    const double z = uz(rng);
    const double dy = scenario.noise.point_sigma > 0.0 ? scenario.noise.point_sigma * noise(rng) : 0.0;
    points.emplace_back(top.x() + x, top.y() + dy, top.z() + z);
  }
  const RoomBox box = scenario.room_box();
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  for (std::size_t i = 0; i < outliers; ++i) {
    const Point3 a(u01(rng), u01(rng), u01(rng));
    points.push_back(box.min + a.cwiseProduct(box.max - box.min));
  }
  return points;
}

std::vector<Vec2> marker_keypoints(const Scenario& scenario) {
  // Corner-like features on a jittered grid: one per cell, kept to the
  // central half of the cell so neighbours stay apart.
  auto rng = stream_rng(scenario.rng_seed, Stream::Keypoints);
  std::uniform_real_distribution<double> jitter(0.25, 0.75);
  const int n = scenario.marker_keypoints;
  const double aspect = scenario.marker.width_pixels / scenario.marker.height_pixels;
  const int cols = std::max(1, static_cast<int>(std::ceil(std::sqrt(n * aspect))));
  const int rows = (n + cols - 1) / cols;
  const double cw = scenario.marker.width_pixels / cols;
  const double ch = scenario.marker.height_pixels / rows;
  std::vector<Vec2> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const int r = i / cols, c = i % cols;
    out.emplace_back((c + jitter(rng)) * cw, (r + jitter(rng)) * ch);
  }
  return out;
}

Point3 marker_pixel_to_room(const Scenario& scenario, const Vec2& pixel) {
  const MarkerSpec& m = scenario.marker;
  const double mx = m.width_meters / m.width_pixels;
  const double mz = m.height_meters / m.height_pixels;
  const Point3 top = scenario.table.top_center();
  return {top.x() + (pixel.x() - m.width_pixels / 2) * mx, top.y(), top.z() + (pixel.y() - m.height_pixels / 2) * mz};
}

SimFrame simulate_slam_frame(const Scenario& scenario, double t) {
  const Trajectory& traj = scenario.trajectory;
  if (traj.empty() || t < traj[0].timestamp - kTimeEps || t > traj[traj.size() - 1].timestamp + kTimeEps) {
    throw Error(ErrorCode::OutOfRange, "time " + std::to_string(t) + " outside the trajectory");
  }

  auto upper = std::lower_bound(traj.begin(), traj.end(), t - kTimeEps,
                                [](const TrajectorySample& s, double v) { return s.timestamp < v; });
  SimFrame frame;
  std::size_t k = static_cast<std::size_t>(upper - traj.begin());
  if (std::abs(upper->timestamp - t) <= kTimeEps) {
    frame.ground_truth_pose = upper->pose;
  } else {
    k -= 1;
    const auto& a = traj[k];
    const auto& b = traj[k + 1];
    frame.ground_truth_pose = interpolate(a.pose, b.pose, (t - a.timestamp) / (b.timestamp - a.timestamp));
  }
  frame.frame_index = k;

  const RigidTransform slam_from_room = scenario.slam_from_room();
  const double shrink = 1.0 / scenario.slam_scale;

  // Pose noise is drawn per frame in metric units, then the whole pose is
  // shrunk by the scale ambiguity.
  RigidTransform noisy = frame.ground_truth_pose;
  const NoiseSpec& nz = scenario.noise;
  if (nz.pose_sigma_t > 0.0 || nz.pose_sigma_r > 0.0) {
    auto rng = stream_rng(scenario.rng_seed, Stream::Pose, std::hash<double>{}(t));
    std::normal_distribution<double> g(0.0, 1.0);
    const Eigen::Vector3d dt(g(rng), g(rng), g(rng));
    const Eigen::Vector3d dr(g(rng), g(rng), g(rng));
    noisy.translation += nz.pose_sigma_t * dt;
    const Eigen::Vector3d rotvec = deg_to_rad(nz.pose_sigma_r) * dr;
    if (rotvec.norm() > 0.0) {
      noisy.rotation = noisy.rotation * Eigen::AngleAxisd(rotvec.norm(), rotvec.normalized()).toRotationMatrix();
    }
  }
  frame.slam_pose = compose(slam_from_room, noisy);
  frame.slam_pose.translation *= shrink;

  // Calibration frames each observe a slice of the scene.
  const auto calib = static_cast<std::size_t>(scenario.calibration_frames);
  const std::vector<Point3> scene = generate_scene(scenario);
  for (std::size_t i = k % calib; i < scene.size(); i += calib) {
    frame.map_points.push_back(transform_point(slam_from_room, scene[i]) * shrink);
  }

  if (k < calib) {
    auto rng = stream_rng(scenario.rng_seed, Stream::Pixel, k);
    std::normal_distribution<double> g(0.0, 1.0);
    const double sigma = nz.pixel_sigma;
    for (const Vec2& px : marker_keypoints(scenario)) {
      Correspondence c;
      const Vec2 err = sigma > 0.0 ? Vec2(sigma * g(rng), sigma * g(rng)) : Vec2::Zero();
      c.marker_pixel = px + err;
      c.map_point = transform_point(slam_from_room, marker_pixel_to_room(scenario, px)) * shrink;
      // Ground-truth match quality: 1 for a perfect match, falling with the
      // keypoint displacement.
      c.similarity = sigma > 0.0 ? std::exp(-err.squaredNorm() / (2.0 * sigma * sigma)) : 1.0;
      frame.marker_correspondences.push_back(c);
    }
  }
  return frame;
}

// ---------------------------------------------------------------------------
// Client pipeline

LocalSetup prepare_local(const Scenario& scenario) {
  scenario.validate();
  LocalSetup setup;

  std::vector<Correspondence> matches;
  std::vector<Point3> raw_points;
  RigidTransform last_pose;
  for (int k = 0; k < scenario.calibration_frames; ++k) {
    SimFrame f = simulate_slam_frame(scenario, scenario.trajectory[static_cast<std::size_t>(k)].timestamp);
    matches.insert(matches.end(), f.marker_correspondences.begin(), f.marker_correspondences.end());
    raw_points.insert(raw_points.end(), f.map_points.begin(), f.map_points.end());
    last_pose = f.slam_pose;
  }

  // A map point is matched to the marker once: keep its best observation.
  std::map<std::array<double, 3>, Correspondence> best;
  for (const auto& m : matches) {
    auto [it, inserted] = best.try_emplace({m.map_point.x(), m.map_point.y(), m.map_point.z()}, m);
    if (!inserted && m.similarity > it->second.similarity) it->second = m;
  }
  matches.clear();
  for (const auto& [key, m] : best) matches.push_back(m);

  try {
    setup.calibration = calibrate_scale(scenario.marker, matches);
  } catch (const Error& e) {
    throw Error(ErrorCode::CalibrationFailed, e.what());
  }
  const double scale = setup.calibration.scale;

  setup.metric_points.reserve(raw_points.size());
  for (const auto& p : raw_points) setup.metric_points.push_back(apply_scale(scale, p));
  const Point3 camera = apply_scale(scale, last_pose).translation;

  try {
    setup.ransac = ransac_plane(setup.metric_points, scenario.ransac);
    for (std::size_t i : setup.ransac.inliers) setup.inliers.push_back(setup.metric_points[i]);
    setup.refined = refine_plane_lsq(setup.inliers);
    setup.plane = build_plane_frame(setup.refined, camera);
  } catch (const Error& e) {
    throw Error(ErrorCode::PlaneFitFailed, e.what());
  }
  return setup;
}

namespace {

class ClientRun {
 public:
  ClientRun(const Scenario& scenario, const net::Endpoint& server, SessionMode mode, const ClientOptions& options)
      : scenario_(scenario), mode_(mode), options_(options), setup_(prepare_local(scenario)),
        conn_(net::connect_tcp(server)) {
    report_.mode = mode;
    report_.scale = setup_.calibration.scale;
    report_.true_scale = scenario.slam_scale;
    report_.plane = setup_.plane;
  }

  ClientReport run() {
    conn_.send(protocol::Register{mode_});
    pump_until([&] { return user_id_.has_value(); }, "WELCOME");
    if (options_.on_welcome) options_.on_welcome(*user_id_);
    pump_until([&] { return static_cast<int>(members_.size()) >= options_.expected_users; }, "session members");
    reseat();
    seated_ = true;
    pump_until([&] { return intersection_seen_; }, "INTERSECTION");

    std::size_t frames = scenario_.trajectory.size();
    if (options_.max_frames > 0) frames = std::min(frames, options_.max_frames);
    const auto start = Clock::now();

    for (std::size_t k = 0; k < frames; ++k) {
      if (!options_.lockstep) {
        const auto tick = start + std::chrono::duration_cast<Clock::duration>(
                                      std::chrono::duration<double>(static_cast<double>(k) / options_.rate_hz));
        pump_for(tick);
      }
      step(k);
      if (options_.lockstep) {
        const std::uint64_t seq = k + 1;
        pump_until([&] { return peers_caught_up(seq); }, "peer frame " + std::to_string(seq));
      }
    }
    streaming_done_ = true;
    if (!options_.lockstep) pump_for(Clock::now() + options_.linger);

    report_.user_id = *user_id_;
    report_.total_users = static_cast<int>(members_.size());
    conn_.close();
    return std::move(report_);
  }

 private:
  void step(std::size_t k) {
    const TrajectorySample& sample = scenario_.trajectory[k];
    const SimFrame f = simulate_slam_frame(scenario_, sample.timestamp);
    const RigidTransform metric = apply_scale(report_.scale, f.slam_pose);
    const RigidTransform rel = camera_in_plane(effective_, metric);

    report_.ground_truth.push_back(sample.timestamp, f.ground_truth_pose);
    report_.slam_raw.push_back(sample.timestamp, f.slam_pose);
    report_.slam_metric.push_back(sample.timestamp, metric);
    report_.relative.push_back(sample.timestamp, rel);

    conn_.send(protocol::PoseUpdate{*user_id_, k + 1, protocol::to_wire(rel)});
  }

  bool peers_caught_up(std::uint64_t seq) const {
    for (int id : members_) {
      if (id == *user_id_) continue;
      auto it = peer_seq_.find(id);
      if (it == peer_seq_.end() || it->second < seq) return false;
    }
    return true;
  }

  // Seat follows the membership rank; Collaboration mode rotates the plane.
  void reseat() {
    const UserSlot slot = slot_from_membership(*user_id_, members_);
    const RigidTransform effective = effective_plane_pose(setup_.plane.pose, mode_, slot);
    if (seated_ && effective == effective_) return;
    effective_ = effective;
    report_.effective_plane = effective;
    report_.boundary = plane_boundary(PlaneFrame{effective}, setup_.inliers);
    conn_.send(protocol::PlaneBoundary{*user_id_, report_.boundary.vertices()});
  }

  double frame_time(std::uint64_t seq) const {
    const std::size_t index = static_cast<std::size_t>(seq - 1);
    if (index < scenario_.trajectory.size()) return scenario_.trajectory[index].timestamp;
    return static_cast<double>(index) / options_.rate_hz;
  }

  void handle(const protocol::WireMessage& msg) {
    if (const auto* w = std::get_if<protocol::Welcome>(&msg)) {
      user_id_ = w->user_id;
    } else if (const auto* m = std::get_if<protocol::Membership>(&msg)) {
      members_ = m->user_ids;
      if (seated_ && !streaming_done_ && user_id_) reseat();
    } else if (const auto* p = std::get_if<protocol::PeerPose>(&msg)) {
      peer_seq_[p->user_id] = p->seq;
      const RigidTransform rel = protocol::from_wire(p->pose);
      const double t = frame_time(p->seq);
      auto& avatars = report_.peers[p->user_id];
      if (!avatars.empty() && !(t > avatars.samples().back().timestamp)) return;
      avatars.push_back(t, peer_in_local_slam(effective_, rel));
      report_.peer_relative[p->user_id].push_back(t, rel);
    } else if (const auto* i = std::get_if<protocol::Intersection>(&msg)) {
      report_.intersection = Polygon2(i->vertices);
      intersection_seen_ = true;
    } else if (const auto* e = std::get_if<protocol::ErrorReply>(&msg)) {
      if (e->code == "ModeMismatch") throw Error(ErrorCode::ModeMismatch, e->text);
      throw Error(ErrorCode::ConnectionFailed, "server error " + e->code + ": " + e->text);
    }
  }

  // Returns false on timeout.
  bool receive_one(Clock::time_point deadline) {
    const auto remaining = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - Clock::now());
    try {
      auto msg = conn_.receive(std::max(remaining, std::chrono::milliseconds(0)));
      if (!msg) return false;
      handle(*msg);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NonMonotonicSeq) throw;
    }
    return true;
  }

  void pump_until(const std::function<bool()>& done, const std::string& what) {
    const auto deadline = Clock::now() + options_.timeout;
    while (!done()) {
      if (!receive_one(deadline) && Clock::now() >= deadline) {
        throw Error(ErrorCode::ConnectionFailed, "timed out waiting for " + what);
      }
    }
  }

  void pump_for(Clock::time_point until) {
    while (Clock::now() < until) receive_one(until);
  }

  const Scenario& scenario_;
  SessionMode mode_;
  ClientOptions options_;
  LocalSetup setup_;
  net::MessageConnection conn_;
  ClientReport report_;

  std::optional<int> user_id_;
  std::vector<int> members_;
  std::map<int, std::uint64_t> peer_seq_;
  RigidTransform effective_;
  bool seated_ = false;
  bool intersection_seen_ = false;
  bool streaming_done_ = false;
};

}  // namespace

ClientReport run_client(const Scenario& scenario, const net::Endpoint& server, SessionMode mode,
                        const ClientOptions& options) {
  ClientRun run(scenario, server, mode, options);
  return run.run();
}

std::vector<ClientReport> run_session(const SessionConfig& config) {
  if (config.scenarios.empty()) throw Error(ErrorCode::InvalidArgument, "session needs at least one scenario");

  std::unique_ptr<CoordinationServer> local_server;
  net::Endpoint endpoint;
  if (config.server) {
    endpoint = *config.server;
  } else {
    local_server = std::make_unique<CoordinationServer>(ServerOptions{{"127.0.0.1", 0}, config.mode, 64, nullptr});
    endpoint = {"127.0.0.1", local_server->start()};
  }

  ClientOptions options = config.options;
  options.expected_users = std::max(options.expected_users, static_cast<int>(config.scenarios.size()));

  const std::size_t n = config.scenarios.size();
  std::vector<std::optional<ClientReport>> reports(n);
  std::vector<std::exception_ptr> errors(n);
  std::vector<std::thread> threads;
  // Clients register one after another so user ids follow scenario order.
  for (std::size_t i = 0; i < n; ++i) {
    auto registered = std::make_shared<std::promise<void>>();
    std::future<void> ready = registered->get_future();
    ClientOptions client_options = options;
    client_options.on_welcome = [registered](int) { registered->set_value(); };
    threads.emplace_back([&, i, client_options, registered] {
      try {
        reports[i] = run_client(config.scenarios[i], endpoint, config.mode, client_options);
      } catch (...) {
        errors[i] = std::current_exception();
        try {
          registered->set_value();
        } catch (const std::future_error&) {
        }
      }
    });
    ready.wait();
  }
  for (auto& t : threads) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  std::vector<ClientReport> out;
  for (auto& r : reports) out.push_back(std::move(*r));
  std::sort(out.begin(), out.end(), [](const ClientReport& a, const ClientReport& b) { return a.user_id < b.user_id; });
  return out;
}

}  // namespace arcoord::sim
