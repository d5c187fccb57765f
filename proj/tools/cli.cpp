#include "cli.hpp"

#include <algorithm>
#include <CLI11.hpp>
#include <atomic>
#include <chrono>
#include <csignal>
#include <cstdlib>
#include <filesystem>
#include <iomanip>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "arcoord/error.hpp"
#include "arcoord/evaluation.hpp"
#include "arcoord/occlusion.hpp"
#include "arcoord/protocol.hpp"
#include "arcoord/report.hpp"
#include "arcoord/server.hpp"
#include "arcoord/simclient.hpp"

namespace arcoord::cli {

namespace {

std::atomic<bool> g_interrupted{false};

extern "C" void on_signal(int) { g_interrupted.store(true); }

struct ServeArgs {
  std::string bind;
  std::string mode;
  std::size_t queue_depth = 64;
};

struct SimulateArgs {
  std::vector<std::string> scenarios;
  int clients = 1;
  std::string mode = "classroom";
  std::string server;
  std::uint64_t seed = 0;
  std::string out = "reports";
  bool free_run = false;
  double rate_hz = 30.0;
};

struct EvalArgs {
  std::vector<std::string> reports;
  std::string out = "eval";
  std::size_t delta = 1;
};

struct OccludeArgs {
  std::string real, virtual_depth, background, colors, out, mask;
};

SessionMode mode_or_throw(const std::string& text) {
  const auto mode = parse_session_mode(text);
  if (!mode) throw Error(ErrorCode::InvalidArgument, "unknown mode '" + text + "'");
  return *mode;
}

int run_serve(const ServeArgs& a, std::ostream& out) {
  std::string bind = a.bind;
  if (bind.empty()) {
    const char* env = std::getenv("ARCOORD_BIND");
    bind = env != nullptr ? env : "127.0.0.1:7400";
  }
  ServerOptions options;
  options.bind = net::parse_endpoint(bind);
  if (!a.mode.empty()) options.mode = mode_or_throw(a.mode);
  options.queue_depth = a.queue_depth;
  options.log = &out;

  g_interrupted.store(false);
  auto old_int = std::signal(SIGINT, on_signal);
  auto old_term = std::signal(SIGTERM, on_signal);
  CoordinationServer server(options);
  server.start();
  while (!g_interrupted.load()) std::this_thread::sleep_for(std::chrono::milliseconds(100));
  server.stop();
  std::signal(SIGINT, old_int);
  std::signal(SIGTERM, old_term);
  return kSuccess;
}

int run_simulate(const SimulateArgs& a, std::ostream& out) {
  if (a.clients < 1) throw Error(ErrorCode::InvalidArgument, "--clients must be at least 1");
  std::vector<sim::Scenario> loaded;
  for (const auto& path : a.scenarios) loaded.push_back(sim::load_scenario(path));
  if (loaded.empty()) loaded.push_back(sim::default_scenario());

  sim::SessionConfig config;
  config.mode = mode_or_throw(a.mode);
  const auto n = std::max<std::size_t>(static_cast<std::size_t>(a.clients), loaded.size());
  for (std::size_t i = 0; i < n; ++i) {
    sim::Scenario s = loaded[i % loaded.size()];
    s.rng_seed = a.seed + i;
    s.ransac.seed = s.rng_seed;
    config.scenarios.push_back(std::move(s));
  }
  if (!a.server.empty()) config.server = net::parse_endpoint(a.server);
  config.options.lockstep = !a.free_run;
  config.options.rate_hz = a.rate_hz;

  const auto reports = sim::run_session(config);
  std::filesystem::create_directories(a.out);
  for (const auto& r : reports) {
    const auto path = std::filesystem::path(a.out) / ("report_user" + std::to_string(r.user_id) + ".json");
    write_report(path, r);
    out << "user " << r.user_id << ": scale=" << std::setprecision(9) << r.scale << " frames=" << r.relative.size()
        << " peers=" << r.peers.size() << " -> " << path.string() << "\n";
  }
  return kSuccess;
}

int run_eval(const EvalArgs& a, std::ostream& out) {
  std::vector<ClientReport> reports;
  for (const auto& arg : a.reports) {
    if (!std::filesystem::is_directory(arg)) {
      reports.push_back(read_report(arg));
      continue;
    }
    std::vector<std::filesystem::path> files;
    for (const auto& e : std::filesystem::directory_iterator(arg)) {
      if (e.path().extension() == ".json") files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& f : files) reports.push_back(read_report(f));
  }
  if (reports.empty()) throw Error(ErrorCode::InvalidArgument, "no reports found");
  const auto rows = evaluate_reports(reports, a.delta);
  std::filesystem::create_directories(a.out);
  const auto dir = std::filesystem::path(a.out);
  write_summary_csv(dir / "summary.csv", rows);
  write_plots(dir, reports);
  out << std::left << std::setw(32) << "metric" << std::right << std::setw(12) << "RMSE" << std::setw(12) << "Mean"
      << std::setw(12) << "Median" << std::setw(12) << "Max" << std::setw(12) << "S.D." << "\n";
  out << std::fixed << std::setprecision(6);
  for (const auto& row : rows) {
    const auto& s = row.summary;
    out << std::left << std::setw(32) << row.metric << std::right << std::setw(12) << s.rmse << std::setw(12) << s.mean
        << std::setw(12) << s.median << std::setw(12) << s.max << std::setw(12) << s.sd << "\n";
  }
  out << std::defaultfloat;
  return kSuccess;
}

int run_occlude(const OccludeArgs& a, std::ostream& out) {
  const DepthMap real = read_depth_map(a.real);
  const DepthMap virt = read_depth_map(a.virtual_depth);
  const OcclusionMask mask = occlusion_mask(real, virt);
  const RgbImage result = composite(read_rgb_image(a.background), read_rgb_image(a.colors), mask);
  write_rgb_image(a.out, result);
  if (!a.mask.empty()) {
    RgbImage m(mask.width, mask.height);
    for (std::size_t i = 0; i < mask.bits.size(); ++i) {
      if (mask.bits[i]) m.data[3 * i] = m.data[3 * i + 1] = m.data[3 * i + 2] = 255;
    }
    write_rgb_image(a.mask, m);
  }
  std::size_t visible = 0;
  for (bool b : mask.bits) visible += b ? 1 : 0;
  out << "visible virtual pixels: " << visible << " of " << mask.bits.size() << "\n";
  return kSuccess;
}

// Short end-to-end smoke run: noiseless two-client Collaboration session.
int run_selftest(std::ostream& out, std::ostream& err) {
  bool ok = true;
  auto check = [&](bool cond, const std::string& what) {
    out << (cond ? "ok   " : "FAIL ") << what << "\n";
    ok = ok && cond;
  };

  protocol::PoseUpdate pose{1, 7, protocol::to_wire(RigidTransform::rot_y(30.0) * RigidTransform::translate(1, 2, 3))};
  const auto frame = protocol::encode(pose);
  check(protocol::decode(frame) == protocol::WireMessage{pose}, "protocol round trip");

  sim::SessionConfig config;
  config.mode = SessionMode::Collaboration;
  config.scenarios = {sim::default_scenario(1), sim::default_scenario(1)};
  config.options.max_frames = 30;
  const auto reports = sim::run_session(config);
  check(reports.size() == 2, "two clients completed");
  for (const auto& r : reports) {
    const std::string who = "user " + std::to_string(r.user_id);
    check(std::abs(r.scale - r.true_scale) <= 1e-9 * r.true_scale, who + " recovered the SLAM scale");
    const bool complete = r.peers.size() == 1 && r.peers.begin()->second.size() == 30;
    check(complete, who + " received every peer frame");
    if (!complete) continue;
    // Identical scenarios on opposite seats: the avatar mirrors the own camera
    // through the plane origin.
    const RigidTransform to_plane = invert(r.plane.pose);
    const Point3 own = transform_point(to_plane, r.slam_metric[0].pose.translation);
    const Point3 avatar = transform_point(to_plane, r.peers.begin()->second[0].pose.translation);
    check(std::abs(own.x() + avatar.x()) < 1e-6 && std::abs(own.z() + avatar.z()) < 1e-6,
          who + " sees the peer on the opposite seat");
  }
  if (!ok) err << "selftest failed\n";
  return ok ? kSuccess : kDomainError;
}

}  // namespace

int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Multi-user AR coordination: server, simulator, evaluation and occlusion tools", "arcoord"};
  app.require_subcommand(1, 1);

  ServeArgs serve;
  auto* serve_cmd = app.add_subcommand("serve", "Run the coordination server until interrupted");
  serve_cmd->add_option("--bind", serve.bind, "host:port to listen on (default $ARCOORD_BIND or 127.0.0.1:7400)");
  serve_cmd->add_option("--mode", serve.mode, "Fix the session mode (classroom|collaboration)");
  serve_cmd->add_option("--queue-depth", serve.queue_depth, "Per-connection outbound queue limit")
      ->check(CLI::PositiveNumber);

  SimulateArgs sim_args;
  auto* sim_cmd = app.add_subcommand("simulate", "Run simulated clients and write their reports");
  sim_cmd->add_option("--scenario", sim_args.scenarios, "Scenario file; repeat for distinct clients")
      ->check(CLI::ExistingFile);
  sim_cmd->add_option("--clients", sim_args.clients, "Number of clients")->check(CLI::PositiveNumber);
  sim_cmd->add_option("--mode", sim_args.mode, "classroom|collaboration");
  sim_cmd->add_option("--server", sim_args.server, "host:port of a running server; self-hosts when omitted");
  sim_cmd->add_option("--seed", sim_args.seed, "Base seed; client i uses seed+i");
  sim_cmd->add_option("--out", sim_args.out, "Report output directory");
  sim_cmd->add_flag("--free-run", sim_args.free_run, "Stream at --rate instead of lockstep frame stepping");
  sim_cmd->add_option("--rate", sim_args.rate_hz, "Free-run pose rate in Hz")->check(CLI::PositiveNumber);

  EvalArgs eval;
  auto* eval_cmd = app.add_subcommand("eval", "Compute RPE summaries and plots from client reports");
  eval_cmd->add_option("--reports", eval.reports, "Client report files or directories of them")->required()->check(CLI::ExistingPath);
  eval_cmd->add_option("--out", eval.out, "Output directory");
  eval_cmd->add_option("--delta", eval.delta, "RPE frame delta")->check(CLI::PositiveNumber);

  OccludeArgs occ;
  auto* occ_cmd = app.add_subcommand("occlude", "Composite a virtual layer over a background using depth maps");
  occ_cmd->add_option("--real", occ.real, "Real-scene depth map")->required()->check(CLI::ExistingFile);
  occ_cmd->add_option("--virtual", occ.virtual_depth, "Virtual-content depth map")->required()->check(CLI::ExistingFile);
  occ_cmd->add_option("--background", occ.background, "Background RGB image")->required()->check(CLI::ExistingFile);
  occ_cmd->add_option("--colors", occ.colors, "Virtual-content RGB image")->required()->check(CLI::ExistingFile);
  occ_cmd->add_option("--out", occ.out, "Composited RGB image")->required();
  occ_cmd->add_option("--mask", occ.mask, "Also write the mask as an RGB image");

  auto* selftest_cmd = app.add_subcommand("selftest", "Run a short end-to-end smoke check");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, err, err);
    err << app.help();
    return kUsageError;
  }

  try {
    if (serve_cmd->parsed()) return run_serve(serve, out);
    if (sim_cmd->parsed()) return run_simulate(sim_args, out);
    if (eval_cmd->parsed()) return run_eval(eval, out);
    if (occ_cmd->parsed()) return run_occlude(occ, out);
    if (selftest_cmd->parsed()) return run_selftest(out, err);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kDomainError;
  }
  return kUsageError;
}

}  // namespace arcoord::cli
