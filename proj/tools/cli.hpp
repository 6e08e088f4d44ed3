#pragma once

// Command-line front end. Subcommands: track, simulate, verify-q,
// consistency, print-model. Exit codes: 0 ok, 1 runtime failure or
// out-of-tolerance check, 2 usage error.

#include <CLI11.hpp>

#include <array>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "boxkf/boxkf.hpp"

namespace boxkf::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

/// Thresholds for verify-q.
inline constexpr double kMaxRelativeFrobenius = 0.02;
inline constexpr double kMaxCrossTerm = 0.01;

class UsageError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// "1.5" -> {1.5, 1.5, 1.5, 1.5}; "1,2,3,4" -> {1, 2, 3, 4}.
inline std::array<double, 4> parse_sigma_list(const std::string & text, const std::string & flag)
{
  std::vector<double> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      const double v = std::stod(item, &used);
      if (used != item.size()) throw std::invalid_argument(item);
      values.push_back(v);
    } catch (const std::exception &) {
      throw UsageError(flag + ": not a number: '" + item + "'");
    }
  }
  if (values.size() == 1) {
    return {values[0], values[0], values[0], values[0]};
  }
  if (values.size() == 4) {
    return {values[0], values[1], values[2], values[3]};
  }
  throw UsageError(flag + " takes one value or four comma-separated values");
}

/// Noise flags shared by several subcommands. `--sigma` sets every process
/// and measurement sigma; `--sigma-process` / `--sigma-meas` take precedence.
struct NoiseFlags
{
  double dt{1.0};
  std::optional<double> sigma_all;
  std::string sigma_process;
  std::string sigma_meas;

  void attach(CLI::App & app)
  {
    app.add_option("--dt", dt, "Frame period");
    app.add_option("--sigma", sigma_all, "Single sigma for all process and measurement axes");
    app.add_option("--sigma-process", sigma_process, "Process sigma: one value or four (x,y,w,h)");
    app.add_option("--sigma-meas", sigma_meas, "Measurement sigma: one value or four (x,y,w,h)");
  }

  NoiseParams resolve() const
  {
    NoiseParams n = NoiseParams::uniform(dt, sigma_all.value_or(1.0), sigma_all.value_or(1.0));
    if (!sigma_process.empty()) n.sigma_process = parse_sigma_list(sigma_process, "--sigma-process");
    if (!sigma_meas.empty()) n.sigma_meas = parse_sigma_list(sigma_meas, "--sigma-meas");
    return n;
  }
};

inline Parameterization resolve_param(const std::string & name)
{
  if (auto p = parse_parameterization(name)) return *p;
  throw UsageError("unknown parameterization '" + name + "' (cxcywh|cxcywh-v|cxcysr|cxcyha|rw)");
}

inline void print_matrix(std::ostream & out, const std::string & name, const Matrix & m)
{
  out << name << ' ' << m.rows() << 'x' << m.cols() << '\n';
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      out << (j ? " " : "") << format_number(m(i, j) == 0.0 ? 0.0 : m(i, j));
    }
    out << '\n';
  }
}

inline void print_oracle(std::ostream & out, const std::string & name, const CovarianceOracleReport & r)
{
  out << name << " relative_frobenius_error " << format_number(r.relative_error) << '\n';
  out << name << " max_cross_term " << format_number(r.max_zero_entry_abs) << '\n';
}

inline bool oracle_ok(const CovarianceOracleReport & r)
{
  const double scale = std::max(1.0, r.expected.cwiseAbs().maxCoeff());
  return r.relative_error < kMaxRelativeFrobenius && r.max_zero_entry_abs < kMaxCrossTerm * scale;
}

inline int cli_main(int argc, const char * const * argv, std::ostream & out, std::ostream & err)
{
  CLI::App app{"Constant-velocity bounding-box Kalman tracking toolkit", "boxkf"};
  app.require_subcommand(1);

  // track
  auto * track = app.add_subcommand("track", "Track a MOTChallenge detection file");
  std::string det_path, track_out, track_param = "cxcywh";
  NoiseFlags track_noise;
  TrackerConfig tcfg;
  std::optional<double> init_velocity_std;
  track->add_option("--detections", det_path, "Input detections (MOT CSV)")->required();
  track->add_option("--output", track_out, "Output results (MOT CSV)")->required();
  track->add_option("--param", track_param, "cxcywh|cxcywh-v|cxcysr|cxcyha|rw");
  track_noise.attach(*track);
  track->add_option("--iou-threshold", tcfg.iou_threshold, "Minimum IoU for a match");
  track->add_option("--max-age", tcfg.max_age, "Frames a track may coast before deletion");
  track->add_option("--min-hits", tcfg.min_hits, "Updates needed to confirm a track");
  track->add_flag("--mahalanobis-gate", tcfg.use_mahalanobis_gate, "Also gate by chi-square 95%");
  track->add_option("--init-velocity-std", init_velocity_std, "Prior velocity std of new tracks");

  // simulate
  auto * simulate = app.add_subcommand("simulate", "Simulate targets and write detections");
  SimConfig scfg;
  std::string sim_out, sim_truth, sim_param = "cxcywh";
  NoiseFlags sim_noise;
  simulate->add_option("--steps", scfg.n_steps, "Frames to simulate")->required();
  simulate->add_option("--targets", scfg.n_targets, "Number of targets")->required();
  simulate->add_option("--seed", scfg.seed, "Random seed")->required();
  simulate->add_option("--output", sim_out, "Output detections (MOT CSV)")->required();
  simulate->add_option("--truth", sim_truth, "Optional ground-truth output (MOT CSV)");
  simulate->add_option("--param", sim_param, "cxcywh|cxcywh-v|cxcysr|cxcyha|rw");
  simulate->add_option("--drop-prob", scfg.drop_probability, "Per-frame detection drop probability");
  sim_noise.attach(*simulate);

  // verify-q
  auto * verify = app.add_subcommand("verify-q", "Monte-Carlo check of Q and R");
  std::size_t trials = 1000000;
  std::uint64_t verify_seed = 1;
  std::string verify_param = "cxcywh";
  NoiseFlags verify_noise;
  verify->add_option("--trials", trials, "Number of noise draws");
  verify->add_option("--seed", verify_seed, "Random seed");
  verify->add_option("--param", verify_param, "cxcywh|cxcywh-v|cxcysr|cxcyha|rw");
  verify_noise.attach(*verify);

  // consistency
  auto * consistency = app.add_subcommand("consistency", "NEES/NIS filter consistency experiment");
  ConsistencyConfig ccfg;
  ccfg.sim.n_steps = 50;
  ccfg.sim.seed = 1;
  std::string cons_param = "cxcywh";
  NoiseFlags cons_noise;
  consistency->add_option("--runs", ccfg.runs, "Monte-Carlo runs");
  consistency->add_option("--steps", ccfg.sim.n_steps, "Steps per run");
  consistency->add_option("--seed", ccfg.sim.seed, "Random seed");
  consistency->add_option("--param", cons_param, "cxcywh|cxcywh-v|cxcysr|cxcyha|rw");
  consistency->add_option("--q-scale", ccfg.filter_q_scale, "Filter Q multiplier (1 = matched)");
  cons_noise.attach(*consistency);

  // print-model
  auto * print = app.add_subcommand("print-model", "Print F, Q, H and R");
  std::string print_param = "cxcywh";
  NoiseFlags print_noise;
  print->add_option("--param", print_param, "cxcywh|cxcywh-v|cxcysr|cxcyha|rw");
  print_noise.attach(*print);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError & e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*track) {
      tcfg.param = resolve_param(track_param);
      tcfg.noise = track_noise.resolve();
      tcfg.initial_velocity_std = init_velocity_std;
      const DetectionFile input = read_mot_detections(det_path);
      for (const std::string & w : input.warnings) err << "warning: " << det_path << ": " << w << '\n';
      write_mot_results(track_out, track_sequence(input.frames, tcfg));
      return kExitOk;
    }
    if (*simulate) {
      scfg.param = resolve_param(sim_param);
      scfg.noise = sim_noise.resolve();
      const Trajectory traj = simulate_trajectory(scfg);
      std::ofstream det_file(sim_out, std::ios::trunc);
      if (!det_file) throw Error(ErrorKind::IoError, "cannot open '" + sim_out + "' for writing");
      write_mot_detections(det_file, to_frame_detections(traj, scfg.param));
      if (!det_file.flush()) throw Error(ErrorKind::IoError, "write to '" + sim_out + "' failed");
      if (!sim_truth.empty()) write_mot_results(sim_truth, to_truth_histories(traj, scfg.param));
      return kExitOk;
    }
    if (*verify) {
      const Parameterization p = resolve_param(verify_param);
      const NoiseParams n = verify_noise.resolve();
      const auto q = verify_process_noise(p, n, trials, verify_seed);
      const auto r = verify_measurement_noise(n, trials, verify_seed + 1);
      print_oracle(out, "Q", q);
      print_oracle(out, "R", r);
      out << "max_relative_error " << format_number(std::max(q.relative_error, r.relative_error)) << '\n';
      const bool ok = oracle_ok(q) && oracle_ok(r);
      out << (ok ? "PASS" : "FAIL") << '\n';
      return ok ? kExitOk : kExitFailure;
    }
    if (*consistency) {
      ccfg.sim.param = resolve_param(cons_param);
      ccfg.sim.noise = cons_noise.resolve();
      const ConsistencyReport rep = run_consistency_experiment(ccfg);
      out << "runs " << rep.runs << " steps " << rep.steps << '\n';
      out << "NEES mean " << format_number(rep.mean_nees) << " band [" << format_number(rep.nees_band.first)
          << ", " << format_number(rep.nees_band.second) << "] dim " << rep.state_dim << ' '
          << (rep.nees_in_band() ? "in" : "out") << '\n';
      out << "NIS mean " << format_number(rep.mean_nis) << " band [" << format_number(rep.nis_band.first)
          << ", " << format_number(rep.nis_band.second) << "] dim " << rep.meas_dim << ' '
          << (rep.nis_in_band() ? "in" : "out") << '\n';
      const bool ok = rep.nees_in_band() && rep.nis_in_band();
      out << (ok ? "PASS" : "FAIL") << '\n';
      return ok ? kExitOk : kExitFailure;
    }
    if (*print) {
      const Parameterization p = resolve_param(print_param);
      const NoiseParams n = print_noise.resolve();
      const ModelMatrices m = build_model(p, n);
      out << "param " << to_string(p) << " dt " << format_number(n.dt) << '\n';
      print_matrix(out, "F", m.F);
      print_matrix(out, "Q", m.Q);
      print_matrix(out, "H", m.H);
      print_matrix(out, "R", m.R);
      return kExitOk;
    }
  } catch (const UsageError & e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception & e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace boxkf::cli
