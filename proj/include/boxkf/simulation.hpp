#pragma once

// Generative simulator for the bounding-box motion model and the Monte-Carlo
// oracles built on it: empirical Q and R, and NEES/NIS filter consistency.

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "boxkf/detection.hpp"
#include "boxkf/error.hpp"
#include "boxkf/kalman_filter.hpp"
#include "boxkf/motion_model.hpp"
#include "boxkf/random.hpp"
#include "boxkf/state.hpp"
#include "boxkf/stats.hpp"

namespace boxkf {

/// One draw of the state noise W. A single scalar w_k ~ N(0, sigma_k^2) per
/// axis feeds both the position (dt^2/2 * w_k) and the velocity (dt * w_k).
inline Vector sample_process_noise(Parameterization param, const NoiseParams & noise, RandomStream & rng)
{
  const Layout lay = layout(param);
  const double dt = noise.dt;
  Vector W = Vector::Zero(lay.state_dim);
  for (int k = 0; k < kMeasDim; ++k) {
    const AxisSlot axis = lay.axes[k];
    const double w = noise.sigma_process[k] * rng.normal();
    if (axis.has_velocity()) {
      W(axis.pos) = dt * dt / 2.0 * w;
      W(axis.vel) = dt * w;
    } else if (param == Parameterization::RandomWalk) {
      W(axis.pos) = std::sqrt(dt) * w;
    } else {
      W(axis.pos) = w;
    }
  }
  return W;
}

/// One draw of the measurement noise V, independent per component.
inline Vector sample_measurement_noise(const NoiseParams & noise, RandomStream & rng)
{
  Vector V(kMeasDim);
  for (int k = 0; k < kMeasDim; ++k) {
    V(k) = noise.sigma_meas[k] * rng.normal();
  }
  return V;
}

/// Streaming unbiased covariance (Welford).
class CovarianceAccumulator
{
public:
  explicit CovarianceAccumulator(Eigen::Index dim)
  : mean_(Vector::Zero(dim)), m2_(Matrix::Zero(dim, dim))
  {
  }

  void add(const Vector & x)
  {
    if (x.size() != mean_.size()) {
      throw Error(ErrorKind::DimensionMismatch, "sample dimension differs");
    }
    ++count_;
    const Vector delta = x - mean_;
    mean_ += delta / static_cast<double>(count_);
    m2_.noalias() += delta * (x - mean_).transpose();
  }

  std::size_t count() const noexcept { return count_; }
  const Vector & mean() const noexcept { return mean_; }

  Matrix covariance() const
  {
    if (count_ < 2) {
      throw Error(ErrorKind::InsufficientSamples, "need at least two samples");
    }
    const Matrix c = m2_ / static_cast<double>(count_ - 1);
    return 0.5 * (c + c.transpose());
  }

private:
  std::size_t count_{0};
  Vector mean_;
  Matrix m2_;
};

inline Matrix estimate_covariance(std::span<const Vector> samples)
{
  if (samples.size() < 2) {
    throw Error(ErrorKind::InsufficientSamples, "need at least two samples");
  }
  CovarianceAccumulator acc(samples.front().size());
  for (const Vector & s : samples) acc.add(s);
  return acc.covariance();
}

inline double relative_frobenius_error(const Matrix & estimate, const Matrix & reference)
{
  return (estimate - reference).norm() / reference.norm();
}

struct SimConfig
{
  Parameterization param{Parameterization::CXCYWH};
  NoiseParams noise{};
  int n_steps{50};
  int n_targets{1};
  std::uint64_t seed{0};
  std::optional<std::vector<Vector>> initial_states{};
  double drop_probability{0.0};

  void validate() const
  {
    noise.validate();
    if (n_steps < 1) throw Error(ErrorKind::InvalidArgument, "n_steps must be >= 1");
    if (n_targets < 0) throw Error(ErrorKind::InvalidArgument, "n_targets must be >= 0");
    if (!(drop_probability >= 0.0 && drop_probability <= 1.0)) {
      throw Error(ErrorKind::InvalidArgument, "drop_probability must lie in [0, 1]");
    }
    if (initial_states) {
      if (static_cast<int>(initial_states->size()) != n_targets) {
        throw Error(ErrorKind::DimensionMismatch, "need one initial state per target");
      }
      for (const Vector & x : *initial_states) {
        if (x.size() != state_dim(param)) {
          throw Error(ErrorKind::DimensionMismatch, "initial state has the wrong dimension");
        }
      }
    }
  }
};

/// Default start for target i: a 40x80 box on a diagonal grid moving at (3, 2) px/frame.
inline Vector default_initial_state(Parameterization param, int target)
{
  const BoundingBox box{100.0 + 200.0 * target, 100.0 + 100.0 * target, 40.0, 80.0};
  Vector x = embed(to_measurement(box, param), param);
  const Layout lay = layout(param);
  if (lay.axes[0].has_velocity()) x(lay.axes[0].vel) = 3.0;
  if (lay.axes[1].has_velocity()) x(lay.axes[1].vel) = 2.0;
  return x;
}

struct SimDetection
{
  int target;
  Vector z;
};

struct Trajectory
{
  std::vector<std::vector<Vector>> states;            // [frame][target], frames 0..n_steps-1
  std::vector<std::vector<SimDetection>> detections;  // [frame], targets ascending
};

/// X_k = F X_{k-1} + W_k and z_k = H X_k + V_k for every target, starting from
/// the initial state X_0 (not emitted). Each target draws from its own stream.
inline Trajectory simulate_trajectory(const SimConfig & cfg)
{
  cfg.validate();
  const ModelMatrices m = build_model(cfg.param, cfg.noise);
  Trajectory out;
  out.states.assign(static_cast<std::size_t>(cfg.n_steps), {});
  out.detections.assign(static_cast<std::size_t>(cfg.n_steps), {});
  for (int t = 0; t < cfg.n_targets; ++t) {
    RandomStream rng(cfg.seed, static_cast<std::uint64_t>(t));
    Vector x = cfg.initial_states ? (*cfg.initial_states)[static_cast<std::size_t>(t)]
                                  : default_initial_state(cfg.param, t);
    for (int k = 0; k < cfg.n_steps; ++k) {
      x = m.F * x + sample_process_noise(cfg.param, cfg.noise, rng);
      const Vector z = m.H * x + sample_measurement_noise(cfg.noise, rng);
      const bool dropped = rng.uniform() < cfg.drop_probability;
      out.states[static_cast<std::size_t>(k)].push_back(x);
      if (!dropped) {
        out.detections[static_cast<std::size_t>(k)].push_back({t, z});
      }
    }
  }
  return out;
}

/// Simulated detections as boxes, one entry per frame. Measurements that do
/// not describe a valid box (possible under noisy scale/ratio layouts) are dropped.
inline std::vector<FrameDetections> to_frame_detections(const Trajectory & traj, Parameterization param)
{
  std::vector<FrameDetections> out;
  for (std::size_t k = 0; k < traj.detections.size(); ++k) {
    FrameDetections fd{static_cast<int>(k), {}};
    for (const SimDetection & d : traj.detections[k]) {
      try {
        fd.detections.push_back({fd.frame, box_from_measurement(d.z, param), 1.0});
      } catch (const Error & e) {
        if (e.kind() != ErrorKind::NonPositiveSize) throw;
      }
    }
    out.push_back(std::move(fd));
  }
  return out;
}

/// Ground-truth box histories, id = target index + 1.
inline std::vector<TrackHistory> to_truth_histories(const Trajectory & traj, Parameterization param)
{
  std::vector<TrackHistory> out;
  for (std::size_t k = 0; k < traj.states.size(); ++k) {
    for (std::size_t t = 0; t < traj.states[k].size(); ++t) {
      if (out.size() <= t) out.push_back({static_cast<int>(t) + 1, {}});
      try {
        out[t].entries.push_back({static_cast<int>(k), from_state(traj.states[k][t], param)});
      } catch (const Error & e) {
        if (e.kind() != ErrorKind::NonPositiveSize) throw;
      }
    }
  }
  return out;
}

struct CovarianceOracleReport
{
  Matrix empirical;
  Matrix expected;
  double relative_error{0.0};
  double max_zero_entry_abs{0.0};  // largest |empirical| where expected is exactly 0
};

namespace detail {

inline CovarianceOracleReport compare_covariance(Matrix empirical, Matrix expected)
{
  CovarianceOracleReport r;
  r.relative_error = relative_frobenius_error(empirical, expected);
  for (Eigen::Index i = 0; i < expected.rows(); ++i) {
    for (Eigen::Index j = 0; j < expected.cols(); ++j) {
      if (expected(i, j) == 0.0) {
        r.max_zero_entry_abs = std::max(r.max_zero_entry_abs, std::abs(empirical(i, j)));
      }
    }
  }
  r.empirical = std::move(empirical);
  r.expected = std::move(expected);
  return r;
}

}  // namespace detail

/// Empirical covariance of `trials` process-noise draws against build_process_noise.
inline CovarianceOracleReport verify_process_noise(
  Parameterization param, const NoiseParams & noise, std::size_t trials, std::uint64_t seed)
{
  noise.validate();
  RandomStream rng(seed);
  CovarianceAccumulator acc(state_dim(param));
  for (std::size_t i = 0; i < trials; ++i) {
    acc.add(sample_process_noise(param, noise, rng));
  }
  return detail::compare_covariance(acc.covariance(), build_process_noise(param, noise));
}

/// Empirical covariance of `trials` measurement-noise draws against build_measurement_noise.
inline CovarianceOracleReport verify_measurement_noise(
  const NoiseParams & noise, std::size_t trials, std::uint64_t seed)
{
  noise.validate();
  RandomStream rng(seed);
  CovarianceAccumulator acc(kMeasDim);
  for (std::size_t i = 0; i < trials; ++i) {
    acc.add(sample_measurement_noise(noise, rng));
  }
  return detail::compare_covariance(acc.covariance(), build_measurement_noise(noise));
}

struct ConsistencyConfig
{
  SimConfig sim{};           // n_targets is ignored; each run simulates one target
  int runs{500};
  double filter_q_scale{1.0};  // filter Q = scale * simulator Q
  double confidence{0.99};
};

struct ConsistencyReport
{
  int state_dim{0};
  int meas_dim{0};
  int runs{0};
  int steps{0};
  double mean_nees{0.0};
  double mean_nis{0.0};
  std::pair<double, double> nees_band{};
  std::pair<double, double> nis_band{};

  bool nees_in_band() const noexcept { return mean_nees >= nees_band.first && mean_nees <= nees_band.second; }
  bool nis_in_band() const noexcept { return mean_nis >= nis_band.first && mean_nis <= nis_band.second; }
};

/// Monte-Carlo NEES/NIS. Each run draws X_0 from the filter's prior N(m0, P0),
/// simulates n_steps, and filters with F, scale*Q, H, R. Means are taken over
/// all runs and steps; bands treat runs * mean as chi-square with runs * dim dof.
inline ConsistencyReport run_consistency_experiment(const ConsistencyConfig & cfg)
{
  const SimConfig & sim = cfg.sim;
  sim.validate();
  if (cfg.runs < 1) throw Error(ErrorKind::InvalidArgument, "runs must be >= 1");
  if (!(cfg.filter_q_scale > 0.0)) throw Error(ErrorKind::InvalidArgument, "Q scale must be > 0");

  const Parameterization param = sim.param;
  const ModelMatrices m = build_model(param, sim.noise);
  const Matrix filter_Q = cfg.filter_q_scale * m.Q;
  const Vector m0 = sim.initial_states && !sim.initial_states->empty() ? sim.initial_states->front()
                                                                      : default_initial_state(param, 0);
  const Matrix P0 = initial_covariance(param, sim.noise);
  const Matrix P0_sqrt = Eigen::SelfAdjointEigenSolver<Matrix>(P0).operatorSqrt();
  const int n = state_dim(param);

  double nees_sum = 0.0;
  double nis_sum = 0.0;
  for (int run = 0; run < cfg.runs; ++run) {
    RandomStream rng(sim.seed, static_cast<std::uint64_t>(run));
    Vector start_noise(n);
    for (int i = 0; i < n; ++i) start_noise(i) = rng.normal();
    Vector x = m0 + P0_sqrt * start_noise;
    GaussianState est(m0, P0);
    for (int k = 0; k < sim.n_steps; ++k) {
      x = m.F * x + sample_process_noise(param, sim.noise, rng);
      const Vector z = m.H * x + sample_measurement_noise(sim.noise, rng);
      est = predict(est, m.F, filter_Q);
      auto [post, innov] = update(est, z, m.H, m.R);
      est = std::move(post);
      const Vector err = x - est.mean();
      nees_sum += err.dot(est.cov().ldlt().solve(err));
      nis_sum += innov.mahalanobis_sq;
    }
  }
  const double samples = static_cast<double>(cfg.runs) * sim.n_steps;
  ConsistencyReport r;
  r.state_dim = n;
  r.meas_dim = kMeasDim;
  r.runs = cfg.runs;
  r.steps = sim.n_steps;
  r.mean_nees = nees_sum / samples;
  r.mean_nis = nis_sum / samples;
  r.nees_band = chi_square_mean_band(n, cfg.runs, cfg.confidence);
  r.nis_band = chi_square_mean_band(kMeasDim, cfg.runs, cfg.confidence);
  return r;
}

}  // namespace boxkf
