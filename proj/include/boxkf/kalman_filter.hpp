#pragma once

// Linear-Gaussian Bayes recursion: prediction through F/Q and measurement
// update through H/R. All functions are pure; GaussianState values in, new
// values out.

#include <Eigen/Dense>

#include <optional>
#include <utility>

#include "boxkf/error.hpp"
#include "boxkf/motion_model.hpp"
#include "boxkf/state.hpp"

namespace boxkf {

struct Innovation
{
  Vector residual;
  Matrix S;
  double mahalanobis_sq{0.0};
};

/// Largest accepted condition number of the innovation covariance.
inline constexpr double kMaxInnovationCondition = 1e12;

inline GaussianState predict(const GaussianState & state, const Matrix & F, const Matrix & Q)
{
  const auto n = state.dim();
  if (F.rows() != n || F.cols() != n || Q.rows() != n || Q.cols() != n) {
    throw Error(ErrorKind::DimensionMismatch, "F and Q must be square with the state dimension");
  }
  Vector mean = F * state.mean();
  Matrix cov = F * state.cov() * F.transpose() + Q;
  return {std::move(mean), std::move(cov)};
}

namespace detail {

struct FactoredInnovation
{
  Innovation innovation;
  Eigen::LLT<Matrix> llt;
};

inline FactoredInnovation innovate(
  const GaussianState & state, const Vector & z, const Matrix & H, const Matrix & R)
{
  const auto n = state.dim();
  const auto m = z.size();
  if (H.rows() != m || H.cols() != n || R.rows() != m || R.cols() != m) {
    throw Error(ErrorKind::DimensionMismatch, "H must be m x n and R must be m x m");
  }
  FactoredInnovation out;
  out.innovation.residual = z - H * state.mean();
  Matrix S = H * state.cov() * H.transpose() + R;
  S = (0.5 * (S + S.transpose())).eval();

  const Vector eig = Eigen::SelfAdjointEigenSolver<Matrix>(S, Eigen::EigenvaluesOnly).eigenvalues();
  const double lo = eig.minCoeff();
  const double hi = eig.maxCoeff();
  if (!(lo > 0.0) || hi / lo > kMaxInnovationCondition) {
    throw Error(ErrorKind::SingularInnovation, "innovation covariance is numerically singular");
  }
  out.llt.compute(S);
  if (out.llt.info() != Eigen::Success) {
    throw Error(ErrorKind::SingularInnovation, "Cholesky factorization of S failed");
  }
  const Vector whitened = out.llt.matrixL().solve(out.innovation.residual);
  out.innovation.mahalanobis_sq = whitened.squaredNorm();
  out.innovation.S = std::move(S);
  return out;
}

}  // namespace detail

/// Measurement update with the Joseph-form covariance.
inline std::pair<GaussianState, Innovation> update(
  const GaussianState & state, const Vector & z, const Matrix & H, const Matrix & R)
{
  auto [innovation, llt] = detail::innovate(state, z, H, R);
  const Matrix & P = state.cov();
  // K = P H^T S^-1, computed as (S^-1 H P)^T since S and P are symmetric.
  const Matrix K = llt.solve(H * P).transpose();
  Vector mean = state.mean() + K * innovation.residual;
  const Matrix IKH = Matrix::Identity(state.dim(), state.dim()) - K * H;
  Matrix cov = IKH * P * IKH.transpose() + K * R * K.transpose();
  return {GaussianState(std::move(mean), std::move(cov)), std::move(innovation)};
}

inline Innovation innovation(
  const GaussianState & state, const Vector & z, const Matrix & H, const Matrix & R)
{
  return detail::innovate(state, z, H, R).innovation;
}

/// Squared Mahalanobis distance of z from the predicted measurement.
inline double gating_distance(
  const GaussianState & state, const Vector & z, const Matrix & H, const Matrix & R)
{
  return detail::innovate(state, z, H, R).innovation.mahalanobis_sq;
}

/// Diagonal prior covariance for a newly observed target. Observed components
/// get the measurement variance; velocities get (10 * sigma_meas / dt)^2
/// unless `velocity_std` overrides it.
inline Matrix initial_covariance(
  Parameterization param, const NoiseParams & noise, std::optional<double> velocity_std = std::nullopt)
{
  noise.validate();
  const Layout lay = layout(param);
  Matrix cov = Matrix::Zero(lay.state_dim, lay.state_dim);
  for (int k = 0; k < kMeasDim; ++k) {
    const AxisSlot axis = lay.axes[k];
    const double sigma = noise.sigma_meas[k];
    cov(axis.pos, axis.pos) = sigma * sigma;
    if (axis.has_velocity()) {
      const double v = velocity_std ? *velocity_std : 10.0 * sigma / noise.dt;
      cov(axis.vel, axis.vel) = v * v;
    }
  }
  return cov;
}

/// Prior for a target first seen at measurement z, with zero velocity.
inline GaussianState initial_state(
  const Vector & z, Parameterization param, const NoiseParams & noise,
  std::optional<double> velocity_std = std::nullopt)
{
  return {embed(z, param), initial_covariance(param, noise, velocity_std)};
}

}  // namespace boxkf
