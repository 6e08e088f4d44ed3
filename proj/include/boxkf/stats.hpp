#pragma once

#include <boost/math/distributions/chi_squared.hpp>

#include <utility>

namespace boxkf {

inline double chi_square_quantile(double p, double dof)
{
  return boost::math::quantile(boost::math::chi_squared_distribution<double>(dof), p);
}

/// Two-sided acceptance band for the mean of `n_runs` independent chi-square
/// variables with `dim` degrees of freedom each: n_runs * mean ~ chi2(n_runs * dim).
inline std::pair<double, double> chi_square_mean_band(int dim, int n_runs, double confidence = 0.99)
{
  const double tail = (1.0 - confidence) / 2.0;
  const double dof = static_cast<double>(dim) * n_runs;
  return {chi_square_quantile(tail, dof) / n_runs, chi_square_quantile(1.0 - tail, dof) / n_runs};
}

}  // namespace boxkf
