#pragma once

// Track-to-detection association: IoU costs, gating and optimal assignment.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>
#include <vector>

#include "boxkf/error.hpp"
#include "boxkf/state.hpp"

namespace boxkf {

/// 95% chi-square quantile for 4 degrees of freedom (measurement dimension).
inline constexpr double kMahalanobisGate4Dof = 9.4877;

inline double iou(const BoundingBox & a, const BoundingBox & b) noexcept
{
  const double a_l = a.cx - a.w / 2.0, a_r = a.cx + a.w / 2.0;
  const double a_t = a.cy - a.h / 2.0, a_b = a.cy + a.h / 2.0;
  const double b_l = b.cx - b.w / 2.0, b_r = b.cx + b.w / 2.0;
  const double b_t = b.cy - b.h / 2.0, b_b = b.cy + b.h / 2.0;

  const double iw = std::min(a_r, b_r) - std::max(a_l, b_l);
  const double ih = std::min(a_b, b_b) - std::max(a_t, b_t);
  if (iw <= 0.0 || ih <= 0.0) {
    return 0.0;
  }
  // Areas from the same corner differences so that iou(a, a) == 1 exactly.
  const double inter = iw * ih;
  const double uni = (a_r - a_l) * (a_b - a_t) + (b_r - b_l) * (b_b - b_t) - inter;
  return std::clamp(inter / uni, 0.0, 1.0);
}

struct CostMatrix
{
  Matrix costs;
  Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> gate_mask;

  CostMatrix() = default;

  explicit CostMatrix(Matrix c)
  : costs(std::move(c)), gate_mask(decltype(gate_mask)::Constant(costs.rows(), costs.cols(), true))
  {
  }

  Eigen::Index rows() const noexcept { return costs.rows(); }
  Eigen::Index cols() const noexcept { return costs.cols(); }

  bool admissible(Eigen::Index i, Eigen::Index j, double max_cost) const noexcept
  {
    const double c = costs(i, j);
    return gate_mask(i, j) && std::isfinite(c) && c <= max_cost;
  }

  /// Cost 1 - IoU between every track box and every detection box.
  static CostMatrix from_iou(
    const std::vector<BoundingBox> & tracks, const std::vector<BoundingBox> & detections)
  {
    Matrix c(static_cast<Eigen::Index>(tracks.size()), static_cast<Eigen::Index>(detections.size()));
    for (std::size_t i = 0; i < tracks.size(); ++i) {
      for (std::size_t j = 0; j < detections.size(); ++j) {
        c(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = 1.0 - iou(tracks[i], detections[j]);
      }
    }
    return CostMatrix(std::move(c));
  }
};

struct Assignment
{
  std::vector<std::pair<int, int>> matches;  // (track, detection), ascending by track
  std::vector<int> unmatched_tracks;
  std::vector<int> unmatched_detections;
};

namespace detail {

struct HungarianSolution
{
  std::vector<int> row_to_col;
  std::vector<double> u;  // row potentials, 1-based
  std::vector<double> v;  // column potentials, 1-based
};

/// O(n^3) shortest augmenting path solver for a square cost matrix.
inline HungarianSolution hungarian(const Matrix & a)
{
  const int n = static_cast<int>(a.rows());
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) {
          continue;
        }
        const double cur = a(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  HungarianSolution out;
  out.row_to_col.assign(n, -1);
  for (int j = 1; j <= n; ++j) {
    if (p[j] != 0) {
      out.row_to_col[p[j] - 1] = j - 1;
    }
  }
  out.u = std::move(u);
  out.v = std::move(v);
  return out;
}

struct MatchValue
{
  int count{0};
  double cost{0.0};
};

/// Optimal (max count, then min cost) matching restricted to `rows` x `cols`
/// of the admissible pairs. Returns the chosen column per listed row (-1 = none).
class RestrictedSolver
{
public:
  RestrictedSolver(const CostMatrix & cm, double max_cost) : cm_(cm), max_cost_(max_cost)
  {
    big_ = 1.0;
    for (Eigen::Index i = 0; i < cm.rows(); ++i) {
      for (Eigen::Index j = 0; j < cm.cols(); ++j) {
        if (cm.admissible(i, j, max_cost)) {
          big_ += std::abs(cm.costs(i, j));
        }
      }
    }
  }

  bool admissible(int i, int j) const noexcept { return cm_.admissible(i, j, max_cost_); }
  double cost(int i, int j) const noexcept { return cm_.costs(i, j); }
  double big() const noexcept { return big_; }

  HungarianSolution solve(const std::vector<int> & rows, const std::vector<int> & cols) const
  {
    const int n = static_cast<int>(std::max(rows.size(), cols.size()));
    Matrix a = Matrix::Constant(n, n, big_);
    for (std::size_t r = 0; r < rows.size(); ++r) {
      for (std::size_t c = 0; c < cols.size(); ++c) {
        if (admissible(rows[r], cols[c])) {
          a(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = cost(rows[r], cols[c]);
        }
      }
    }
    HungarianSolution sol = hungarian(a);
    // Map back to original column indices; drop padding and inadmissible pairs.
    std::vector<int> mapped(rows.size(), -1);
    for (std::size_t r = 0; r < rows.size(); ++r) {
      const int c = sol.row_to_col[r];
      if (c >= 0 && static_cast<std::size_t>(c) < cols.size() && admissible(rows[r], cols[c])) {
        mapped[r] = cols[c];
      }
    }
    sol.row_to_col = std::move(mapped);
    return sol;
  }

  MatchValue value(const std::vector<int> & rows, const std::vector<int> & row_to_col) const
  {
    MatchValue val;
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (row_to_col[r] >= 0) {
        ++val.count;
        val.cost += cost(rows[r], row_to_col[r]);
      }
    }
    return val;
  }

private:
  const CostMatrix & cm_;
  double max_cost_;
  double big_;
};

}  // namespace detail

/// Minimum-cost matching over admissible pairs (gate_mask true, finite cost,
/// cost <= max_cost). Among matchings of maximum cardinality the total cost is
/// minimal; remaining ties resolve to the lexicographically smallest match list.
inline Assignment solve_assignment(const CostMatrix & cm, double max_cost)
{
  const int n_rows = static_cast<int>(cm.rows());
  const int n_cols = static_cast<int>(cm.cols());
  if (cm.gate_mask.rows() != cm.rows() || cm.gate_mask.cols() != cm.cols()) {
    throw Error(ErrorKind::DimensionMismatch, "gate mask shape differs from cost matrix");
  }

  std::vector<int> choice(n_rows, -1);
  if (n_rows > 0 && n_cols > 0) {
    const detail::RestrictedSolver solver(cm, max_cost);
    std::vector<int> all_rows(n_rows), all_cols(n_cols);
    for (int i = 0; i < n_rows; ++i) all_rows[i] = i;
    for (int j = 0; j < n_cols; ++j) all_cols[j] = j;

    const detail::HungarianSolution full = solver.solve(all_rows, all_cols);
    const detail::MatchValue best = solver.value(all_rows, full.row_to_col);
    choice = full.row_to_col;

    // Lexicographic refinement. A pair can belong to an optimal matching only
    // if its reduced cost under the optimal potentials is zero.
    const double rc_tol = 1e-9 * solver.big() * std::max(n_rows, n_cols);
    const double cost_tol = 1e-9 * (1.0 + std::abs(best.cost));
    std::vector<char> col_taken(n_cols, 0);
    int fixed_count = 0;
    double fixed_cost = 0.0;

    for (int i = 0; i < n_rows; ++i) {
      const int current = choice[i];
      for (int j = 0; j < (current < 0 ? n_cols : current); ++j) {
        if (col_taken[j] || !solver.admissible(i, j)) {
          continue;
        }
        const double reduced = solver.cost(i, j) - full.u[i + 1] - full.v[j + 1];
        if (std::abs(reduced) > rc_tol) {
          continue;
        }
        std::vector<int> rest_rows, rest_cols;
        for (int r = i + 1; r < n_rows; ++r) rest_rows.push_back(r);
        for (int c = 0; c < n_cols; ++c) {
          if (!col_taken[c] && c != j) rest_cols.push_back(c);
        }
        std::vector<int> rest_choice(rest_rows.size(), -1);
        if (!rest_rows.empty() && !rest_cols.empty()) {
          rest_choice = solver.solve(rest_rows, rest_cols).row_to_col;
        }
        const detail::MatchValue rest = solver.value(rest_rows, rest_choice);
        const int count = fixed_count + 1 + rest.count;
        const double total = fixed_cost + solver.cost(i, j) + rest.cost;
        if (count == best.count && std::abs(total - best.cost) <= cost_tol) {
          choice[i] = j;
          for (std::size_t r = 0; r < rest_rows.size(); ++r) {
            choice[rest_rows[r]] = rest_choice[r];
          }
          break;
        }
      }
      if (choice[i] >= 0) {
        col_taken[choice[i]] = 1;
        ++fixed_count;
        fixed_cost += solver.cost(i, choice[i]);
      }
    }
  }

  Assignment out;
  std::vector<char> det_used(n_cols, 0);
  for (int i = 0; i < n_rows; ++i) {
    if (choice[i] >= 0) {
      out.matches.emplace_back(i, choice[i]);
      det_used[choice[i]] = 1;
    } else {
      out.unmatched_tracks.push_back(i);
    }
  }
  for (int j = 0; j < n_cols; ++j) {
    if (!det_used[j]) {
      out.unmatched_detections.push_back(j);
    }
  }
  return out;
}

/// Sum of match costs in track order.
inline double total_cost(const CostMatrix & cm, const Assignment & a) noexcept
{
  double sum = 0.0;
  for (const auto & [i, j] : a.matches) {
    sum += cm.costs(i, j);
  }
  return sum;
}

}  // namespace boxkf
