#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace cts {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using Vec3 = Eigen::Vector3d;
using Index = Eigen::Index;

/// Gather v at the given (0-based) indices.
inline Vec gather(const Vec& v, const std::vector<int>& idx) {
  Vec out(static_cast<Index>(idx.size()));
  for (std::size_t i = 0; i < idx.size(); ++i) out[static_cast<Index>(i)] = v[idx[i]];
  return out;
}

/// Scatter-add values into a vector of size n at the given indices.
inline void scatter_add(Vec& target, const std::vector<int>& idx, const Vec& values) {
  for (std::size_t i = 0; i < idx.size(); ++i) target[idx[i]] += values[static_cast<Index>(i)];
}

/// Sub-block M(rows, cols) for index-list reductions (E_a^T M E_b patterns).
inline Mat submatrix(const Mat& m, const std::vector<int>& rows, const std::vector<int>& cols) {
  Mat out(static_cast<Index>(rows.size()), static_cast<Index>(cols.size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < cols.size(); ++j)
      out(static_cast<Index>(i), static_cast<Index>(j)) = m(rows[i], cols[j]);
  return out;
}

inline bool all_finite(const Vec& v) { return v.allFinite(); }

/// Piecewise-linear trajectory. Constant extrapolation outside the knot range,
/// zero slope there accordingly.
class PiecewiseLinear {
 public:
  PiecewiseLinear() = default;

  PiecewiseLinear(std::vector<double> times, std::vector<double> values)
      : t_(std::move(times)), v_(std::move(values)) {
    if (t_.size() != v_.size() || t_.empty())
      throw std::invalid_argument("piecewise-linear trajectory needs matching, nonempty knots");
    for (std::size_t i = 1; i < t_.size(); ++i)
      if (t_[i] <= t_[i - 1])
        throw std::invalid_argument("piecewise-linear knots must be strictly increasing");
  }

  static PiecewiseLinear constant(double value) { return PiecewiseLinear({0.0}, {value}); }

  bool empty() const { return t_.empty(); }
  double t_begin() const { return t_.front(); }
  double t_end() const { return t_.back(); }

  double value(double t) const {
    if (t_.size() == 1 || t <= t_.front()) return v_.front();
    if (t >= t_.back()) return v_.back();
    const std::size_t k = segment(t);
    const double w = (t - t_[k]) / (t_[k + 1] - t_[k]);
    return (1.0 - w) * v_[k] + w * v_[k + 1];
  }

  double slope(double t) const {
    if (t_.size() == 1 || t < t_.front() || t > t_.back()) return 0.0;
    const std::size_t k = segment(t);
    return (v_[k + 1] - v_[k]) / (t_[k + 1] - t_[k]);
  }

  const std::vector<double>& knot_times() const { return t_; }
  const std::vector<double>& knot_values() const { return v_; }

 private:
  std::size_t segment(double t) const {
    std::size_t lo = 0, hi = t_.size() - 1;
    while (hi - lo > 1) {
      const std::size_t mid = (lo + hi) / 2;
      (t_[mid] <= t ? lo : hi) = mid;
    }
    return lo;
  }

  std::vector<double> t_;
  std::vector<double> v_;
};

}  // namespace cts
