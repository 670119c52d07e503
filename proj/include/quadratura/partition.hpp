#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "quadratura/errors.hpp"

namespace quadratura {

/// Closed bounded interval [a, b], a <= b. Degenerate intervals are allowed.
struct Interval {
  double a = 0.0;
  double b = 0.0;

  Interval() = default;
  Interval(double lo, double hi) : a(lo), b(hi) {
    if (!std::isfinite(lo) || !std::isfinite(hi))
      throw DomainError("interval endpoints must be finite");
    if (lo > hi)
      throw DomainError("interval [" + std::to_string(lo) + ", " + std::to_string(hi) +
                        "] has a > b");
  }

  double length() const { return b - a; }
  bool degenerate() const { return a == b; }
  bool contains(double x) const { return a <= x && x <= b; }
};

/// Strictly increasing abscissae x0 < x1 < ... < xn with at least two points.
class Partition {
 public:
  explicit Partition(std::vector<double> points) : points_(std::move(points)) {
    if (points_.size() < 2) throw DomainError("a partition needs at least two points");
    for (std::size_t i = 1; i < points_.size(); ++i)
      if (!(points_[i - 1] < points_[i]))
        throw DomainError("partition points must be strictly increasing (index " +
                          std::to_string(i) + ")");
  }

  const std::vector<double>& points() const { return points_; }
  std::size_t cells() const { return points_.size() - 1; }
  double point(std::size_t i) const { return points_[i]; }
  Interval cell(std::size_t i) const { return {points_[i], points_[i + 1]}; }
  Interval span() const { return {points_.front(), points_.back()}; }

  double norm() const {
    double m = 0.0;
    for (std::size_t i = 1; i < points_.size(); ++i) m = std::max(m, points_[i] - points_[i - 1]);
    return m;
  }

  /// Bisects every cell.
  Partition refined() const {
    std::vector<double> pts;
    pts.reserve(2 * points_.size() - 1);
    for (std::size_t i = 0; i + 1 < points_.size(); ++i) {
      pts.push_back(points_[i]);
      const double mid = points_[i] + 0.5 * (points_[i + 1] - points_[i]);
      if (points_[i] < mid && mid < points_[i + 1]) pts.push_back(mid);
    }
    pts.push_back(points_.back());
    return Partition(std::move(pts));
  }

  /// True when every point of `coarser` is a point of this partition and both span the same interval.
  bool refines(const Partition& coarser) const {
    if (coarser.points_.front() != points_.front() || coarser.points_.back() != points_.back())
      return false;
    std::size_t j = 0;
    for (double p : coarser.points_) {
      while (j < points_.size() && points_[j] < p) ++j;
      if (j == points_.size() || points_[j] != p) return false;
    }
    return true;
  }

 private:
  std::vector<double> points_;
};

/// k-th of n equally spaced points on iv, computed as a + k*(b-a)/n with the
/// last point pinned to b.
inline double uniform_point(const Interval& iv, std::size_t k, std::size_t n) {
  if (k == n) return iv.b;
  return iv.a + static_cast<double>(k) * (iv.length() / static_cast<double>(n));
}

inline Partition uniform_partition(const Interval& iv, std::size_t n) {
  if (n < 1) throw DomainError("uniform_partition needs at least one cell");
  if (iv.degenerate()) throw DomainError("cannot partition a degenerate interval");
  std::vector<double> pts(n + 1);
  for (std::size_t k = 0; k <= n; ++k) pts[k] = uniform_point(iv, k, n);
  return Partition(std::move(pts));
}

inline constexpr int kMinLemmaLevel = 3;
inline constexpr int kMaxLemmaLevel = 24;

inline void check_lemma_level(int n) {
  if (n < kMinLemmaLevel)
    throw DomainError("level n = " + std::to_string(n) + " is below 3; the grid starts at n = 3");
  if (n > kMaxLemmaLevel)
    throw ResourceError("level n = " + std::to_string(n) + " exceeds the cap of " +
                        std::to_string(kMaxLemmaLevel));
}

/// Ramp width (b - a) / (n 2^n).
inline double epsilon_n(const Interval& iv, int n) {
  check_lemma_level(n);
  return iv.length() / (static_cast<double>(n) * std::ldexp(1.0, n));
}

/// Approximation-lemma subdivision: 2^n equal blocks I_k, each split into four
/// sub-intervals. Interior blocks have outer pieces of width epsilon_n and two
/// equal middle pieces; the first block has its last piece of width epsilon_n
/// and three equal leading pieces; the last block mirrors the first.
///
/// Blocks are indexed from 0 here (block 0 is I_1).
class LemmaGrid {
 public:
  LemmaGrid(const Interval& iv, int n) : iv_(iv), n_(n) {
    check_lemma_level(n);
    if (iv.degenerate()) throw DomainError("lemma grid needs a non-degenerate interval");
    blocks_ = std::size_t{1} << n;
    block_length_ = std::ldexp(iv.length(), -n);
    eps_ = epsilon_n(iv, n);
  }

  const Interval& interval() const { return iv_; }
  int level() const { return n_; }
  std::size_t blocks() const { return blocks_; }
  std::size_t sub_interval_count() const { return 4 * blocks_; }
  double block_length() const { return block_length_; }
  double epsilon() const { return eps_; }

  double block_start(std::size_t k) const {
    if (k >= blocks_) return iv_.b;
    return iv_.a + static_cast<double>(k) * block_length_;
  }

  Interval block(std::size_t k) const { return {block_start(k), block_start(k + 1)}; }

  /// Five edges e0 < e1 < e2 < e3 < e4 of block k; sub-interval j is [e_j, e_{j+1}].
  std::array<double, 5> edges(std::size_t k) const {
    const double s = block_start(k);
    const double end = block_start(k + 1);
    const double len = block_length_;
    if (k == 0) {
      const double q = (len - eps_) / 3.0;
      return {s, s + q, s + 2.0 * q, end - eps_, end};
    }
    if (k + 1 == blocks_) {
      const double q = (len - eps_) / 3.0;
      return {s, s + eps_, s + eps_ + q, s + eps_ + 2.0 * q, end};
    }
    const double mid = (len - 2.0 * eps_) / 2.0;
    return {s, s + eps_, s + eps_ + mid, end - eps_, end};
  }

  Interval sub_interval(std::size_t k, int j) const {
    const auto e = edges(k);
    return {e[static_cast<std::size_t>(j)], e[static_cast<std::size_t>(j) + 1]};
  }

  /// All 4 * 2^n sub-intervals, left to right.
  std::vector<Interval> sub_intervals() const {
    std::vector<Interval> out;
    out.reserve(sub_interval_count());
    for (std::size_t k = 0; k < blocks_; ++k) {
      const auto e = edges(k);
      for (std::size_t j = 0; j < 4; ++j) out.emplace_back(e[j], e[j + 1]);
    }
    return out;
  }

  /// Partition by the block endpoints (2^n cells).
  Partition block_partition() const {
    std::vector<double> pts(blocks_ + 1);
    for (std::size_t k = 0; k <= blocks_; ++k) pts[k] = block_start(k);
    return Partition(std::move(pts));
  }

 private:
  Interval iv_;
  int n_;
  std::size_t blocks_ = 0;
  double block_length_ = 0.0;
  double eps_ = 0.0;
};

inline LemmaGrid lemma_grid(const Interval& iv, int n) { return LemmaGrid(iv, n); }

}  // namespace quadratura
