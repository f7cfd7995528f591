// Copyright 2026 The kpnn-forest Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef KPNN_GEOMETRY_HPP_
#define KPNN_GEOMETRY_HPP_

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace kpnn {

using Coords = std::span<const double>;
using IndexSet = std::vector<std::size_t>;  // ascending, no duplicates

/// A point of R^d.
struct Point {
  std::vector<double> coords;

  Point() = default;
  explicit Point(std::vector<double> c) : coords(std::move(c)) {}
  Point(std::initializer_list<double> c) : coords(c) {}
  explicit Point(Coords c) : coords(c.begin(), c.end()) {}

  std::size_t dim() const { return coords.size(); }
  double operator[](std::size_t i) const { return coords[i]; }
  operator Coords() const { return coords; }  // NOLINT(google-explicit-constructor)

  friend bool operator==(const Point&, const Point&) = default;
};

/// Closed axis-parallel box [lo, hi].
struct HyperRect {
  Point lo;
  Point hi;

  std::size_t dim() const { return lo.dim(); }
  bool contains(Coords p) const;
  double volume() const;
};

/// Finite indexed point set of fixed dimension, stored row-major.
class PointConfig {
 public:
  explicit PointConfig(std::size_t dim = 1);
  PointConfig(std::size_t dim, std::vector<double> flat);
  static PointConfig from_points(std::size_t dim, const std::vector<Point>& pts);

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return data_.size() / dim_; }
  bool empty() const { return data_.empty(); }

  Coords operator[](std::size_t i) const {
    return Coords(data_.data() + i * dim_, dim_);
  }
  void push_back(Coords p);
  void reserve(std::size_t n) { data_.reserve(n * dim_); }
  const std::vector<double>& flat() const { return data_; }

  // Points ids[0], ids[1], ... re-indexed as 0..ids.size()-1.
  PointConfig subset(const IndexSet& ids) const;

 private:
  std::size_t dim_;
  std::vector<double> data_;
};

/// The closed box spanned by two points: componentwise min and max.
HyperRect rect_between(Coords a, Coords b);

/// Product of coordinatewise absolute differences.
double rect_volume(Coords a, Coords b);

/// True iff p lies in the closed box spanned by a and b.
bool in_rect_between(Coords a, Coords b, Coords p);

/// Number of configuration points inside Rect(x0, x), not counting one
/// occurrence of a point equal to x (if any).
std::size_t count_in_rect_excl(const PointConfig& config, Coords x0, Coords x);

/// Same count for the configuration point with index `i`, excluding that
/// index itself.
std::size_t count_in_rect_of(const PointConfig& config, Coords x0, std::size_t i);

/// Whether configuration point `i` is a k-potential nearest neighbour of x0:
/// fewer than k other configuration points lie in Rect(x0, x_i).
bool is_kpnn(const PointConfig& config, Coords x0, std::size_t i, std::size_t k);

/// Point-valued variant; throws InvalidArgument if x is not in the
/// configuration.
bool is_kpnn(const PointConfig& config, Coords x0, Coords x, std::size_t k);

/// Reference k-PNN set by the quadratic scan. Used as the oracle.
IndexSet kpnn_set(const PointConfig& config, Coords x0, std::size_t k);

/// Accelerated k-PNN set, identical output to kpnn_set.
///
/// The configuration is split into the 2^d closed orthants around x0. Inside
/// an orthant, distances to x0 become plain coordinates (negated on the
/// negative side), so membership in Rect(x0, x) turns into componentwise
/// dominance. For d = 2 the dominance counts come from a sweep over the first
/// coordinate with a Fenwick tree on the ranks of the second; for small k a
/// heap of the k + 1 smallest second coordinates replaces the tree, and
/// points already above the heap top are dropped before sorting. Other
/// dimensions sweep in lexicographic order and test each point only against
/// the k-PNNs found so far plus the minimal non-k-PNNs, which is enough: a
/// point dominating a non-k-PNN cannot itself be one.
IndexSet kpnn_set_fast(const PointConfig& config, Coords x0, std::size_t k);

}  // namespace kpnn

#endif  // KPNN_GEOMETRY_HPP_
