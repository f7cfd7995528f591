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

#include "kpnn/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>

#include "kpnn/error.hpp"
#include "kpnn/fenwick.hpp"

namespace kpnn {
namespace {

void require_dims(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    throw InvalidArgument(std::string(what) + ": dimension mismatch (" +
                          std::to_string(a) + " vs " + std::to_string(b) + ")");
  }
}

bool coords_equal(Coords a, Coords b) {
  return std::equal(a.begin(), a.end(), b.begin(), b.end());
}

IndexSet all_indices(std::size_t n) {
  IndexSet out(n);
  std::iota(out.begin(), out.end(), std::size_t{0});
  return out;
}

// Members of one closed orthant, with coordinates mapped so that the box
// spanned by x0 and a member becomes the set of keys below it.
struct Orthant {
  std::size_t dim = 0;
  std::vector<double> keys;  // row-major, dim per member
  std::vector<std::uint32_t> index;
  std::vector<char> owned;

  const double* key(std::size_t m) const { return keys.data() + m * dim; }
  std::size_t size() const { return index.size(); }
  void add(Coords p, std::uint64_t mask, std::uint32_t idx, bool own) {
    for (std::size_t i = 0; i < p.size(); ++i) {
      keys.push_back(((mask >> i) & 1u) ? -p[i] : p[i]);
    }
    index.push_back(idx);
    owned.push_back(own ? 1 : 0);
  }
};

// Splits the configuration into closed orthants around x0. A point lying on
// a coordinate hyperplane of x0 joins every orthant whose closure holds it,
// but is owned (reported) only by the orthant of its sign pattern.
std::vector<Orthant> split_orthants(const PointConfig& config, Coords x0) {
  const std::size_t d = config.dim();
  std::vector<std::uint64_t> masks;
  std::vector<Orthant> orthants;
  auto slot = [&](std::uint64_t mask) -> Orthant& {
    for (std::size_t s = 0; s < masks.size(); ++s) {
      if (masks[s] == mask) return orthants[s];
    }
    masks.push_back(mask);
    orthants.push_back(Orthant{});
    orthants.back().dim = d;
    return orthants.back();
  };
  std::vector<std::size_t> ties;
  for (std::size_t j = 0; j < config.size(); ++j) {
    const Coords p = config[j];
    std::uint64_t mask = 0;
    ties.clear();
    for (std::size_t i = 0; i < d; ++i) {
      if (p[i] < x0[i]) mask |= std::uint64_t{1} << i;
      if (p[i] == x0[i]) ties.push_back(i);
    }
    const auto idx = static_cast<std::uint32_t>(j);
    slot(mask).add(p, mask, idx, true);
    // Other orthants: flip any nonempty subset of the tied coordinates.
    const std::uint64_t subsets = std::uint64_t{1} << ties.size();
    for (std::uint64_t sub = 1; sub < subsets; ++sub) {
      std::uint64_t other = mask;
      for (std::size_t b = 0; b < ties.size(); ++b) {
        if ((sub >> b) & 1u) other ^= std::uint64_t{1} << ties[b];
      }
      slot(other).add(p, other, idx, false);
    }
  }
  return orthants;
}

struct PlaneEntry {
  double first;
  double second;
  std::uint32_t member;
};

std::vector<PlaneEntry> sorted_plane(const Orthant& o) {
  std::vector<PlaneEntry> e(o.size());
  for (std::size_t i = 0; i < o.size(); ++i) {
    e[i] = {o.key(i)[0], o.key(i)[1], static_cast<std::uint32_t>(i)};
  }
  std::sort(e.begin(), e.end(), [](const PlaneEntry& a, const PlaneEntry& b) {
    return a.first < b.first || (a.first == b.first && a.second < b.second);
  });
  return e;
}

// Up to this k the d = 2 sweep keeps the k + 1 smallest second keys in a
// heap instead of a full Fenwick count.
constexpr std::size_t kHeapSweepMaxK = 32;

// d = 2: sweep on the first key; the count of earlier points with a smaller
// second key comes from a Fenwick tree over second-key ranks.
void mark_plane_fenwick(const Orthant& o, std::size_t k, std::vector<char>& is_pnn) {
  const std::vector<PlaneEntry> order = sorted_plane(o);
  const std::size_t m = order.size();
  std::vector<std::pair<double, std::uint32_t>> by_second(m);
  for (std::size_t i = 0; i < m; ++i) by_second[i] = {order[i].second, static_cast<std::uint32_t>(i)};
  std::sort(by_second.begin(), by_second.end());
  std::vector<std::uint32_t> rank(m);
  std::uint32_t r = 0;
  for (std::size_t i = 0; i < m; ++i) {
    if (i > 0 && by_second[i].first != by_second[i - 1].first) ++r;
    rank[by_second[i].second] = r;
  }

  FenwickTree tree(static_cast<std::size_t>(r) + 1);
  std::size_t g0 = 0;
  while (g0 < m) {
    std::size_t g1 = g0 + 1;
    while (g1 < m && order[g1].first == order[g0].first) ++g1;
    for (std::size_t g = g0; g < g1; ++g) tree.add(rank[g]);
    for (std::size_t g = g0; g < g1; ++g) {
      const std::uint32_t member = order[g].member;
      if (!o.owned[member]) continue;
      const auto others = tree.prefix(rank[g]) - 1;
      if (static_cast<std::size_t>(others) < k) is_pnn[o.index[member]] = 1;
    }
    g0 = g1;
  }
}

// d = 2, small k: a point has at least k others below it iff the k + 1
// smallest second keys seen so far (itself included) are all <= its own.
// Members are bucketed on the first key; within a bucket, anything at or
// above the current heap top is blocked and cannot change the heap, so only
// the survivors need sorting.
void mark_plane_heap(const Orthant& o, std::size_t k, std::vector<char>& is_pnn) {
  const std::size_t m = o.size();
  if (m == 0) return;
  double lo = o.key(0)[0];
  double hi = lo;
  for (std::size_t i = 1; i < m; ++i) {
    lo = std::min(lo, o.key(i)[0]);
    hi = std::max(hi, o.key(i)[0]);
  }
  const std::size_t buckets = std::max<std::size_t>(1, m / 8);
  const double scale = hi > lo ? static_cast<double>(buckets) / (hi - lo) : 0.0;
  auto bucket_of = [&](double t) {
    const auto b = static_cast<std::size_t>((t - lo) * scale);
    return std::min(b, buckets - 1);
  };
  std::vector<std::uint32_t> start(buckets + 1, 0);
  for (std::size_t i = 0; i < m; ++i) ++start[bucket_of(o.key(i)[0]) + 1];
  for (std::size_t b = 0; b < buckets; ++b) start[b + 1] += start[b];
  std::vector<std::uint32_t> slots(m);
  {
    std::vector<std::uint32_t> fill(start.begin(), start.end() - 1);
    for (std::size_t i = 0; i < m; ++i) {
      slots[fill[bucket_of(o.key(i)[0])]++] = static_cast<std::uint32_t>(i);
    }
  }

  std::vector<double> heap;  // max-heap of the k + 1 smallest second keys
  heap.reserve(k + 2);
  std::vector<PlaneEntry> live;
  for (std::size_t b = 0; b < buckets; ++b) {
    live.clear();
    const bool full_before = heap.size() == k + 1;
    const double top = full_before ? heap.front() : 0.0;
    for (std::uint32_t s = start[b]; s < start[b + 1]; ++s) {
      const double* key = o.key(slots[s]);
      if (full_before && key[1] >= top) continue;
      live.push_back({key[0], key[1], slots[s]});
    }
    std::sort(live.begin(), live.end(), [](const PlaneEntry& a, const PlaneEntry& c) {
      return a.first < c.first || (a.first == c.first && a.second < c.second);
    });
    std::size_t g0 = 0;
    while (g0 < live.size()) {
      std::size_t g1 = g0 + 1;
      while (g1 < live.size() && live[g1].first == live[g0].first) ++g1;
      for (std::size_t g = g0; g < g1; ++g) {
        const double v = live[g].second;
        if (heap.size() < k + 1) {
          heap.push_back(v);
          std::push_heap(heap.begin(), heap.end());
        } else if (v < heap.front()) {
          std::pop_heap(heap.begin(), heap.end());
          heap.back() = v;
          std::push_heap(heap.begin(), heap.end());
        }
      }
      for (std::size_t g = g0; g < g1; ++g) {
        const std::uint32_t member = live[g].member;
        if (!o.owned[member]) continue;
        const bool blocked = heap.size() == k + 1 && heap.front() <= live[g].second;
        if (!blocked) is_pnn[o.index[member]] = 1;
      }
      g0 = g1;
    }
  }
}

bool key_leq(const double* a, const double* b, std::size_t d) {
  for (std::size_t i = 0; i < d; ++i) {
    if (!(a[i] <= b[i])) return false;
  }
  return true;
}

// Any dimension: lexicographic sweep over groups of coincident points.
// `accepted` holds k-PNN groups, `blockers` the non-k-PNN groups that do not
// dominate another non-k-PNN group.
void mark_sweep(const Orthant& o, std::size_t k, std::vector<char>& is_pnn) {
  const std::size_t m = o.size();
  const std::size_t d = o.dim;
  std::vector<std::uint32_t> order(m);
  std::iota(order.begin(), order.end(), 0u);
  std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
    return std::lexicographical_compare(o.key(a), o.key(a) + d, o.key(b),
                                        o.key(b) + d);
  });

  struct Group {
    const double* key;
    std::size_t weight;
  };
  std::vector<Group> accepted;
  std::vector<const double*> blockers;

  std::size_t g0 = 0;
  while (g0 < m) {
    const double* key = o.key(order[g0]);
    std::size_t g1 = g0 + 1;
    while (g1 < m && std::equal(key, key + d, o.key(order[g1]))) ++g1;
    const std::size_t weight = g1 - g0;

    bool blocked = false;
    for (const double* b : blockers) {
      if (key_leq(b, key, d)) {
        blocked = true;
        break;
      }
    }
    bool pnn = false;
    if (!blocked) {
      std::size_t count = weight - 1;
      for (const Group& a : accepted) {
        if (count >= k) break;
        if (key_leq(a.key, key, d)) count += a.weight;
      }
      pnn = count < k;
      if (pnn) {
        accepted.push_back({key, weight});
      } else {
        blockers.push_back(key);
      }
    }
    if (pnn) {
      for (std::size_t g = g0; g < g1; ++g) {
        if (o.owned[order[g]]) is_pnn[o.index[order[g]]] = 1;
      }
    }
    g0 = g1;
  }
}

}  // namespace

bool HyperRect::contains(Coords p) const {
  require_dims(dim(), p.size(), "HyperRect::contains");
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (!(lo[i] <= p[i] && p[i] <= hi[i])) return false;
  }
  return true;
}

double HyperRect::volume() const { return rect_volume(lo, hi); }

PointConfig::PointConfig(std::size_t dim) : dim_(dim) {
  if (dim == 0) throw InvalidArgument("PointConfig: dimension must be positive");
}

PointConfig::PointConfig(std::size_t dim, std::vector<double> flat)
    : dim_(dim), data_(std::move(flat)) {
  if (dim == 0) throw InvalidArgument("PointConfig: dimension must be positive");
  if (data_.size() % dim != 0) {
    throw InvalidArgument("PointConfig: flat size is not a multiple of dim");
  }
  for (double v : data_) {
    if (!std::isfinite(v)) throw InvalidArgument("PointConfig: non-finite coordinate");
  }
}

PointConfig PointConfig::from_points(std::size_t dim, const std::vector<Point>& pts) {
  PointConfig out(dim);
  out.reserve(pts.size());
  for (const Point& p : pts) out.push_back(p);
  return out;
}

void PointConfig::push_back(Coords p) {
  require_dims(dim_, p.size(), "PointConfig::push_back");
  for (double v : p) {
    if (!std::isfinite(v)) throw InvalidArgument("PointConfig: non-finite coordinate");
  }
  data_.insert(data_.end(), p.begin(), p.end());
}

PointConfig PointConfig::subset(const IndexSet& ids) const {
  PointConfig out(dim_);
  out.reserve(ids.size());
  for (std::size_t i : ids) out.push_back((*this)[i]);
  return out;
}

HyperRect rect_between(Coords a, Coords b) {
  require_dims(a.size(), b.size(), "rect_between");
  HyperRect r;
  r.lo.coords.resize(a.size());
  r.hi.coords.resize(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    r.lo.coords[i] = std::min(a[i], b[i]);
    r.hi.coords[i] = std::max(a[i], b[i]);
  }
  return r;
}

double rect_volume(Coords a, Coords b) {
  require_dims(a.size(), b.size(), "rect_volume");
  double v = 1.0;
  for (std::size_t i = 0; i < a.size(); ++i) v *= std::abs(a[i] - b[i]);
  return v;
}

bool in_rect_between(Coords a, Coords b, Coords p) {
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double lo = std::min(a[i], b[i]);
    const double hi = std::max(a[i], b[i]);
    if (!(lo <= p[i] && p[i] <= hi)) return false;
  }
  return true;
}

std::size_t count_in_rect_excl(const PointConfig& config, Coords x0, Coords x) {
  require_dims(config.dim(), x0.size(), "count_in_rect_excl");
  require_dims(config.dim(), x.size(), "count_in_rect_excl");
  std::size_t count = 0;
  bool skipped_self = false;
  for (std::size_t j = 0; j < config.size(); ++j) {
    const Coords p = config[j];
    if (!skipped_self && coords_equal(p, x)) {
      skipped_self = true;
      continue;
    }
    if (in_rect_between(x0, x, p)) ++count;
  }
  return count;
}

std::size_t count_in_rect_of(const PointConfig& config, Coords x0, std::size_t i) {
  require_dims(config.dim(), x0.size(), "count_in_rect_of");
  if (i >= config.size()) throw InvalidArgument("count_in_rect_of: index out of range");
  const Coords x = config[i];
  std::size_t count = 0;
  for (std::size_t j = 0; j < config.size(); ++j) {
    if (j != i && in_rect_between(x0, x, config[j])) ++count;
  }
  return count;
}

bool is_kpnn(const PointConfig& config, Coords x0, std::size_t i, std::size_t k) {
  if (k == 0) throw InvalidArgument("is_kpnn: k must be positive");
  return count_in_rect_of(config, x0, i) < k;
}

bool is_kpnn(const PointConfig& config, Coords x0, Coords x, std::size_t k) {
  require_dims(config.dim(), x.size(), "is_kpnn");
  if (k == 0) throw InvalidArgument("is_kpnn: k must be positive");
  for (std::size_t j = 0; j < config.size(); ++j) {
    if (coords_equal(config[j], x)) return count_in_rect_excl(config, x0, x) < k;
  }
  throw InvalidArgument("is_kpnn: point is not in the configuration");
}

IndexSet kpnn_set(const PointConfig& config, Coords x0, std::size_t k) {
  require_dims(config.dim(), x0.size(), "kpnn_set");
  if (k == 0) throw InvalidArgument("kpnn_set: k must be positive");
  IndexSet out;
  for (std::size_t i = 0; i < config.size(); ++i) {
    if (count_in_rect_of(config, x0, i) < k) out.push_back(i);
  }
  return out;
}

IndexSet kpnn_set_fast(const PointConfig& config, Coords x0, std::size_t k) {
  require_dims(config.dim(), x0.size(), "kpnn_set_fast");
  if (k == 0) throw InvalidArgument("kpnn_set_fast: k must be positive");
  const std::size_t n = config.size();
  if (n == 0) return {};
  if (k >= n) return all_indices(n);
  const std::size_t d = config.dim();
  if (d >= 64 || n > UINT32_MAX) return kpnn_set(config, x0, k);

  std::vector<char> is_pnn(n, 0);
  for (const Orthant& o : split_orthants(config, x0)) {
    if (d == 2 && k <= kHeapSweepMaxK) {
      mark_plane_heap(o, k, is_pnn);
    } else if (d == 2) {
      mark_plane_fenwick(o, k, is_pnn);
    } else {
      mark_sweep(o, k, is_pnn);
    }
  }
  IndexSet out;
  for (std::size_t j = 0; j < n; ++j) {
    if (is_pnn[j]) out.push_back(j);
  }
  return out;
}

}  // namespace kpnn
