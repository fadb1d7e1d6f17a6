#include "ier/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace ier {

double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
double norm(Vec2 a) { return std::hypot(a.x, a.y); }

Vec2 RigidTransform::apply(Vec2 p) const {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  return {c * p.x - s * p.y + translation.x, s * p.x + c * p.y + translation.y};
}

namespace {

double wrap_angle(double a) {
  a = std::fmod(a + std::numbers::pi, 2.0 * std::numbers::pi);
  if (a < 0.0) a += 2.0 * std::numbers::pi;
  return a - std::numbers::pi;
}

double point_segment_distance(Vec2 p, Vec2 a, Vec2 b) {
  const Vec2 d = b - a;
  const double len2 = dot(d, d);
  double t = len2 > 0.0 ? dot(p - a, d) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return norm(p - (a + t * d));
}

bool segments_intersect(Vec2 a0, Vec2 a1, Vec2 b0, Vec2 b1) {
  const double d1 = cross(a1 - a0, b0 - a0);
  const double d2 = cross(a1 - a0, b1 - a0);
  const double d3 = cross(b1 - b0, a0 - b0);
  const double d4 = cross(b1 - b0, a1 - b0);
  return ((d1 > 0.0) != (d2 > 0.0)) && ((d3 > 0.0) != (d4 > 0.0)) && d1 != 0.0 && d2 != 0.0 &&
         d3 != 0.0 && d4 != 0.0;
}

struct Box {
  double x0, y0, x1, y1;
};

Box bounds(std::span<const Vec2> pts, double pad) {
  Box b{pts[0].x, pts[0].y, pts[0].x, pts[0].y};
  for (const auto& p : pts) {
    b.x0 = std::min(b.x0, p.x);
    b.y0 = std::min(b.y0, p.y);
    b.x1 = std::max(b.x1, p.x);
    b.y1 = std::max(b.y1, p.y);
  }
  b.x0 -= pad;
  b.y0 -= pad;
  b.x1 += pad;
  b.y1 += pad;
  return b;
}

bool inside(const Box& b, Vec2 p) { return p.x >= b.x0 && p.x <= b.x1 && p.y >= b.y0 && p.y <= b.y1; }

// Sample grid shared by conflict detection. Positions are computed as i*h,
// never accumulated.
std::size_t sample_count(double length, double h) {
  return static_cast<std::size_t>(std::floor(length / h)) + 1;
}

std::pair<Vec2, Vec2> cross_section(const PolylinePath& path, double s) {
  const Pose pose = path.pose_at(s);
  const Vec2 n{-std::sin(pose.heading), std::cos(pose.heading)};
  const double half = 0.5 * path.width();
  return {pose.position - half * n, pose.position + half * n};
}

struct Run {
  std::size_t first;
  std::size_t last;
};

std::vector<Run> runs_of(const std::vector<bool>& flags) {
  std::vector<Run> runs;
  for (std::size_t i = 0; i < flags.size(); ++i) {
    if (!flags[i]) continue;
    if (!runs.empty() && runs.back().last + 1 == i) {
      runs.back().last = i;
    } else {
      runs.push_back({i, i});
    }
  }
  return runs;
}

// Flags for every cross-section of `path` touching the corridor around
// `target` (half width `target_half`).
std::vector<bool> overlap_flags(const PolylinePath& path, std::span<const Vec2> target,
                                double target_half) {
  const double h = kConflictCell;
  const std::size_t n = sample_count(path.length(), h);
  const Box box = bounds(target, target_half + 0.5 * path.width());
  std::vector<bool> flags(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    const double s = static_cast<double>(i) * h;
    if (!inside(box, path.pose_at(s).position)) continue;
    const auto [c0, c1] = cross_section(path, s);
    flags[i] = polyline_distance(c0, c1, target) <= target_half;
  }
  return flags;
}

Interval run_interval(const PolylinePath& path, const Run& run, std::size_t n) {
  const double h = kConflictCell;
  Interval iv{static_cast<double>(run.first) * h, static_cast<double>(run.last) * h};
  if (run.last + 1 == n) iv.hi = path.length();
  return iv;
}

}  // namespace

PolylinePath::PolylinePath(std::vector<Vec2> vertices, double width)
    : vertices_(std::move(vertices)), width_(width) {
  if (vertices_.size() < 2) throw std::invalid_argument("path needs at least two vertices");
  if (!(width_ > 0.0)) throw std::invalid_argument("path width must be positive");
  cum_length_.reserve(vertices_.size());
  cum_length_.push_back(0.0);
  for (std::size_t i = 1; i < vertices_.size(); ++i) {
    const double seg = norm(vertices_[i] - vertices_[i - 1]);
    if (!(seg > 0.0)) throw std::invalid_argument("consecutive path vertices coincide");
    cum_length_.push_back(cum_length_.back() + seg);
  }
}

std::size_t PolylinePath::segment_index(double s) const {
  const auto it = std::upper_bound(cum_length_.begin(), cum_length_.end(), s);
  const auto idx = static_cast<std::size_t>(std::distance(cum_length_.begin(), it));
  return std::clamp<std::size_t>(idx, 1, vertices_.size() - 1) - 1;
}

Pose PolylinePath::pose_at(double s) const {
  if (!(s >= 0.0 && s <= length())) throw std::domain_error("arc position outside path");
  const std::size_t i = segment_index(s);
  const Vec2 a = vertices_[i];
  const Vec2 b = vertices_[i + 1];
  const double seg = cum_length_[i + 1] - cum_length_[i];
  const double t = (s - cum_length_[i]) / seg;
  const Vec2 d = b - a;
  return {a + t * d, std::atan2(d.y, d.x)};
}

double PolylinePath::project(Vec2 p) const {
  double best = std::numeric_limits<double>::infinity();
  double best_s = 0.0;
  for (std::size_t i = 0; i + 1 < vertices_.size(); ++i) {
    const Vec2 a = vertices_[i];
    const Vec2 d = vertices_[i + 1] - a;
    const double len2 = dot(d, d);
    const double t = std::clamp(dot(p - a, d) / len2, 0.0, 1.0);
    const double dist = norm(p - (a + t * d));
    if (dist < best) {
      best = dist;
      best_s = cum_length_[i] + t * (cum_length_[i + 1] - cum_length_[i]);
    }
  }
  return best_s;
}

std::vector<Vec2> PolylinePath::slice(double s0, double s1) const {
  s0 = std::clamp(s0, 0.0, length());
  s1 = std::clamp(s1, s0, length());
  std::vector<Vec2> out{pose_at(s0).position};
  for (std::size_t i = 1; i + 1 < vertices_.size(); ++i) {
    if (cum_length_[i] > s0 && cum_length_[i] < s1) out.push_back(vertices_[i]);
  }
  out.push_back(pose_at(s1).position);
  return out;
}

PolylinePath PolylinePath::transformed(const RigidTransform& tf) const {
  std::vector<Vec2> v;
  v.reserve(vertices_.size());
  for (const auto& p : vertices_) v.push_back(tf.apply(p));
  return PolylinePath(std::move(v), width_);
}

Pose pose_at(const PolylinePath& path, double s) { return path.pose_at(s); }

OccluderPolygon::OccluderPolygon(std::vector<Vec2> vertices) : vertices_(std::move(vertices)) {
  if (vertices_.size() < 3) throw std::invalid_argument("occluder needs at least three vertices");
  if (!(std::abs(area()) > 1e-9)) throw std::invalid_argument("degenerate occluder");
  double sign = 0.0;
  const std::size_t n = vertices_.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 e0 = vertices_[(i + 1) % n] - vertices_[i];
    const Vec2 e1 = vertices_[(i + 2) % n] - vertices_[(i + 1) % n];
    const double c = cross(e0, e1);
    if (c == 0.0) continue;
    if (sign == 0.0) sign = c;
    if ((c > 0.0) != (sign > 0.0)) throw std::invalid_argument("occluder is not convex");
  }
}

double OccluderPolygon::area() const {
  double a = 0.0;
  const std::size_t n = vertices_.size();
  for (std::size_t i = 0; i < n; ++i) a += cross(vertices_[i], vertices_[(i + 1) % n]);
  return 0.5 * a;
}

OccluderPolygon OccluderPolygon::transformed(const RigidTransform& tf) const {
  std::vector<Vec2> v;
  v.reserve(vertices_.size());
  for (const auto& p : vertices_) v.push_back(tf.apply(p));
  return OccluderPolygon(std::move(v));
}

bool OccluderPolygon::blocks(Vec2 a, Vec2 b) const {
  // Cyrus-Beck clipping against the convex interior.
  const double orient = area() > 0.0 ? 1.0 : -1.0;
  const Vec2 d = b - a;
  double t_enter = 0.0;
  double t_leave = 1.0;
  const std::size_t n = vertices_.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 v0 = vertices_[i];
    const Vec2 e = vertices_[(i + 1) % n] - v0;
    const Vec2 outward{orient * e.y, -orient * e.x};
    const double num = dot(outward, v0 - a);
    const double den = dot(outward, d);
    if (den == 0.0) {
      if (num <= 0.0) return false;
      continue;
    }
    const double t = num / den;
    if (den < 0.0) {
      t_enter = std::max(t_enter, t);
    } else {
      t_leave = std::min(t_leave, t);
    }
    if (t_enter >= t_leave) return false;
  }
  return t_leave - t_enter > 1e-12;
}

double segment_distance(Vec2 a0, Vec2 a1, Vec2 b0, Vec2 b1) {
  if (segments_intersect(a0, a1, b0, b1)) return 0.0;
  return std::min({point_segment_distance(a0, b0, b1), point_segment_distance(a1, b0, b1),
                   point_segment_distance(b0, a0, a1), point_segment_distance(b1, a0, a1)});
}

double polyline_distance(Vec2 a0, Vec2 a1, std::span<const Vec2> polyline) {
  double best = std::numeric_limits<double>::infinity();
  if (polyline.size() == 1) return point_segment_distance(polyline[0], a0, a1);
  for (std::size_t i = 0; i + 1 < polyline.size(); ++i) {
    best = std::min(best, segment_distance(a0, a1, polyline[i], polyline[i + 1]));
    if (best == 0.0) break;
  }
  return best;
}

std::vector<ConflictRegion> conflict_regions(const PolylinePath& ego, const PolylinePath& other) {
  const double h = kConflictCell;
  const auto ego_flags = overlap_flags(ego, other.vertices(), 0.5 * other.width());
  const std::size_t n_ego = ego_flags.size();

  std::vector<ConflictRegion> regions;
  for (const Run& run : runs_of(ego_flags)) {
    ConflictRegion region;
    region.ego = run_interval(ego, run, n_ego);

    const auto part = ego.slice(region.ego.lo, region.ego.hi);
    const auto other_flags = overlap_flags(other, part, 0.5 * ego.width());
    const auto other_runs = runs_of(other_flags);
    if (other_runs.empty()) continue;
    const Interval first = run_interval(other, other_runs.front(), other_flags.size());
    const Interval last = run_interval(other, other_runs.back(), other_flags.size());
    region.other = {first.lo, last.hi};

    std::vector<double> offsets;
    for (std::size_t i = run.first; i <= run.last; ++i) {
      const double s = static_cast<double>(i) * h;
      const Pose pe = ego.pose_at(s);
      const double u = other.project(pe.position);
      const Pose po = other.pose_at(u);
      if (std::abs(wrap_angle(pe.heading - po.heading)) < kSamePathMaxHeadingDiff) {
        offsets.push_back(s - u);
      }
    }
    if (static_cast<double>(offsets.size()) * h >= kSamePathMinLength) {
      region.kind = ConflictKind::same_path;
      const auto mid = offsets.begin() + static_cast<std::ptrdiff_t>(offsets.size() / 2);
      std::nth_element(offsets.begin(), mid, offsets.end());
      region.offset = std::round(*mid * 1000.0) / 1000.0;
    }
    regions.push_back(region);
  }
  std::sort(regions.begin(), regions.end(),
            [](const ConflictRegion& a, const ConflictRegion& b) { return a.ego.lo < b.ego.lo; });
  return regions;
}

std::vector<Interval> visibility_shadow(Vec2 viewpoint, std::span<const OccluderPolygon> occluders,
                                        const PolylinePath& lane, double sample_step) {
  if (!(sample_step > 0.0)) throw std::invalid_argument("sample_step must be positive");
  std::vector<Interval> out;
  if (occluders.empty()) return out;
  const std::size_t n = sample_count(lane.length(), sample_step);
  bool open = false;
  double first = 0.0;
  double last = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double u = static_cast<double>(k) * sample_step;
    const Vec2 p = lane.pose_at(u).position;
    const bool hidden = std::any_of(occluders.begin(), occluders.end(),
                                    [&](const OccluderPolygon& o) { return o.blocks(viewpoint, p); });
    if (hidden) {
      if (!open) first = u;
      last = u;
      open = true;
    } else if (open) {
      out.push_back({std::max(0.0, first - sample_step), std::min(lane.length(), last + sample_step)});
      open = false;
    }
  }
  if (open) {
    out.push_back({std::max(0.0, first - sample_step), std::min(lane.length(), last + sample_step)});
  }
  return out;
}

}  // namespace ier
