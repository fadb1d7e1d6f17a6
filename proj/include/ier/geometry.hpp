#pragma once

#include <span>
#include <stdexcept>
#include <vector>

namespace ier {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Vec2 operator*(double k, Vec2 a) { return {k * a.x, k * a.y}; }
  friend bool operator==(Vec2 a, Vec2 b) = default;
};

double dot(Vec2 a, Vec2 b);
double cross(Vec2 a, Vec2 b);
double norm(Vec2 a);

struct Pose {
  Vec2 position;
  double heading = 0.0;  // radians, atan2 convention
};

/// Rigid motion: rotate by `angle` about the origin, then translate.
struct RigidTransform {
  double angle = 0.0;
  Vec2 translation;

  Vec2 apply(Vec2 p) const;
};

/// A driving path parameterized by arc length. The corridor of the path is
/// every point within width/2 of the centerline.
class PolylinePath {
 public:
  PolylinePath(std::vector<Vec2> vertices, double width);

  const std::vector<Vec2>& vertices() const { return vertices_; }
  const std::vector<double>& cum_length() const { return cum_length_; }
  double width() const { return width_; }
  double length() const { return cum_length_.back(); }

  /// Throws std::domain_error for s outside [0, length()].
  Pose pose_at(double s) const;

  /// Arc position of the point on the centerline closest to p.
  double project(Vec2 p) const;

  /// Sub-polyline covering [s0, s1].
  std::vector<Vec2> slice(double s0, double s1) const;

  PolylinePath transformed(const RigidTransform& tf) const;

 private:
  std::size_t segment_index(double s) const;

  std::vector<Vec2> vertices_;
  std::vector<double> cum_length_;
  double width_;
};

enum class ConflictKind { crossing, same_path };

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  double length() const { return hi - lo; }
  bool contains(double x) const { return x >= lo && x <= hi; }
  friend bool operator==(const Interval&, const Interval&) = default;
};

/// Overlap of two corridors expressed on both paths.
struct ConflictRegion {
  Interval ego;
  Interval other;
  ConflictKind kind = ConflictKind::crossing;
  /// For same_path regions: ego arc = other arc + offset on the aligned part.
  double offset = 0.0;
};

/// Convex occluding obstacle, counter-clockwise or clockwise vertex order.
class OccluderPolygon {
 public:
  explicit OccluderPolygon(std::vector<Vec2> vertices);

  const std::vector<Vec2>& vertices() const { return vertices_; }
  double area() const;
  OccluderPolygon transformed(const RigidTransform& tf) const;

  /// True if the open segment (a, b) passes through the interior.
  bool blocks(Vec2 a, Vec2 b) const;

 private:
  std::vector<Vec2> vertices_;
};

inline constexpr double kConflictCell = 0.05;
inline constexpr double kDefaultShadowStep = 0.5;
inline constexpr double kSamePathMinLength = 5.0;
inline constexpr double kSamePathMaxHeadingDiff = 15.0 * 3.14159265358979323846 / 180.0;

double segment_distance(Vec2 a0, Vec2 a1, Vec2 b0, Vec2 b1);
double polyline_distance(Vec2 a0, Vec2 a1, std::span<const Vec2> polyline);

/// Free function form of PolylinePath::pose_at.
Pose pose_at(const PolylinePath& path, double s);

/// All maximal overlaps of the two corridors, sorted by ego interval start.
/// Cross-sections of `ego` are sampled every kConflictCell meters.
std::vector<ConflictRegion> conflict_regions(const PolylinePath& ego, const PolylinePath& other);

/// Occluded arc intervals on `lane` as seen from `viewpoint`. Samples every
/// `sample_step` meters; interval ends are widened by one step.
std::vector<Interval> visibility_shadow(Vec2 viewpoint, std::span<const OccluderPolygon> occluders,
                                        const PolylinePath& lane,
                                        double sample_step = kDefaultShadowStep);

}  // namespace ier
