#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>

#include "planbench/error.hpp"

namespace planbench {

/// Top-view workspace coordinates as fractions of the table: x grows to the
/// right, y grows away from the robot. Front-view points reuse the same type.
struct Point {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
};

inline Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
inline Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
inline Point operator*(double s, Point p) { return {s * p.x, s * p.y}; }

inline double dot(Point a, Point b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point a, Point b) { return a.x * b.y - a.y * b.x; }
inline double distance(Point a, Point b) { return std::hypot(a.x - b.x, a.y - b.y); }

inline bool is_finite(Point p) { return std::isfinite(p.x) && std::isfinite(p.y); }
inline bool in_unit_square(Point p) { return p.x >= 0.0 && p.x <= 1.0 && p.y >= 0.0 && p.y <= 1.0; }

inline double deg_to_rad(double deg) { return deg * std::numbers::pi / 180.0; }

/// Reduces an angle in degrees to [0, 360).
inline double normalize_deg(double deg) {
  double r = std::fmod(deg, 360.0);
  if (r < 0.0) r += 360.0;
  if (r >= 360.0) r -= 360.0;
  return r;
}

/// Smallest absolute difference between two headings, in [0, 180].
inline double angular_distance_deg(double a, double b) {
  double d = std::fabs(normalize_deg(a) - normalize_deg(b));
  return std::min(d, 360.0 - d);
}

/// Rotates v by -deg, i.e. expresses a world-frame offset in a frame that is
/// rotated by deg.
inline Point rotate_into_frame(Point v, double deg) {
  const double c = std::cos(deg_to_rad(deg));
  const double s = std::sin(deg_to_rad(deg));
  return {c * v.x + s * v.y, -s * v.x + c * v.y};
}

inline double point_segment_distance(Point p, Point a, Point b) {
  const Point ab = b - a;
  const double len2 = dot(ab, ab);
  if (len2 == 0.0) return distance(p, a);
  const double t = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
  return distance(p, a + t * ab);
}

/// Closed-segment intersection test, including collinear overlap.
inline bool segments_intersect(Point p1, Point p2, Point q1, Point q2) {
  auto orient = [](Point a, Point b, Point c) {
    const double v = cross(b - a, c - a);
    return (v > 0.0) - (v < 0.0);
  };
  auto on_segment = [](Point a, Point b, Point c) {
    return std::min(a.x, b.x) <= c.x && c.x <= std::max(a.x, b.x) &&
           std::min(a.y, b.y) <= c.y && c.y <= std::max(a.y, b.y);
  };
  const int o1 = orient(p1, p2, q1);
  const int o2 = orient(p1, p2, q2);
  const int o3 = orient(q1, q2, p1);
  const int o4 = orient(q1, q2, p2);
  if (o1 != o2 && o3 != o4) return true;
  if (o1 == 0 && on_segment(p1, p2, q1)) return true;
  if (o2 == 0 && on_segment(p1, p2, q2)) return true;
  if (o3 == 0 && on_segment(q1, q2, p1)) return true;
  if (o4 == 0 && on_segment(q1, q2, p2)) return true;
  return false;
}

/// Per-axis affine calibration from front-view (u, v) to top-view (x, y):
///   x = a_u * u + b_u,  y = a_v * v + b_v.
/// Both slopes must be non-zero; this is enforced at construction.
class Affine2 {
 public:
  Affine2() = default;
  Affine2(double a_u, double b_u, double a_v, double b_v) : a_u_(a_u), b_u_(b_u), a_v_(a_v), b_v_(b_v) {
    if (!(std::isfinite(a_u) && std::isfinite(b_u) && std::isfinite(a_v) && std::isfinite(b_v)) || a_u == 0.0 ||
        a_v == 0.0) {
      throw Error("non-invertible-calibration");
    }
  }

  static Affine2 identity() { return {}; }

  double a_u() const { return a_u_; }
  double b_u() const { return b_u_; }
  double a_v() const { return a_v_; }
  double b_v() const { return b_v_; }

  /// Front view -> top view, no clamping.
  Point to_top(Point front) const { return {a_u_ * front.x + b_u_, a_v_ * front.y + b_v_}; }
  /// Top view -> front view.
  Point to_front(Point top) const { return {(top.x - b_u_) / a_u_, (top.y - b_v_) / a_v_}; }

  friend bool operator==(const Affine2&, const Affine2&) = default;

 private:
  double a_u_ = 1.0;
  double b_u_ = 0.0;
  double a_v_ = 1.0;
  double b_v_ = 0.0;
};

}  // namespace planbench
