#pragma once

#include <cmath>
#include <optional>
#include <vector>

namespace mmc {

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
  friend Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
  friend Point operator*(double s, Point p) { return {s * p.x, s * p.y}; }
  friend bool operator==(Point, Point) = default;
};

inline double distance(Point a, Point b) { return std::hypot(a.x - b.x, a.y - b.y); }

/// x -> scale * R(rotation) * F(reflect) * x + translation, where F mirrors
/// across the x-axis. Distances are multiplied by exactly `scale`.
struct PlanarSimilarity {
  double scale = 1.0;
  double rotation = 0.0;
  bool reflect = false;
  Point translation;

  Point apply(Point p) const {
    if (reflect) p.y = -p.y;
    const double c = std::cos(rotation), s = std::sin(rotation);
    return Point{scale * (c * p.x - s * p.y), scale * (s * p.x + c * p.y)} + translation;
  }

  /// (*this) o inner : apply inner first.
  PlanarSimilarity compose(const PlanarSimilarity& inner) const {
    PlanarSimilarity out;
    out.scale = scale * inner.scale;
    // Linear parts: L_this * L_inner with L = R(theta) F^reflect.
    // R(a) F R(b) F = R(a - b);  R(a) R(b) = R(a + b).
    out.reflect = reflect != inner.reflect;
    out.rotation = reflect ? rotation - inner.rotation : rotation + inner.rotation;
    out.translation = apply(inner.translation);
    return out;
  }

  PlanarSimilarity inverse() const {
    PlanarSimilarity out;
    out.scale = 1.0 / scale;
    out.reflect = reflect;
    out.rotation = reflect ? rotation : -rotation;
    out.translation = Point{};
    out.translation = -1.0 * out.apply(translation);
    return out;
  }

  static PlanarSimilarity identity() { return {}; }
};

/// Region occupied by a model: a bounding disc for metric certificates and an
/// optional outline polygon used only when rendering.
struct ModelRegion {
  Point center;
  double radius = 0.0;
  std::vector<Point> outline;
};

}  // namespace mmc
