#pragma once

#include <cstddef>
#include <vector>

namespace steerbench {

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

double dist(const Point2& a, const Point2& b);

// Unit vector for a compass-like heading (0 along +x, clockwise positive).
Point2 heading_direction(double heading_deg);

// Unit vector pointing right of a unit forward vector.
Point2 right_normal(const Point2& forward);

// Heading in [0, 360) of a non-zero vector, same convention as above.
double heading_of(const Point2& v);

struct PolylineProjection {
  double s = 0.0;       // arc length of the closest point
  double offset = 0.0;  // signed lateral offset, positive right of travel
};

// Polyline with cached cumulative arc lengths. Queries clamp to the ends.
class Polyline {
 public:
  Polyline() = default;
  explicit Polyline(std::vector<Point2> points);

  std::size_t size() const { return pts_.size(); }
  double length() const { return cum_.empty() ? 0.0 : cum_.back(); }
  const std::vector<Point2>& points() const { return pts_; }

  Point2 at(double s) const;
  Point2 direction_at(double s) const;
  PolylineProjection project(const Point2& p) const;

 private:
  std::vector<Point2> pts_;
  std::vector<double> cum_;
};

// Returns the polyline with its last segment extended by extra_m.
std::vector<Point2> extend_polyline(std::vector<Point2> line, double extra_m);

}  // namespace steerbench
