#include "steerbench/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "steerbench/trajectory.hpp"

namespace steerbench {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

double dist(const Point2& a, const Point2& b) {
  return std::hypot(b.x - a.x, b.y - a.y);
}

Point2 heading_direction(double heading_deg) {
  double rad = heading_deg * kPi / 180.0;
  return Point2{std::cos(rad), -std::sin(rad)};
}

Point2 right_normal(const Point2& forward) {
  return Point2{forward.y, -forward.x};
}

double heading_of(const Point2& v) {
  return normalize_heading(std::atan2(-v.y, v.x) * 180.0 / kPi);
}

Polyline::Polyline(std::vector<Point2> points) : pts_(std::move(points)) {
  cum_.resize(pts_.size(), 0.0);
  for (std::size_t i = 1; i < pts_.size(); ++i) {
    cum_[i] = cum_[i - 1] + dist(pts_[i - 1], pts_[i]);
  }
}

Point2 Polyline::at(double s) const {
  if (pts_.empty()) return Point2{};
  if (pts_.size() < 2 || s <= 0.0) return pts_.front();
  if (s >= cum_.back()) return pts_.back();
  auto it = std::upper_bound(cum_.begin(), cum_.end(), s);
  std::size_t hi = static_cast<std::size_t>(it - cum_.begin());
  std::size_t lo = hi - 1;
  double seg = cum_[hi] - cum_[lo];
  double u = seg > 1e-12 ? (s - cum_[lo]) / seg : 0.0;
  return Point2{pts_[lo].x + u * (pts_[hi].x - pts_[lo].x),
                pts_[lo].y + u * (pts_[hi].y - pts_[lo].y)};
}

Point2 Polyline::direction_at(double s) const {
  if (pts_.size() < 2) return Point2{1.0, 0.0};
  s = std::clamp(s, 0.0, cum_.back());
  auto it = std::upper_bound(cum_.begin(), cum_.end(), s);
  std::size_t hi = it == cum_.end() ? cum_.size() - 1
                                    : static_cast<std::size_t>(it - cum_.begin());
  if (hi == 0) hi = 1;
  std::size_t lo = hi - 1;
  double seg = cum_[hi] - cum_[lo];
  if (seg < 1e-12) return Point2{1.0, 0.0};
  return Point2{(pts_[hi].x - pts_[lo].x) / seg, (pts_[hi].y - pts_[lo].y) / seg};
}

PolylineProjection Polyline::project(const Point2& p) const {
  PolylineProjection best;
  if (pts_.size() < 2) return best;
  double best_d2 = std::numeric_limits<double>::max();
  for (std::size_t i = 0; i + 1 < pts_.size(); ++i) {
    const Point2& a = pts_[i];
    const Point2& b = pts_[i + 1];
    double seg_len = cum_[i + 1] - cum_[i];
    if (seg_len < 1e-12) continue;
    Point2 dir{(b.x - a.x) / seg_len, (b.y - a.y) / seg_len};
    double t = std::clamp((p.x - a.x) * dir.x + (p.y - a.y) * dir.y, 0.0, seg_len);
    Point2 q{a.x + dir.x * t, a.y + dir.y * t};
    double d2 = (p.x - q.x) * (p.x - q.x) + (p.y - q.y) * (p.y - q.y);
    if (d2 < best_d2) {
      best_d2 = d2;
      Point2 n = right_normal(dir);
      best.s = cum_[i] + t;
      best.offset = (p.x - q.x) * n.x + (p.y - q.y) * n.y;
    }
  }
  return best;
}

std::vector<Point2> extend_polyline(std::vector<Point2> line, double extra_m) {
  if (line.size() >= 2 && extra_m > 0.0) {
    Point2 a = line[line.size() - 2];
    Point2 b = line.back();
    double len = dist(a, b);
    if (len > 1e-9) {
      line.push_back(Point2{b.x + (b.x - a.x) / len * extra_m,
                            b.y + (b.y - a.y) / len * extra_m});
    }
  }
  return line;
}

}  // namespace steerbench
