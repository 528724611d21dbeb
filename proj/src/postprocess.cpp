#include "diskcover/postprocess.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <utility>

namespace diskcover {
namespace {

// Neighbor offsets (drow, dcol), counter-clockwise as displayed starting east.
constexpr int kDirRow[8] = {0, -1, -1, -1, 0, 1, 1, 1};
constexpr int kDirCol[8] = {1, 1, 0, -1, -1, -1, 0, 1};

int direction_of(int dr, int dc) {
  for (int d = 0; d < 8; ++d) {
    if (kDirRow[d] == dr && kDirCol[d] == dc) return d;
  }
  return -1;
}

// Label image padded with a one-pixel zero frame; 0 background, 1 unvisited
// foreground, +-k visited border pixels.
class Labels {
 public:
  explicit Labels(const BinaryMask& mask)
      : width_(mask.width() + 2), height_(mask.height() + 2),
        data_(static_cast<std::size_t>(width_) * static_cast<std::size_t>(height_), 0) {
    for (int r = 0; r < mask.height(); ++r) {
      for (int c = 0; c < mask.width(); ++c) at(r + 1, c + 1) = mask.at(c, r);
    }
  }

  int& at(int r, int c) { return data_[static_cast<std::size_t>(r) * static_cast<std::size_t>(width_) + c]; }
  int width() const { return width_; }
  int height() const { return height_; }

 private:
  int width_;
  int height_;
  std::vector<int> data_;
};

Point pixel_center(int padded_r, int padded_c) { return {padded_c - 1 + 0.5, padded_r - 1 + 0.5}; }

std::vector<Point> follow_border(Labels& f, int i, int j, int i2, int j2, int nbd) {
  std::vector<Point> points{pixel_center(i, j)};

  // Clockwise search from (i2, j2) for the first nonzero neighbor.
  const int start = direction_of(i2 - i, j2 - j);
  int found = -1;
  for (int k = 0; k < 8; ++k) {
    const int d = (start - k + 8) % 8;
    if (f.at(i + kDirRow[d], j + kDirCol[d]) != 0) {
      found = d;
      break;
    }
  }
  if (found < 0) {
    f.at(i, j) = -nbd;
    return points;
  }

  const int i1 = i + kDirRow[found];
  const int j1 = j + kDirCol[found];
  i2 = i1;
  j2 = j1;
  int i3 = i;
  int j3 = j;
  for (;;) {
    // Counter-clockwise search around (i3, j3), starting after (i2, j2).
    const int from = direction_of(i2 - i3, j2 - j3);
    bool east_zero_examined = false;
    int i4 = i3;
    int j4 = j3;
    for (int k = 1; k <= 8; ++k) {
      const int d = (from + k) % 8;
      const int rr = i3 + kDirRow[d];
      const int cc = j3 + kDirCol[d];
      if (f.at(rr, cc) != 0) {
        i4 = rr;
        j4 = cc;
        break;
      }
      if (d == 0) east_zero_examined = true;
    }
    if (east_zero_examined) {
      f.at(i3, j3) = -nbd;
    } else if (f.at(i3, j3) == 1) {
      f.at(i3, j3) = nbd;
    }
    if (i4 == i && j4 == j && i3 == i1 && j3 == j1) break;
    i2 = i3;
    j2 = j3;
    i3 = i4;
    j3 = j4;
    points.push_back(pixel_center(i3, j3));
  }
  return points;
}

}  // namespace

std::vector<Contour> extract_contours(const BinaryMask& mask) {
  std::vector<Contour> out;
  Labels f(mask);
  int nbd = 1;
  for (int i = 1; i < f.height() - 1; ++i) {
    for (int j = 1; j < f.width() - 1; ++j) {
      const int v = f.at(i, j);
      if (v == 0) continue;
      if (v == 1 && f.at(i, j - 1) == 0) {
        ++nbd;
        out.push_back({{follow_border(f, i, j, i, j - 1, nbd), true}, false});
      } else if (v >= 1 && f.at(i, j + 1) == 0) {
        ++nbd;
        out.push_back({{follow_border(f, i, j, i, j + 1, nbd), true}, true});
      }
    }
  }
  return out;
}

double signed_area(const Polyline& line) {
  const auto& p = line.points;
  if (p.size() < 3) return 0.0;
  double s = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    const Point a = p[k];
    const Point b = p[(k + 1) % p.size()];
    s += a.x * b.y - b.x * a.y;
  }
  return 0.5 * s;
}

double perimeter(const Polyline& line) {
  const auto& p = line.points;
  if (p.size() < 2) return 0.0;
  double s = 0.0;
  for (std::size_t k = 0; k + 1 < p.size(); ++k) s += std::hypot(p[k + 1].x - p[k].x, p[k + 1].y - p[k].y);
  if (line.closed) s += std::hypot(p.front().x - p.back().x, p.front().y - p.back().y);
  return s;
}

double point_segment_distance(Point p, Point a, Point b) {
  const double vx = b.x - a.x;
  const double vy = b.y - a.y;
  const double len2 = vx * vx + vy * vy;
  if (len2 == 0.0) return std::hypot(p.x - a.x, p.y - a.y);
  const double t = std::clamp(((p.x - a.x) * vx + (p.y - a.y) * vy) / len2, 0.0, 1.0);
  return std::hypot(p.x - (a.x + t * vx), p.y - (a.y + t * vy));
}

namespace {

std::vector<Point> dedupe(const std::vector<Point>& pts, bool closed) {
  std::vector<Point> out;
  out.reserve(pts.size());
  for (const Point& p : pts) {
    if (out.empty() || !(out.back() == p)) out.push_back(p);
  }
  if (closed) {
    while (out.size() > 1 && out.back() == out.front()) out.pop_back();
  }
  return out;
}

// Marks the vertices of pts[first..last] to keep (endpoints are the caller's).
void dp_mark(const std::vector<Point>& pts, std::size_t first, std::size_t last, double tolerance,
             std::vector<bool>& keep) {
  std::vector<std::pair<std::size_t, std::size_t>> stack{{first, last}};
  while (!stack.empty()) {
    const auto [a, b] = stack.back();
    stack.pop_back();
    if (b <= a + 1) continue;
    std::size_t split = a;
    double worst = -1.0;
    for (std::size_t k = a + 1; k < b; ++k) {
      const double d = point_segment_distance(pts[k], pts[a], pts[b]);
      if (d > worst) {
        worst = d;
        split = k;
      }
    }
    if (worst > tolerance) {
      keep[split] = true;
      stack.emplace_back(split, b);
      stack.emplace_back(a, split);
    }
  }
}

std::vector<Point> collect(const std::vector<Point>& pts, const std::vector<bool>& keep) {
  std::vector<Point> out;
  for (std::size_t k = 0; k < pts.size(); ++k) {
    if (keep[k]) out.push_back(pts[k]);
  }
  return out;
}

}  // namespace

Polyline simplify_dp(const Polyline& line, double tolerance) {
  if (!(tolerance >= 0.0)) throw Error(ErrorCode::InvalidArgument, "tolerance must be nonnegative");
  std::vector<Point> pts = dedupe(line.points, line.closed);
  if (tolerance == 0.0 || pts.size() <= 2) return {std::move(pts), line.closed};

  if (!line.closed) {
    std::vector<bool> keep(pts.size(), false);
    keep.front() = keep.back() = true;
    dp_mark(pts, 0, pts.size() - 1, tolerance, keep);
    return {collect(pts, keep), false};
  }

  // Anchor the closed chain at its farthest vertex pair.
  std::size_t ia = 0;
  std::size_t ib = 1;
  double best = -1.0;
  for (std::size_t a = 0; a < pts.size(); ++a) {
    for (std::size_t b = a + 1; b < pts.size(); ++b) {
      const double d = (pts[a].x - pts[b].x) * (pts[a].x - pts[b].x) + (pts[a].y - pts[b].y) * (pts[a].y - pts[b].y);
      if (d > best) {
        best = d;
        ia = a;
        ib = b;
      }
    }
  }
  // Rotate so the first anchor sits at index 0 and close the ring with it.
  std::vector<Point> ring;
  ring.reserve(pts.size() + 1);
  for (std::size_t k = 0; k < pts.size(); ++k) ring.push_back(pts[(ia + k) % pts.size()]);
  ring.push_back(ring.front());
  const std::size_t mid = ib - ia;

  std::vector<bool> keep(ring.size(), false);
  keep[0] = keep[mid] = true;
  dp_mark(ring, 0, mid, tolerance, keep);
  dp_mark(ring, mid, ring.size() - 1, tolerance, keep);
  keep.back() = false;  // duplicate of ring[0]
  return {collect(ring, keep), true};
}

BinaryMask rasterize_polygon(const std::vector<Polyline>& polys, int width, int height) {
  BinaryMask out(width, height);
  constexpr double kOnEdge = 1e-9;
  for (const auto& poly : polys) {
    if (!poly.closed) throw Error(ErrorCode::InvalidArgument, "rasterize_polygon needs closed polylines");
    if (poly.points.empty()) throw Error(ErrorCode::InvalidArgument, "polyline has no points");
  }

  struct Edge {
    Point a;
    Point b;
  };
  std::vector<Edge> edges;
  for (const auto& poly : polys) {
    const auto& p = poly.points;
    for (std::size_t k = 0; k < p.size(); ++k) edges.push_back({p[k], p[(k + 1) % p.size()]});
  }

  // Even-odd interior: parity of crossings left of each pixel center.
  std::vector<double> xs;
  for (int r = 0; r < height; ++r) {
    const double y = r + 0.5;
    xs.clear();
    for (const Edge& e : edges) {
      if ((e.a.y > y) != (e.b.y > y)) xs.push_back(e.a.x + (y - e.a.y) * (e.b.x - e.a.x) / (e.b.y - e.a.y));
    }
    std::sort(xs.begin(), xs.end());
    std::size_t left = 0;
    for (int c = 0; c < width; ++c) {
      const double x = c + 0.5;
      while (left < xs.size() && xs[left] < x) ++left;
      if (left % 2 == 1) out.set(c, r, true);
    }
  }

  // Boundary: pixel centers on an edge.
  const auto mark_if_center = [&](double x, double y) {
    const double cx = std::round(x - 0.5);
    const double cy = std::round(y - 0.5);
    if (std::abs(x - 0.5 - cx) > kOnEdge || std::abs(y - 0.5 - cy) > kOnEdge) return;
    if (cx < 0 || cy < 0 || cx >= width || cy >= height) return;
    out.set(static_cast<int>(cx), static_cast<int>(cy), true);
  };
  for (const Edge& e : edges) {
    const double y0 = std::min(e.a.y, e.b.y);
    const double y1 = std::max(e.a.y, e.b.y);
    const int r_lo = std::max(0, static_cast<int>(std::ceil(y0 - 0.5 - kOnEdge)));
    const int r_hi = std::min(height - 1, static_cast<int>(std::floor(y1 - 0.5 + kOnEdge)));
    for (int r = r_lo; r <= r_hi; ++r) {
      const double y = r + 0.5;
      if (std::abs(e.b.y - e.a.y) <= kOnEdge) {
        const double x0 = std::min(e.a.x, e.b.x);
        const double x1 = std::max(e.a.x, e.b.x);
        const int c_lo = std::max(0, static_cast<int>(std::ceil(x0 - 0.5 - kOnEdge)));
        const int c_hi = std::min(width - 1, static_cast<int>(std::floor(x1 - 0.5 + kOnEdge)));
        if (std::abs(e.a.y - y) > kOnEdge) continue;
        for (int c = c_lo; c <= c_hi; ++c) out.set(c, r, true);
      } else {
        const double t = (y - e.a.y) / (e.b.y - e.a.y);
        mark_if_center(e.a.x + t * (e.b.x - e.a.x), y);
      }
    }
  }
  return out;
}

BinaryMask simplify_mask(const BinaryMask& mask, const SimplifyParams& params) {
  if (!(params.beta >= 0.0)) throw Error(ErrorCode::InvalidArgument, "beta must be nonnegative");
  std::vector<Polyline> simplified;
  for (const Contour& c : extract_contours(mask)) {
    simplified.push_back(simplify_dp(c.line, params.beta * perimeter(c.line)));
  }
  return rasterize_polygon(simplified, mask.width(), mask.height());
}

}  // namespace diskcover
