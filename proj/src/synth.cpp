#include "diskcover/synth.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <tuple>
#include <utility>

#include "diskcover/postprocess.hpp"

namespace diskcover {
namespace {

std::uint64_t splitmix(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double uniform(std::uint64_t& state, double lo, double hi) {
  const double u = static_cast<double>(splitmix(state) >> 11) * 0x1.0p-53;
  return lo + (hi - lo) * u;
}

// Point in the shape's frame: translated to its center and rotated by -angle.
Point local(const ShapeSpec& s, Point p) {
  const double dx = p.x - s.center.x;
  const double dy = p.y - s.center.y;
  const double c = std::cos(s.angle);
  const double sn = std::sin(s.angle);
  return {c * dx + sn * dy, -sn * dx + c * dy};
}

bool in_box(Point q, double x0, double y0, double x1, double y1) {
  return q.x >= x0 && q.x <= x1 && q.y >= y0 && q.y <= y1;
}

struct Segment {
  Point a;
  Point b;
};

std::array<Segment, 5> stick_segments(const ShapeSpec& s) {
  const double h = s.size1;
  const Point c = s.center;
  const double head_r = 0.12 * h;
  const double top = c.y - 0.5 * h;
  const Point neck{c.x, top + 2.0 * head_r};
  const Point hip{c.x, c.y + 0.1 * h};
  const Point shoulder{c.x, neck.y + 0.08 * h};
  return {{{neck, hip},
           {shoulder, {c.x - 0.28 * h, shoulder.y + 0.2 * h}},
           {shoulder, {c.x + 0.28 * h, shoulder.y + 0.2 * h}},
           {hip, {c.x - 0.2 * h, c.y + 0.5 * h}},
           {hip, {c.x + 0.2 * h, c.y + 0.5 * h}}}};
}

std::array<Point, 3> blob_centers(const ShapeSpec& s) {
  std::uint64_t state = s.seed;
  std::array<Point, 3> out;
  for (auto& p : out) {
    const double r = uniform(state, 0.0, s.size2);
    const double t = uniform(state, 0.0, 2.0 * std::numbers::pi);
    p = {s.center.x + r * std::cos(t), s.center.y + r * std::sin(t)};
  }
  return out;
}

bool inside(const ShapeSpec& s, Point p) {
  const double dx = p.x - s.center.x;
  const double dy = p.y - s.center.y;
  const double r2 = dx * dx + dy * dy;
  switch (s.kind) {
    case ShapeKind::disk:
      return r2 <= s.size1 * s.size1;
    case ShapeKind::annulus:
      return r2 <= s.size1 * s.size1 && r2 >= s.size2 * s.size2;
    case ShapeKind::rectangle: {
      const Point q = local(s, p);
      return in_box(q, -0.5 * s.size1, -0.5 * s.size2, 0.5 * s.size1, 0.5 * s.size2);
    }
    case ShapeKind::lshape: {
      const Point q = local(s, p);
      const double x0 = -0.5 * s.size1;
      const double y1 = 0.5 * s.size2;
      return in_box(q, x0, y1 - s.thickness, 0.5 * s.size1, y1) ||
             in_box(q, x0, -0.5 * s.size2, x0 + s.thickness, y1);
    }
    case ShapeKind::stickfigure: {
      const double head_r = 0.12 * s.size1;
      const double hx = p.x - s.center.x;
      const double hy = p.y - (s.center.y - 0.5 * s.size1 + head_r);
      if (hx * hx + hy * hy <= head_r * head_r) return true;
      for (const Segment& seg : stick_segments(s)) {
        if (point_segment_distance(p, seg.a, seg.b) <= 0.5 * s.thickness) return true;
      }
      return false;
    }
    case ShapeKind::blobs: {
      for (const Point& c : blob_centers(s)) {
        const double bx = p.x - c.x;
        const double by = p.y - c.y;
        if (bx * bx + by * by <= s.size1 * s.size1) return true;
      }
      return false;
    }
  }
  return false;
}

void check_spec(const ShapeSpec& s) {
  const auto bad = [](const std::string& why) { throw Error(ErrorCode::InvalidArgument, "degenerate shape: " + why); };
  if (!std::isfinite(s.center.x) || !std::isfinite(s.center.y) || !std::isfinite(s.angle)) bad("non-finite pose");
  if (!(s.size1 > 0.0)) bad("size1 must be positive");
  switch (s.kind) {
    case ShapeKind::disk: break;
    case ShapeKind::rectangle:
      if (!(s.size2 > 0.0)) bad("rectangle height must be positive");
      break;
    case ShapeKind::annulus:
      if (!(s.size2 >= 0.0 && s.size2 < s.size1)) bad("annulus needs 0 <= inner < outer");
      break;
    case ShapeKind::lshape:
      if (!(s.size2 > 0.0)) bad("vertical arm must be positive");
      if (!(s.thickness > 0.0 && s.thickness <= s.size1 && s.thickness <= s.size2)) bad("arm thickness out of range");
      break;
    case ShapeKind::stickfigure:
      if (!(s.thickness > 0.0)) bad("limb thickness must be positive");
      break;
    case ShapeKind::blobs:
      if (!(s.size2 >= 0.0)) bad("blob spread must be nonnegative");
      break;
  }
}

}  // namespace

std::string to_string(ShapeKind kind) {
  switch (kind) {
    case ShapeKind::disk: return "disk";
    case ShapeKind::rectangle: return "rectangle";
    case ShapeKind::annulus: return "annulus";
    case ShapeKind::lshape: return "lshape";
    case ShapeKind::stickfigure: return "stickfigure";
    case ShapeKind::blobs: return "blobs";
  }
  return "?";
}

int category_of(ShapeKind kind) { return static_cast<int>(kind); }

BinaryMask generate(const ShapeSpec& spec, int width, int height) {
  check_spec(spec);
  BinaryMask mask(width, height);
  bool touches_border = false;
  for (int r = 0; r < height; ++r) {
    for (int c = 0; c < width; ++c) {
      if (!inside(spec, {c + 0.5, r + 0.5})) continue;
      mask.set(c, r, true);
      if (r == 0 || c == 0 || r == height - 1 || c == width - 1) touches_border = true;
    }
  }
  if (mask.empty_foreground()) throw Error(ErrorCode::InvalidArgument, "degenerate shape: no pixel is covered");
  if (touches_border) throw Error(ErrorCode::InvalidArgument, "shape does not fit inside the grid");
  return mask;
}

std::vector<SuiteMember> standard_suite(std::uint64_t seed) {
  std::uint64_t state = seed;
  const double mid = 0.5 * kSuiteSize;
  const auto pose = [&](ShapeSpec s, double jitter) {
    s.center = {mid + uniform(state, -jitter, jitter), mid + uniform(state, -jitter, jitter)};
    s.angle = uniform(state, 0.0, std::numbers::pi);
    s.seed = splitmix(state);
    return s;
  };

  std::vector<ShapeSpec> specs;
  for (double r : {10.0, 14.0, 18.0, 22.0, 26.0, 30.0}) {
    specs.push_back(pose({ShapeKind::disk, {}, r}, 8.0));
  }
  for (double aspect : {1.0, 1.5, 2.0, 2.5, 3.0, 4.0}) {
    const double w = 40.0 * std::sqrt(aspect);
    specs.push_back(pose({ShapeKind::rectangle, {}, w, 40.0 * 40.0 / w}, 6.0));
  }
  using Pair = std::pair<double, double>;
  for (auto [outer, inner] : std::array<Pair, 4>{{{20.0, 10.0}, {26.0, 12.0}, {30.0, 18.0}, {24.0, 8.0}}}) {
    specs.push_back(pose({ShapeKind::annulus, {}, outer, inner}, 6.0));
  }
  using Triple = std::tuple<double, double, double>;
  for (auto [a, b, t] : std::array<Triple, 4>{{{60.0, 60.0, 16.0}, {70.0, 50.0, 14.0}, {50.0, 70.0, 18.0}, {64.0, 40.0, 12.0}}}) {
    specs.push_back(pose({ShapeKind::lshape, {}, a, b, t}, 4.0));
  }
  for (auto [h, t] : std::array<Pair, 4>{{{80.0, 6.0}, {90.0, 7.0}, {100.0, 8.0}, {70.0, 5.0}}}) {
    ShapeSpec s = pose({ShapeKind::stickfigure, {}, h, 0.0, t}, 4.0);
    s.angle = 0.0;
    specs.push_back(s);
  }

  std::vector<SuiteMember> suite;
  suite.reserve(specs.size());
  for (const ShapeSpec& s : specs) suite.push_back({s, generate(s, kSuiteSize, kSuiteSize), category_of(s.kind)});
  return suite;
}

}  // namespace diskcover
