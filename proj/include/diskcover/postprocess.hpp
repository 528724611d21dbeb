#pragma once

#include <vector>

#include "diskcover/types.hpp"

namespace diskcover {

struct SimplifyParams {
  double beta = 0.01;  // tolerance = beta * contour perimeter
};

struct Contour {
  Polyline line;
  bool hole = false;
};

/// Border following over the mask with 8-connected foreground and
/// 4-connected background. Returns one outer contour per foreground
/// component and one contour per hole, in raster order of their starting
/// pixels. Vertices are pixel centers. Outer contours run counter-clockwise
/// and holes clockwise as displayed (y down), i.e. outer contours have
/// negative signed_area. Components of one or two pixels yield closed
/// polylines with one or two vertices.
std::vector<Contour> extract_contours(const BinaryMask& mask);

/// Shoelace area in image coordinates (y down).
double signed_area(const Polyline& line);

/// Polygonal arc length, including the closing edge of closed lines.
double perimeter(const Polyline& line);

/// Distance from p to the segment [a, b].
double point_segment_distance(Point p, Point a, Point b);

/// Douglas-Peucker. A vertex survives only if it lies farther than
/// `tolerance` from the current segment. Closed lines are first split at
/// their farthest vertex pair (ties: lowest indices) and the result starts
/// at the first anchor. tolerance == 0 only removes consecutive duplicates.
Polyline simplify_dp(const Polyline& line, double tolerance);

/// Even-odd fill sampled at pixel centers; pixels whose center lies on an
/// edge are filled too. Throws InvalidArgument for open polylines.
BinaryMask rasterize_polygon(const std::vector<Polyline>& polys, int width, int height);

/// extract_contours, simplify each contour at beta * its perimeter, rasterize.
BinaryMask simplify_mask(const BinaryMask& mask, const SimplifyParams& params);

}  // namespace diskcover
