#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "diskcover/types.hpp"

namespace diskcover {

enum class ShapeKind { disk, rectangle, annulus, lshape, stickfigure, blobs };

std::string to_string(ShapeKind kind);

/// Category id used by the standard suite for each kind.
int category_of(ShapeKind kind);

// Size fields by kind:
//   disk        size1 = radius
//   rectangle   size1 x size2 (width x height), rotated by angle
//   annulus     size1 = outer radius, size2 = inner radius
//   lshape      size1 = horizontal arm, size2 = vertical arm, thickness, angle;
//               the bounding box is centered on `center`
//   stickfigure size1 = figure height, thickness = limb width
//   blobs       three disks of radius size1 scattered within size2 of center
//               (positions drawn from seed)
struct ShapeSpec {
  ShapeKind kind = ShapeKind::disk;
  Point center;
  double size1 = 0.0;
  double size2 = 0.0;
  double thickness = 0.0;
  double angle = 0.0;  // radians
  std::uint64_t seed = 0;
};

/// Rasterizes the shape at pixel centers. Throws InvalidArgument for
/// degenerate specs, empty results, or shapes touching the image border.
BinaryMask generate(const ShapeSpec& spec, int width, int height);

struct SuiteMember {
  ShapeSpec spec;
  BinaryMask mask;
  int category = 0;
};

inline constexpr int kSuiteSize = 128;

/// 24 instances on 128x128 grids: 6 disks, 6 rectangles (aspect 1:1 to 4:1),
/// 4 annuli, 4 L-shapes, 4 stick figures. Poses derive from `seed`.
std::vector<SuiteMember> standard_suite(std::uint64_t seed);

}  // namespace diskcover
