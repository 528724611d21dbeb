#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "diskcover/error.hpp"

namespace diskcover {

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
};

/// Set of N isotropic disks sharing M standard deviations.
///
/// Indices are zero-based in C++: center i uses sigma `assoc()[i]`. Coordinates
/// are continuous pixel units with the origin at the top-left image corner,
/// x to the right and y downward, so pixel (col, row) is sampled at
/// (col + 0.5, row + 0.5).
class DiskSet {
 public:
  /// Throws Error(InvalidArgument) unless N >= 1, 1 <= M <= N, every assoc
  /// entry is in [0, M), every sigma index is used, and all values are finite
  /// with strictly positive sigmas.
  DiskSet(std::vector<Point> centers, std::vector<double> sigmas, std::vector<int> assoc);

  std::size_t n_disks() const noexcept { return centers_.size(); }
  std::size_t n_radii() const noexcept { return sigmas_.size(); }

  std::span<const Point> centers() const noexcept { return centers_; }
  std::span<const double> sigmas() const noexcept { return sigmas_; }
  std::span<const int> assoc() const noexcept { return assoc_; }

  /// Sigma of center i (bounds-checked).
  double sigma_of(std::size_t i) const;

  friend bool operator==(const DiskSet&, const DiskSet&) = default;

 private:
  std::vector<Point> centers_;
  std::vector<double> sigmas_;
  std::vector<int> assoc_;
};

/// Radius index used by center i. Throws ContractViolation if i >= N.
int radius_index(const DiskSet& disks, std::size_t i);

class BinaryMask {
 public:
  BinaryMask() = default;
  BinaryMask(int width, int height);
  /// Values must be 0 or 1 and exactly width*height long.
  BinaryMask(int width, int height, std::vector<std::uint8_t> data);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t size() const noexcept { return data_.size(); }

  std::uint8_t at(int col, int row) const { return data_[index(col, row)]; }
  void set(int col, int row, bool on) { data_[index(col, row)] = on ? 1 : 0; }

  std::span<const std::uint8_t> data() const noexcept { return data_; }
  std::size_t count() const noexcept;
  bool empty_foreground() const noexcept { return count() == 0; }

  friend bool operator==(const BinaryMask&, const BinaryMask&) = default;

 private:
  std::size_t index(int col, int row) const {
    return static_cast<std::size_t>(row) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(col);
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> data_;
};

class ScalarField {
 public:
  ScalarField() = default;
  ScalarField(int width, int height);
  /// Values must be finite and nonnegative.
  ScalarField(int width, int height, std::vector<double> data);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t size() const noexcept { return data_.size(); }

  double at(int col, int row) const {
    return data_[static_cast<std::size_t>(row) * static_cast<std::size_t>(width_) +
                 static_cast<std::size_t>(col)];
  }

  std::span<const double> data() const noexcept { return data_; }

  friend bool operator==(const ScalarField&, const ScalarField&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<double> data_;
};

struct Polyline {
  std::vector<Point> points;
  bool closed = false;

  friend bool operator==(const Polyline&, const Polyline&) = default;
};

/// >= 2 points when open, >= 3 when closed, no consecutive duplicates.
bool is_valid(const Polyline& line);

enum class AssocKind { shared, grouped, individual };
enum class LossKind { dice, bce };

std::string to_string(AssocKind kind);
std::string to_string(LossKind kind);
AssocKind parse_assoc_kind(const std::string& text);
LossKind parse_loss_kind(const std::string& text);

struct FitConfig {
  int n_disks = 16;
  int n_radii = 16;
  AssocKind assoc_kind = AssocKind::individual;
  LossKind loss_kind = LossKind::dice;
  double epsilon = 1.0;
  double alpha = 0.5;
  int max_iters = 500;
  double step_size = 0.05;
  std::uint64_t seed = 0;
  int restarts = 3;

  // Adaptive-moment constants.
  double beta1 = 0.9;
  double beta2 = 0.999;
  double moment_guard = 1e-8;

  // Early stop once the best loss has not improved by min_improvement for
  // `patience` consecutive iterations. patience <= 0 disables it.
  int patience = 50;
  double min_improvement = 1e-6;
};

/// Assoc kind implied by (N, M): shared for M == 1, individual for M == N,
/// grouped otherwise.
AssocKind assoc_kind_for(int n_disks, int n_radii);

/// All violated invariants of a config; empty means valid.
std::vector<std::string> validate(const FitConfig& config);

/// Center-to-radius mapping for the given kind. Grouped uses contiguous
/// blocks of floor(N/M) centers with the last block absorbing the remainder.
std::vector<int> make_assoc(int n_disks, int n_radii, AssocKind kind);

}  // namespace diskcover
