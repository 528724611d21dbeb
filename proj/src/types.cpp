#include "diskcover/types.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace diskcover {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ContractViolation: return "ContractViolation";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::EmptyMask: return "EmptyMask";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::BadMagic: return "BadMagic";
    case ErrorCode::UnsupportedVariant: return "UnsupportedVariant";
    case ErrorCode::BadHeader: return "BadHeader";
    case ErrorCode::BadMaxval: return "BadMaxval";
    case ErrorCode::Truncated: return "Truncated";
    case ErrorCode::TrailingData: return "TrailingData";
    case ErrorCode::Schema: return "Schema";
    case ErrorCode::Io: return "Io";
    case ErrorCode::Usage: return "Usage";
  }
  return "Unknown";
}

DiskSet::DiskSet(std::vector<Point> centers, std::vector<double> sigmas, std::vector<int> assoc)
    : centers_(std::move(centers)), sigmas_(std::move(sigmas)), assoc_(std::move(assoc)) {
  const std::size_t n = centers_.size();
  const std::size_t m = sigmas_.size();
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "disk set needs N >= 1");
  if (m == 0 || m > n) throw Error(ErrorCode::InvalidArgument, "disk set needs 1 <= M <= N");
  if (assoc_.size() != n) throw Error(ErrorCode::InvalidArgument, "assoc length must equal N");

  std::vector<bool> used(m, false);
  for (std::size_t i = 0; i < n; ++i) {
    const int j = assoc_[i];
    if (j < 0 || static_cast<std::size_t>(j) >= m) {
      throw Error(ErrorCode::InvalidArgument, "assoc[" + std::to_string(i) + "] out of range");
    }
    used[static_cast<std::size_t>(j)] = true;
  }
  for (std::size_t j = 0; j < m; ++j) {
    if (!used[j]) throw Error(ErrorCode::InvalidArgument, "sigma " + std::to_string(j) + " is unused");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(centers_[i].x) || !std::isfinite(centers_[i].y)) {
      throw Error(ErrorCode::NonFinite, "center " + std::to_string(i) + " is not finite");
    }
  }
  for (std::size_t j = 0; j < m; ++j) {
    if (!std::isfinite(sigmas_[j])) {
      throw Error(ErrorCode::NonFinite, "sigma " + std::to_string(j) + " is not finite");
    }
    if (sigmas_[j] <= 0.0) {
      throw Error(ErrorCode::InvalidArgument, "sigma " + std::to_string(j) + " must be positive");
    }
  }
}

double DiskSet::sigma_of(std::size_t i) const {
  return sigmas_[static_cast<std::size_t>(radius_index(*this, i))];
}

int radius_index(const DiskSet& disks, std::size_t i) {
  if (i >= disks.n_disks()) {
    throw Error(ErrorCode::ContractViolation,
                "center index " + std::to_string(i) + " outside [0, " +
                    std::to_string(disks.n_disks()) + ")");
  }
  return disks.assoc()[i];
}

BinaryMask::BinaryMask(int width, int height)
    : BinaryMask(width, height,
                 std::vector<std::uint8_t>(static_cast<std::size_t>(std::max(width, 0)) *
                                           static_cast<std::size_t>(std::max(height, 0)))) {}

BinaryMask::BinaryMask(int width, int height, std::vector<std::uint8_t> data)
    : width_(width), height_(height), data_(std::move(data)) {
  if (width <= 0 || height <= 0) throw Error(ErrorCode::InvalidArgument, "mask dimensions must be positive");
  if (data_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
    throw Error(ErrorCode::InvalidArgument, "mask data length must equal width*height");
  }
  if (std::any_of(data_.begin(), data_.end(), [](std::uint8_t v) { return v > 1; })) {
    throw Error(ErrorCode::InvalidArgument, "mask values must be 0 or 1");
  }
}

std::size_t BinaryMask::count() const noexcept {
  return static_cast<std::size_t>(std::count(data_.begin(), data_.end(), std::uint8_t{1}));
}

ScalarField::ScalarField(int width, int height)
    : ScalarField(width, height,
                  std::vector<double>(static_cast<std::size_t>(std::max(width, 0)) *
                                      static_cast<std::size_t>(std::max(height, 0)))) {}

ScalarField::ScalarField(int width, int height, std::vector<double> data)
    : width_(width), height_(height), data_(std::move(data)) {
  if (width <= 0 || height <= 0) throw Error(ErrorCode::InvalidArgument, "field dimensions must be positive");
  if (data_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
    throw Error(ErrorCode::InvalidArgument, "field data length must equal width*height");
  }
  for (double v : data_) {
    if (!std::isfinite(v)) throw Error(ErrorCode::NonFinite, "field value is not finite");
    if (v < 0.0) throw Error(ErrorCode::InvalidArgument, "field values must be nonnegative");
  }
}

bool is_valid(const Polyline& line) {
  const std::size_t need = line.closed ? 3 : 2;
  if (line.points.size() < need) return false;
  for (std::size_t i = 1; i < line.points.size(); ++i) {
    if (line.points[i] == line.points[i - 1]) return false;
  }
  for (const Point& p : line.points) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) return false;
  }
  return true;
}

std::string to_string(AssocKind kind) {
  switch (kind) {
    case AssocKind::shared: return "shared";
    case AssocKind::grouped: return "grouped";
    case AssocKind::individual: return "individual";
  }
  return "?";
}

std::string to_string(LossKind kind) { return kind == LossKind::dice ? "dice" : "bce"; }

AssocKind parse_assoc_kind(const std::string& text) {
  if (text == "shared") return AssocKind::shared;
  if (text == "grouped") return AssocKind::grouped;
  if (text == "individual") return AssocKind::individual;
  throw Error(ErrorCode::InvalidArgument, "unknown assoc kind '" + text + "'");
}

LossKind parse_loss_kind(const std::string& text) {
  if (text == "dice") return LossKind::dice;
  if (text == "bce") return LossKind::bce;
  throw Error(ErrorCode::InvalidArgument, "unknown loss kind '" + text + "'");
}

AssocKind assoc_kind_for(int n_disks, int n_radii) {
  if (n_radii == 1) return AssocKind::shared;
  if (n_radii == n_disks) return AssocKind::individual;
  return AssocKind::grouped;
}

std::vector<std::string> validate(const FitConfig& c) {
  std::vector<std::string> out;
  if (c.n_disks < 1) out.emplace_back("N ≥ 1");
  if (c.n_radii < 1) out.emplace_back("M ≥ 1");
  if (c.n_radii > c.n_disks && c.n_disks >= 1) out.emplace_back("M ≤ N");
  switch (c.assoc_kind) {
    case AssocKind::shared:
      if (c.n_radii != 1) out.emplace_back("shared assoc requires M = 1");
      break;
    case AssocKind::individual:
      if (c.n_radii != c.n_disks) out.emplace_back("individual assoc requires M = N");
      break;
    case AssocKind::grouped:
      break;
  }
  if (!(c.alpha > 0.0 && c.alpha <= 1.0)) out.emplace_back("alpha ∈ (0,1]");
  if (!(c.epsilon > 0.0) || !std::isfinite(c.epsilon)) out.emplace_back("epsilon > 0");
  if (c.max_iters < 1) out.emplace_back("max_iters ≥ 1");
  if (!(c.step_size > 0.0) || !std::isfinite(c.step_size)) out.emplace_back("step_size > 0");
  if (c.restarts < 1) out.emplace_back("restarts ≥ 1");
  if (!(c.beta1 >= 0.0 && c.beta1 < 1.0)) out.emplace_back("beta1 ∈ [0,1)");
  if (!(c.beta2 >= 0.0 && c.beta2 < 1.0)) out.emplace_back("beta2 ∈ [0,1)");
  if (!(c.moment_guard > 0.0)) out.emplace_back("moment_guard > 0");
  return out;
}

std::vector<int> make_assoc(int n_disks, int n_radii, AssocKind kind) {
  if (n_disks < 1 || n_radii < 1 || n_radii > n_disks) {
    throw Error(ErrorCode::InvalidArgument, "make_assoc needs 1 <= M <= N");
  }
  std::vector<int> assoc(static_cast<std::size_t>(n_disks), 0);
  switch (kind) {
    case AssocKind::shared:
      if (n_radii != 1) throw Error(ErrorCode::InvalidArgument, "shared assoc requires M = 1");
      break;
    case AssocKind::individual:
      if (n_radii != n_disks) throw Error(ErrorCode::InvalidArgument, "individual assoc requires M = N");
      for (int i = 0; i < n_disks; ++i) assoc[static_cast<std::size_t>(i)] = i;
      break;
    case AssocKind::grouped: {
      const int block = n_disks / n_radii;
      for (int i = 0; i < n_disks; ++i) assoc[static_cast<std::size_t>(i)] = std::min(i / block, n_radii - 1);
      break;
    }
  }
  return assoc;
}

}  // namespace diskcover
