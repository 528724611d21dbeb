#include "diskcover/gradcheck.hpp"

#include <algorithm>
#include <array>

#include "diskcover/losses.hpp"
#include "diskcover/projection.hpp"

namespace diskcover {
namespace {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  double uniform(double lo, double hi) {
    return lo + (hi - lo) * (static_cast<double>(next() >> 11) * 0x1.0p-53);
  }

  int integer(int lo, int hi) { return lo + static_cast<int>(next() % static_cast<std::uint64_t>(hi - lo + 1)); }

 private:
  std::uint64_t state_;
};

DiskSet random_disks(Rng& rng, int n, int m, int w, int h) {
  const double side = std::min(w, h);
  std::vector<Point> centers(static_cast<std::size_t>(n));
  for (auto& c : centers) c = {rng.uniform(0.2 * w, 0.8 * w), rng.uniform(0.2 * h, 0.8 * h)};
  std::vector<double> sigmas(static_cast<std::size_t>(m));
  for (auto& s : sigmas) s = std::max(1.5, rng.uniform(0.06, 0.2) * side);
  return DiskSet(std::move(centers), std::move(sigmas), make_assoc(n, m, assoc_kind_for(n, m)));
}

// Ground truth drawn near the disks so every foreground pixel sees a
// non-negligible field (keeps BCE away from its clamp).
BinaryMask random_truth(Rng& rng, const DiskSet& disks, int w, int h) {
  std::vector<Point> centers(disks.centers().begin(), disks.centers().end());
  std::vector<double> sigmas(disks.sigmas().begin(), disks.sigmas().end());
  for (std::size_t i = 0; i < centers.size(); ++i) {
    const double s = disks.sigma_of(i);
    centers[i].x += rng.uniform(-0.5, 0.5) * s;
    centers[i].y += rng.uniform(-0.5, 0.5) * s;
  }
  for (auto& s : sigmas) s *= rng.uniform(0.7, 1.3);
  const DiskSet jittered(std::move(centers), std::move(sigmas),
                         std::vector<int>(disks.assoc().begin(), disks.assoc().end()));
  BinaryMask gt = render_mask(jittered, {w, h, rng.uniform(0.3, 0.7)});
  if (gt.empty_foreground()) gt.set(w / 2, h / 2, true);
  return gt;
}

}  // namespace

GradCheckReport run_grad_check(std::uint64_t seed, int trials, double h, int max_size) {
  if (trials < 1) throw Error(ErrorCode::InvalidArgument, "grad check needs at least one trial");
  if (max_size < 16) throw Error(ErrorCode::InvalidArgument, "grad check grids need max_size >= 16");
  constexpr std::array<int, 4> kDiskCounts = {1, 2, 4, 16};

  Rng rng(seed);
  GradCheckReport report;
  for (int t = 0; t < trials; ++t) {
    GradCheckCase c;
    c.n_disks = kDiskCounts[static_cast<std::size_t>(t % 4)];
    c.n_radii = (t / 4) % 2 == 0 ? 1 : c.n_disks;
    c.loss = (t / 8) % 2 == 0 ? LossKind::dice : LossKind::bce;
    c.width = rng.integer(16, max_size);
    c.height = rng.integer(16, max_size);

    const DiskSet disks = random_disks(rng, c.n_disks, c.n_radii, c.width, c.height);
    const BinaryMask gt = random_truth(rng, disks, c.width, c.height);
    const double epsilon = 1.0;

    const auto analytic = loss_and_gradient(disks, gt, c.loss, epsilon).gradient.flatten();
    const auto numeric = finite_difference_gradient(disks, gt, c.loss, epsilon, h).flatten();
    for (std::size_t k = 0; k < analytic.size(); ++k) {
      const double err = relative_error(analytic[k], numeric[k], kGradRelFloor);
      if (err > c.max_rel_error || c.worst_param.empty()) {
        c.max_rel_error = std::max(c.max_rel_error, err);
        const std::size_t centers = 2 * static_cast<std::size_t>(c.n_disks);
        c.worst_param = k < centers ? "center " + std::to_string(k / 2) + (k % 2 ? " y" : " x")
                                    : "log sigma " + std::to_string(k - centers);
      }
    }
    report.max_rel_error = std::max(report.max_rel_error, c.max_rel_error);
    report.cases.push_back(std::move(c));
  }
  return report;
}

}  // namespace diskcover
