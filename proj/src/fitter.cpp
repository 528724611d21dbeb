#include "diskcover/fitter.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>

#include "diskcover/adam.hpp"
#include "diskcover/losses.hpp"
#include "diskcover/metrics.hpp"
#include "diskcover/projection.hpp"

namespace diskcover {
namespace {

constexpr double kInitJitter = 0.2;
constexpr double kMinInitSigma = 0.5;

// splitmix64: portable, so jitter is identical across standard libraries.
std::uint64_t next_random(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double uniform_symmetric(std::uint64_t& state, double half_width) {
  const double u = static_cast<double>(next_random(state) >> 11) * 0x1.0p-53;
  return (2.0 * u - 1.0) * half_width;
}

void require_valid(const FitConfig& config) {
  const auto problems = validate(config);
  if (problems.empty()) return;
  std::string msg = "invalid fit config:";
  for (const auto& p : problems) msg += " " + p + ";";
  throw Error(ErrorCode::InvalidArgument, msg);
}

struct RunResult {
  std::vector<double> best_params;
  std::vector<double> trace;
  double best_loss = std::numeric_limits<double>::infinity();
};

RunResult descend(const BinaryMask& gt, const FitConfig& config, const DiskSet& start) {
  const std::vector<int> assoc(start.assoc().begin(), start.assoc().end());
  std::vector<double> theta = pack_params(start);
  Adam opt(theta.size(), config.step_size, config.beta1, config.beta2, config.moment_guard);

  RunResult run;
  run.trace.reserve(static_cast<std::size_t>(config.max_iters));
  int stale = 0;
  double reference = std::numeric_limits<double>::infinity();
  for (int it = 0; it < config.max_iters; ++it) {
    LossAndGradient lg;
    try {
      lg = loss_and_gradient(unpack_params(theta, assoc), gt, config.loss_kind, config.epsilon);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NonFinite) throw;
      throw Error(ErrorCode::NonFinite, "iteration " + std::to_string(it) + ": " + e.detail());
    }
    run.trace.push_back(lg.loss);
    if (lg.loss < run.best_loss) {
      run.best_loss = lg.loss;
      run.best_params = theta;
    }
    if (lg.loss < reference - config.min_improvement) {
      reference = lg.loss;
      stale = 0;
    } else if (config.patience > 0 && ++stale >= config.patience) {
      break;
    }
    if (it + 1 < config.max_iters) opt.step(theta, lg.gradient.flatten());
  }
  return run;
}

}  // namespace

DiskSet init_disks(const BinaryMask& gt, const FitConfig& config) {
  if (config.n_disks < 1 || config.n_radii < 1 || config.n_radii > config.n_disks) {
    throw Error(ErrorCode::InvalidArgument, "init_disks needs 1 <= M <= N");
  }
  std::vector<Point> fg;
  for (int r = 0; r < gt.height(); ++r) {
    for (int c = 0; c < gt.width(); ++c) {
      if (gt.at(c, r)) fg.push_back({c + 0.5, r + 0.5});
    }
  }
  if (fg.empty()) throw Error(ErrorCode::EmptyMask, "ground-truth mask has no foreground pixels");

  Point centroid;
  for (const Point& p : fg) {
    centroid.x += p.x;
    centroid.y += p.y;
  }
  centroid.x /= static_cast<double>(fg.size());
  centroid.y /= static_cast<double>(fg.size());

  const auto dist2 = [](Point a, Point b) { return (a.x - b.x) * (a.x - b.x) + (a.y - b.y) * (a.y - b.y); };

  std::size_t first = 0;
  for (std::size_t k = 1; k < fg.size(); ++k) {
    if (dist2(fg[k], centroid) < dist2(fg[first], centroid)) first = k;
  }

  const auto n = static_cast<std::size_t>(config.n_disks);
  std::vector<Point> centers;
  centers.reserve(n);
  centers.push_back(fg[first]);
  std::vector<double> nearest(fg.size());
  for (std::size_t k = 0; k < fg.size(); ++k) nearest[k] = dist2(fg[k], fg[first]);
  while (centers.size() < n) {
    std::size_t pick = 0;
    for (std::size_t k = 1; k < fg.size(); ++k) {
      if (nearest[k] > nearest[pick]) pick = k;
    }
    centers.push_back(fg[pick]);
    for (std::size_t k = 0; k < fg.size(); ++k) nearest[k] = std::min(nearest[k], dist2(fg[k], fg[pick]));
  }

  std::uint64_t state = config.seed;
  for (Point& c : centers) {
    c.x += uniform_symmetric(state, kInitJitter);
    c.y += uniform_symmetric(state, kInitJitter);
  }

  const double sigma = std::max(
      kMinInitSigma, std::sqrt(static_cast<double>(fg.size()) / (static_cast<double>(n) * std::numbers::pi)));
  return DiskSet(std::move(centers), std::vector<double>(static_cast<std::size_t>(config.n_radii), sigma),
                 make_assoc(config.n_disks, config.n_radii, config.assoc_kind));
}

FitResult fit(const BinaryMask& gt, const FitConfig& config) {
  require_valid(config);
  if (gt.empty_foreground()) throw Error(ErrorCode::EmptyMask, "ground-truth mask has no foreground pixels");
  const auto t0 = std::chrono::steady_clock::now();

  std::optional<FitResult> best;
  for (int r = 0; r < config.restarts; ++r) {
    FitConfig run_config = config;
    run_config.seed = config.seed + static_cast<std::uint64_t>(r);
    const DiskSet start = init_disks(gt, run_config);
    RunResult run = descend(gt, run_config, start);

    DiskSet disks = unpack_params(run.best_params, start.assoc());
    const double score = iou(render_mask(disks, {gt.width(), gt.height(), config.alpha}), gt);
    if (!best || score > best->final_iou) {
      const int used = static_cast<int>(run.trace.size());
      best = FitResult{std::move(disks), std::move(run.trace), run.best_loss, score, used, run_config.seed, 0.0};
    }
  }
  best->wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return std::move(*best);
}

std::vector<FitOutcome> fit_corpus(std::span<const BinaryMask> masks, const FitConfig& config, bool parallel) {
  std::vector<FitOutcome> out(masks.size());
  const auto n = static_cast<std::ptrdiff_t>(masks.size());
#pragma omp parallel for schedule(dynamic, 1) if (parallel && n > 1)
  for (std::ptrdiff_t k = 0; k < n; ++k) {
    auto& slot = out[static_cast<std::size_t>(k)];
    try {
      slot.result = fit(masks[static_cast<std::size_t>(k)], config);
    } catch (const Error& e) {
      slot.error = e.code();
      slot.message = e.what();
    }
  }
  return out;
}

AblationReport ablate(std::span<const BinaryMask> masks, std::span<const FitConfig> grid, bool parallel) {
  if (masks.empty()) throw Error(ErrorCode::Usage, "ablation needs at least one mask");
  if (grid.empty()) throw Error(ErrorCode::Usage, "ablation needs at least one config");

  const std::size_t n_masks = masks.size();
  const auto tasks = static_cast<std::ptrdiff_t>(grid.size() * n_masks);
  struct Cell {
    std::optional<ErrorCode> error;
    std::string message;
    double iou = 0.0;
    double dice = 0.0;
    double time = 0.0;
  };
  std::vector<Cell> cells(static_cast<std::size_t>(tasks));

#pragma omp parallel for schedule(dynamic, 1) if (parallel && tasks > 1)
  for (std::ptrdiff_t t = 0; t < tasks; ++t) {
    const auto idx = static_cast<std::size_t>(t);
    const FitConfig& config = grid[idx / n_masks];
    const BinaryMask& gt = masks[idx % n_masks];
    Cell& cell = cells[idx];
    try {
      const FitResult r = fit(gt, config);
      const BinaryMask pred = render_mask(r.disks, {gt.width(), gt.height(), config.alpha});
      cell.iou = r.final_iou;
      cell.dice = dice_coefficient(pred, gt);
      cell.time = r.wall_time;
    } catch (const Error& e) {
      cell.error = e.code();
      cell.message = e.what();
    }
  }

  AblationReport report;
  for (std::size_t g = 0; g < grid.size(); ++g) {
    AblationRow row;
    row.n_disks = grid[g].n_disks;
    row.n_radii = grid[g].n_radii;
    row.loss = grid[g].loss_kind;
    for (std::size_t k = 0; k < n_masks; ++k) {
      const Cell& cell = cells[g * n_masks + k];
      if (cell.error) {
        ++row.failed;
        if (!row.note.empty()) row.note += "; ";
        row.note += "mask " + std::to_string(k) + ": " + std::string(to_string(*cell.error));
        continue;
      }
      ++row.fitted;
      row.mean_iou += cell.iou;
      row.mean_dice += cell.dice;
      row.mean_time += cell.time;
    }
    if (row.fitted > 0) {
      const auto n = static_cast<double>(row.fitted);
      row.mean_iou /= n;
      row.mean_dice /= n;
      row.mean_time /= n;
    }
    report.rows.push_back(std::move(row));
  }
  return report;
}

namespace {

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string render_table(const AblationReport& report, char sep, bool timing, bool with_note) {
  std::string out;
  const std::string s(1, sep);
  out += "n_disks" + s + "n_radii" + s + "loss" + s + "mean_iou" + s + "mean_dice" + s + "mean_time" + s +
         "fitted" + s + "failed";
  if (with_note) out += s + "note";
  out += "\n";
  for (const auto& r : report.rows) {
    out += std::to_string(r.n_disks) + s + std::to_string(r.n_radii) + s + to_string(r.loss) + s +
           fixed(r.mean_iou, 6) + s + fixed(r.mean_dice, 6) + s + (timing ? fixed(r.mean_time, 4) : "NA") + s +
           std::to_string(r.fitted) + s + std::to_string(r.failed);
    if (with_note) out += s + r.note;
    out += "\n";
  }
  return out;
}

}  // namespace

std::string AblationReport::to_csv(bool timing) const { return render_table(*this, ',', timing, true); }

std::string AblationReport::to_tsv(bool timing) const { return render_table(*this, '\t', timing, false); }

}  // namespace diskcover
