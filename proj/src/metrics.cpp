#include "diskcover/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>
#include <set>

#include <json.hpp>

namespace diskcover {
namespace {

void check_same_dims(const BinaryMask& a, const BinaryMask& b) {
  if (a.width() != b.width() || a.height() != b.height()) {
    throw Error(ErrorCode::DimensionMismatch, "masks differ in size");
  }
}

struct Overlap {
  std::size_t both = 0;
  std::size_t a = 0;
  std::size_t b = 0;
};

Overlap overlap(const BinaryMask& a, const BinaryMask& b) {
  check_same_dims(a, b);
  Overlap o;
  const auto da = a.data();
  const auto db = b.data();
  for (std::size_t k = 0; k < da.size(); ++k) {
    o.a += da[k];
    o.b += db[k];
    o.both += static_cast<std::size_t>(da[k] & db[k]);
  }
  return o;
}

// AP at one threshold for a category, given the IoU matrix rows in score order.
ThresholdStats match_at(const std::vector<std::vector<double>>& ious, std::size_t n_gt, double threshold) {
  ThresholdStats st;
  st.threshold = threshold;
  std::vector<bool> taken(n_gt, false);
  std::vector<double> precision;
  std::vector<double> recall;
  precision.reserve(ious.size());
  recall.reserve(ious.size());
  std::size_t tp = 0;
  for (std::size_t p = 0; p < ious.size(); ++p) {
    std::ptrdiff_t best = -1;
    double best_iou = 0.0;
    for (std::size_t g = 0; g < n_gt; ++g) {
      if (taken[g] || ious[p][g] < threshold) continue;
      if (best < 0 || ious[p][g] > best_iou) {
        best = static_cast<std::ptrdiff_t>(g);
        best_iou = ious[p][g];
      }
    }
    if (best >= 0) {
      taken[static_cast<std::size_t>(best)] = true;
      ++tp;
    }
    precision.push_back(static_cast<double>(tp) / static_cast<double>(p + 1));
    recall.push_back(n_gt == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(n_gt));
  }
  st.tp = tp;
  st.fp = ious.size() - tp;
  st.fn = n_gt - tp;
  if (n_gt == 0) return st;

  for (std::size_t k = precision.size(); k-- > 1;) precision[k - 1] = std::max(precision[k - 1], precision[k]);
  double sum = 0.0;
  for (int i = 0; i <= 100; ++i) {
    const double level = static_cast<double>(i) / 100.0;
    const auto it = std::lower_bound(recall.begin(), recall.end(), level);
    if (it != recall.end()) sum += precision[static_cast<std::size_t>(it - recall.begin())];
  }
  st.ap = sum / 101.0;
  return st;
}

std::string fmt4(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

}  // namespace

double iou(const BinaryMask& a, const BinaryMask& b) {
  const Overlap o = overlap(a, b);
  const std::size_t uni = o.a + o.b - o.both;
  if (uni == 0) return 1.0;
  return static_cast<double>(o.both) / static_cast<double>(uni);
}

double dice_coefficient(const BinaryMask& a, const BinaryMask& b) {
  const Overlap o = overlap(a, b);
  if (o.a + o.b == 0) return 1.0;
  return 2.0 * static_cast<double>(o.both) / static_cast<double>(o.a + o.b);
}

std::vector<double> default_iou_thresholds() {
  std::vector<double> t;
  for (int i = 0; i < 10; ++i) t.push_back(0.5 + 0.05 * i);
  return t;
}

EvalReport average_precision(std::span<const ScoredInstance> preds, std::span<const GroundTruthInstance> gts) {
  const auto t = default_iou_thresholds();
  return average_precision(preds, gts, t);
}

EvalReport average_precision(std::span<const ScoredInstance> preds, std::span<const GroundTruthInstance> gts,
                             std::span<const double> thresholds) {
  if (thresholds.empty()) throw Error(ErrorCode::InvalidArgument, "need at least one IoU threshold");
  for (double t : thresholds) {
    if (!(t > 0.0 && t <= 1.0)) throw Error(ErrorCode::InvalidArgument, "IoU thresholds must lie in (0, 1]");
  }
  for (const auto& p : preds) {
    if (!std::isfinite(p.score)) throw Error(ErrorCode::NonFinite, "prediction score is not finite");
  }

  EvalReport report;
  std::set<int> categories;
  for (const auto& p : preds) {
    if (p.mask.empty_foreground()) {
      ++report.dropped_empty_predictions;
      continue;
    }
    categories.insert(p.category);
  }
  for (const auto& g : gts) categories.insert(g.category);

  for (int cat : categories) {
    std::vector<std::size_t> order;
    for (std::size_t k = 0; k < preds.size(); ++k) {
      if (preds[k].category == cat && !preds[k].mask.empty_foreground()) order.push_back(k);
    }
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return preds[a].score > preds[b].score; });
    std::vector<std::size_t> gt_idx;
    for (std::size_t k = 0; k < gts.size(); ++k) {
      if (gts[k].category == cat) gt_idx.push_back(k);
    }

    std::vector<std::vector<double>> ious(order.size(), std::vector<double>(gt_idx.size(), 0.0));
    for (std::size_t p = 0; p < order.size(); ++p) {
      for (std::size_t g = 0; g < gt_idx.size(); ++g) {
        const auto& pi = preds[order[p]];
        const auto& gi = gts[gt_idx[g]];
        if (pi.image == gi.image) ious[p][g] = iou(pi.mask, gi.mask);
      }
    }

    CategoryReport cr;
    cr.category = cat;
    double sum = 0.0;
    for (double t : thresholds) {
      cr.per_threshold.push_back(match_at(ious, gt_idx.size(), t));
      sum += cr.per_threshold.back().ap;
    }
    cr.ap = sum / static_cast<double>(thresholds.size());
    cr.ap50 = cr.per_threshold.front().ap;
    for (const auto& st : cr.per_threshold) {
      if (std::abs(st.threshold - 0.5) < 1e-12) cr.ap50 = st.ap;
    }
    report.categories.push_back(std::move(cr));
  }

  if (!report.categories.empty()) {
    for (const auto& c : report.categories) {
      report.mean_ap += c.ap;
      report.mean_ap50 += c.ap50;
    }
    report.mean_ap /= static_cast<double>(report.categories.size());
    report.mean_ap50 /= static_cast<double>(report.categories.size());
  }
  return report;
}

namespace {

const ThresholdStats* stats_at_half(const CategoryReport& c) {
  for (const auto& st : c.per_threshold) {
    if (std::abs(st.threshold - 0.5) < 1e-12) return &st;
  }
  return c.per_threshold.empty() ? nullptr : &c.per_threshold.front();
}

}  // namespace

std::string EvalReport::to_csv() const {
  std::string out = "category,AP,AP50,TP,FP,FN\n";
  for (const auto& c : categories) {
    const ThresholdStats* st = stats_at_half(c);
    out += std::to_string(c.category) + "," + fmt4(100.0 * c.ap) + "," + fmt4(100.0 * c.ap50) + "," +
           std::to_string(st ? st->tp : 0) + "," + std::to_string(st ? st->fp : 0) + "," +
           std::to_string(st ? st->fn : 0) + "\n";
  }
  out += "mean," + fmt4(100.0 * mean_ap) + "," + fmt4(100.0 * mean_ap50) + ",,,\n";
  return out;
}

std::string EvalReport::to_json() const {
  nlohmann::ordered_json doc;
  doc["mean_AP"] = mean_ap;
  doc["mean_AP50"] = mean_ap50;
  doc["dropped_empty_predictions"] = dropped_empty_predictions;
  auto& cats = doc["categories"] = nlohmann::ordered_json::array();
  for (const auto& c : categories) {
    nlohmann::ordered_json jc;
    jc["category"] = c.category;
    jc["AP"] = c.ap;
    jc["AP50"] = c.ap50;
    const ThresholdStats* st = stats_at_half(c);
    jc["TP"] = st ? st->tp : 0;
    jc["FP"] = st ? st->fp : 0;
    jc["FN"] = st ? st->fn : 0;
    auto& per = jc["per_threshold"] = nlohmann::ordered_json::array();
    for (const auto& s : c.per_threshold) {
      per.push_back({{"threshold", s.threshold}, {"AP", s.ap}, {"TP", s.tp}, {"FP", s.fp}, {"FN", s.fn}});
    }
    cats.push_back(std::move(jc));
  }
  return doc.dump(2) + "\n";
}

}  // namespace diskcover
