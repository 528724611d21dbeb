#include "diskcover/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "diskcover/fitter.hpp"
#include "diskcover/gradcheck.hpp"
#include "diskcover/io.hpp"
#include "diskcover/metrics.hpp"
#include "diskcover/postprocess.hpp"
#include "diskcover/projection.hpp"
#include "diskcover/synth.hpp"

namespace diskcover {
namespace fs = std::filesystem;

namespace {

std::string shortest(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

// Defaults come from FitConfig so --help always matches the library.
struct FitFlags {
  int n = FitConfig{}.n_disks;
  int m = FitConfig{}.n_radii;
  std::string assoc = "auto";
  std::string loss = to_string(FitConfig{}.loss_kind);
  double eps = FitConfig{}.epsilon;
  double alpha = FitConfig{}.alpha;
  int iters = FitConfig{}.max_iters;
  double step = FitConfig{}.step_size;
  std::uint64_t seed = FitConfig{}.seed;
  int restarts = FitConfig{}.restarts;
  int patience = FitConfig{}.patience;
};

void add_fit_flags(CLI::App* app, FitFlags& f, bool with_nm) {
  if (with_nm) {
    app->add_option("--n", f.n, "Number of disks N")->capture_default_str()->check(CLI::PositiveNumber);
    app->add_option("--m", f.m, "Number of distinct radii M (1 <= M <= N)")->capture_default_str()->check(CLI::PositiveNumber);
    app->add_option("--assoc", f.assoc, "Center-to-radius mapping: auto|shared|grouped|individual")
        ->capture_default_str()
        ->check(CLI::IsMember({"auto", "shared", "grouped", "individual"}));
    app->add_option("--loss", f.loss, "Loss: dice|bce")->capture_default_str()->check(CLI::IsMember({"dice", "bce"}));
  }
  app->add_option("--eps", f.eps, "Dice smoothing term")->capture_default_str();
  app->add_option("--alpha", f.alpha, "Inference threshold on the raw field")->capture_default_str();
  app->add_option("--iters", f.iters, "Maximum optimizer iterations")->capture_default_str();
  app->add_option("--step", f.step, "Optimizer step size")->capture_default_str();
  app->add_option("--seed", f.seed, "Seed; restart r uses seed + r")->capture_default_str();
  app->add_option("--restarts", f.restarts, "Independent restarts (best IoU wins)")->capture_default_str();
  app->add_option("--patience", f.patience, "Early-stop patience in iterations (0 disables)")->capture_default_str();
}

FitConfig to_config(const FitFlags& f, int n, int m, LossKind loss) {
  FitConfig c;
  c.n_disks = n;
  c.n_radii = m;
  c.assoc_kind = f.assoc == "auto" ? assoc_kind_for(n, m) : parse_assoc_kind(f.assoc);
  c.loss_kind = loss;
  c.epsilon = f.eps;
  c.alpha = f.alpha;
  c.max_iters = f.iters;
  c.step_size = f.step;
  c.seed = f.seed;
  c.restarts = f.restarts;
  c.patience = f.patience;
  return c;
}

void require_valid(const FitConfig& c) {
  const auto problems = validate(c);
  if (problems.empty()) return;
  std::string msg = "invalid configuration:";
  for (const auto& p : problems) msg += " " + p + ";";
  throw Error(ErrorCode::Usage, msg);
}

void print_config(std::ostream& out, const std::string& command, const std::vector<std::pair<std::string, std::string>>& kv) {
  out << "# " << command;
  for (const auto& [k, v] : kv) out << " " << k << "=" << v;
  out << "\n";
}

std::vector<std::pair<std::string, std::string>> describe(const FitConfig& c) {
  return {{"n", std::to_string(c.n_disks)},
          {"m", std::to_string(c.n_radii)},
          {"assoc", to_string(c.assoc_kind)},
          {"loss", to_string(c.loss_kind)},
          {"eps", shortest(c.epsilon)},
          {"alpha", shortest(c.alpha)},
          {"iters", std::to_string(c.max_iters)},
          {"step", shortest(c.step_size)},
          {"seed", std::to_string(c.seed)},
          {"restarts", std::to_string(c.restarts)},
          {"patience", std::to_string(c.patience)}};
}

void set_threads(int threads) {
#ifdef _OPENMP
  if (threads > 0) omp_set_num_threads(threads);
#else
  (void)threads;
#endif
}

int cmd_fit(const std::string& in, const std::string& out_path, const std::string& mask_out,
            const std::string& trace_out, const std::string& report_out, const FitFlags& flags, std::ostream& out) {
  const FitConfig config = to_config(flags, flags.n, flags.m, parse_loss_kind(flags.loss));
  require_valid(config);
  auto kv = describe(config);
  kv.insert(kv.begin(), {"in", in});
  print_config(out, "fit", kv);

  const BinaryMask gt = read_mask_pgm(in);
  const FitResult result = fit(gt, config);
  write_file_atomic(out_path, diskset_to_json(result.disks));
  if (!mask_out.empty()) write_mask_pgm(render_mask(result.disks, {gt.width(), gt.height(), config.alpha}), mask_out);
  if (!trace_out.empty()) {
    std::string csv = "iteration,loss\n";
    for (std::size_t k = 0; k < result.loss_trace.size(); ++k) csv += std::to_string(k) + "," + shortest(result.loss_trace[k]) + "\n";
    write_file_atomic(trace_out, csv);
  }
  if (!report_out.empty()) {
    nlohmann::ordered_json doc;
    doc["final_iou"] = result.final_iou;
    doc["final_loss"] = result.final_loss;
    doc["iterations_used"] = result.iterations_used;
    doc["seed"] = result.seed;
    write_file_atomic(report_out, doc.dump(2) + "\n");
  }
  out << "final_iou=" << fixed(result.final_iou, 6) << " final_loss=" << fixed(result.final_loss, 6)
      << " iterations=" << result.iterations_used << " seed=" << result.seed << "\n";
  return kExitOk;
}

int cmd_render(const std::string& disks_path, int width, int height, double alpha, const std::string& out_path,
               const std::string& mask_out, const std::string& overlay_out, const std::string& background,
               std::ostream& out) {
  print_config(out, "render",
               {{"disks", disks_path}, {"width", std::to_string(width)}, {"height", std::to_string(height)},
                {"alpha", shortest(alpha)}});
  if (!(alpha > 0.0 && alpha <= 1.0)) throw Error(ErrorCode::Usage, "alpha ∈ (0,1]");
  const DiskSet disks = diskset_from_json(read_file(disks_path));
  const ScalarField field = gaussian_field(disks, width, height);
  write_field_pgm(field, out_path);
  const BinaryMask mask = threshold_mask(field, alpha);
  if (!mask_out.empty()) write_mask_pgm(mask, mask_out);
  if (!overlay_out.empty()) {
    std::optional<GrayImage> bg;
    if (!background.empty()) bg = read_gray_pgm(background);
    write_overlay_ppm(bg, {{mask, 0}}, overlay_out);
  }
  out << "area=" << mask.count() << "\n";
  return kExitOk;
}

int cmd_simplify(const std::string& in, double beta, const std::string& out_path, const std::string& contours_out,
                 std::ostream& out) {
  print_config(out, "simplify", {{"in", in}, {"beta", shortest(beta)}});
  if (!(beta >= 0.0)) throw Error(ErrorCode::Usage, "beta must be nonnegative");
  const BinaryMask mask = read_mask_pgm(in);
  std::vector<Polyline> simplified;
  nlohmann::ordered_json doc = nlohmann::ordered_json::array();
  std::size_t before = 0;
  std::size_t after = 0;
  for (const Contour& c : extract_contours(mask)) {
    const double tol = beta * perimeter(c.line);
    Polyline s = simplify_dp(c.line, tol);
    before += c.line.points.size();
    after += s.points.size();
    nlohmann::ordered_json jc;
    jc["hole"] = c.hole;
    jc["tolerance"] = tol;
    auto& pts = jc["points"] = nlohmann::ordered_json::array();
    for (const Point& p : s.points) pts.push_back({p.x, p.y});
    doc.push_back(std::move(jc));
    simplified.push_back(std::move(s));
  }
  const BinaryMask result = rasterize_polygon(simplified, mask.width(), mask.height());
  write_mask_pgm(result, out_path);
  if (!contours_out.empty()) write_file_atomic(contours_out, doc.dump(2) + "\n");
  out << "contours=" << simplified.size() << " vertices=" << before << "->" << after
      << " iou=" << fixed(iou(result, mask), 6) << "\n";
  return kExitOk;
}

int cmd_eval(const std::string& gt_dir, const std::string& pred_dir, const std::string& scores_path,
             const std::string& out_path, const std::string& json_out, std::ostream& out) {
  print_config(out, "eval", {{"gt", gt_dir}, {"pred", pred_dir}});
  const auto gt_entries = list_corpus(gt_dir);
  const auto pred_entries = list_corpus(pred_dir);
  if (gt_entries.empty()) throw Error(ErrorCode::Usage, "ground-truth corpus " + gt_dir + " is empty");

  std::map<std::string, double> scores;
  if (!scores_path.empty()) {
    const auto doc = nlohmann::json::parse(read_file(scores_path), nullptr, false);
    if (!doc.is_object()) throw Error(ErrorCode::Schema, scores_path + ": expected an object of file -> score");
    for (const auto& [k, v] : doc.items()) {
      if (!v.is_number()) throw Error(ErrorCode::Schema, scores_path + ": score for " + k + " is not a number");
      scores[k] = v.get<double>();
    }
  }

  std::map<std::string, int> image_ids;
  const auto image_id = [&](const std::string& name) {
    const auto it = image_ids.try_emplace(name, static_cast<int>(image_ids.size())).first;
    return it->second;
  };
  std::vector<GroundTruthInstance> gts;
  for (const auto& e : gt_entries) gts.push_back({read_mask_pgm(e.file), e.category, image_id(e.image)});
  std::vector<ScoredInstance> preds;
  for (const auto& e : pred_entries) {
    const auto it = scores.find(e.file.filename().string());
    preds.push_back({read_mask_pgm(e.file), it == scores.end() ? 1.0 : it->second, e.category, image_id(e.image)});
  }
  const EvalReport report = average_precision(preds, gts);
  write_file_atomic(out_path, report.to_csv());
  if (!json_out.empty()) write_file_atomic(json_out, report.to_json());
  out << "AP=" << fixed(100.0 * report.mean_ap, 2) << " AP50=" << fixed(100.0 * report.mean_ap50, 2) << "\n";
  return kExitOk;
}

struct AblateFlags {
  std::string corpus;
  std::uint64_t suite_seed = 0;
  std::vector<int> n_list = {2, 4, 8, 16, 24, 32};
  std::vector<int> m_list;
  std::vector<std::string> loss_list = {"dice"};
  std::string out = "ablation.csv";
  std::string tsv;
  bool timing = false;
};

int cmd_ablate(const AblateFlags& a, const FitFlags& flags, int threads, std::ostream& out) {
  std::vector<BinaryMask> masks;
  std::string source;
  if (!a.corpus.empty()) {
    source = a.corpus;
    for (const auto& e : list_corpus(a.corpus)) masks.push_back(read_mask_pgm(e.file));
  } else {
    source = "suite:" + std::to_string(a.suite_seed);
    for (auto& member : standard_suite(a.suite_seed)) masks.push_back(std::move(member.mask));
  }
  if (masks.empty()) throw Error(ErrorCode::Usage, "corpus " + source + " has no masks");

  std::vector<FitConfig> grid;
  for (const auto& loss_name : a.loss_list) {
    const LossKind loss = parse_loss_kind(loss_name);
    for (int n : a.n_list) {
      if (a.m_list.empty()) {
        grid.push_back(to_config(flags, n, n, loss));
        continue;
      }
      for (int m : a.m_list) {
        if (m <= n) grid.push_back(to_config(flags, n, m, loss));
      }
    }
  }
  if (grid.empty()) throw Error(ErrorCode::Usage, "ablation grid is empty");
  for (const auto& c : grid) require_valid(c);

  const auto join = [](const auto& values) {
    std::string s;
    for (const auto& v : values) {
      if (!s.empty()) s += ",";
      if constexpr (std::is_same_v<std::decay_t<decltype(v)>, std::string>) {
        s += v;
      } else {
        s += std::to_string(v);
      }
    }
    return s;
  };
  auto kv = describe(grid.front());
  kv.erase(kv.begin(), kv.begin() + 4);
  kv.insert(kv.begin(), {{"source", source},
                         {"masks", std::to_string(masks.size())},
                         {"n_list", join(a.n_list)},
                         {"m_list", a.m_list.empty() ? std::string("N") : join(a.m_list)},
                         {"loss_list", join(a.loss_list)},
                         {"threads", std::to_string(threads)}});
  print_config(out, "ablate", kv);

  const AblationReport report = ablate(masks, grid, true);
  write_file_atomic(a.out, report.to_csv(a.timing));
  std::string tsv = a.tsv;
  if (tsv.empty()) tsv = fs::path(a.out).replace_extension(".tsv").string();
  write_file_atomic(tsv, report.to_tsv(a.timing));
  for (const auto& r : report.rows) {
    out << "n=" << r.n_disks << " m=" << r.n_radii << " loss=" << to_string(r.loss)
        << " mean_iou=" << fixed(r.mean_iou, 4) << " mean_dice=" << fixed(r.mean_dice, 4);
    if (r.failed) out << " failed=" << r.failed;
    out << "\n";
  }
  return kExitOk;
}

int cmd_grad_check(std::uint64_t seed, int trials, double h, double tol, int max_size, std::ostream& out) {
  print_config(out, "grad-check",
               {{"seed", std::to_string(seed)}, {"trials", std::to_string(trials)}, {"h", shortest(h)}, {"tol", shortest(tol)},
                {"max_size", std::to_string(max_size)}});
  const GradCheckReport report = run_grad_check(seed, trials, h, max_size);
  const auto worst = std::max_element(report.cases.begin(), report.cases.end(),
                                      [](const auto& a, const auto& b) { return a.max_rel_error < b.max_rel_error; });
  out << "trials=" << report.cases.size() << " max_rel_error=" << shortest(report.max_rel_error);
  if (worst != report.cases.end()) {
    out << " worst=(n=" << worst->n_disks << " m=" << worst->n_radii << " loss=" << to_string(worst->loss) << " "
        << worst->width << "x" << worst->height << " " << worst->worst_param << ")";
  }
  out << "\n";
  return report.max_rel_error < tol ? kExitOk : kExitDomain;
}

int cmd_gen_suite(std::uint64_t seed, const std::string& dir, std::ostream& out) {
  print_config(out, "gen-suite", {{"seed", std::to_string(seed)}, {"out", dir}});
  fs::create_directories(dir);
  std::vector<CorpusEntry> entries;
  int k = 0;
  for (const auto& member : standard_suite(seed)) {
    char name[64];
    std::snprintf(name, sizeof name, "suite%02d_0_%d.pgm", k, member.category);
    const fs::path file = fs::path(dir) / name;
    write_mask_pgm(member.mask, file);
    entries.push_back({file, name, 0, member.category});
    ++k;
  }
  write_file_atomic(fs::path(dir) / "suite.json", corpus_manifest_json(entries));
  out << "wrote " << entries.size() << " masks\n";
  return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err, bool color) {
  CLI::App app{"Disk-covering approximation of binary instance masks"};
  app.name("diskcover");
  app.require_subcommand(1);
  int threads = 0;
  app.add_option("--threads", threads, "Worker threads for corpus-level work (0 = runtime default)")
      ->capture_default_str();

  FitFlags fit_flags;
  std::string fit_in;
  std::string fit_out;
  std::string fit_mask_out;
  std::string fit_trace_out;
  std::string fit_report;
  auto* fit_cmd = app.add_subcommand("fit", "Fit a disk set to one mask");
  fit_cmd->add_option("--in", fit_in, "Input mask (binary PGM)")->required();
  fit_cmd->add_option("--out", fit_out, "Output disk-set JSON")->required();
  fit_cmd->add_option("--mask-out", fit_mask_out, "Optional thresholded mask (PGM)");
  fit_cmd->add_option("--trace-out", fit_trace_out, "Optional loss trace (CSV)");
  fit_cmd->add_option("--report", fit_report, "Optional fit summary (JSON)");
  fit_cmd->add_option("--threads", threads, "Worker threads (0 = runtime default)")->capture_default_str();
  add_fit_flags(fit_cmd, fit_flags, true);

  std::string render_disks;
  int render_w = 0;
  int render_h = 0;
  double render_alpha = 0.5;
  std::string render_out;
  std::string render_mask_out;
  std::string render_overlay;
  std::string render_bg;
  auto* render_cmd = app.add_subcommand("render", "Render a disk set to a field and mask");
  render_cmd->add_option("--disks", render_disks, "Disk-set JSON")->required();
  render_cmd->add_option("--width", render_w, "Grid width")->required()->check(CLI::PositiveNumber);
  render_cmd->add_option("--height", render_h, "Grid height")->required()->check(CLI::PositiveNumber);
  render_cmd->add_option("--alpha", render_alpha, "Threshold on the raw field")->capture_default_str();
  render_cmd->add_option("--out", render_out, "tanh-normalized field (PGM)")->required();
  render_cmd->add_option("--mask-out", render_mask_out, "Optional thresholded mask (PGM)");
  render_cmd->add_option("--overlay", render_overlay, "Optional overlay (PPM)");
  render_cmd->add_option("--background", render_bg, "Optional grayscale background for the overlay (PGM)");

  std::string simp_in;
  double simp_beta = 0.01;
  std::string simp_out;
  std::string simp_contours;
  auto* simp_cmd = app.add_subcommand("simplify", "Douglas-Peucker contour smoothing of a mask");
  simp_cmd->add_option("--in", simp_in, "Input mask (PGM)")->required();
  simp_cmd->add_option("--beta", simp_beta, "Tolerance as a fraction of each contour's perimeter")->capture_default_str();
  simp_cmd->add_option("--out", simp_out, "Output mask (PGM)")->required();
  simp_cmd->add_option("--contours-out", simp_contours, "Optional simplified contours (JSON)");

  std::string eval_gt;
  std::string eval_pred;
  std::string eval_scores;
  std::string eval_out;
  std::string eval_json;
  auto* eval_cmd = app.add_subcommand("eval", "AP / AP50 of predicted masks against ground truth");
  eval_cmd->add_option("--gt", eval_gt, "Ground-truth corpus directory")->required();
  eval_cmd->add_option("--pred", eval_pred, "Prediction corpus directory")->required();
  eval_cmd->add_option("--scores", eval_scores, "Optional JSON object: prediction file name -> score (default 1)");
  eval_cmd->add_option("--out", eval_out, "Report CSV")->required();
  eval_cmd->add_option("--json", eval_json, "Optional report JSON");

  AblateFlags ab;
  FitFlags ab_fit;
  auto* ab_cmd = app.add_subcommand("ablate", "Mean IoU/Dice over a corpus for a grid of (N, M, loss)");
  ab_cmd->add_option("--corpus", ab.corpus, "Corpus directory (default: the synthetic suite)");
  ab_cmd->add_option("--suite-seed", ab.suite_seed, "Seed of the synthetic suite")->capture_default_str();
  ab_cmd->add_option("--n-list", ab.n_list, "Disk counts")->delimiter(',')->capture_default_str();
  ab_cmd->add_option("--m-list", ab.m_list, "Radii counts (default: M = N)")->delimiter(',');
  ab_cmd->add_option("--loss-list", ab.loss_list, "Losses")->delimiter(',')->capture_default_str()
      ->check(CLI::IsMember({"dice", "bce"}));
  ab_cmd->add_option("--out", ab.out, "Report CSV")->capture_default_str();
  ab_cmd->add_option("--tsv", ab.tsv, "Plot-ready TSV (default: --out with .tsv)");
  ab_cmd->add_flag("--timing", ab.timing, "Fill the mean_time column with wall-clock seconds");
  ab_cmd->add_option("--threads", threads, "Worker threads (0 = runtime default)")->capture_default_str();
  ab_fit.assoc = "auto";
  add_fit_flags(ab_cmd, ab_fit, false);

  std::uint64_t gc_seed = 7;
  int gc_trials = 100;
  double gc_h = 1e-4;
  double gc_tol = 1e-4;
  int gc_max = 96;
  auto* gc_cmd = app.add_subcommand("grad-check", "Analytic vs finite-difference gradients on random configs");
  gc_cmd->add_option("--seed", gc_seed, "Seed")->capture_default_str();
  gc_cmd->add_option("--trials", gc_trials, "Number of random configurations")->capture_default_str()->check(CLI::PositiveNumber);
  gc_cmd->add_option("--fd-step", gc_h, "Finite-difference step")->capture_default_str();
  gc_cmd->add_option("--tol", gc_tol, "Maximum relative error")->capture_default_str();
  gc_cmd->add_option("--max-size", gc_max, "Largest grid side")->capture_default_str();

  std::uint64_t gs_seed = 0;
  std::string gs_out;
  auto* gs_cmd = app.add_subcommand("gen-suite", "Write the synthetic suite as a corpus directory");
  gs_cmd->add_option("--seed", gs_seed, "Suite seed")->capture_default_str();
  gs_cmd->add_option("--out", gs_out, "Output directory")->required();

  const auto diag = [&](const std::string& msg) {
    if (color) {
      err << "\033[31merror:\033[0m " << msg << "\n";
    } else {
      err << "error: " << msg << "\n";
    }
  };

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    std::string msg = e.what();
    std::replace(msg.begin(), msg.end(), '\n', ' ');
    diag(msg);
    return kExitUsage;
  }

  try {
    set_threads(threads);
    if (*fit_cmd) return cmd_fit(fit_in, fit_out, fit_mask_out, fit_trace_out, fit_report, fit_flags, out);
    if (*render_cmd) {
      return cmd_render(render_disks, render_w, render_h, render_alpha, render_out, render_mask_out, render_overlay,
                        render_bg, out);
    }
    if (*simp_cmd) return cmd_simplify(simp_in, simp_beta, simp_out, simp_contours, out);
    if (*eval_cmd) return cmd_eval(eval_gt, eval_pred, eval_scores, eval_out, eval_json, out);
    if (*ab_cmd) return cmd_ablate(ab, ab_fit, threads, out);
    if (*gc_cmd) return cmd_grad_check(gc_seed, gc_trials, gc_h, gc_tol, gc_max, out);
    if (*gs_cmd) return cmd_gen_suite(gs_seed, gs_out, out);
  } catch (const Error& e) {
    diag(e.what());
    return e.code() == ErrorCode::Usage ? kExitUsage : kExitDomain;
  } catch (const std::exception& e) {
    diag(e.what());
    return kExitDomain;
  }
  return kExitUsage;
}

}  // namespace diskcover
