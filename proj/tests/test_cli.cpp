#include <gtest/gtest.h>

#include <filesystem>
#include <random>
#include <sstream>

#include "diskcover/cli.hpp"
#include "diskcover/io.hpp"
#include "oracles.hpp"

using namespace diskcover;
namespace fs = std::filesystem;

namespace {

struct CliRun {
  int code = -1;
  std::string out;
  std::string err;
};

CliRun run(std::vector<std::string> args) {
  args.insert(args.begin(), "diskcover");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out;
  std::ostringstream err;
  CliRun r;
  r.code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("diskcover_cli_" + std::to_string(std::random_device{}()));
    fs::create_directories(dir_);
    write_mask_pgm(oracle::rect_mask(40, 32, 6, 8, 26, 14), p("rect_0_1.pgm"));
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string p(const std::string& name) const { return (dir_ / name).string(); }

  fs::path dir_;
};

int count_lines(const std::string& s) { return static_cast<int>(std::count(s.begin(), s.end(), '\n')); }

}  // namespace

TEST_F(CliTest, FitWritesDiskSet) {
  const CliRun r = run({"fit", "--in", p("rect_0_1.pgm"), "--n", "16", "--m", "16", "--loss", "dice", "--out",
                     p("disks.json"), "--iters", "30", "--restarts", "1"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out.rfind("# fit ", 0), 0u);
  EXPECT_NE(r.out.find("alpha=0.5"), std::string::npos);
  const DiskSet d = diskset_from_json(read_file(p("disks.json")));
  EXPECT_EQ(d.n_disks(), 16u);
  EXPECT_EQ(d.n_radii(), 16u);
}

TEST_F(CliTest, FitIsByteIdenticalAcrossRunsAndThreads) {
  std::vector<std::string> base = {"fit", "--in", p("rect_0_1.pgm"), "--n", "6", "--m", "3", "--iters", "40",
                                   "--mask-out", "", "--trace-out", "", "--out", ""};
  std::vector<std::string> outputs;
  for (const char* threads : {"1", "4", "1"}) {
    auto args = base;
    const std::string tag = std::to_string(outputs.size());
    args[10] = p("mask" + tag + ".pgm");
    args[12] = p("trace" + tag + ".csv");
    args[14] = p("disks" + tag + ".json");
    args.push_back("--threads");
    args.push_back(threads);
    ASSERT_EQ(run(args).code, 0);
    outputs.push_back(read_file(args[10]) + read_file(args[12]) + read_file(args[14]));
  }
  EXPECT_EQ(outputs[0], outputs[1]);
  EXPECT_EQ(outputs[0], outputs[2]);
}

TEST_F(CliTest, FitOnEmptyMaskIsDomainError) {
  write_mask_pgm(BinaryMask(8, 8), p("empty_0_0.pgm"));
  const CliRun r = run({"fit", "--in", p("empty_0_0.pgm"), "--out", p("d.json")});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("EmptyMask"), std::string::npos);
  EXPECT_EQ(count_lines(r.err), 1);
  EXPECT_FALSE(fs::exists(p("d.json")));
}

TEST_F(CliTest, UsageErrors) {
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"frobnicate"}).code, 2);
  EXPECT_EQ(run({"fit", "--in", p("rect_0_1.pgm"), "--out", p("d.json"), "--bogus"}).code, 2);
  EXPECT_EQ(run({"fit", "--in", p("rect_0_1.pgm")}).code, 2);
  const CliRun bad_m = run({"fit", "--in", p("rect_0_1.pgm"), "--out", p("d.json"), "--n", "2", "--m", "3"});
  EXPECT_EQ(bad_m.code, 2);
  EXPECT_NE(bad_m.err.find("M ≤ N"), std::string::npos);
  EXPECT_EQ(count_lines(bad_m.err), 1);
}

TEST_F(CliTest, CorruptInputIsDomainError) {
  write_file_atomic(p("bad_0_0.pgm"), "P2\n1 1\n255\n0\n");
  const CliRun r = run({"fit", "--in", p("bad_0_0.pgm"), "--out", p("d.json")});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("UnsupportedVariant"), std::string::npos);
}

TEST_F(CliTest, HelpListsFlagsWithDefaults) {
  const CliRun r = run({"fit", "--help"});
  EXPECT_EQ(r.code, 0);
  for (const char* flag : {"--in", "--out", "--n", "--m", "--assoc", "--loss", "--eps", "--alpha", "--iters",
                           "--step", "--seed", "--restarts", "--threads"}) {
    EXPECT_NE(r.out.find(flag), std::string::npos) << flag;
  }
  FitConfig defaults;
  EXPECT_NE(r.out.find("[" + std::to_string(defaults.max_iters) + "]"), std::string::npos);
  EXPECT_NE(r.out.find("[0.5]"), std::string::npos);
  EXPECT_NE(r.out.find("[0.05]"), std::string::npos);
  EXPECT_NE(r.out.find("[" + std::to_string(defaults.restarts) + "]"), std::string::npos);
  for (const char* sub : {"render", "simplify", "eval", "ablate", "grad-check", "gen-suite"}) {
    EXPECT_EQ(run({sub, "--help"}).code, 0) << sub;
  }
  EXPECT_NE(run({"simplify", "--help"}).out.find("[0.01]"), std::string::npos);
}

TEST_F(CliTest, RenderAndSimplify) {
  write_file_atomic(p("d.json"), R"({"n":2,"m":1,"assoc":[1,1],"centers":[[14,16],[26,16]],"sigmas":[5]})");
  CliRun r = run({"render", "--disks", p("d.json"), "--width", "40", "--height", "32", "--out", p("field.pgm"),
               "--mask-out", p("mask_0_0.pgm"), "--overlay", p("ov.ppm")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(read_gray_pgm(p("field.pgm")).width, 40);
  EXPECT_FALSE(read_mask_pgm(p("mask_0_0.pgm")).empty_foreground());
  EXPECT_EQ(read_file(p("ov.ppm")).rfind("P6\n40 32\n255\n", 0), 0u);

  r = run({"simplify", "--in", p("mask_0_0.pgm"), "--out", p("simple.pgm"), "--contours-out", p("c.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(read_mask_pgm(p("simple.pgm")).width(), 40);
  EXPECT_NE(read_file(p("c.json")).find("\"points\""), std::string::npos);
}

TEST_F(CliTest, EvalWritesReport) {
  fs::create_directories(p("gt"));
  fs::create_directories(p("pred"));
  write_mask_pgm(oracle::rect_mask(10, 10, 1, 1, 4, 4), p("gt/a_0_1.pgm"));
  write_mask_pgm(oracle::rect_mask(10, 10, 1, 1, 4, 4), p("pred/a_0_1.pgm"));
  write_mask_pgm(oracle::rect_mask(10, 10, 5, 5, 3, 3), p("gt/a_1_2.pgm"));
  const CliRun r = run({"eval", "--gt", p("gt"), "--pred", p("pred"), "--out", p("ap.csv"), "--json", p("ap.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(read_file(p("ap.csv")),
            "category,AP,AP50,TP,FP,FN\n1,100.0000,100.0000,1,0,0\n2,0.0000,0.0000,0,0,1\nmean,50.0000,50.0000,,,\n");
  EXPECT_NE(read_file(p("ap.json")).find("\"mean_AP\""), std::string::npos);
}

TEST_F(CliTest, AblateDefaultGridHasSixRows) {
  const CliRun r = run({"ablate", "--corpus", dir_.string(), "--iters", "3", "--restarts", "1", "--out", p("ab.csv")});
  ASSERT_EQ(r.code, 0) << r.err;
  const std::string csv = read_file(p("ab.csv"));
  EXPECT_EQ(count_lines(csv), 7);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "n_disks,n_radii,loss,mean_iou,mean_dice,mean_time,fitted,failed,note");
  EXPECT_EQ(count_lines(read_file(p("ab.tsv"))), 7);
}

TEST_F(CliTest, AblateRadiusGridHasFourRows) {
  const CliRun r = run({"ablate", "--corpus", dir_.string(), "--n-list", "16", "--m-list", "1,2,4,16", "--iters", "3",
                     "--restarts", "1", "--out", p("ab.csv")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(count_lines(read_file(p("ab.csv"))), 5);
}

TEST_F(CliTest, AblateIsThreadIndependent) {
  write_mask_pgm(oracle::disk_mask(40, 32, 20, 16, 9), p("disk_0_0.pgm"));
  std::vector<std::string> csvs;
  for (const char* threads : {"1", "3", "8"}) {
    const std::string out = p(std::string("ab") + threads + ".csv");
    ASSERT_EQ(run({"ablate", "--corpus", dir_.string(), "--n-list", "2,4", "--iters", "20", "--restarts", "2",
                   "--threads", threads, "--out", out})
                  .code,
              0);
    csvs.push_back(read_file(out));
  }
  EXPECT_EQ(csvs[0], csvs[1]);
  EXPECT_EQ(csvs[0], csvs[2]);
}

TEST_F(CliTest, AblateEmptyCorpusIsUsageError) {
  fs::create_directories(p("nothing"));
  const CliRun r = run({"ablate", "--corpus", p("nothing")});
  EXPECT_EQ(r.code, 2);
  EXPECT_EQ(count_lines(r.err), 1);
}

TEST_F(CliTest, GradCheckExitCodes) {
  EXPECT_EQ(run({"grad-check", "--seed", "7", "--trials", "8", "--max-size", "32"}).code, 0);
  EXPECT_EQ(run({"grad-check", "--trials", "8", "--max-size", "32", "--tol", "1e-300"}).code, 1);
}

TEST_F(CliTest, GenSuiteWritesCorpus) {
  const CliRun r = run({"gen-suite", "--seed", "2", "--out", p("suite")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto entries = list_corpus(p("suite"));
  ASSERT_EQ(entries.size(), 24u);
  EXPECT_EQ(entries.front().file.filename(), "suite00_0_0.pgm");
  EXPECT_EQ(read_mask_pgm(entries[0].file).width(), 128);
}
