#include <fstream>
#include <iterator>
#include <sstream>

#include <gtest/gtest.h>

#include "cli.hpp"
#include "minmax_match/dataset.hpp"
#include "minmax_match/image_io.hpp"
#include "support/temp_dir.hpp"

namespace minmax_match::cli {
namespace {

namespace fs = std::filesystem;
using test::TempDir;

struct Result {
  int code = 0;
  std::string out;
  std::string err;
};

Result invoke(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

bool errors_are_prefixed(const std::string& err) {
  std::istringstream lines(err);
  for (std::string line; std::getline(lines, line);)
    if (line.rfind("error", 0) == 0 && line.rfind("error: ", 0) != 0) return false;
  return err.find("error: ") != std::string::npos;
}

// A small synthetic set written to disk: 3 classes x 2 subjects x 2 replicates.
void write_small_set(const fs::path& dir, double noise = 0.0) {
  const Result r = invoke({"synth", "--classes", "3", "--subjects", "2", "--replicates", "2", "--width", "24",
                           "--height", "24", "--noise", std::to_string(noise), "--seed", "5", "--out",
                           dir.string()});
  ASSERT_EQ(r.code, kExitOk) << r.err;
}

TEST(Cli, HelpAndUsage) {
  EXPECT_EQ(invoke({"--help"}).code, kExitOk);
  const Result none = invoke({});
  EXPECT_EQ(none.code, kExitUsage);
  EXPECT_TRUE(errors_are_prefixed(none.err));
  EXPECT_EQ(invoke({"frobnicate"}).code, kExitUsage);
}

TEST(Cli, PreprocessWritesThreeFiles) {
  TempDir dir;
  const fs::path img = dir.path() / "face.pgm";
  std::vector<double> px(20 * 16);
  for (std::size_t k = 0; k < px.size(); ++k) px[k] = static_cast<double>((k * 37) % 251);
  save_image(GrayImage(20, 16, px), img);
  const Result r = invoke({"preprocess", img.string(), "--out", (dir.path() / "o").string()});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_NE(r.out.find("features=16x20"), std::string::npos);
  EXPECT_TRUE(fs::exists(dir.path() / "o" / "face.normalized.pgm"));
  EXPECT_TRUE(fs::exists(dir.path() / "o" / "face.features.pgm"));
  const std::string csv = slurp(dir.path() / "o" / "face.features.csv");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 16);
  EXPECT_EQ(load_image(dir.path() / "o" / "face.features.pgm").width(), 20u);
}

TEST(Cli, PreprocessMissingFileWritesNothing) {
  TempDir dir;
  const Result r = invoke({"preprocess", (dir.path() / "nope.pgm").string(), "--out", (dir.path() / "o").string()});
  EXPECT_EQ(r.code, kExitUsage);
  EXPECT_TRUE(errors_are_prefixed(r.err));
  EXPECT_FALSE(fs::exists(dir.path() / "o"));
}

TEST(Cli, PreprocessEvenWindow) {
  TempDir dir;
  save_image(GrayImage(16, 16, 3.0), dir.path() / "a.pgm");
  const Result r = invoke({"preprocess", (dir.path() / "a.pgm").string(), "-N", "4", "--out", dir.path().string()});
  EXPECT_EQ(r.code, kExitUsage);
  EXPECT_NE(r.err.find("error: window size must be odd"), std::string::npos);
  EXPECT_FALSE(fs::exists(dir.path() / "a.features.csv"));
}

TEST(Cli, SynthWritesDatasetReproducibly) {
  TempDir a, b;
  for (const TempDir* d : {&a, &b}) {
    const Result r = invoke({"synth", "--subjects", "3", "--width", "32", "--height", "32", "--noise", "3",
                             "--seed", "11", "--out", d->path().string()});
    ASSERT_EQ(r.code, kExitOk) << r.err;
  }
  std::size_t pgms = 0;
  for (const auto& e : fs::directory_iterator(a.path())) {
    if (e.path().extension() != ".pgm") continue;
    ++pgms;
    EXPECT_EQ(slurp(e.path()), slurp(b.path() / e.path().filename())) << e.path();
  }
  EXPECT_EQ(pgms, 63u);
  EXPECT_EQ(slurp(a.path() / "manifest.json"), slurp(b.path() / "manifest.json"));
  EXPECT_EQ(load_dataset(a.path()).size(), 63u);
}

TEST(Cli, SynthRejectsBadParams) {
  TempDir dir;
  EXPECT_EQ(invoke({"synth", "--replicates", "1", "--out", dir.path().string()}).code, kExitUsage);
  EXPECT_EQ(invoke({"synth", "--classes", "8", "--out", dir.path().string()}).code, kExitUsage);
  EXPECT_EQ(invoke({"synth"}).code, kExitUsage);
}

TEST(Cli, EvaluateSynthetic) {
  TempDir dir;
  write_small_set(dir.path() / "data");
  const Result r = invoke({"evaluate", "--dataset", (dir.path() / "data").string(), "--trials", "3", "--out",
                           (dir.path() / "out").string()});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_NE(r.out.find("mean_accuracy=1.000000"), std::string::npos);
  EXPECT_NE(r.out.find("tested_samples="), std::string::npos);
  for (const char* name : {"report.csv", "confusion.csv", "coverage.csv"})
    EXPECT_TRUE(fs::exists(dir.path() / "out" / name)) << name;
  const std::string report = slurp(dir.path() / "out" / "report.csv");
  EXPECT_EQ(std::count(report.begin(), report.end(), '\n'), 4);
}

TEST(Cli, EvaluateIsReproducible) {
  TempDir dir;
  write_small_set(dir.path() / "data", 30.0);
  for (const char* out : {"o1", "o2"}) {
    const Result r = invoke({"evaluate", "--dataset", (dir.path() / "data").string(), "--trials", "4", "--seed",
                             "3", "--out", (dir.path() / out).string()});
    ASSERT_EQ(r.code, kExitOk) << r.err;
  }
  for (const char* name : {"report.csv", "confusion.csv", "coverage.csv"})
    EXPECT_EQ(slurp(dir.path() / "o1" / name), slurp(dir.path() / "o2" / name)) << name;
}

TEST(Cli, EvaluateInputErrors) {
  TempDir dir;
  const Result missing = invoke({"evaluate", "--dataset", (dir.path() / "none").string()});
  EXPECT_EQ(missing.code, kExitUsage);
  EXPECT_TRUE(errors_are_prefixed(missing.err));
  write_small_set(dir.path() / "data");
  EXPECT_EQ(invoke({"evaluate", "--dataset", (dir.path() / "data").string(), "--classifier", "svm"}).code,
            kExitUsage);
  EXPECT_EQ(invoke({"evaluate", "--dataset", (dir.path() / "data").string(), "--trials", "0"}).code, kExitUsage);
}

TEST(Cli, EvaluateWithNothingToTest) {
  TempDir dir;
  save_image(GrayImage(16, 16, 1.0), dir.path() / "KA.AN1.1.pgm");
  save_image(GrayImage(16, 16, 2.0), dir.path() / "KA.HA1.2.pgm");
  const Result r = invoke({"evaluate", "--dataset", dir.path().string(), "--out", (dir.path() / "o").string()});
  EXPECT_EQ(r.code, kExitUsage);
  EXPECT_TRUE(errors_are_prefixed(r.err));
  EXPECT_FALSE(fs::exists(dir.path() / "o" / "report.csv"));
}

TEST(Cli, EvaluateAbortsOnBadCrop) {
  TempDir dir;
  write_small_set(dir.path() / "data");
  const Result r = invoke({"evaluate", "--dataset", (dir.path() / "data").string(), "--crop", "0,0,100,100",
                           "--trials", "1", "--out", (dir.path() / "o").string()});
  EXPECT_EQ(r.code, kExitAborted);
  EXPECT_NE(r.err.find("error: evaluation aborted:"), std::string::npos);
}

TEST(Cli, SweepSingleSize) {
  TempDir dir;
  write_small_set(dir.path() / "data");
  const Result r = invoke({"sweep", "--dataset", (dir.path() / "data").string(), "--sizes", "11", "--trials",
                           "2", "--out", dir.path().string()});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_NE(r.out.find("best N=11 M=11 mean_accuracy=1.000000"), std::string::npos);
  EXPECT_EQ(slurp(dir.path() / "sweep.csv"), "N,M,mean_accuracy,trials,seed\n11,11,1.000000000,2,0\n");
}

TEST(Cli, SweepRejectsBadSizes) {
  TempDir dir;
  write_small_set(dir.path() / "data");
  for (const char* sizes : {"3,4", "23", "3,x"}) {
    const Result r = invoke({"sweep", "--dataset", (dir.path() / "data").string(), "--sizes", sizes, "--out",
                             dir.path().string()});
    EXPECT_EQ(r.code, kExitUsage) << sizes;
    EXPECT_TRUE(errors_are_prefixed(r.err));
  }
  EXPECT_FALSE(fs::exists(dir.path() / "sweep.csv"));
}

TEST(Cli, ClassifySelfRetrieval) {
  TempDir dir;
  write_small_set(dir.path() / "data", 5.0);
  const Dataset ds = load_dataset(dir.path() / "data");
  const fs::path probe = dir.path() / "data" / ds.sample(4).name;
  const Result r = invoke({"classify", probe.string(), "--dataset", (dir.path() / "data").string(), "--top", "2"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_NE(r.out.find("predicted=" + ds.sample(4).expression.name), std::string::npos);
  EXPECT_NE(r.out.find("rank=1 row=4 file=" + ds.sample(4).name), std::string::npos);
  EXPECT_NE(r.out.find("weight=576.000000"), std::string::npos);
  EXPECT_EQ(r.out.find("rank=3"), std::string::npos);

  const Result nn = invoke({"classify", probe.string(), "--dataset", (dir.path() / "data").string(),
                            "--classifier", "nn"});
  ASSERT_EQ(nn.code, kExitOk) << nn.err;
  EXPECT_NE(nn.out.find("distance=0.000000"), std::string::npos);
}

TEST(Cli, ClassifySizeMismatch) {
  TempDir dir;
  write_small_set(dir.path() / "data");
  save_image(GrayImage(30, 30, 9.0), dir.path() / "big.pgm");
  const Result r = invoke({"classify", (dir.path() / "big.pgm").string(), "--dataset",
                           (dir.path() / "data").string()});
  EXPECT_EQ(r.code, kExitUsage);
  EXPECT_TRUE(errors_are_prefixed(r.err));
}

}  // namespace
}  // namespace minmax_match::cli
