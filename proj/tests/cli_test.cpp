// Command-line front end, driven as a subprocess.

#include "mscm/batch.hpp"
#include "mscm/eval.hpp"
#include "mscm/image.hpp"
#include "test_support.hpp"

#include <json.hpp>

#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

namespace mscm {
namespace {

struct CliRun {
  int code;
  std::string out;
};

CliRun run_cli(const std::string& args, const std::filesystem::path& scratch) {
  const auto out_path = scratch / "stdout.txt";
  const std::string cmd = std::string("'") + MSCM_CLI_PATH + "' " + args + " > '" + out_path.string() + "' 2> '" +
                          (scratch / "stderr.txt").string() + "'";
  const int status = std::system(cmd.c_str());
  std::ifstream in(out_path, std::ios::binary);
  std::string out{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::string q(const std::filesystem::path& p) { return "'" + p.string() + "'"; }

TEST(Cli, SynthWritesCorpusReproducibly) {
  testing::ScratchDir dir;
  // The directory name is the video id, so both runs use the same leaf name.
  const auto a = dir / "a" / "clip", b = dir / "b" / "clip";
  ASSERT_EQ(run_cli("synth --n 3 --seed 1 --out " + q(a), dir.path()).code, 0);
  ASSERT_EQ(run_cli("synth --n 3 --seed 1 --out " + q(b), dir.path()).code, 0);
  for (const char* name : {"00000.pgm", "00001.pgm", "00002.pgm", "ground_truth.csv"}) {
    ASSERT_TRUE(std::filesystem::exists(a / name)) << name;
    EXPECT_EQ(slurp(a / name), slurp(b / name)) << name;
  }
  EXPECT_FALSE(std::filesystem::exists(a / "00003.pgm"));
  const auto gt = load_ground_truth(a / "ground_truth.csv");
  ASSERT_EQ(gt.size(), 3u);
  EXPECT_EQ(gt[0].video_id, "clip");
}

TEST(Cli, SynthRejectsBadRangeBeforeWriting) {
  testing::ScratchDir dir;
  EXPECT_EQ(run_cli("synth --n 2 --y-max 400 --out " + q(dir / "c"), dir.path()).code, 2);
  EXPECT_FALSE(std::filesystem::exists(dir / "c"));
  EXPECT_EQ(run_cli("synth --n 2 --preset stormy --out " + q(dir / "c"), dir.path()).code, 2);
}

TEST(Cli, DetectPartialFailure) {
  testing::ScratchDir dir;
  ASSERT_EQ(run_cli("synth --n 4 --seed 2 --out " + q(dir / "v"), dir.path()).code, 0);
  {
    std::ofstream bad(dir / "v" / "00004.pgm", std::ios::binary);
    bad << "garbage";
  }
  const CliRun r = run_cli("detect " + q(dir / "v") + " --jobs 2 --out " + q(dir / "det.jsonl"), dir.path());
  EXPECT_EQ(r.code, 1);
  const auto reports = load_detections(dir / "det.jsonl");
  ASSERT_EQ(reports.size(), 5u);
  for (int i = 0; i < 4; ++i) EXPECT_EQ(reports[i].status, FrameStatus::ok);
  EXPECT_EQ(reports[4].status, FrameStatus::decode_error);
}

TEST(Cli, DetectSingleFrameAndOverlay) {
  testing::ScratchDir dir;
  ASSERT_EQ(run_cli("synth --n 1 --seed 3 --out " + q(dir / "v"), dir.path()).code, 0);
  const CliRun r = run_cli("detect " + q(dir / "v" / "00000.pgm") + " --overlay " + q(dir / "ov"), dir.path());
  EXPECT_EQ(r.code, 0);
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["status"], "ok");
  EXPECT_EQ(j["frame_idx"], 0);
  EXPECT_TRUE(j["Y"].is_number());
  EXPECT_TRUE(std::filesystem::exists(dir / "ov" / "00000.pgm"));
}

TEST(Cli, DetectConstantFrame) {
  testing::ScratchDir dir;
  save_pgm(GrayImage::Constant(32, 32, 60), dir / "flat.pgm");
  const CliRun r = run_cli("detect " + q(dir / "flat.pgm"), dir.path());
  EXPECT_EQ(r.code, 1);
  EXPECT_EQ(nlohmann::json::parse(r.out)["status"], "no_detection");
}

TEST(Cli, DetectArgumentErrors) {
  testing::ScratchDir dir;
  EXPECT_EQ(run_cli("detect " + q(dir / "nothing.pgm"), dir.path()).code, 2);
  {
    std::ofstream cfg(dir / "bad.cfg");
    cfg << "hough.top_k = -1\n";
  }
  save_pgm(GrayImage::Constant(32, 32, 60), dir / "flat.pgm");
  EXPECT_EQ(run_cli("detect " + q(dir / "flat.pgm") + " --config " + q(dir / "bad.cfg"), dir.path()).code, 2);
  EXPECT_EQ(run_cli("frobnicate", dir.path()).code, 2);
  EXPECT_EQ(run_cli("", dir.path()).code, 2);
}

TEST(Cli, DetectJobsDoNotChangeOutput) {
  testing::ScratchDir dir;
  ASSERT_EQ(run_cli("synth --n 6 --seed 4 --preset robust --out " + q(dir / "v"), dir.path()).code, 0);
  run_cli("detect " + q(dir / "v") + " --jobs 1 --out " + q(dir / "j1.jsonl"), dir.path());
  run_cli("detect " + q(dir / "v") + " --jobs 8 --out " + q(dir / "j8.jsonl"), dir.path());
  EXPECT_EQ(slurp(dir / "j1.jsonl"), slurp(dir / "j8.jsonl"));
  EXPECT_FALSE(slurp(dir / "j1.jsonl").empty());
}

TEST(Cli, EvalPerfectDetections) {
  testing::ScratchDir dir;
  const std::vector<GroundTruthEntry> gt = {{"v", 0, 100.0, 1.0}, {"v", 1, 120.0, -2.0}, {"v", 2, 80.0, 0.0}};
  write_ground_truth(gt, dir / "gt.csv");
  {
    std::ofstream out(dir / "det.jsonl");
    for (const auto& e : gt) {
      FrameReport r;
      r.frame = "v/" + std::to_string(e.frame_idx) + ".pgm";
      r.video_id = "v";
      r.frame_idx = e.frame_idx;
      r.status = FrameStatus::ok;
      r.y = e.y;
      r.alpha_deg = e.alpha_deg;
      out << to_json_line(r) << "\n";
    }
  }
  const CliRun r = run_cli("eval " + q(dir / "det.jsonl") + " --gt " + q(dir / "gt.csv") + " --out " + q(dir / "rep"),
                        dir.path());
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(slurp(dir / "rep.csv"),
            "video_id,frames,failures,median_err_Y_px,median_err_alpha_deg\n"
            "v,3,0,0.0000,0.0000\n"
            "Total,3,0,0.0000,0.0000\n");
  const auto j = nlohmann::json::parse(slurp(dir / "rep.json"));
  EXPECT_EQ(j["total"]["median_err_Y_px"], 0.0);
  EXPECT_EQ(j["warnings"], 0);
}

TEST(Cli, EvalDisjointKeysWarn) {
  testing::ScratchDir dir;
  write_ground_truth(std::vector<GroundTruthEntry>{{"v", 0, 100.0, 1.0}}, dir / "gt.csv");
  {
    std::ofstream out(dir / "det.jsonl");
    FrameReport r;
    r.frame = "w/0.pgm";
    r.video_id = "w";
    r.frame_idx = 0;
    r.status = FrameStatus::ok;
    r.y = 1.0;
    r.alpha_deg = 0.0;
    out << to_json_line(r) << "\n";
  }
  const CliRun r = run_cli("eval " + q(dir / "det.jsonl") + " --gt " + q(dir / "gt.csv") + " --out " + q(dir / "rep"),
                        dir.path());
  EXPECT_EQ(r.code, 1);
  const auto j = nlohmann::json::parse(slurp(dir / "rep.json"));
  EXPECT_EQ(j["warnings"], 2);
  EXPECT_EQ(j["total"]["frames"], 0);
  EXPECT_TRUE(j["videos"].empty());
}

TEST(Cli, EvalInputErrors) {
  testing::ScratchDir dir;
  EXPECT_EQ(run_cli("eval " + q(dir / "none.jsonl") + " --gt " + q(dir / "gt.csv") + " --out " + q(dir / "rep"),
                    dir.path())
                .code,
            3);
  {
    std::ofstream gt(dir / "gt.csv");
    gt << "video_id,frame_idx,Y_px,alpha_deg\nv,0,10,95\n";
    std::ofstream det(dir / "det.jsonl");
  }
  EXPECT_EQ(run_cli("eval " + q(dir / "det.jsonl") + " --gt " + q(dir / "gt.csv") + " --out " + q(dir / "rep"),
                    dir.path())
                .code,
            2);
}

TEST(Cli, BenchReportsStages) {
  testing::ScratchDir dir;
  save_pgm(GrayImage::Constant(48, 64, 10), dir / "flat.pgm");
  const CliRun r = run_cli("bench " + q(dir / "flat.pgm") + " --repetitions 3", dir.path());
  ASSERT_EQ(r.code, 0);
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["repetitions"], 3);
  for (const char* stage : {"multiscale", "canny_hough", "iva", "fusion", "total"}) {
    EXPECT_EQ(j["stages"][stage]["samples_ms"].size(), 3u) << stage;
    EXPECT_GE(j["stages"][stage]["median_ms"].get<double>(), 0.0) << stage;
  }
  EXPECT_EQ(j["status"], "no_detection");
}

TEST(Cli, ConfigPrintsParseableDefaults) {
  testing::ScratchDir dir;
  const CliRun r = run_cli("config", dir.path());
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(to_config_text(parse_config(r.out)), r.out);
}

}  // namespace
}  // namespace mscm
