#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "phasekd/io.hpp"

namespace fs = std::filesystem;

namespace {

const std::string kCli = PHASEKD_CLI_PATH;

struct TempDir {
  fs::path path;
  TempDir() {
    static int counter = 0;
    path = fs::temp_directory_path() / ("phasekd_cli_test_" + std::to_string(::getpid()) + "_" +
                                        std::to_string(counter++));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

int run(const std::string& args) {
  const std::string cmd = kCli + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

std::string run_capture(const std::string& args, int* exit_code = nullptr) {
  TempDir scratch;
  const std::string out_path = scratch.file("stdout.txt");
  const std::string cmd = kCli + " " + args + " > " + out_path + " 2>&1";
  const int status = std::system(cmd.c_str());
  if (exit_code) *exit_code = WEXITSTATUS(status);
  std::ifstream is(out_path);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

std::string file_bytes(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

// Small, fast configuration shared by the CLI tests.
void write_tiny_config(const std::string& path) {
  std::ofstream os(path);
  os << "[data]\n"
        "seed = 3\n"
        "n_videos = 6\n"
        "n_phases = 3\n"
        "raw_dim = 8\n"
        "min_length = 18\n"
        "max_length = 40\n"
        "duration_mu = 8,10,9\n"
        "skip_prob = 0\n"
        "noise_sigma = 0.6\n"
        "confusable_pairs = none\n"
        "n_train = 4\n"
        "[encoder]\n"
        "epochs = 1\n"
        "batch_size = 16\n"
        "hidden_dim = 12\n"
        "feature_dim = 10\n"
        "proj_dim = 6\n"
        "[decoder]\n"
        "epochs = 2\n"
        "gru_hidden = 8\n"
        "tcn_stages = 2\n"
        "tcn_blocks = 2\n"
        "tcn_channels = 6\n";
}

}  // namespace

TEST_CASE("config --dump-defaults prints every section") {
  int code = -1;
  const std::string text = run_capture("config --dump-defaults", &code);
  CHECK(code == 0);
  CHECK(text.find("[data]") != std::string::npos);
  CHECK(text.find("[encoder]") != std::string::npos);
  CHECK(text.find("[decoder]") != std::string::npos);
  CHECK(text.find("[experiment]") != std::string::npos);
  CHECK(text.find("[paths]") != std::string::npos);
  CHECK(text.find("ema_tau0 = 0.9995") != std::string::npos);
  CHECK(text.find("lambda = 0.3") != std::string::npos);
  CHECK(text.find("tmse_tau = 8") != std::string::npos);
}

TEST_CASE("gen-data writes a deterministic dataset and reports a summary") {
  TempDir dir;
  write_tiny_config(dir.file("run.ini"));

  int code = -1;
  const std::string out = run_capture("gen-data --config " + dir.file("run.ini") + " --out " +
                                          dir.file("a.pkdv"),
                                      &code);
  CHECK(code == 0);
  CHECK(out.find("6 videos") != std::string::npos);
  CHECK(out.find("phase histogram") != std::string::npos);

  CHECK(run("gen-data --config " + dir.file("run.ini") + " --out " + dir.file("b.pkdv")) == 0);
  CHECK(file_bytes(dir.file("a.pkdv")) == file_bytes(dir.file("b.pkdv")));

  auto videos = phasekd::load_dataset_file(dir.file("a.pkdv"));
  CHECK(videos.size() == 6);
}

TEST_CASE("invalid config key exits with code 2 and names the key") {
  TempDir dir;
  {
    std::ofstream os(dir.file("bad.ini"));
    os << "[data]\nbanana = 1\n";
  }
  int code = -1;
  const std::string text = run_capture("gen-data --config " + dir.file("bad.ini"), &code);
  CHECK(code == 2);
  CHECK(text.find("data.banana") != std::string::npos);
}

TEST_CASE("full CLI pipeline: train-encoder, train-decoder, evaluate") {
  TempDir dir;
  write_tiny_config(dir.file("run.ini"));
  const std::string cfg = " --config " + dir.file("run.ini");
  REQUIRE(run("gen-data" + cfg + " --out " + dir.file("d.pkdv")) == 0);

  int code = -1;
  const std::string enc_out = run_capture(
      "train-encoder" + cfg + " --data " + dir.file("d.pkdv") + " --out-model " +
          dir.file("enc.pkdw") + " --features-out " + dir.file("feats") + " --log " +
          dir.file("enc.log"),
      &code);
  REQUIRE(code == 0);
  CHECK(enc_out.find("encoder parameters:") != std::string::npos);
  CHECK(fs::exists(dir.file("feats.train.pkdf")));
  CHECK(fs::exists(dir.file("feats.test.pkdf")));

  // The log carries the decay schedule from its very first step.
  const std::string enc_log = file_bytes(dir.file("enc.log"));
  CHECK(enc_log.find("tau=0.9995") != std::string::npos);

  // Rerunning with the same seed reproduces the weights bit for bit.
  REQUIRE(run("train-encoder" + cfg + " --data " + dir.file("d.pkdv") + " --out-model " +
              dir.file("enc2.pkdw") + " --features-out " + dir.file("feats2") + " --log " +
              dir.file("enc2.log")) == 0);
  CHECK(file_bytes(dir.file("enc.pkdw")) == file_bytes(dir.file("enc2.pkdw")));
  CHECK(file_bytes(dir.file("feats.train.pkdf")) == file_bytes(dir.file("feats2.train.pkdf")));

  code = -1;
  const std::string dec_out = run_capture(
      "train-decoder" + cfg + " --features " + dir.file("feats") + " --data " + dir.file("d.pkdv") +
          " --decoder gru --out-model " + dir.file("dec.pkdw") + " --report " +
          dir.file("report.txt") + " --log " + dir.file("dec.log"),
      &code);
  REQUIRE(code == 0);
  CHECK(dec_out.find("decoder parameters:") != std::string::npos);
  const std::string report = file_bytes(dir.file("report.txt"));
  CHECK(report.find("accuracy") != std::string::npos);
  CHECK(report.find("precision") != std::string::npos);
  CHECK(report.find("recall") != std::string::npos);
  CHECK(report.find("f1") != std::string::npos);
  CHECK(report.find("jaccard") != std::string::npos);
  CHECK(report.find("pred_segments") != std::string::npos);

  // --lambda 0 runs the no-smoothing baseline.
  CHECK(run("train-decoder" + cfg + " --features " + dir.file("feats") + " --data " +
            dir.file("d.pkdv") + " --decoder gru --lambda 0 --out-model " + dir.file("dec0.pkdw") +
            " --report " + dir.file("report0.txt") + " --log " + dir.file("dec0.log")) == 0);
}

TEST_CASE("evaluate scores a prediction file against itself as all 100.00") {
  TempDir dir;
  {
    phasekd::PredictionFile preds;
    preds.video_ids = {0, 1};
    preds.labels = {{0, 0, 1, 1, 2}, {2, 2, 0}};
    phasekd::save_predictions_file(dir.file("pred.txt"), preds);
  }
  int code = -1;
  const std::string text = run_capture(
      "evaluate --pred " + dir.file("pred.txt") + " --gt " + dir.file("pred.txt") + " --report " +
          dir.file("eval.txt"),
      &code);
  CHECK(code == 0);
  CHECK(text.find("accuracy 100.00") != std::string::npos);
  CHECK(text.find("jaccard 100.00") != std::string::npos);
}

TEST_CASE("missing input files exit with code 1") {
  CHECK(run("train-encoder --data /nonexistent/nope.pkdv") == 1);
  CHECK(run("evaluate --pred /nonexistent/a.txt --gt /nonexistent/b.txt") == 1);
}

TEST_CASE("unknown flags exit with code 2") {
  CHECK(run("gen-data --frobnicate") == 2);
  CHECK(run("no-such-subcommand") == 2);
}
