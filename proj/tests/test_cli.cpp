// End-to-end checks of the flowmap binary: exit codes, artifact layout,
// fail-closed config parsing, and determinism of a small pipeline.
#define DOCTEST_CONFIG_IMPLEMENT
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

static std::string g_binary;

namespace {

int run(const std::string& args) {
  const std::string cmd = g_binary + " " + args + " >/dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  return WEXITSTATUS(rc);
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream out(p);
  out << text;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

int count_rows(const fs::path& csv) {
  std::ifstream in(csv);
  std::string line;
  int rows = -1;  // skip header
  while (std::getline(in, line))
    if (!line.empty()) ++rows;
  return rows;
}

const char* kScenario = R"({
  "preset": "linear_scalar",
  "prediction": {
    "x0": [2.0],
    "T": 1.0,
    "delta": 0.1,
    "signal": [
      [{"type": "sin", "amp": 1.0, "freq": 4.0, "offset": 1.0}],
      [{"type": "chirp_cos", "scale": 1000.0}]
    ]
  }
})";

}  // namespace

TEST_CASE("simulate writes the expected row count") {
  fs::path dir = fs::temp_directory_path() / "flowmap_cli_sim";
  fs::remove_all(dir);
  fs::create_directories(dir);
  write_file(dir / "cfg.json", kScenario);
  CHECK(run("simulate --config " + (dir / "cfg.json").string() + " --out " +
            dir.string()) == 0);
  CHECK(count_rows(dir / "reference.csv") == 11);

  // identical config twice -> identical files
  const std::string first = slurp(dir / "reference.csv");
  CHECK(run("simulate --config " + (dir / "cfg.json").string() + " --out " +
            dir.string()) == 0);
  CHECK(slurp(dir / "reference.csv") == first);
  fs::remove_all(dir);
}

TEST_CASE("config errors exit with status 2") {
  fs::path dir = fs::temp_directory_path() / "flowmap_cli_err";
  fs::remove_all(dir);
  fs::create_directories(dir);

  SUBCASE("unknown preset") {
    write_file(dir / "cfg.json",
               R"({"preset": "nope", "prediction": {"x0": [1.0], "T": 1.0,
                   "signal": [[{"type": "constant", "value": 1.0}]]}})");
    CHECK(run("simulate --config " + (dir / "cfg.json").string() + " --out " +
              dir.string()) == 2);
  }
  SUBCASE("unknown top-level key is fail-closed") {
    write_file(dir / "cfg.json",
               R"({"preset": "linear_scalar", "typo_key": 1, "prediction":
                   {"x0": [1.0], "T": 1.0,
                    "signal": [[{"type": "constant", "value": 1.0}]]}})");
    CHECK(run("simulate --config " + (dir / "cfg.json").string() + " --out " +
              dir.string()) == 2);
  }
  SUBCASE("malformed JSON") {
    write_file(dir / "cfg.json", "{not json");
    CHECK(run("simulate --config " + (dir / "cfg.json").string() + " --out " +
              dir.string()) == 2);
  }
  SUBCASE("missing config file") {
    CHECK(run("simulate --config " + (dir / "absent.json").string() +
              " --out " + dir.string()) == 2);
  }
  fs::remove_all(dir);
}

TEST_CASE("gen-data, train, predict, bounds pipeline") {
  fs::path dir = fs::temp_directory_path() / "flowmap_cli_pipe";
  fs::remove_all(dir);
  fs::create_directories(dir);
  std::string cfg = R"({
    "preset": "linear_scalar",
    "seed": 11,
    "dataset": {"J": 400, "micro_steps": 5},
    "model": {"kind": "network", "hidden": [20, 20]},
    "train": {"epochs": 20, "batch_size": 64},
    "prediction": {
      "x0": [2.0],
      "T": 2.0,
      "delta": 0.1,
      "signal": [
        [{"type": "sin", "amp": 1.0, "freq": 4.0, "offset": 1.0}],
        [{"type": "cos", "amp": 1.0, "freq": 1.0}]
      ]
    }
  })";
  write_file(dir / "cfg.json", cfg);
  const std::string base =
      " --config " + (dir / "cfg.json").string() + " --out " + dir.string();

  CHECK(run("gen-data" + base) == 0);
  CHECK(count_rows(dir / "dataset.csv") == 400);
  CHECK(fs::exists(dir / "dataset.json"));

  CHECK(run("train" + base) == 0);
  CHECK(fs::exists(dir / "checkpoint.json"));
  CHECK(count_rows(dir / "loss.csv") == 20);

  CHECK(run("predict" + base) == 0);
  CHECK(count_rows(dir / "prediction.csv") == 21);
  CHECK(fs::exists(dir / "reference.csv"));
  CHECK(fs::exists(dir / "metrics.json"));

  // polynomial variant reuses the dataset
  write_file(dir / "poly.json", R"({
    "preset": "linear_scalar",
    "seed": 11,
    "model": {"kind": "polynomial", "degree": 2}
  })");
  CHECK(run("train --config " + (dir / "poly.json").string() + " --out " +
            dir.string()) == 0);
  CHECK(fs::exists(dir / "fit.json"));

  fs::remove_all(dir);
}

TEST_CASE("bounds command modes") {
  fs::path dir = fs::temp_directory_path() / "flowmap_cli_bounds";
  fs::remove_all(dir);
  fs::create_directories(dir);

  SUBCASE("calculator mode") {
    write_file(dir / "cfg.json", R"({"bounds": {"mode": "calculator",
      "entries": [{"L1": 1.0, "L2": 2.0, "eta": 0.05, "L_phi": 2.0,
                   "E": 1.0, "delta": 0.1, "n": 3, "t": 2.0}]}})");
    CHECK(run("bounds --config " + (dir / "cfg.json").string() + " --out " +
              dir.string()) == 0);
    const std::string out = slurp(dir / "bounds.json");
    CHECK(out.find("rollout_bound") != std::string::npos);
  }
  SUBCASE("gronwall mode passes on the linear preset") {
    write_file(dir / "cfg.json", R"({"bounds": {"mode": "gronwall",
      "preset": "linear_scalar", "L1": 1.0, "L2": 1.0,
      "basis": {"kind": "taylor", "degree": 1},
      "T": 5.0, "delta": 0.1, "x0": [2.0],
      "signal": [[{"type": "constant", "value": 1.0}],
                 [{"type": "cos", "amp": 1.0, "freq": 1.0}]]}})");
    CHECK(run("bounds --config " + (dir / "cfg.json").string() + " --out " +
              dir.string()) == 0);
    CHECK(fs::exists(dir / "bounds.json"));
  }
  SUBCASE("rollout mode passes with the closed-form L_phi") {
    write_file(dir / "cfg.json", R"({"bounds": {"mode": "rollout",
      "preset": "linear_scalar",
      "basis": {"kind": "lagrange", "degree": 2},
      "T": 10.0, "delta": 0.1, "x0": [2.0], "E": 1e-3,
      "L_phi": 0.90483741803595952,
      "signal": [[{"type": "constant", "value": 1.0}],
                 [{"type": "constant", "value": 0.0}]]}})");
    CHECK(run("bounds --config " + (dir / "cfg.json").string() + " --out " +
              dir.string()) == 0);
  }
  fs::remove_all(dir);
}

TEST_CASE("usage errors exit with status 2") {
  CHECK(run("bogus-subcommand") != 0);
  CHECK(run("simulate") != 0);  // missing --config
}

int main(int argc, char** argv) {
  doctest::Context ctx;
  // last argument is the binary path, injected by ctest
  if (argc > 1) {
    g_binary = argv[argc - 1];
    --argc;
  }
  ctx.applyCommandLine(argc, argv);
  return ctx.run();
}
