#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <string>

namespace {

namespace fs = std::filesystem;

std::string binary() {
  const char* bin = std::getenv("PACE_BIN");
  REQUIRE(bin != nullptr);
  return bin;
}

int run_command(const std::string& args) {
  const std::string cmd = binary() + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  REQUIRE(status != -1);
  return WEXITSTATUS(status);
}

std::string slurp(const fs::path& file) {
  std::ifstream in(file);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("dataset generation is byte-identical for equal seeds") {
  const fs::path dir = fresh_dir("pace_cli_dataset");
  const fs::path a = dir / "a.json";
  const fs::path b = dir / "b.json";
  CHECK(run_command("dataset generate --seed 0 --shapes 6 --out " + a.string()) == 0);
  CHECK(run_command("dataset generate --seed 0 --shapes 6 --out " + b.string()) == 0);
  CHECK(slurp(a) == slurp(b));
  CHECK(run_command("dataset generate --seed 1 --shapes 6 --out " + b.string()) == 0);
  CHECK(slurp(a) != slurp(b));
  fs::remove_all(dir);
}

TEST_CASE("smoke run writes metrics with one row per epoch") {
  const fs::path dir = fresh_dir("pace_cli_run");
  const int code = run_command(
      "run --variant pace --seed 0 --steps 2 --epochs 2 --shapes 5 --hidden 24 --vocab 12 "
      "--n-cap 24 --no-checkpoints --out " +
      dir.string());
  CHECK(code == 0);
  REQUIRE(fs::exists(dir / "metrics.csv"));
  std::ifstream in(dir / "metrics.csv");
  std::string line;
  int rows = -1;  // discount the header
  while (std::getline(in, line)) {
    if (!line.empty()) ++rows;
  }
  CHECK(rows == 4);
  CHECK(fs::exists(dir / "manifest.json"));

  // The report renders from the metrics files alone.
  CHECK(run_command("report " + dir.string()) == 0);
  CHECK(fs::exists(dir / "report" / "complexity.svg"));
  fs::remove_all(dir);
}

TEST_CASE("usage errors exit with code 1, runtime errors with code 2") {
  CHECK(run_command("run --definitely-not-a-flag") == 1);
  CHECK(run_command("bogus-subcommand") == 1);
  CHECK(run_command("") == 1);

  const fs::path dir = fresh_dir("pace_cli_empty");
  CHECK(run_command("report " + dir.string()) == 2);
  CHECK(run_command("run --variant pace --dataset /nonexistent.json --out " +
                    (dir / "r").string()) == 2);
  fs::remove_all(dir);
}

TEST_CASE("config file values apply under command-line overrides") {
  const fs::path dir = fresh_dir("pace_cli_config");
  const fs::path config = dir / "config.ini";
  {
    std::ofstream out(config);
    out << "epochs=3\n";
    out << "seed=5\n";
  }
  const std::string common = " --shapes 5 --hidden 24 --vocab 12 --n-cap 24 --steps 1 "
                             "--no-checkpoints ";

  const fs::path from_file = dir / "from_file";
  CHECK(run_command("run --variant pace --config " + config.string() + common + "--out " +
                    from_file.string()) == 0);
  nlohmann::json manifest_file = nlohmann::json::parse(slurp(from_file / "manifest.json"));
  CHECK(manifest_file["config"]["epochs"] == 3);
  CHECK(manifest_file["config"]["seed"] == 5);

  const fs::path overridden = dir / "overridden";
  CHECK(run_command("run --variant pace --config " + config.string() + common +
                    "--epochs 2 --out " + overridden.string()) == 0);
  nlohmann::json manifest_cli = nlohmann::json::parse(slurp(overridden / "manifest.json"));
  CHECK(manifest_cli["config"]["epochs"] == 2);
  CHECK(manifest_cli["config"]["seed"] == 5);
  fs::remove_all(dir);
}
