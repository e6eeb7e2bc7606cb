#include "commands.hpp"
#include "config.hpp"
#include "output.hpp"

#include "bhd/error.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace bhd;
using namespace bhd::cli;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("bhd_cli_test_" + name);
  fs::remove_all(p);
  return p;
}

RunConfig small(const fs::path& out) {
  RunConfig c;
  c.drive.n = 24;
  c.drive.omegas = {0.5, 7.0};
  c.grid = {5, 4};
  c.poincare.initial_conditions = 4;
  c.poincare.n_periods = 6;
  c.fotoc.t_max = 4.0;
  c.fotoc.dt = 0.5;
  c.fotoc.centres = {{"sea", 0.0, 3.14159, 0.5, {12, 24}, 0.0}};
  c.fotoc_grid.t_eval = {2.0};
  c.output_dir = out.string();
  return c;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

std::vector<std::string> data_lines(const fs::path& p) {
  std::ifstream in(p);
  std::vector<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line[0] != '#') out.push_back(line);
  }
  return out;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("config round-trips through JSON") {
  for (const auto& name : preset_names()) {
    const auto c = preset(name);
    CHECK_NOTHROW(c.validate());
    const auto j = to_json(c);
    const auto back = from_json(nlohmann::json::parse(j.dump()));
    CHECK(to_json(back) == j);
    CHECK(config_hash(back) == config_hash(c));
  }
  auto c = preset("fig2");
  c.fotoc.fit_t_lo = 4.5;
  CHECK(from_json(to_json(c)).fotoc.fit_t_lo.value() == 4.5);
  CHECK_FALSE(from_json(to_json(c)).fotoc.fit_t_hi.has_value());
}

TEST_CASE("presets carry the figure defaults") {
  const auto f1 = preset("fig1");
  CHECK(f1.drive.omegas == std::vector<double>{0.5, 3.0, 5.0, 7.0});
  CHECK(f1.drive.nu == -1.0);
  CHECK(f1.drive.mu == 1.5);
  CHECK(f1.grid.size() == 420);
  const auto f3 = preset("fig3");
  CHECK(f3.drive.n == 300);
  CHECK(f3.drive.omegas.size() == 8);
  CHECK_THROWS_AS(preset("nope"), InvalidArgument);
}

TEST_CASE("hash ignores output location and worker count") {
  auto a = preset("fig3");
  auto b = a;
  b.output_dir = "elsewhere";
  b.workers = 7;
  CHECK(config_hash(a) == config_hash(b));
  b.seed = 1;
  CHECK(config_hash(a) != config_hash(b));
}

TEST_CASE("invalid configurations are rejected") {
  CHECK_THROWS_AS(from_json(nlohmann::json::parse(R"({"drive": {"N": 3}})")), InvalidArgument);
  CHECK_THROWS_AS(from_json(nlohmann::json::parse(R"({"drive": {"n": "many"}})")), InvalidArgument);
  RunConfig c;
  c.drive.n = 0;
  CHECK_THROWS_AS(c.validate(), InvalidArgument);
  c = RunConfig{};
  c.drive.omegas = {0.5, -1.0};
  CHECK_THROWS_AS(c.validate(), InvalidArgument);
  c = RunConfig{};
  c.workers = 0;
  CHECK_THROWS_AS(c.validate(), InvalidArgument);
  c = RunConfig{};
  c.spectrum.entropy_basis = "sideways";
  CHECK_THROWS_AS(c.validate(), InvalidArgument);
}

TEST_CASE("command-level preconditions") {
  const auto dir = scratch_dir("pre");
  auto c = small(dir);
  c.drive.mu = 0.0;
  CHECK_THROWS_AS(run_command("poincare", c), InvalidArgument);
  c = small(dir);
  c.fotoc.centres.clear();
  CHECK_THROWS_AS(run_command("fotoc", c), InvalidArgument);
  CHECK_THROWS_AS(run_command("bogus", small(dir)), InvalidArgument);
  // Nothing was computed or written.
  CHECK_FALSE(fs::exists(dir));
}

TEST_CASE("n_periods = 0 echoes the initial conditions") {
  const auto dir = scratch_dir("p0");
  auto c = small(dir);
  c.poincare.n_periods = 0;
  const auto m = run_command("poincare", c);
  CHECK(m.ok());
  const auto rows = data_lines(dir / "poincare_w0.5.tsv");
  CHECK(rows.size() == 1 + 4);  // header + one point per orbit
  CHECK(rows[0] == "orbit\tk\tt\tz\tphi");
}

TEST_CASE("every listed file exists with a matching checksum") {
  const auto dir = scratch_dir("all");
  const auto c = small(dir);
  for (const auto& cmd : command_names()) {
    const auto m = run_command(cmd, c);
    CAPTURE(cmd);
    CHECK(m.ok());
    CHECK(fs::exists(dir / "manifest.json"));
    const auto doc = nlohmann::json::parse(slurp(dir / "manifest.json"));
    CHECK(doc["command"] == cmd);
    CHECK(doc["status"] == "ok");
    for (const auto& t : doc["tasks"]) {
      for (const auto& f : t["files"]) {
        const auto p = dir / f["path"].get<std::string>();
        REQUIRE(fs::exists(p));
        CHECK(sha256_file(p) == f["sha256"].get<std::string>());
      }
    }
  }
  // Self-describing headers.
  const auto text = slurp(dir / "fotoc_grid_w0.5_t2.tsv");
  CHECK(text.find("# format: bhd-table/1") == 0);
  CHECK(text.find("# config_sha256: " + config_hash(c)) != std::string::npos);
  CHECK(text.find("# units: -\t-\t-\t1\trad\t1") != std::string::npos);
  CHECK(data_lines(dir / "fotoc_grid_w0.5_t2.tsv").size() == 1 + 20);
  CHECK(data_lines(dir / "entropy_map_w7.tsv").size() == 1 + 20);
  CHECK(data_lines(dir / "spectrum_summary.tsv").size() == 1 + 2);
  CHECK(data_lines(dir / "fotoc_fits.tsv").size() == 1 + 2);
}

TEST_CASE("a sweep of length one gives a single summary row") {
  const auto dir = scratch_dir("one");
  auto c = small(dir);
  c.drive.omegas = {3.0};
  run_command("spectrum", c);
  CHECK(data_lines(dir / "spectrum_summary.tsv").size() == 2);
}

TEST_CASE("outputs are identical across worker counts") {
  const auto d1 = scratch_dir("w1"), d3 = scratch_dir("w3");
  auto c1 = small(d1), c3 = small(d3);
  c1.workers = 1;
  c3.workers = 3;
  for (const auto& cmd : command_names()) {
    run_command(cmd, c1);
    run_command(cmd, c3);
  }
  int compared = 0;
  for (const auto& e : fs::directory_iterator(d1)) {
    if (e.path().extension() != ".tsv") continue;
    CAPTURE(e.path().filename().string());
    CHECK(slurp(e.path()) == slurp(d3 / e.path().filename()));
    ++compared;
  }
  CHECK(compared > 10);
}

TEST_CASE("failed grid points are written as null") {
  CHECK(format_double(std::numeric_limits<double>::quiet_NaN()) == "null");
  CHECK(format_double(0.1) == "0.1");
  CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);
}

TEST_CASE("a failing task is recorded and the run reports failure") {
  const auto dir = scratch_dir("fail");
  auto c = small(dir);
  c.propagation.tol = 1e-300;  // unreachable: calibration gives up
  const auto m = run_command("spectrum", c);
  CHECK_FALSE(m.ok());
  const auto doc = nlohmann::json::parse(slurp(dir / "manifest.json"));
  CHECK(doc["status"] == "failed");
  CHECK(doc["tasks"][0]["status"] == "failed");
  CHECK_FALSE(doc["tasks"][0]["error"].get<std::string>().empty());
  // The summary still lists the omega with null values.
  const auto rows = data_lines(dir / "spectrum_summary.tsv");
  REQUIRE(rows.size() == 3);
  CHECK(rows[1].find("null") != std::string::npos);
}

}
