#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "rig/cli.hpp"
#include "rig/sampler.hpp"

namespace fs = std::filesystem;

namespace {

int cli(std::initializer_list<std::string> args) {
  return rig::run_cli(std::vector<std::string>(args));
}

fs::path tmp_dir() {
  auto d = fs::path("cli_tmp");
  fs::create_directories(d);
  return d;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file(const fs::path& p, const std::string& body) {
  std::ofstream out(p, std::ios::binary);
  REQUIRE(out.good());
  out << body;
}

// The worked fixture: ten individuals, six communities, two components.
void write_fixture_graph(const fs::path& p) {
  auto b = rig::graph_from_edges(10, 6,
                                 {{0, 0}, {1, 0}, {2, 0}, {0, 1}, {3, 1}, {1, 2},
                                  {4, 2}, {5, 2}, {6, 3}, {7, 3}, {7, 4}, {8, 4},
                                  {9, 4}, {7, 5}});
  std::ofstream out(p, std::ios::binary);
  REQUIRE(out.good());
  rig::dump_graph(b, out);
}

}  // namespace

TEST_CASE("sample: happy path, dump determinism, and flag validation") {
  const auto dir = tmp_dir();
  const auto dump1 = dir / "dump1.txt";
  const auto dump2 = dir / "dump2.txt";
  CHECK(cli({"sample", "--regime", "moderate", "--n", "500", "--theta", "1",
             "--seed", "3", "--dump-graph", dump1.string()}) == 0);
  CHECK(cli({"sample", "--regime", "moderate", "--n", "500", "--theta", "1",
             "--seed", "3", "--dump-graph", dump2.string()}) == 0);
  CHECK(slurp(dump1) == slurp(dump2));

  std::ifstream in(dump1, std::ios::binary);
  auto b = rig::load_graph(in);
  CHECK(b.n == 500);
  CHECK(b.m == 500);

  CHECK(cli({"sample", "--regime", "moderate", "--n", "0", "--theta", "1"}) == 2);
  CHECK(cli({"sample", "--regime", "moderate", "--n", "100", "--m", "50"}) == 2);
  CHECK(cli({"sample", "--regime", "light", "--n", "100"}) == 2);
  CHECK(cli({"sample", "--regime", "dense", "--n", "100"}) == 2);
  CHECK(cli({"sample", "--n", "100"}) == 2);        // --regime is required
  CHECK(cli({"sample", "--regime", "light", "--n", "64", "--aspect", "2",
             "--theta", "2"}) == 2);                // theta is moderate-only
  CHECK(cli({"nonsense"}) == 2);
}

TEST_CASE("explore: fixture trace CSV is exact and reruns are identical") {
  const auto dir = tmp_dir();
  const auto graph = dir / "fixture.graph";
  const auto csv1 = dir / "trace1.csv";
  const auto csv2 = dir / "trace2.csv";
  write_fixture_graph(graph);

  CHECK(cli({"explore", "--load-graph", graph.string(), "--root-rule", "smallest",
             "--trace-csv", csv1.string()}) == 0);
  CHECK(cli({"explore", "--load-graph", graph.string(), "--root-rule", "smallest",
             "--trace-csv", csv2.string()}) == 0);

  const std::string want =
      "k,X,dS,S,H,comp\n"
      "1,2,2,2,1,1\n"
      "2,1,1,3,2,1\n"
      "3,0,-1,2,3,1\n"
      "4,0,-1,1,3,1\n"
      "5,0,-1,0,2,1\n"
      "6,0,-1,-1,2,1\n"
      "7,1,0,-1,1,2\n"
      "8,2,1,0,2,2\n"
      "9,0,-1,-1,3,2\n"
      "10,0,-1,-2,3,2\n";
  CHECK(slurp(csv1) == want);
  CHECK(slurp(csv1) == slurp(csv2));

  CHECK(cli({"explore", "--load-graph", graph.string(), "--root-rule", "sideways"}) == 2);
  CHECK(cli({"explore", "--root-rule", "uniform"}) == 2);  // no graph source
  CHECK(cli({"explore", "--load-graph", (dir / "no-such-file").string()}) == 2);

  // A sampled instance audits clean in every regime.
  CHECK(cli({"explore", "--regime", "heavy", "--n", "2000", "--m", "100",
             "--seed", "5"}) == 0);
  CHECK(cli({"explore", "--regime", "light", "--n", "200", "--aspect", "2",
             "--seed", "5", "--root-rule", "smallest"}) == 0);
}

TEST_CASE("campaign: plan schema, exit codes, and artifacts") {
  const auto dir = tmp_dir();
  const auto plan = dir / "walk-plan.json";
  write_file(plan, R"({
    "regime": "moderate", "theta": 1.0, "n": 400,
    "replicates": 24, "horizon_t": 0.5, "seed": 7,
    "targets": ["walk_law"],
    "output_dir": "test_results_cli",
    "tolerances": {"se_mult": 12.0, "ks": 0.9}
  })");
  CHECK(cli({"campaign", plan.string(), "--continuum-paths", "40"}) == 0);

  // The campaign name is the sanitized plan stem.
  const fs::path summary = fs::path("test_results_cli") / "walk-plan" / "summary.json";
  REQUIRE(fs::exists(summary));
  {
    std::ifstream sf(summary);
    auto sj = nlohmann::json::parse(sf);
    CHECK(sj["name"] == "walk-plan");
    CHECK(sj["all_pass"] == true);
  }

  // Impossible KS tolerance: statistics fail, artifacts still land, exit 3.
  const auto strict = dir / "strict-plan.json";
  write_file(strict, R"({
    "regime": "moderate", "theta": 1.0, "n": 400,
    "replicates": 24, "horizon_t": 0.5, "seed": 7,
    "targets": ["walk_law"],
    "output_dir": "test_results_cli",
    "tolerances": {"se_mult": 12.0, "ks": 1e-9}
  })");
  CHECK(cli({"campaign", strict.string(), "--continuum-paths", "40"}) == 3);
  const fs::path s2 = fs::path("test_results_cli") / "strict-plan" / "summary.json";
  REQUIRE(fs::exists(s2));
  {
    std::ifstream sf(s2);
    auto sj = nlohmann::json::parse(sf);
    CHECK(sj["all_pass"] == false);
  }

  // Schema violations and I/O problems exit 2.
  const auto unknown = dir / "unknown-key.json";
  write_file(unknown, R"({"regime":"moderate","n":400,"targets":["walk_law"],"typo_key":1})");
  CHECK(cli({"campaign", unknown.string()}) == 2);

  const auto malformed = dir / "malformed.json";
  write_file(malformed, "{ not json");
  CHECK(cli({"campaign", malformed.string()}) == 2);

  const auto badreps = dir / "bad-reps.json";
  write_file(badreps, R"({"regime":"moderate","n":400,"replicates":1,"targets":["walk_law"]})");
  CHECK(cli({"campaign", badreps.string()}) == 2);

  const auto badtarget = dir / "bad-target.json";
  write_file(badtarget, R"({"regime":"moderate","n":400,"targets":["walklaw"]})");
  CHECK(cli({"campaign", badtarget.string()}) == 2);

  CHECK(cli({"campaign", (dir / "missing-plan.json").string()}) == 2);
  CHECK(cli({"campaign"}) == 2);  // positional plan path is required

  // Thread override from the environment must be a number.
  setenv("RIG_THREADS", "abc", 1);
  CHECK(cli({"campaign", plan.string(), "--continuum-paths", "40"}) == 2);
  setenv("RIG_THREADS", "2", 1);
  CHECK(cli({"campaign", plan.string(), "--continuum-paths", "40"}) == 0);
  unsetenv("RIG_THREADS");
}

TEST_CASE("limits: artifacts, option exclusivity, and the analysis flags") {
  const auto out = (tmp_dir() / "limits_out").string();
  CHECK(cli({"limits", "--inf", "--lambda", "1", "--T", "6", "--dt", "0.01",
             "--seed", "2", "--out", out, "--ghp-refine"}) == 0);

  const std::string path_csv = slurp(fs::path(out) / "path.csv");
  CHECK(path_csv.rfind("i,t,S,R,H\n0,0,0,,0\n", 0) == 0);  // no R column when theta is infinite

  const std::string exc_csv = slurp(fs::path(out) / "excursions.csv");
  CHECK(exc_csv.rfind("rank,g,d,zeta,complete\n", 0) == 0);
  // Ranked by decreasing length.
  {
    std::istringstream in(exc_csv);
    std::string line;
    std::getline(in, line);
    double prev = 1e300;
    int rows = 0;
    while (std::getline(in, line)) {
      std::istringstream row(line);
      std::string cell;
      for (int c = 0; c < 4; ++c) std::getline(row, cell, ',');
      const double zeta = std::stod(cell);
      CHECK(zeta <= prev);
      prev = zeta;
      rows++;
    }
    CHECK(rows >= 1);  // lambda = 1 pushes the walk up; an excursion is certain
  }
  CHECK(fs::exists(fs::path(out) / "shortcuts.csv"));

  // Finite theta fills the R column.
  const auto out2 = (tmp_dir() / "limits_theta").string();
  CHECK(cli({"limits", "--theta", "2", "--T", "2", "--dt", "0.02", "--seed", "3",
             "--out", out2, "--kappa-check", "--drift-only"}) == 0);
  const std::string path2 = slurp(fs::path(out2) / "path.csv");
  CHECK(path2.rfind("i,t,S,R,H\n0,0,0,0,0\n", 0) == 0);

  CHECK(cli({"limits", "--theta", "2", "--inf", "--out", out}) == 2);
  CHECK(cli({"limits", "--out", out}) == 2);  // neither theta nor inf
  CHECK(cli({"limits", "--inf"}) == 2);       // --out is required
  CHECK(cli({"limits", "--inf", "--kappa-check", "--out", out}) == 2);
}
