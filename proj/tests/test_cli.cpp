#include <fstream>
#include <iterator>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "pgcn/cli.hpp"
#include "pgcn/graph_io.hpp"
#include "support.hpp"

using namespace pgcn;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

// A small dataset shared by the CLI cases.
struct Fixture {
  testing::TempDir dir{"cli"};
  std::string data = (dir.path() / "data").string();
  Fixture() {
    const auto r = run({"gen", "--blocks", "3", "--per-block", "30", "--p-in", "0.2", "--p-out", "0.01", "--dim", "6",
                        "--seed", "4", "--out", data});
    REQUIRE(r.code == 0);
  }
  std::string path(const std::string& name) const { return (dir.path() / name).string(); }
};

}  // namespace

TEST_CASE("gen writes the three files with the requested size") {
  testing::TempDir dir("gen");
  const auto out = (dir.path() / "d").string();
  const auto r = run({"gen", "--blocks", "4", "--per-block", "300", "--p-in", "0.05", "--p-out", "0.002", "--dim",
                      "32", "--seed", "7", "--out", out});
  REQUIRE(r.code == 0);
  const auto paths = DatasetPaths::in(out);
  CHECK(fs::exists(paths.edges));
  CHECK(fs::exists(paths.manifest));
  CHECK(load_features(paths.features).rows() == 1200);
  CHECK(load_labels(paths.labels).size() == 1200);

  const std::string features = slurp(paths.features), edges = slurp(paths.edges);
  CHECK(run({"gen", "--blocks", "4", "--seed", "7", "--out", out}).code == cli::kUsage);
  REQUIRE(run({"gen", "--blocks", "4", "--per-block", "300", "--p-in", "0.05", "--p-out", "0.002", "--dim", "32",
               "--seed", "7", "--out", out, "--force"})
              .code == 0);
  CHECK(slurp(paths.features) == features);
  CHECK(slurp(paths.edges) == edges);

  CHECK(run({"gen", "--blocks", "0", "--out", (dir.path() / "e").string()}).code == cli::kUsage);
  CHECK(run({"gen", "--p-in", "0.1", "--p-out", "0.2", "--out", (dir.path() / "e").string()}).code == cli::kUsage);
}

TEST_CASE("partition writes the assignment and a summary") {
  Fixture f;
  const auto r = run({"partition", "--data", f.data, "--c", "3", "--strategy", "greedy_bfs", "--out",
                      f.path("part.txt")});
  REQUIRE(r.code == 0);
  CHECK(load_partition_file(f.path("part.txt")).size() == 90);
  const auto j = nlohmann::json::parse(slurp(f.path("part.txt.json")));
  CHECK(j["c"] == 3);
  CHECK(j["sizes"] == nlohmann::json::array({30, 30, 30}));
  CHECK(j.contains("edge_cut"));

  CHECK(run({"partition", "--data", f.data, "--c", "500", "--out", f.path("p2.txt")}).code == cli::kUsage);
  CHECK(run({"partition", "--data", f.data, "--strategy", "metis", "--out", f.path("p3.txt")}).code == cli::kUsage);
  CHECK(run({"partition", "--data", f.path("missing"), "--out", f.path("p4.txt")}).code == cli::kIo);
}

TEST_CASE("train writes metrics, summary, and checkpoint") {
  Fixture f;
  const auto r = run({"train", "--data", f.data, "--out", f.path("run"), "--task", "node", "--mode", "concat",
                      "--prompts", "shared", "--c", "3", "--epochs", "4", "--hidden", "8"});
  REQUIRE(r.code == 0);
  const auto summary = nlohmann::json::parse(slurp(f.path("run/summary.json")));
  CHECK(summary.contains("accuracy"));
  CHECK(summary.contains("macro_f1"));
  CHECK(summary["full_batch_equivalent"] == false);
  const auto records = lines(slurp(f.path("run/metrics.jsonl")));
  REQUIRE(records.size() == 4);
  const auto first = nlohmann::json::parse(records[0]);
  CHECK(first["epoch"] == 1);
  CHECK(first["subgraph_losses"].size() == 3);
  CHECK(first["manifest"] == summary["manifest"]);
  CHECK(fs::exists(f.path("run/model.ckpt")));

  SUBCASE("eval reproduces the summary") {
    const auto e = run({"eval", "--data", f.data, "--run", f.path("run")});
    REQUIRE(e.code == 0);
    const auto j = nlohmann::json::parse(e.out);
    CHECK(j["accuracy"] == summary["accuracy"]);
  }
}

TEST_CASE("train flags override the config file") {
  Fixture f;
  {
    std::ofstream cfg(f.path("cfg.toml"));
    cfg << "epochs = 2\nhidden = 4\nc = 1\nsharing = none\n";
  }
  REQUIRE(run({"train", "--data", f.data, "--config", f.path("cfg.toml"), "--epochs", "3", "--out", f.path("r")})
              .code == 0);
  CHECK(lines(slurp(f.path("r/metrics.jsonl"))).size() == 3);
  const auto summary = nlohmann::json::parse(slurp(f.path("r/summary.json")));
  CHECK(summary["full_batch_equivalent"] == true);
  const std::string snapshot = slurp(f.path("r/config.toml"));
  CHECK(snapshot.find("hidden = 4") != std::string::npos);
  CHECK(snapshot.find("epochs = 3") != std::string::npos);
}

TEST_CASE("train exit codes") {
  Fixture f;
  CHECK(run({"train", "--data", f.data, "--out", f.path("a"), "--lr", "-1"}).code == cli::kUsage);
  CHECK(run({"train", "--data", f.data, "--out", f.path("a"), "--mode", "sideways"}).code == cli::kUsage);
  CHECK(run({"train", "--data", f.path("nothing"), "--out", f.path("a")}).code == cli::kIo);
  const auto diverged = run({"train", "--data", f.data, "--out", f.path("b"), "--lr", "1e300", "--epochs", "3"});
  CHECK(diverged.code == cli::kNumerical);
  CHECK(diverged.err.find("diverged") != std::string::npos);
  {
    std::ofstream bad(f.path("bad.toml"));
    bad << "epochs 3\n";
  }
  CHECK(run({"train", "--data", f.data, "--out", f.path("c"), "--config", f.path("bad.toml")}).code == cli::kUsage);
  CHECK(run({"frobnicate"}).code == cli::kUsage);
  CHECK(run({}).code == cli::kUsage);
}

TEST_CASE("identical train runs stream identical metrics") {
  Fixture f;
  for (const char* name : {"x", "y"}) {
    REQUIRE(run({"train", "--data", f.data, "--out", f.path(name), "--epochs", "3", "--c", "2"}).code == 0);
  }
  CHECK(slurp(f.path("x/metrics.jsonl")) == slurp(f.path("y/metrics.jsonl")));
}

TEST_CASE("bench emits one row per axis value") {
  Fixture f;
  const std::vector<std::string> common{"--data", f.data, "--seeds", "2", "--epochs", "2", "--hidden", "4", "--jobs",
                                        "2"};
  const auto with = [&](std::vector<std::string> extra) {
    std::vector<std::string> args{"bench"};
    args.insert(args.end(), common.begin(), common.end());
    args.insert(args.end(), extra.begin(), extra.end());
    return run(args);
  };
  const auto modes = with({"--axis", "modes"});
  REQUIRE(modes.code == 0);
  const auto rows = lines(modes.out);
  REQUIRE(rows.size() == 5);
  CHECK(rows[0] == "axis,value,metric,mean,std,seeds");
  CHECK(rows[1].rfind("modes,concat,accuracy,", 0) == 0);
  CHECK(rows[4].rfind("modes,weighted,", 0) == 0);

  const auto prompts = with({"--axis", "prompts", "--values", "1,2,4,8,16"});
  CHECK(lines(prompts.out).size() == 6);
  const auto subgraphs = with({"--axis", "subgraphs", "--values", "5,10,20", "--csv", f.path("sweep.csv")});
  CHECK(subgraphs.code == 0);
  CHECK(lines(slurp(f.path("sweep.csv"))).size() == 4);
  CHECK(with({"--axis", "colour"}).code == cli::kUsage);

  // Parallel cells give the same numbers as serial ones.
  auto serial = common;
  serial[serial.size() - 1] = "1";
  std::vector<std::string> args{"bench", "--axis", "modes"};
  args.insert(args.end(), serial.begin(), serial.end());
  CHECK(run(args).out == modes.out);
}

TEST_CASE("memory report covers depths 3 to 5") {
  Fixture f;
  const auto r = run({"memory", "--data", f.data, "--subgraphs", "1,3"});
  REQUIRE(r.code == 0);
  const auto rows = lines(r.out);
  REQUIRE(rows.size() == 1 + 3 * 3);
  CHECK(rows[1].rfind("3,full-batch,1,", 0) == 0);
  CHECK(rows[7].rfind("5,full-batch,1,", 0) == 0);
  // c = 1 row equals the full-batch row.
  const auto bytes = [](const std::string& row) {
    std::vector<std::string> cells;
    std::istringstream in(row);
    for (std::string c; std::getline(in, c, ',');) cells.push_back(c);
    return std::stoull(cells[3]);
  };
  CHECK(bytes(rows[1]) == bytes(rows[2]));
  CHECK(bytes(rows[3]) < bytes(rows[1]));
  CHECK(bytes(rows[1]) < bytes(rows[4]));

  const auto wide = run({"memory", "--data", f.data, "--subgraphs", "3", "--hidden", "128"});
  const auto narrow = run({"memory", "--data", f.data, "--subgraphs", "3", "--hidden", "16"});
  CHECK(bytes(lines(wide.out)[2]) > bytes(lines(narrow.out)[2]));
}
