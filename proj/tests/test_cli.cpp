#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <unistd.h>

#include "snowembed/cli.hpp"
#include "snowembed/generators.hpp"
#include "snowembed/serialization.hpp"

using namespace snowembed;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) {
    path = fs::temp_directory_path() / ("snowembed_" + tag + "_" + std::to_string(::getpid()));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string str() const { return path.string(); }
};

int run(std::initializer_list<std::string> args) {
  std::ostringstream sink;
  auto* old = std::cout.rdbuf(sink.rdbuf());
  const int code = cli::run(std::vector<std::string>(args));
  std::cout.rdbuf(old);
  return code;
}

struct RunCapture {
  int code;
  std::string out;
  std::string err;
};

RunCapture run_capture(std::initializer_list<std::string> args) {
  std::ostringstream out, err;
  auto* old_out = std::cout.rdbuf(out.rdbuf());
  auto* old_err = std::cerr.rdbuf(err.rdbuf());
  const int code = cli::run(std::vector<std::string>(args));
  std::cout.rdbuf(old_out);
  std::cerr.rdbuf(old_err);
  return RunCapture{code, out.str(), err.str()};
}

bool same_bytes(const fs::path& a, const fs::path& b) {
  return read_text_file(a) == read_text_file(b);
}

}  // namespace

TEST_CASE("pipeline on the strict interval fixture passes and writes all artifacts") {
  TempDir dir("pipeline");
  const int code = run({"pipeline", "--family", "interval", "--size", "8", "--epsilon", "0.75",
                        "--theta", "0.5", "--delta", "1.2", "--mode", "strict", "--out-dir",
                        dir.str(), "--log-level", "quiet"});
  CHECK(code == 0);
  for (const char* name :
       {"space.json", "dims.json", "params.json", "nets.json", "embedding.json", "report.json",
        "manifest.json"}) {
    CHECK(fs::exists(dir.path / name));
  }
  const auto report = parse_json_file(dir.path / "report.json");
  CHECK(report.at("pass").get<bool>());
  CHECK(report.at("mode") == "strict");
  const auto params = parse_json_file(dir.path / "params.json");
  CHECK(params.at("tau").get<double>() == doctest::Approx(0.015).epsilon(1e-12));
}

TEST_CASE("embed with a missing input file exits 1 and names the path") {
  TempDir dir("missing");
  const auto missing = (dir.path / "nope.json").string();
  const auto res = run_capture({"embed", "--space", missing, "--params",
                                (dir.path / "params.json").string(), "--out-dir", dir.str()});
  CHECK(res.code == 1);
  CHECK(res.err.find(missing) != std::string::npos);
}

TEST_CASE("params near epsilon = 1/2 exits 2 with a NoFeasibleTau diagnostic") {
  TempDir dir("infeasible");
  const auto res = run_capture({"params", "--epsilon", "0.51", "--theta", "0.5", "--delta", "1",
                                "--C", "2", "--mode", "strict", "--out-dir", dir.str()});
  CHECK(res.code == 2);
  CHECK(res.err.find("NoFeasibleTau") != std::string::npos);
  CHECK(res.err.find("analytic_cap") != std::string::npos);
}

TEST_CASE("practical-mode pipeline runs with overrides and stamps the mode") {
  TempDir dir("practical");
  const int code = run({"pipeline", "--family", "interval", "--size", "5", "--epsilon", "0.75",
                        "--theta", "0.5", "--delta", "1.2", "--mode", "practical", "--tau", "0.1",
                        "--colors", "2", "--M", "3", "--dump-vectors", "--out-dir", dir.str(),
                        "--log-level", "quiet"});
  CHECK(code == 0);
  const auto report = parse_json_file(dir.path / "report.json");
  CHECK(report.at("mode") == "practical");
  const auto embedding = parse_json_file(dir.path / "embedding.json");
  CHECK(embedding.at("metadata").at("mode") == "practical");
  CHECK(embedding.contains("vectors"));
  CHECK(embedding.at("dimension").get<int>() == 2 * 2 * 3);
}

TEST_CASE("verify emits the per-pair CSV when asked") {
  TempDir dir("csv");
  const auto csv = (dir.path / "pairs.csv").string();
  REQUIRE(run({"pipeline", "--family", "interval", "--size", "5", "--epsilon", "0.8", "--theta",
               "0.5", "--delta", "1.2", "--mode", "strict", "--csv", csv, "--out-dir", dir.str(),
               "--log-level", "quiet"}) == 0);
  const auto text = read_text_file(csv);
  CHECK(text.rfind("i,j,d,embedded,ratio,level,in_scope", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == 11);  // header + C(5,2) rows
}

TEST_CASE("nets subcommand honors the farthest-point order flag") {
  TempDir dir("netorder");
  const auto space = (dir.path / "space.json").string();
  const auto params = (dir.path / "params.json").string();
  REQUIRE(run({"gen", "--family", "interval", "--size", "9", "--out", space, "--out-dir",
               dir.str()}) == 0);
  REQUIRE(run({"params", "--epsilon", "0.75", "--theta", "0.5", "--delta", "1.2", "--C", "2",
               "--mode", "practical", "--tau", "0.26", "--colors", "8", "--M", "2", "--out",
               params, "--out-dir", dir.str()}) == 0);
  REQUIRE(run({"nets", "--space", space, "--params", params, "--net-order", "farthest_point",
               "--out", (dir.path / "nets_fp.json").string(), "--out-dir", dir.str()}) == 0);
  REQUIRE(run({"nets", "--space", space, "--params", params, "--out",
               (dir.path / "nets_in.json").string(), "--out-dir", dir.str()}) == 0);
  const auto fp = parse_json_file(dir.path / "nets_fp.json");
  const auto in = parse_json_file(dir.path / "nets_in.json");
  CHECK(fp.at("net_order") == "farthest_point");
  CHECK(in.at("net_order") == "input");
  CHECK(fp.at("levels") != in.at("levels"));
}

TEST_CASE("dims accepts CSV space files") {
  TempDir dir("csvspace");
  const auto space = gen_space({Family::interval, 32});
  const auto csv_path = dir.path / "space.csv";
  write_text_file(csv_path, space_to_csv(space));
  REQUIRE(run({"dims", "--space", csv_path.string(), "--what", "minkowski", "--grid",
               "0.25,0.125,0.0625,0.03125", "--out-dir", dir.str()}) == 0);
  const auto record = parse_json_file(dir.path / "dims.json");
  CHECK(record.at("value").get<double>() == doctest::Approx(1.0).epsilon(0.1));
}

TEST_CASE("SNOWEMBED_OUT_DIR supplies the default output directory") {
  TempDir dir("envdir");
  ::setenv("SNOWEMBED_OUT_DIR", dir.str().c_str(), 1);
  const int code = run({"gen", "--family", "interval", "--size", "4"});
  ::unsetenv("SNOWEMBED_OUT_DIR");
  REQUIRE(code == 0);
  CHECK(fs::exists(dir.path / "space.json"));
  CHECK(fs::exists(dir.path / "manifest.json"));
}

TEST_CASE("quasidoubling dims warns when delta is below the spectrum estimate") {
  TempDir dir("warn");
  const auto space = (dir.path / "space.json").string();
  REQUIRE(run({"gen", "--family", "cantor", "--depth", "7", "--out", space, "--out-dir",
               dir.str()}) == 0);
  const auto res = run_capture({"dims", "--space", space, "--what", "quasidoubling", "--theta",
                                "0.5", "--delta", "0.2", "--out-dir", dir.str()});
  REQUIRE(res.code == 0);
  CHECK(res.err.find("warning") != std::string::npos);
  const auto record = parse_json_file(dir.path / "dims.json");
  CHECK(record.contains("delta_warning"));
}

TEST_CASE("strict pipeline passes under the farthest-point net order too") {
  TempDir dir("fporder");
  const int code = run({"pipeline", "--family", "interval", "--size", "8", "--epsilon", "0.75",
                        "--theta", "0.5", "--delta", "1.2", "--mode", "strict", "--net-order",
                        "farthest_point", "--out-dir", dir.str(), "--log-level", "quiet"});
  REQUIRE(code == 0);
  const auto report = parse_json_file(dir.path / "report.json");
  CHECK(report.at("pass").get<bool>());
  const auto embedding = parse_json_file(dir.path / "embedding.json");
  CHECK(embedding.at("metadata").at("net_order") == "farthest_point");
}

TEST_CASE("the surrogate selection threshold also passes strict verification") {
  TempDir dir("surrogate");
  const int code = run({"pipeline", "--family", "interval", "--size", "8", "--epsilon", "0.75",
                        "--theta", "0.5", "--delta", "1.2", "--mode", "strict",
                        "--surrogate-threshold", "--out-dir", dir.str(), "--log-level", "quiet"});
  REQUIRE(code == 0);
  const auto report = parse_json_file(dir.path / "report.json");
  CHECK(report.at("pass").get<bool>());
  const auto embedding = parse_json_file(dir.path / "embedding.json");
  CHECK(embedding.at("metadata").at("surrogate_threshold").get<bool>());
}

TEST_CASE("redundant deep levels trigger a warning") {
  TempDir dir("redundant");
  const auto res = run_capture({"pipeline", "--family", "interval", "--size", "4", "--epsilon",
                                "0.75", "--theta", "0.5", "--delta", "1.2", "--mode", "practical",
                                "--tau", "0.1", "--colors", "4", "--M", "2", "--n-offset", "3",
                                "--out-dir", dir.str()});
  REQUIRE(res.code == 0);
  CHECK(res.err.find("redundant") != std::string::npos);
}

TEST_CASE("deferred color budgets resolve to the observed greedy count at embed time") {
  TempDir dir("defer");
  const auto space = (dir.path / "space.json").string();
  const auto params = (dir.path / "params.json").string();
  const auto embedding = (dir.path / "embedding.json").string();
  REQUIRE(run({"gen", "--family", "interval", "--size", "6", "--out", space, "--out-dir",
               dir.str()}) == 0);
  // n = n0 + 3 blows the formula budget through the cap in practical mode
  REQUIRE(run({"params", "--epsilon", "0.75", "--theta", "0.5", "--delta", "1", "--C", "2",
               "--mode", "practical", "--n-offset", "3", "--out", params, "--out-dir",
               dir.str()}) == 0);
  CHECK(parse_json_file(params).at("N_colors").is_null());
  REQUIRE(run({"embed", "--space", space, "--params", params, "--out", embedding, "--out-dir",
               dir.str(), "--log-level", "quiet"}) == 0);
  const auto emb = parse_json_file(embedding);
  const auto resolved = emb.at("params").at("N_colors").get<long long>();
  CHECK(resolved >= 1);
  CHECK(emb.at("dimension").get<long long>() ==
        2 * resolved * emb.at("params").at("M").get<long long>());
}

TEST_CASE("params log-base flag yields the same tau either way") {
  TempDir dir("logbase");
  REQUIRE(run({"params", "--epsilon", "0.9", "--theta", "0.5", "--delta", "1", "--C", "2",
               "--log-base", "10", "--out", (dir.path / "p10.json").string(), "--out-dir",
               dir.str()}) == 0);
  REQUIRE(run({"params", "--epsilon", "0.9", "--theta", "0.5", "--delta", "1", "--C", "2",
               "--out", (dir.path / "pe.json").string(), "--out-dir", dir.str()}) == 0);
  const auto p10 = parse_json_file(dir.path / "p10.json");
  const auto pe = parse_json_file(dir.path / "pe.json");
  CHECK(p10.at("tau").get<double>() == pe.at("tau").get<double>());
  CHECK(p10.at("tau").get<double>() == doctest::Approx(0.069).epsilon(1e-12));
}

TEST_CASE("replaying a manifest reproduces byte-identical artifacts") {
  TempDir a("replay_a");
  TempDir b("replay_b");
  REQUIRE(run({"pipeline", "--family", "gw_tree", "--size", "24", "--seed", "7", "--epsilon",
               "0.8", "--theta", "0.5", "--delta", "1.3", "--mode", "strict", "--out-dir",
               a.str(), "--log-level", "quiet"}) == 0);
  REQUIRE(run({"pipeline", "--from-manifest", (a.path / "manifest.json").string(), "--out-dir",
               b.str()}) == 0);
  for (const char* name :
       {"space.json", "dims.json", "params.json", "nets.json", "embedding.json", "report.json"}) {
    CHECK(same_bytes(a.path / name, b.path / name));
  }
}

TEST_CASE("pipeline equals the composition of the individual subcommands") {
  TempDir p("compose_p");
  TempDir s("compose_s");
  REQUIRE(run({"pipeline", "--family", "interval", "--size", "6", "--epsilon", "0.8", "--theta",
               "0.5", "--delta", "1.2", "--mode", "strict", "--out-dir", p.str(), "--log-level",
               "quiet"}) == 0);

  const auto space = (s.path / "space.json").string();
  const auto dims = (s.path / "dims.json").string();
  const auto params = (s.path / "params.json").string();
  const auto nets = (s.path / "nets.json").string();
  const auto embedding = (s.path / "embedding.json").string();
  const auto report = (s.path / "report.json").string();
  REQUIRE(run({"gen", "--family", "interval", "--size", "6", "--out", space, "--out-dir",
               s.str()}) == 0);
  REQUIRE(run({"dims", "--space", space, "--what", "quasidoubling", "--normalize", "--theta",
               "0.5", "--delta", "1.2", "--out", dims, "--out-dir", s.str()}) == 0);
  REQUIRE(run({"params", "--epsilon", "0.8", "--theta", "0.5", "--delta", "1.2", "--C-from",
               dims, "--mode", "strict", "--out", params, "--out-dir", s.str()}) == 0);
  REQUIRE(run({"nets", "--space", space, "--params", params, "--out", nets, "--out-dir",
               s.str()}) == 0);
  REQUIRE(run({"embed", "--space", space, "--params", params, "--out", embedding, "--out-dir",
               s.str()}) == 0);
  REQUIRE(run({"verify", "--space", space, "--embedding", embedding, "--out", report,
               "--out-dir", s.str()}) == 0);

  for (const char* name :
       {"space.json", "dims.json", "params.json", "nets.json", "embedding.json", "report.json"}) {
    CHECK(same_bytes(p.path / name, s.path / name));
  }
}

TEST_CASE("dims subcommand emits a versioned record") {
  TempDir dir("dims");
  const auto space = (dir.path / "space.json").string();
  REQUIRE(run({"gen", "--family", "cantor", "--depth", "5", "--out", space, "--out-dir",
               dir.str()}) == 0);
  REQUIRE(run({"dims", "--space", space, "--what", "minkowski", "--out-dir", dir.str()}) == 0);
  const auto record = parse_json_file(dir.path / "dims.json");
  CHECK(record.at("schema").get<int>() == 1);
  CHECK(record.at("what") == "minkowski");
  CHECK(record.at("value").get<double>() > 0.3);
  CHECK(record.at("value").get<double>() < 1.0);
  CHECK(record.at("scales").size() >= 4);
}

TEST_CASE("gen writes generator metadata and a replayable manifest") {
  TempDir dir("gen");
  REQUIRE(run({"gen", "--family", "gw_tree", "--size", "16", "--seed", "5", "--out-dir",
               dir.str()}) == 0);
  const auto space = parse_json_file(dir.path / "space.json");
  CHECK(space.at("metadata").at("generator").at("seed").get<int>() == 5);
  CHECK(space.at("metadata").at("generator").at("rng") == "splitmix64/v1");
  const auto manifest = parse_json_file(dir.path / "manifest.json");
  CHECK(manifest.at("subcommand") == "gen");
  CHECK(manifest.at("config").at("size").get<int>() == 16);

  TempDir replay("gen_replay");
  REQUIRE(run({"gen", "--from-manifest", (dir.path / "manifest.json").string(), "--out",
               (replay.path / "space.json").string(), "--out-dir", replay.str()}) == 0);
  CHECK(same_bytes(dir.path / "space.json", replay.path / "space.json"));
}

TEST_CASE("threads flag does not change the verify output") {
  TempDir a("threads_a");
  TempDir b("threads_b");
  REQUIRE(run({"pipeline", "--family", "interval", "--size", "8", "--epsilon", "0.75", "--theta",
               "0.5", "--delta", "1.2", "--mode", "strict", "--out-dir", a.str(), "--log-level",
               "quiet"}) == 0);
  REQUIRE(run({"pipeline", "--family", "interval", "--size", "8", "--epsilon", "0.75", "--theta",
               "0.5", "--delta", "1.2", "--mode", "strict", "--threads", "4", "--out-dir",
               b.str(), "--log-level", "quiet"}) == 0);
  for (const char* name : {"space.json", "embedding.json", "report.json"}) {
    CHECK(same_bytes(a.path / name, b.path / name));
  }
}
