#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "quadfun/cli.hpp"

using namespace quadfun;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(const std::vector<std::string>& args, const std::string& input = {}) {
  std::istringstream in(input);
  std::ostringstream out, err;
  const int code = run_cli(args, in, out, err);
  return {code, out.str(), err.str()};
}

class TempDir {
 public:
  TempDir() {
    path_ = fs::temp_directory_path() /
            ("quadfun_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter_++));
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  std::string write(const std::string& name, const std::string& content) const {
    const auto file = path_ / name;
    std::ofstream(file) << content;
    return file.string();
  }
  fs::path path() const { return path_; }

 private:
  static inline int counter_ = 0;
  fs::path path_;
};

}  // namespace

TEST(Cli, RatesExamples) {
  const auto ok = run({"rates", "--a", "sobolev:1", "--b", "sobolev:1.5", "-D", "1"});
  EXPECT_EQ(ok.code, 0);
  const auto doc = nlohmann::json::parse(ok.out);
  EXPECT_EQ(doc["exponent"].get<double>(), -0.571428571);
  EXPECT_EQ(doc["regime"], "nonparametric");

  const auto inf = run({"rates", "--a", "exponential:1", "--b", "sobolev:2", "-D", "1"});
  EXPECT_EQ(inf.code, 3);
  EXPECT_EQ(nlohmann::json::parse(inf.out)["exponent"], "INF");

  const auto loglog = run({"rates", "--a", "log:1", "--b", "log:1.5"});
  EXPECT_EQ(nlohmann::json::parse(loglog.out)["variable"], "log_n");
  EXPECT_EQ(nlohmann::json::parse(loglog.out)["regime"], "upper_bound_only");
  EXPECT_EQ(run({"rates", "--a", "custom:/nonexistent", "--b", "sobolev:1"}).code, 1);
}

TEST(Cli, EstimateRoundTrip) {
  TempDir dir;
  const auto x = dir.write("x.csv", "x\n0.0\n0.25\n");
  const auto y = dir.write("y.csv", "0.0\n0.3333333333333333\n");
  const auto r = run({"estimate", "--kind", "inner", "--weights", "constant@exclude_origin",
                      "--zeta", "1", "--samples-x", x, "--samples-y", y});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto doc = nlohmann::json::parse(r.out);
  EXPECT_EQ(doc["value"].get<double>(), 0.683012702);
  const auto report = report_from_json(doc);
  EXPECT_EQ(report.term_count, 2u);
  EXPECT_EQ(report.truncation, 1);
  EXPECT_EQ(report.kind, EstimandKind::inner_product);
  EXPECT_EQ(report_to_json(report), doc);
  EXPECT_EQ(report_from_json(report_to_json(report)), report);
}

TEST(Cli, EstimateFromStdinWithClosedForm) {
  std::string input;
  for (int i = 0; i < 50; ++i) input += std::to_string((i * 0.61803398875) - int(i * 0.61803398875)) + "\n";
  const auto r = run({"estimate", "--kind", "norm", "--weights", "sobolev:0.5", "--smoothness",
                      "sobolev:1.5", "--samples-x", "-"},
                     input);
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(nlohmann::json::parse(r.out)["truncation"], 4);  // ceil(50^{2/7})
}

TEST(Cli, EstimateDataErrors) {
  TempDir dir;
  const auto one = dir.write("one.csv", "0.5\n");
  const auto norm = run({"estimate", "--kind", "norm", "--weights", "constant", "--zeta", "1",
                         "--samples-x", one});
  EXPECT_EQ(norm.code, 2);
  EXPECT_NE(norm.err.find("need n >= 2 for sample splitting"), std::string::npos);

  const auto bad = dir.write("bad.csv", "0.1\n0.2\nnope\n");
  const auto parse = run({"estimate", "--kind", "norm", "--weights", "constant", "--zeta", "1",
                          "--samples-x", bad});
  EXPECT_EQ(parse.code, 2);
  EXPECT_NE(parse.err.find("line 3"), std::string::npos);

  EXPECT_EQ(run({"estimate", "--kind", "norm", "--weights", "constant", "--zeta", "1",
                 "--samples-x", (dir.path() / "missing.csv").string()})
                .code,
            2);
  EXPECT_EQ(run({"estimate", "--kind", "inner", "--weights", "constant", "--zeta", "1",
                 "--samples-x", one})
                .code,
            1);
  const auto two = dir.write("two.csv", "0.1\n0.4\n");
  EXPECT_EQ(run({"estimate", "--kind", "norm", "--weights", "exponential:1", "--smoothness",
                 "sobolev:1", "--samples-x", two})
                .code,
            3);
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(run({}).code, 1);
  EXPECT_EQ(run({"rates", "--a", "sobolev:1", "--b", "sobolev:2", "--bogus"}).code, 1);
  EXPECT_EQ(run({"frobnicate"}).code, 1);
  EXPECT_EQ(run({"rates", "--b", "sobolev:2"}).code, 1);
  EXPECT_EQ(run({"rates", "--a", "sobolev:1", "--b", "sobolev:2", "-D", "x"}).code, 1);
}

TEST(Cli, HelpDocumentsEveryFlag) {
  const std::map<std::string, std::vector<std::string>> flags{
      {"estimate", {"--kind", "--weights", "--smoothness", "--zeta", "--samples-x", "--samples-y"}},
      {"rates", {"--a", "--b", "--dimension"}},
      {"bounds",
       {"--a", "--b", "--dimension", "--zeta", "--n", "--mode", "--l2-p", "--l2-q", "--b-p",
        "--b-q", "--a-p", "--a-q"}},
      {"solve-zeta", {"--b", "--a", "--dimension", "--n", "--zeta-max"}},
      {"lowerbound", {"--b", "--a", "--dimension", "--zeta-grid", "--n", "--regime", "--seed"}},
      {"experiment", {"--config", "--output", "--threads"}},
  };
  const auto top = run({"--help"});
  EXPECT_EQ(top.code, 0);
  for (const auto& [sub, names] : flags) {
    EXPECT_NE(top.out.find(sub), std::string::npos);
    const auto help = run({sub, "--help"});
    EXPECT_EQ(help.code, 0) << sub;
    for (const auto& name : names) {
      EXPECT_NE(help.out.find(name), std::string::npos) << sub << " " << name;
    }
  }
}

TEST(Cli, Bounds) {
  const auto r = run({"bounds", "--a", "constant@exclude_origin", "--b",
                      "constant@exclude_origin", "--zeta", "8", "-n", "10"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto doc = nlohmann::json::parse(r.out);
  EXPECT_EQ(doc["term_count"], 16);
  EXPECT_EQ(doc["variance_bound"].get<double>(), 1.32);
  EXPECT_EQ(doc["mse_bound"].get<double>(), 2.32);
  EXPECT_EQ(doc["bias_bound"].get<double>(), 1.0);
  const auto inf = run({"bounds", "--a", "exponential:1", "--b", "sobolev:1@all", "-n", "10"});
  EXPECT_EQ(inf.code, 3);
  EXPECT_EQ(nlohmann::json::parse(inf.out)["bias_bound"], "INF");
  EXPECT_EQ(run({"bounds", "--a", "constant", "--b", "constant", "-n", "10", "--mode", "x"}).code,
            1);
}

TEST(Cli, SolveZeta) {
  const auto r = run({"solve-zeta", "--b", "sobolev:1", "-n", "1000", "--a", "sobolev:0.5"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto doc = nlohmann::json::parse(r.out);
  EXPECT_EQ(doc["zeta"], 19);
  EXPECT_EQ(doc["strength"].get<double>(), 4940.0);
  EXPECT_EQ(doc["closed_form"], 16);
  EXPECT_EQ(run({"solve-zeta", "--b", "constant", "-n", "1e6", "--zeta-max", "10"}).code, 2);
}

TEST(Cli, LowerBound) {
  const auto r = run({"lowerbound", "--b", "sobolev:1", "--zeta-grid", "3-6", "-n", "50"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto sweep = nlohmann::json::parse(r.out)["sweep"];
  ASSERT_EQ(sweep.size(), 4u);
  EXPECT_FALSE(sweep[1]["alternating_valid"].get<bool>());
  EXPECT_TRUE(sweep[2]["alternating_valid"].get<bool>());
  EXPECT_NE(r.err.find("zeta"), std::string::npos);
  EXPECT_EQ(run({"lowerbound", "--b", "sobolev:1", "--zeta-grid", "a-b"}).code, 1);
}

TEST(Cli, Experiment) {
  TempDir dir;
  const auto config = dir.write("config.json", R"({
    "density_p": {"dimension": 1, "amplitudes": [{"z": [1], "amplitude": 0.5}]},
    "a": "constant@exclude_origin", "n_grid": [50, 100], "replications": 20,
    "zeta_rule": "fixed:1", "base_seed": 9})");
  const auto output = (dir.path() / "out.csv").string();
  const auto r = run({"experiment", "--config", config, "--output", output});
  ASSERT_EQ(r.code, 0) << r.err;
  std::ifstream csv(output);
  std::string header;
  std::getline(csv, header);
  EXPECT_EQ(header, "n,zeta,truth,mean_estimate,mse,mse_stderr");
  std::ifstream sidecar(output + ".json");
  const auto doc = nlohmann::json::parse(sidecar);
  EXPECT_EQ(doc["config"]["replications"], 20);

  const auto to_stdout = run({"experiment", "--config", config, "--threads", "2"});
  EXPECT_EQ(to_stdout.code, 0);
  std::ifstream again(output);
  std::stringstream written;
  written << again.rdbuf();
  EXPECT_EQ(to_stdout.out, written.str());

  const auto broken = dir.write("broken.json", "{ not json");
  EXPECT_EQ(run({"experiment", "--config", broken}).code, 2);
  const auto invalid = dir.write("invalid.json", R"({"density_p": {"dimension": 1}, "a": "constant",
    "n_grid": [10, 5]})");
  EXPECT_EQ(run({"experiment", "--config", invalid}).code, 1);
}

TEST(Cli, BinaryExitCodes) {
  const std::string binary = QUADFUN_CLI_PATH;
  const auto status = [&](const std::string& args) {
    const std::string command = binary + " " + args + " > /dev/null 2>&1";
    const int raw = std::system(command.c_str());
    return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  };
  EXPECT_EQ(status("rates --a sobolev:1 --b sobolev:1.5 -D 1"), 0);
  EXPECT_EQ(status("rates --a exponential:1 --b sobolev:2 -D 1"), 3);
  EXPECT_EQ(status("--no-such-flag"), 1);
  EXPECT_EQ(status("estimate --help"), 0);
}
