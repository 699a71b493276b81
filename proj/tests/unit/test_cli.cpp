#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>

#include "ruleclip/cli/cli.hpp"
#include "ruleclip/harness/metrics.hpp"

namespace fs = std::filesystem;

namespace {

struct Invocation {
  int code;
  std::string out, err;
};

Invocation run(std::vector<std::string> args) {
  args.insert(args.begin(), "ruleclip");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = ruleclip::cli::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

fs::path write_config(const std::string& name, const std::string& body) {
  const auto dir = fs::temp_directory_path() / "ruleclip_cli";
  fs::create_directories(dir);
  const auto p = dir / name;
  std::ofstream(p) << body;
  return p;
}

const char* kTiny = R"([agent]
variant = ea
actor_hidden = 8
critic_hidden = 8
batch_size = 16
[rule]
m = 0
n = 0.5
[harness]
epochs = 2
train_days = 9
eval_episodes = 1
warmup_steps = 50
)";

std::vector<fs::path> artifacts(const std::string& out) {
  std::vector<fs::path> paths;
  std::istringstream is(out);
  for (std::string line; std::getline(is, line);)
    if (line.rfind("artifact: ", 0) == 0) paths.emplace_back(line.substr(10));
  return paths;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p);
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

}  // namespace

TEST(Cli, GradcheckPasses) {
  const auto r = run({"gradcheck", "--seed", "17", "--trials", "20"});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out.find("FAIL"), std::string::npos);
  EXPECT_NE(r.out.find("PASS actor penalised loss"), std::string::npos);
}

TEST(Cli, TrainZeroEpochsAndArtifactsExist) {
  const auto clean = write_config("zero.ini", std::regex_replace(kTiny, std::regex("epochs = 2"), "epochs = 0"));
  const auto out = fs::temp_directory_path() / "ruleclip_cli" / "zero_out";
  fs::remove_all(out);
  const auto r = run({"train", "--config", clean.string(), "--seed", "3", "--out", out.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto paths = artifacts(r.out);
  ASSERT_FALSE(paths.empty());
  for (const auto& p : paths) EXPECT_TRUE(fs::exists(p)) << p;
  EXPECT_EQ(slurp(out / "ea_0_0.5" / "seed_3" / "metrics.csv"), std::string(ruleclip::harness::kMetricsHeader) + "\n");
}

TEST(Cli, EvaluateIsReproducibleAndMissingCheckpointIsIoError) {
  const auto cfg = write_config("tiny.ini", kTiny);
  const auto out = fs::temp_directory_path() / "ruleclip_cli" / "eval_out";
  fs::remove_all(out);
  ASSERT_EQ(run({"train", "-c", cfg.string(), "-o", out.string()}).code, 0);
  const auto ckpt = out / "ea_0_0.5" / "seed_1" / "agent.ckpt";
  const auto a = run({"evaluate", "-c", cfg.string(), "-k", ckpt.string(), "-o", out.string()});
  const auto b = run({"evaluate", "-c", cfg.string(), "-k", ckpt.string()});
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out.substr(0, a.out.find('\n')), b.out.substr(0, b.out.find('\n')));
  EXPECT_NE(a.out.find("violation_kh"), std::string::npos);
  for (const auto& p : artifacts(a.out)) EXPECT_TRUE(fs::exists(p));

  const auto missing = run({"evaluate", "-c", cfg.string(), "-k", (out / "nope.ckpt").string()});
  EXPECT_EQ(missing.code, 3);
  EXPECT_EQ(missing.err.rfind("error: kind=io", 0), 0u) << missing.err;
}

TEST(Cli, BadConfigNamesTheKey) {
  const auto cfg = write_config("bad.ini", "[agent]\ngamma = 2\n");
  const auto r = run({"train", "--config", cfg.string()});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("error: kind=config key=agent.gamma"), std::string::npos) << r.err;

  const auto unknown = write_config("unknown.ini", "[env]\nwind = 3\n");
  const auto u = run({"export-weather", "--config", unknown.string()});
  EXPECT_EQ(u.code, 2);
  EXPECT_NE(u.err.find("key=env.wind"), std::string::npos) << u.err;
}

TEST(Cli, UnknownFlagPrintsUsage) {
  const auto r = run({"gradcheck", "--frobnicate"});
  EXPECT_NE(r.code, 0);
  EXPECT_NE(r.err.find("error: kind=usage"), std::string::npos);
  EXPECT_NE(r.err.find("Usage"), std::string::npos) << r.err;
  EXPECT_NE(run({}).code, 0);
  EXPECT_NE(run({"train", "gradcheck"}).code, 0);
}

TEST(Cli, ExportWeatherAndCompare) {
  const auto cfg = write_config("tiny.ini", kTiny);
  const auto out = fs::temp_directory_path() / "ruleclip_cli" / "weather_out";
  fs::remove_all(out);
  const auto w = run({"export-weather", "-c", cfg.string(), "-o", out.string()});
  ASSERT_EQ(w.code, 0) << w.err;
  EXPECT_TRUE(fs::exists(out / "weather.csv"));
  EXPECT_EQ(slurp(out / "weather.csv").substr(0, 24), "minute,t_out,irradiance\n");

  const auto cmp_out = fs::temp_directory_path() / "ruleclip_cli" / "cmp_out";
  fs::remove_all(cmp_out);
  const auto classical = write_config("tiny_classical.ini", std::regex_replace(kTiny, std::regex("variant = ea"), "variant = classical"));
  const auto c = run({"compare", "-c", cfg.string(), "-c", classical.string(), "-w", "2", "-o", cmp_out.string()});
  ASSERT_EQ(c.code, 0) << c.err;
  const auto paths = artifacts(c.out);
  EXPECT_EQ(paths.size(), 3u);  // report + one curve per label
  for (const auto& p : paths) EXPECT_TRUE(fs::exists(p)) << p;
}
