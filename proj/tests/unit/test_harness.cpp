#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "ruleclip/agents/checkpoint.hpp"
#include "ruleclip/error.hpp"
#include "ruleclip/harness/compare.hpp"
#include "ruleclip/harness/episodes.hpp"
#include "ruleclip/harness/metrics.hpp"
#include "ruleclip/harness/run_config.hpp"
#include "ruleclip/harness/trainer.hpp"

using namespace ruleclip;
using namespace ruleclip::harness;
namespace fs = std::filesystem;

namespace {

// Small enough to train a few epochs in well under a second.
RunConfig tiny(agents::Variant v = agents::Variant::ea) {
  RunConfig c;
  c.agent.variant = v;
  c.agent.lambda = agents::AgentConfig::default_lambda(v);
  c.agent.actor_hidden = {16};
  c.agent.critic_hidden = {16};
  c.agent.batch_size = 32;
  c.rule = {0, 0.5};
  c.harness.epochs = 4;
  c.harness.train_days = 12;
  c.harness.eval_episodes = 2;
  c.harness.warmup_steps = 100;
  c.harness.save_checkpoint = true;
  return c;
}

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("ruleclip_harness_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

std::string config_error_key(const std::string& text) {
  try {
    parse_run_config(text);
  } catch (const ConfigError& e) {
    return e.key();
  }
  return "none";
}

RunRecord record(const std::string& label, const std::string& variant, std::uint64_t seed, std::optional<int> epochs,
                 int cadence = 1) {
  RunRecord r;
  r.label = label;
  r.variant = variant;
  r.seed = seed;
  r.eval_every = cadence;
  r.epochs_to_threshold = epochs;
  r.rows = {{.epoch = 1, .mean_test_reward = -1.0}, {.epoch = 2, .mean_test_reward = -0.5}};
  r.best_test_reward = -0.5;
  return r;
}

}  // namespace

TEST(RunConfig, ParsesSectionsAndDefaults) {
  const auto c = parse_run_config(R"(
[agent]
variant = rs
actor_hidden = 32,32
[rule]
m = 0
n = 0.25
[env]
alpha = 0.1
comfort_schedule = 00:00-00:00 21 25
[harness]
seeds = 1, 2, 3
epochs = 50
)");
  EXPECT_EQ(c.agent.variant, agents::Variant::rs);
  EXPECT_EQ(c.agent.lambda, 10.0);
  EXPECT_EQ(c.agent.actor_hidden, (std::vector<std::size_t>{32, 32}));
  EXPECT_EQ(c.rule.saturation_margin, 0.25);
  EXPECT_EQ(c.env.energy_weight, 0.1);
  EXPECT_EQ(c.env.schedule.bounds_at(600), std::pair(21.0, 25.0));
  EXPECT_EQ(c.harness.seeds, (std::vector<std::uint64_t>{1, 2, 3}));
  EXPECT_EQ(c.label(), "rs_0_0.25");
  EXPECT_EQ(parse_run_config("[agent]\nvariant = ea\n").agent.lambda, 100.0);
  EXPECT_EQ(parse_run_config("[agent]\nvariant = ea\nlambda = 3\n").agent.lambda, 3.0);
  EXPECT_EQ(parse_run_config("").label(), "classical");
}

TEST(RunConfig, RejectsUnknownAndInvalidEntriesByKey) {
  EXPECT_EQ(config_error_key("[agent]\nlearning_speed = 3\n"), "agent.learning_speed");
  EXPECT_EQ(config_error_key("[optimizer]\nlr = 3\n"), "optimizer");
  EXPECT_EQ(config_error_key("[agent]\ngamma = 1.5\n"), "agent.gamma");
  EXPECT_EQ(config_error_key("[agent]\ngamma = fast\n"), "agent.gamma");
  EXPECT_EQ(config_error_key("[rule]\nm = 1\nn = 1\n"), "rule.n");
  EXPECT_EQ(config_error_key("[harness]\nseeds = 1, 1\n"), "harness.seeds");
  EXPECT_EQ(config_error_key("[env]\nstep_minutes = 7\n"), "env.step_minutes");
  EXPECT_EQ(config_error_key("[env]\ncomfort_schedule = 00:00-12:00 20 24\n"), "env.comfort_schedule");
  // Band narrower than 2m would let a_min exceed a_max.
  EXPECT_EQ(config_error_key("[rule]\nm = 2.5\nn = 3\n"), "rule.m");
}

TEST(RunConfig, IniRoundTrip) {
  auto c = tiny(agents::Variant::rs);
  c.agent.lambda = 7.5;
  c.harness.seeds = {4, 9};
  c.env.schedule = env::ComfortSchedule::parse("06:00-18:00 20 24; 18:00-06:00 19 23");
  const auto back = parse_run_config(to_ini(c));
  EXPECT_EQ(to_ini(back), to_ini(c));
  EXPECT_EQ(back.agent.lambda, 7.5);
  EXPECT_EQ(back.harness.seeds, c.harness.seeds);
}

TEST(EpisodePlan, EvaluationDisjointFromTraining) {
  for (std::uint64_t ws : {1u, 2u, 2024u}) {
    auto cfg = tiny();
    cfg.weather_seed = ws;
    cfg.harness.eval_episodes = 5;
    EXPECT_THROW(RunContext{cfg}, ConfigError);  // 12 days split 6 ways leaves no 3-day gap
    cfg.harness.train_days = 30;
    const RunContext ctx(cfg);
    const auto steps = static_cast<std::size_t>(cfg.env.episode_steps());
    ASSERT_EQ(ctx.plan.evaluation.size(), 5u);
    ASSERT_FALSE(ctx.plan.training_starts.empty());
    std::set<std::size_t> eval_steps;
    for (const auto& e : ctx.plan.evaluation)
      for (std::size_t k = e.start_index; k < e.start_index + steps; ++k) eval_steps.insert(k);
    for (auto s : ctx.plan.training_starts)
      for (std::size_t k = s; k < s + steps; ++k) ASSERT_FALSE(eval_steps.count(k)) << "start " << s;
    EXPECT_EQ(ctx.weather->size(), static_cast<std::size_t>((30 + 5 * 3) * 96 + 1));
  }
}

TEST(Metrics, CsvFormatAndReadBack) {
  const auto dir = scratch("metrics");
  fs::create_directories(dir);
  {
    MetricsWriter w(dir / "m.csv");
    w.write({.epoch = 1, .mean_test_reward = -0.1, .violation_kh = 2.5});
    w.write({.epoch = 2, .mean_test_reward = 1.0 / 3.0});
  }
  const auto text = slurp(dir / "m.csv");
  EXPECT_EQ(text.substr(0, text.find('\n')), kMetricsHeader);
  const auto rows = read_metrics_csv(dir / "m.csv");
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[1].mean_test_reward, 1.0 / 3.0);  // %.17g round-trips
  EXPECT_EQ(rows[0].violation_kh, 2.5);

  RunMetrics m;
  m.threshold = -0.4;
  m.add({.epoch = 1, .mean_test_reward = -1.0});
  EXPECT_FALSE(m.epochs_to_threshold);
  m.add({.epoch = 2, .mean_test_reward = -0.4});
  m.add({.epoch = 3, .mean_test_reward = -0.2});
  EXPECT_EQ(m.epochs_to_threshold, 2);
  EXPECT_EQ(m.best_epoch, 3);
  EXPECT_EQ(m.best_test_reward, -0.2);
}

TEST(Train, ZeroEpochsWritesHeaderOnly) {
  auto cfg = tiny();
  cfg.harness.epochs = 0;
  const auto dir = scratch("zero");
  const auto run = train(cfg, 1, dir);
  EXPECT_EQ(slurp(dir / "metrics.csv"), std::string(kMetricsHeader) + "\n");
  EXPECT_TRUE(run.metrics.rows.empty());
  const auto summary = nlohmann::json::parse(slurp(dir / "summary.json"));
  EXPECT_TRUE(summary["epochs_to_threshold"].is_null());
}

TEST(Train, SameSeedSameBytesDifferentSeedDifferentBytes) {
  const auto cfg = tiny();
  const auto a = scratch("det_a"), b = scratch("det_b"), c = scratch("det_c");
  train(cfg, 3, a);
  train(cfg, 3, b);
  train(cfg, 4, c);
  EXPECT_EQ(slurp(a / "metrics.csv"), slurp(b / "metrics.csv"));
  EXPECT_EQ(slurp(a / "agent.ckpt"), slurp(b / "agent.ckpt"));
  EXPECT_NE(slurp(a / "metrics.csv"), slurp(c / "metrics.csv"));
}

TEST(Train, RowsAreContiguousAtCadence) {
  auto cfg = tiny();
  cfg.harness.epochs = 6;
  cfg.harness.eval_every = 2;
  const auto run = train(cfg, 1, std::nullopt);
  ASSERT_EQ(run.metrics.rows.size(), 3u);
  for (std::size_t k = 0; k < run.metrics.rows.size(); ++k) EXPECT_EQ(run.metrics.rows[k].epoch, 2 * int(k + 1));
}

TEST(Train, EaActionsStayInsideLoggedBounds) {
  auto cfg = tiny(agents::Variant::ea);
  cfg.rule = {0, 0.25};
  std::size_t train_steps = 0, eval_steps = 0;
  TrainHooks hooks;
  hooks.on_action = [&](const ActionRecord& r) {
    ASSERT_GE(r.applied[0], r.bounds.min[0]);
    ASSERT_LE(r.applied[0], r.bounds.max[0]);
    EXPECT_EQ(r.bounds, rules::comfort_bounds(r.temperature, r.lower, r.upper, cfg.rule));
    (r.phase == Phase::eval ? eval_steps : train_steps)++;
  };
  train(cfg, 2, std::nullopt, hooks);
  EXPECT_EQ(train_steps, 4u * 96);
  EXPECT_EQ(eval_steps, 4u * 2 * 288);
}

TEST(Evaluate, PureAndRepeatable) {
  const auto cfg = tiny();
  auto run = train(cfg, 5, std::nullopt);
  const RunContext ctx(cfg);
  const agents::Agent before = *run.agent;
  const auto r1 = evaluate(*run.agent, ctx);
  const auto r2 = evaluate(*run.agent, ctx);
  EXPECT_TRUE(*run.agent == before);
  EXPECT_EQ(r1.mean_reward, r2.mean_reward);
  EXPECT_EQ(r1.violation_kh, r2.violation_kh);
  EXPECT_EQ(r1.energy_kwh, r2.energy_kwh);
  EXPECT_EQ(r1.steps, 2u * 288);
}

TEST(Evaluate, BaselineFiniteAndHeaterOffIsWorse) {
  const RunContext ctx(tiny());
  const auto base = evaluate_baseline(ctx);
  EXPECT_TRUE(std::isfinite(base.mean_reward));
  const auto off = evaluate_decider(*ctx.environment, ctx.plan.evaluation, [](const env::EnvState&) {
    agents::ActionChoice c;
    c.raw = c.applied = {-1.0};
    c.bounds = {{-1}, {1}};
    return c;
  });
  EXPECT_LT(off.mean_reward, base.mean_reward);
  EXPECT_GT(off.violation_kh, 10.0);
  EXPECT_EQ(off.energy_kwh, 0.0);
}

TEST(Compare, SelfComparisonAndRatios) {
  auto self = build_report({record("classical", "classical", 1, 40), record("classical", "classical", 2, 40)});
  ASSERT_EQ(self.labels.size(), 1u);
  EXPECT_EQ(*self.labels[0].speedup_vs_classical, 1.0);

  const auto paper_shape = build_report({record("classical", "classical", 1, 200), record("ea_0_0.25", "ea", 1, 29)});
  EXPECT_NEAR(*paper_shape.labels[1].speedup_vs_classical, 200.0 / 29.0, 1e-12);
  EXPECT_NEAR(*paper_shape.labels[1].speedup_vs_classical, 6.9, 0.01);

  const auto stuck = build_report({record("classical", "classical", 1, 50), record("rs_0_0.1", "rs", 1, std::nullopt),
                                   record("rs_0_0.1", "rs", 2, 30)});
  const auto& rs = stuck.labels[1];
  EXPECT_EQ(rs.converged, 1u);
  EXPECT_EQ(*rs.median_epochs_to_threshold, 30.0);
  EXPECT_NE(stuck.to_json().find("no convergence"), std::string::npos);
}

TEST(Compare, RejectsSingleRunAndMixedCadence) {
  EXPECT_THROW(build_report({record("a", "ea", 1, 3)}), UsageError);
  EXPECT_THROW(build_report({record("a", "ea", 1, 3, 1), record("b", "ea", 1, 3, 2)}), UsageError);
}

TEST(Compare, WritesReportAndCurves) {
  const auto dir = scratch("compare");
  auto cfg = tiny(agents::Variant::classical);
  cfg.harness.epochs = 2;
  cfg.harness.seeds = {1, 2};
  cfg.harness.output_dir = (dir / "runs").string();
  const auto report = compare({cfg}, 2);
  const auto paths = report.write(dir);
  for (const auto& p : paths) EXPECT_TRUE(fs::exists(p)) << p;
  const auto j = nlohmann::json::parse(slurp(dir / "report.json"));
  EXPECT_EQ(j["labels"].size(), 1u);
  EXPECT_TRUE(fs::exists(dir / "curves" / "classical.csv"));
  EXPECT_EQ(median({3, 1, 2}), 2.0);
  EXPECT_EQ(median({4, 1, 2, 3}), 2.5);
}
