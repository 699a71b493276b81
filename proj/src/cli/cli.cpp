#include "ruleclip/cli/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "json.hpp"
#include "ruleclip/agents/checkpoint.hpp"
#include "ruleclip/agents/gradcheck.hpp"
#include "ruleclip/error.hpp"
#include "ruleclip/harness/compare.hpp"
#include "ruleclip/harness/trainer.hpp"

namespace ruleclip::cli {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

std::string quoted(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c == '\n' ? ' ' : c;
  }
  return out + "\"";
}

void announce(std::ostream& out, const fs::path& p) { out << "artifact: " << p.string() << '\n'; }

harness::RunConfig load_with_overrides(const std::string& path, const std::optional<std::uint64_t>& seed,
                                       const std::optional<std::string>& out_dir) {
  harness::RunConfig cfg = harness::load_run_config(path);
  if (seed) cfg.harness.seeds = {*seed};
  if (out_dir) cfg.harness.output_dir = *out_dir;
  return cfg;
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream os(path);
  os << text;
  if (!os) throw IoError("failed writing " + path.string());
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Rule-constrained TD3 agents on a room temperature control task"};
  app.require_subcommand(1, 1);

  std::string config_path, checkpoint_path;
  std::vector<std::string> compare_configs;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  int workers = 1, trials = 20;

  auto* train = app.add_subcommand("train", "Train every seed of a run config; writes metrics, summary, checkpoint");
  train->add_option("-c,--config", config_path, "Run config (INI)")->required()->check(CLI::ExistingFile);
  train->add_option("-s,--seed", seed, "Train only this seed");
  train->add_option("-o,--out", out_dir, "Output directory (overrides harness.output_dir)");

  auto* evaluate = app.add_subcommand("evaluate", "Evaluate a checkpoint: reward, violation (Kh), energy (kWh)");
  evaluate->add_option("-c,--config", config_path, "Run config the checkpoint was trained with")->required()->check(CLI::ExistingFile);
  evaluate->add_option("-k,--checkpoint", checkpoint_path, "Agent checkpoint")->required();
  evaluate->add_option("-s,--seed", seed, "Unused; accepted for symmetry");
  evaluate->add_option("-o,--out", out_dir, "Directory for evaluation.json");

  auto* compare = app.add_subcommand("compare", "Train several configs and compare convergence speed");
  compare->add_option("-c,--config", compare_configs, "Run configs (repeatable)")->required()->check(CLI::ExistingFile);
  compare->add_option("-s,--seed", seed, "Use this single seed for every config");
  compare->add_option("-o,--out", out_dir, "Directory for runs, report.json and curves/");
  compare->add_option("-w,--workers", workers, "Concurrent runs")->check(CLI::PositiveNumber);

  auto* gradcheck = app.add_subcommand("gradcheck", "Check analytic gradients against finite differences");
  gradcheck->add_option("-c,--config", config_path, "Unused; accepted for symmetry");
  gradcheck->add_option("-s,--seed", seed, "Seed for the random networks and batches");
  gradcheck->add_option("-o,--out", out_dir, "Directory for gradcheck.json");
  gradcheck->add_option("-n,--trials", trials, "Random networks to check")->check(CLI::PositiveNumber);

  auto* weather = app.add_subcommand("export-weather", "Write the run's weather series as CSV");
  weather->add_option("-c,--config", config_path, "Run config")->required()->check(CLI::ExistingFile);
  weather->add_option("-s,--seed", seed, "Weather seed override");
  weather->add_option("-o,--out", out_dir, "Output directory (weather.csv)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    // Usage of the subcommand the user was reaching for, else the overview.
    const CLI::App* target = &app;
    if (argc > 1)
      for (const auto* sub : app.get_subcommands([](const CLI::App*) { return true; }))
        if (sub->get_name() == argv[1]) target = sub;
    err << target->help();
    err << "error: kind=usage message=" << quoted(e.what()) << '\n';
    return 2;
  }

  try {
    if (*train) {
      const auto cfg = load_with_overrides(config_path, seed, out_dir);
      for (auto s : cfg.harness.seeds) {
        const fs::path dir = harness::run_directory(cfg, s);
        const auto run = harness::train(cfg, s, dir);
        announce(out, dir / "metrics.csv");
        announce(out, dir / "summary.json");
        if (cfg.harness.save_checkpoint) announce(out, dir / "agent.ckpt");
        if (cfg.harness.log_actions) announce(out, dir / "actions.csv");
        out << "run " << run.label << " seed " << s << ": threshold " << run.metrics.threshold << ", epochs to threshold "
            << (run.metrics.epochs_to_threshold ? std::to_string(*run.metrics.epochs_to_threshold) : "none") << '\n';
      }
      return 0;
    }
    if (*evaluate) {
      const auto cfg = harness::load_run_config(config_path);
      if (!fs::exists(checkpoint_path)) throw IoError("checkpoint not found: " + checkpoint_path);
      const auto agent = agents::load_agent(checkpoint_path);
      if (agent.config().variant != cfg.agent.variant)
        throw ConfigError("agent.variant", "does not match the checkpoint's variant");
      const harness::RunContext ctx(cfg);
      const auto r = harness::evaluate(agent, ctx);
      const auto baseline = harness::evaluate_baseline(ctx);
      json j{{"mean_reward", r.mean_reward},
             {"violation_kh", r.violation_kh},
             {"energy_kwh", r.energy_kwh},
             {"saturation_fraction", r.saturation_fraction},
             {"episodes", ctx.plan.evaluation.size()},
             {"baseline_reward", baseline.mean_reward}};
      out << "reward " << r.mean_reward << " violation_kh " << r.violation_kh << " energy_kwh " << r.energy_kwh << '\n';
      if (out_dir) {
        const fs::path path = fs::path(*out_dir) / "evaluation.json";
        write_text(path, j.dump(2) + "\n");
        announce(out, path);
      }
      return 0;
    }
    if (*compare) {
      std::vector<harness::RunConfig> configs;
      for (const auto& path : compare_configs) {
        auto cfg = load_with_overrides(path, seed, std::nullopt);
        if (out_dir) cfg.harness.output_dir = (fs::path(*out_dir) / "runs").string();
        configs.push_back(std::move(cfg));
      }
      const auto report = harness::compare(configs, workers);
      const fs::path dir = out_dir ? fs::path(*out_dir) : fs::path(configs.front().harness.output_dir) / "compare";
      for (const auto& p : report.write(dir)) announce(out, p);
      for (const auto& l : report.labels) {
        out << l.label << ": converged " << l.converged << "/" << l.runs.size() << ", median epochs to threshold "
            << (l.median_epochs_to_threshold ? std::to_string(*l.median_epochs_to_threshold) : "no convergence");
        if (l.speedup_vs_classical) out << ", speedup vs classical " << *l.speedup_vs_classical;
        out << '\n';
      }
      return 0;
    }
    if (*gradcheck) {
      const auto report = agents::run_gradcheck(seed.value_or(1), trials);
      json j{{"passed", report.passed()}, {"tolerance", report.tolerance}, {"perturbation", report.perturbation}};
      for (const auto& item : report.items) {
        out << (item.passed ? "PASS " : "FAIL ") << item.name << " max_rel_err " << item.max_relative_error << " over "
            << item.entries << " entries\n";
        j["checks"].push_back({{"name", item.name},
                               {"max_relative_error", item.max_relative_error},
                               {"entries", item.entries},
                               {"passed", item.passed}});
      }
      if (out_dir) {
        const fs::path path = fs::path(*out_dir) / "gradcheck.json";
        write_text(path, j.dump(2) + "\n");
        announce(out, path);
      }
      if (!report.passed()) {
        err << "error: kind=check message=\"gradient check failed\"\n";
        return 1;
      }
      return 0;
    }
    if (*weather) {
      auto cfg = harness::load_run_config(config_path);
      if (seed) cfg.weather_seed = *seed;
      const auto series = harness::make_weather(cfg);
      const fs::path dir = out_dir ? fs::path(*out_dir) : fs::path(cfg.harness.output_dir);
      fs::create_directories(dir);
      const fs::path path = dir / "weather.csv";
      env::save_weather(path, *series);
      announce(out, path);
      return 0;
    }
  } catch (const ConfigError& e) {
    err << "error: kind=config key=" << e.key() << " message=" << quoted(e.what()) << '\n';
    return 2;
  } catch (const UsageError& e) {
    err << "error: kind=usage message=" << quoted(e.what()) << '\n';
    return 2;
  } catch (const IoError& e) {
    err << "error: kind=io message=" << quoted(e.what()) << '\n';
    return 3;
  } catch (const NumericError& e) {
    err << "error: kind=numeric message=" << quoted(e.what()) << '\n';
    return 4;
  } catch (const std::exception& e) {
    err << "error: kind=internal message=" << quoted(e.what()) << '\n';
    return 5;
  }
  return 2;
}

}  // namespace ruleclip::cli
