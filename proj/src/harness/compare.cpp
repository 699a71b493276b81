#include "ruleclip/harness/compare.hpp"

#include <omp.h>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>

#include "json.hpp"
#include "ruleclip/error.hpp"
#include "ruleclip/harness/trainer.hpp"

namespace ruleclip::harness {

using json = nlohmann::json;

double median(std::vector<double> values) {
  if (values.empty()) throw UsageError("median of an empty list");
  std::sort(values.begin(), values.end());
  const std::size_t mid = values.size() / 2;
  return values.size() % 2 ? values[mid] : 0.5 * (values[mid - 1] + values[mid]);
}

ComparisonReport build_report(std::vector<RunRecord> runs) {
  if (runs.size() < 2) throw UsageError("compare needs at least two runs");
  for (const auto& r : runs)
    if (r.eval_every != runs.front().eval_every)
      throw UsageError("compare: runs use different evaluation cadences (" + std::to_string(r.eval_every) + " vs " +
                       std::to_string(runs.front().eval_every) + ")");

  ComparisonReport report;
  report.runs = std::move(runs);
  std::map<std::string, LabelSummary> by_label;
  for (const auto& r : report.runs) {
    auto& s = by_label[r.label];
    s.label = r.label;
    s.variant = r.variant;
    s.runs.push_back(&r);
  }
  std::vector<double> classical;
  for (auto& [label, s] : by_label) {
    std::vector<double> epochs;
    for (const RunRecord* r : s.runs) {
      if (r->epochs_to_threshold) epochs.push_back(*r->epochs_to_threshold);
      if (r->best_test_reward && (!s.best_reward || *r->best_test_reward > *s.best_reward)) s.best_reward = r->best_test_reward;
    }
    s.converged = epochs.size();
    if (!epochs.empty()) s.median_epochs_to_threshold = median(epochs);
    if (s.variant == "classical") classical.insert(classical.end(), epochs.begin(), epochs.end());
  }
  if (!classical.empty()) report.classical_median = median(classical);
  for (auto& [label, s] : by_label) {
    if (report.classical_median && s.median_epochs_to_threshold && *s.median_epochs_to_threshold > 0)
      s.speedup_vs_classical = *report.classical_median / *s.median_epochs_to_threshold;
    report.labels.push_back(std::move(s));
  }
  return report;
}

namespace {

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

}  // namespace

std::string ComparisonReport::to_json() const {
  json j;
  j["x_axis"] = "training days (1 epoch = 1 day of training steps)";
  j["threshold_source"] = "hysteresis thermostat on the evaluation set";
  std::set<double> thresholds;
  for (const auto& r : runs) thresholds.insert(r.threshold);
  j["thresholds"] = std::vector<double>(thresholds.begin(), thresholds.end());
  j["classical_median_epochs_to_threshold"] = optional_json(classical_median);
  j["labels"] = json::array();
  for (const auto& s : labels) {
    json l{{"label", s.label},
           {"variant", s.variant},
           {"runs", json::array()},
           {"converged", s.converged},
           {"median_epochs_to_threshold", optional_json(s.median_epochs_to_threshold)},
           {"speedup_vs_classical", optional_json(s.speedup_vs_classical)},
           {"best_reward", optional_json(s.best_reward)}};
    for (const RunRecord* r : s.runs) {
      l["runs"].push_back({{"seed", r->seed},
                           {"threshold", r->threshold},
                           {"epochs_to_threshold", r->epochs_to_threshold ? json(*r->epochs_to_threshold)
                                                                          : json("no convergence")},
                           {"best_test_reward", optional_json(r->best_test_reward)}});
    }
    j["labels"].push_back(std::move(l));
  }
  return j.dump(2) + "\n";
}

std::vector<std::filesystem::path> ComparisonReport::write(const std::filesystem::path& directory) const {
  std::vector<std::filesystem::path> written;
  std::filesystem::create_directories(directory / "curves");
  {
    const auto path = directory / "report.json";
    std::ofstream os(path);
    os << to_json();
    if (!os) throw IoError("failed writing " + path.string());
    written.push_back(path);
  }
  for (const auto& s : labels) {
    std::string name = s.label;
    for (char& c : name)
      if (c == '/' || c == ' ') c = '_';
    const auto path = directory / "curves" / (name + ".csv");
    std::ofstream os(path);
    os << "epoch";
    for (const RunRecord* r : s.runs) os << ",seed_" << r->seed;
    os << ",mean\n";
    std::map<int, std::vector<std::optional<double>>> table;
    for (std::size_t k = 0; k < s.runs.size(); ++k)
      for (const auto& row : s.runs[k]->rows) {
        auto& cells = table[row.epoch];
        cells.resize(s.runs.size());
        cells[k] = row.mean_test_reward;
      }
    for (auto& [epoch, cells] : table) {
      cells.resize(s.runs.size());
      os << epoch;
      double sum = 0.0;
      int count = 0;
      for (const auto& c : cells) {
        os << ',';
        if (c) {
          char buf[40];
          std::snprintf(buf, sizeof buf, "%.17g", *c);
          os << buf;
          sum += *c;
          ++count;
        }
      }
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.17g", count ? sum / count : 0.0);
      os << ',' << buf << '\n';
    }
    if (!os) throw IoError("failed writing " + path.string());
    written.push_back(path);
  }
  return written;
}

ComparisonReport compare(const std::vector<RunConfig>& configs, int workers) {
  if (workers < 1) throw UsageError("compare: worker count must be >= 1");
  struct Job {
    const RunConfig* cfg;
    std::uint64_t seed;
  };
  std::vector<Job> jobs;
  for (const auto& c : configs)
    for (auto seed : c.harness.seeds) jobs.push_back({&c, seed});
  if (jobs.size() < 2) throw UsageError("compare needs at least two runs");
  for (const auto& c : configs)
    if (c.harness.eval_every != configs.front().harness.eval_every)
      throw UsageError("compare: configs use different evaluation cadences");

  std::vector<RunRecord> records(jobs.size());
  std::vector<std::string> errors(jobs.size());
  const int n_jobs = static_cast<int>(jobs.size());
#pragma omp parallel for schedule(dynamic, 1) num_threads(workers)
  for (int k = 0; k < n_jobs; ++k) {
    const Job& job = jobs[static_cast<std::size_t>(k)];
    try {
      RunResult run = train(*job.cfg, job.seed, run_directory(*job.cfg, job.seed));
      RunRecord& rec = records[static_cast<std::size_t>(k)];
      rec.label = run.label;
      rec.variant = agents::to_string(job.cfg->agent.variant);
      rec.seed = job.seed;
      rec.eval_every = job.cfg->harness.eval_every;
      rec.threshold = run.metrics.threshold;
      rec.rows = run.metrics.rows;
      rec.epochs_to_threshold = run.metrics.epochs_to_threshold;
      rec.best_test_reward = run.metrics.best_test_reward;
    } catch (const std::exception& e) {
      errors[static_cast<std::size_t>(k)] = e.what();
    }
  }
  for (const auto& e : errors)
    if (!e.empty()) throw std::runtime_error("compare: a run failed: " + e);
  return build_report(std::move(records));
}

}  // namespace ruleclip::harness
