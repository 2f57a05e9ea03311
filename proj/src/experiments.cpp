#include "pace/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <sstream>
#include <thread>

#include "pace/json_io.hpp"

namespace pace {

void run_parallel(int jobs, std::vector<std::function<void()>> tasks) {
  jobs = std::max(1, std::min<int>(jobs, static_cast<int>(tasks.size())));
  if (jobs == 1) {
    for (auto& task : tasks) task();
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> workers;
  workers.reserve(static_cast<std::size_t>(jobs));
  for (int w = 0; w < jobs; ++w) {
    workers.emplace_back([&] {
      while (true) {
        const std::size_t i = next.fetch_add(1);
        if (i >= tasks.size()) return;
        tasks[i]();
      }
    });
  }
  for (std::thread& t : workers) t.join();
}

// ---------------------------------------------------------------------------
// Baseline comparison

CompareReport run_baseline_comparison(const Dataset& dataset, const RunConfig& base,
                                      const std::vector<Variant>& variants,
                                      const std::vector<std::uint64_t>& seeds, int jobs,
                                      const std::optional<std::filesystem::path>& out_dir) {
  CompareReport report;
  report.runs.resize(variants.size() * seeds.size());

  std::vector<std::function<void()>> tasks;
  for (std::size_t vi = 0; vi < variants.size(); ++vi) {
    for (std::size_t si = 0; si < seeds.size(); ++si) {
      const std::size_t slot = vi * seeds.size() + si;
      tasks.push_back([&, vi, si, slot] {
        RunConfig config = base;
        config.variant = variants[vi];
        config.seed = seeds[si];
        Runner runner(dataset, config);
        runner.run();
        RunRecord& record = report.runs[slot];
        record.variant = variants[vi];
        record.seed = seeds[si];
        record.metrics = runner.state().metrics;
        record.abstraction_log = runner.state().abstraction_log;
        record.composition = runner.state().composition;
        if (out_dir) {
          write_run_outputs(*out_dir / (variant_name(variants[vi]) + "_seed" +
                                        std::to_string(seeds[si])),
                            dataset, runner.state());
        }
      });
    }
  }
  run_parallel(jobs, std::move(tasks));

  // Per-step aggregates across seeds.
  for (Variant v : variants) {
    std::map<int, std::vector<double>> complexity, reward;
    for (const RunRecord& record : report.runs) {
      if (record.variant != v) continue;
      for (const EpochRow& row : record.metrics) {
        if (row.epoch == base.epochs - 1) {
          complexity[row.step].push_back(row.avg_complexity);
          reward[row.step].push_back(row.test_reward);
        }
      }
    }
    std::vector<StepAggregate>& out = report.aggregates[v];
    for (const auto& [step, values] : complexity) {
      StepAggregate agg;
      agg.step = step;
      agg.complexity = mean_ci95(values);
      agg.reward = mean_ci95(reward[step]);
      out.push_back(agg);
    }
  }

  if (out_dir) {
    std::filesystem::create_directories(*out_dir);
    std::ofstream out(*out_dir / "comparison.csv");
    out << "variant,step,complexity_mean,complexity_lo,complexity_hi,reward_mean,reward_lo,"
           "reward_hi\n";
    for (const auto& [variant, rows] : report.aggregates) {
      for (const StepAggregate& agg : rows) {
        out << variant_name(variant) << "," << agg.step << "," << agg.complexity.mean << ","
            << agg.complexity.lo << "," << agg.complexity.hi << "," << agg.reward.mean << ","
            << agg.reward.lo << "," << agg.reward.hi << "\n";
      }
    }
  }
  return report;
}

std::vector<double> end_of_step_rewards(std::span<const EpochRow> rows) {
  std::map<int, double> by_step;
  for (const EpochRow& row : rows) by_step[row.step] = row.test_reward;  // last epoch wins
  std::vector<double> out;
  for (const auto& [step, reward] : by_step) out.push_back(reward);
  return out;
}

std::vector<double> post_abstraction_drops(std::span<const EpochRow> rows) {
  std::map<int, double> end_reward, min_reward;
  for (const EpochRow& row : rows) {
    end_reward[row.step] = row.test_reward;
    auto it = min_reward.find(row.step);
    if (it == min_reward.end()) {
      min_reward[row.step] = row.test_reward;
    } else {
      it->second = std::min(it->second, row.test_reward);
    }
  }
  std::vector<double> drops;
  for (const auto& [step, reward] : end_reward) {
    auto next = min_reward.find(step + 1);
    if (next != min_reward.end()) drops.push_back(reward - next->second);
  }
  return drops;
}

// ---------------------------------------------------------------------------
// Adoption sweep

SweepReport run_adoption_sweep(const Dataset& dataset, const RunConfig& base,
                               const std::vector<int>& buckets, int total_arm_budget,
                               int budget_epochs, int max_arms_per_group, int jobs,
                               const std::optional<std::filesystem::path>& out_dir) {
  // Base run with snapshots where the lexicon first reaches each bucket size.
  std::map<int, RunState> snapshots;
  {
    Runner runner(dataset, base);
    std::vector<int> wanted = buckets;
    std::sort(wanted.begin(), wanted.end());
    for (int step = 0; step < base.steps && !wanted.empty(); ++step) {
      for (int epoch = 0; epoch < base.epochs; ++epoch) {
        runner.run_epoch(runner.generate_transitions());
      }
      const int lex = static_cast<int>(runner.state().lexicon.size());
      if (!wanted.empty() && lex >= wanted.front()) {
        snapshots.emplace(wanted.front(), runner.state());
        wanted.erase(wanted.begin());
      }
      runner.abstraction_phase();
      runner.state().step += 1;
    }
    // Any bucket the run never reached keeps the final pre-abstraction state.
    for (int missing : wanted) snapshots.emplace(missing, runner.state());
  }

  struct ArmSpec {
    int bucket;
    Candidate cand;
  };
  std::vector<ArmSpec> specs;
  const int per_snapshot =
      std::max(1, total_arm_budget / std::max(1, static_cast<int>(snapshots.size())));
  Rng sample_rng(base.seed ^ 0x7377656570ull);

  for (auto& [bucket, snapshot] : snapshots) {
    Runner probe(dataset, snapshot);
    const std::vector<Program> preferred = probe.preferred_programs();
    std::vector<Candidate> candidates = extract_candidates(
        preferred, snapshot.lexicon, snapshot.config.max_window, dataset.split.train);

    // Group by (size, power-of-two frequency bucket) and sample a few per group.
    std::map<std::pair<int, int>, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      const int freq_bucket =
          static_cast<int>(std::floor(std::log2(std::max(1, candidates[i].frequency))));
      groups[{candidates[i].size, freq_bucket}].push_back(i);
    }
    std::vector<std::pair<int, int>> group_keys;
    for (const auto& [key, members] : groups) group_keys.push_back(key);
    std::shuffle(group_keys.begin(), group_keys.end(), sample_rng);

    int taken = 0;
    for (const auto& key : group_keys) {
      if (taken >= per_snapshot) break;
      std::vector<std::size_t> members = groups[key];
      std::shuffle(members.begin(), members.end(), sample_rng);
      const int from_group = std::min<int>(
          {max_arms_per_group, static_cast<int>(members.size()), per_snapshot - taken});
      for (int k = 0; k < from_group; ++k) {
        specs.push_back({bucket, candidates[members[static_cast<std::size_t>(k)]]});
        ++taken;
      }
    }
  }

  SweepReport report;
  report.arms.resize(specs.size());
  std::vector<std::function<void()>> tasks;
  for (std::size_t i = 0; i < specs.size(); ++i) {
    tasks.push_back([&, i] {
      const ArmSpec& spec = specs[i];
      Runner arm(dataset, snapshots.at(spec.bucket));
      const int action_id = arm.inject_abstraction(spec.cand);
      for (int epoch = 0; epoch < budget_epochs; ++epoch) {
        arm.run_epoch(arm.generate_transitions());
      }
      SweepArm& out = report.arms[i];
      out.bucket = spec.bucket;
      {
        std::ostringstream key_text;
        for (std::size_t k = 0; k < spec.cand.key.size(); ++k) {
          if (k) key_text << " ";
          key_text << (spec.cand.key[k].orientation == Orientation::Horizontal ? "H" : "V")
                   << "(" << spec.cand.key[k].offset.dcol << "," << spec.cand.key[k].offset.drow
                   << ")";
        }
        out.key = key_text.str();
      }
      out.size = spec.cand.size;
      out.frequency = spec.cand.frequency;
      out.adopted = arm.greedy_usage(action_id) > 0;
      out.final_avg_complexity = arm.evaluate().avg_complexity;
      out.final_lexicon_size = static_cast<int>(arm.state().lexicon.size());
    });
  }
  run_parallel(jobs, std::move(tasks));

  std::map<int, std::pair<int, int>> tally;  // bucket -> (adopted, total)
  for (const SweepArm& arm : report.arms) {
    auto& [adopted, total] = tally[arm.bucket];
    adopted += arm.adopted ? 1 : 0;
    total += 1;
  }
  for (const auto& [bucket, counts] : tally) {
    report.adoption_rate[bucket] =
        counts.second > 0 ? static_cast<double>(counts.first) / counts.second : 0.0;
  }

  if (out_dir) {
    std::filesystem::create_directories(*out_dir);
    std::ofstream out(*out_dir / "sweep.csv");
    out << "bucket,key,size,frequency,adopted,final_avg_complexity,final_lexicon_size\n";
    for (const SweepArm& arm : report.arms) {
      out << arm.bucket << ",\"" << arm.key << "\"," << arm.size << "," << arm.frequency << ","
          << (arm.adopted ? 1 : 0) << "," << arm.final_avg_complexity << ","
          << arm.final_lexicon_size << "\n";
    }
    std::ofstream rates(*out_dir / "adoption_rates.csv");
    rates << "bucket,adoption_rate\n";
    for (const auto& [bucket, rate] : report.adoption_rate) {
      rates << bucket << "," << rate << "\n";
    }
  }
  return report;
}

// ---------------------------------------------------------------------------
// Efficiency frontier

namespace {

double total_mdl(const Lexicon& lexicon, std::span<const std::vector<PrimitiveBlock>> flats) {
  double total = 0.0;
  for (const auto& prims : flats) total += mdl_of_prims(prims, lexicon);
  return total;
}

}  // namespace

std::vector<FrontierPoint> compute_frontier(std::span<const Candidate> pool,
                                            std::span<const Program> programs,
                                            const Lexicon& base, int max_size, int beam_width) {
  std::vector<std::vector<PrimitiveBlock>> flats;
  flats.reserve(programs.size());
  for (const Program& p : programs) flats.push_back(flatten(p, base));

  struct BeamEntry {
    Lexicon lexicon;
    std::vector<char> used;  // pool membership flags
    double total = 0.0;
  };
  BeamEntry root;
  root.lexicon = base;
  root.used.assign(pool.size(), 0);
  root.total = total_mdl(base, flats);

  std::vector<FrontierPoint> frontier;
  const double n = static_cast<double>(programs.size());
  frontier.push_back({static_cast<int>(base.size()), root.total / n});

  std::vector<BeamEntry> beam{std::move(root)};
  for (int size = static_cast<int>(base.size()) + 1; size <= max_size; ++size) {
    std::vector<BeamEntry> next;
    for (const BeamEntry& entry : beam) {
      for (std::size_t c = 0; c < pool.size(); ++c) {
        if (entry.used[c]) continue;
        BeamEntry child;
        child.lexicon = entry.lexicon;
        child.lexicon.push_back(make_abstraction(static_cast<int>(child.lexicon.size()),
                                                 "f" + std::to_string(child.lexicon.size()),
                                                 pool[c].expansion, child.lexicon));
        child.used = entry.used;
        child.used[c] = 1;
        child.total = total_mdl(child.lexicon, flats);
        next.push_back(std::move(child));
      }
    }
    if (next.empty()) break;
    std::stable_sort(next.begin(), next.end(),
                     [](const BeamEntry& a, const BeamEntry& b) { return a.total < b.total; });
    if (static_cast<int>(next.size()) > beam_width) {
      next.resize(static_cast<std::size_t>(beam_width));
    }
    frontier.push_back({size, next.front().total / n});
    beam = std::move(next);
  }
  return frontier;
}

std::vector<FrontierPoint> dataset_frontier(const Dataset& dataset, int max_size, int max_pool,
                                            int beam_width) {
  const Lexicon base = initial_lexicon();
  std::vector<Program> programs;
  programs.reserve(dataset.split.train.size());
  for (int id : dataset.split.train) {
    programs.push_back(dataset.scene(id).canonical_program);
  }
  std::vector<Candidate> pool = extract_candidates(programs, base, 6, dataset.split.train);
  if (static_cast<int>(pool.size()) > max_pool) {
    std::stable_sort(pool.begin(), pool.end(), [](const Candidate& a, const Candidate& b) {
      if (a.frequency != b.frequency) return a.frequency > b.frequency;
      return a.key < b.key;
    });
    pool.resize(static_cast<std::size_t>(max_pool));
  }
  return compute_frontier(pool, programs, base, max_size, beam_width);
}

// ---------------------------------------------------------------------------
// Q-init study

QInitReport run_qinit_study(const Dataset& dataset, const RunConfig& base, int n_seeds, int jobs,
                            const std::optional<std::filesystem::path>& out_dir) {
  const PrimSeq tower{{Orientation::Vertical, Offset{0, 0}}, {Orientation::Vertical, Offset{0, 2}}};

  QInitReport report;
  report.regret_pessimistic.resize(static_cast<std::size_t>(n_seeds));
  report.regret_optimistic.resize(static_cast<std::size_t>(n_seeds));

  std::vector<std::function<void()>> tasks;
  for (int s = 0; s < n_seeds; ++s) {
    tasks.push_back([&, s] {
      RunConfig config = base;
      config.variant = Variant::Pace;
      config.seed = base.seed + static_cast<std::uint64_t>(s);
      Runner runner(dataset, config);
      for (int epoch = 0; epoch < config.epochs; ++epoch) {
        runner.run_epoch(runner.generate_transitions());
      }

      // Locate the tower among this state's candidates.
      const std::vector<Program> preferred = runner.preferred_programs();
      const std::vector<Candidate> candidates = extract_candidates(
          preferred, runner.state().lexicon, config.max_window, dataset.split.train);
      const Candidate* tower_cand = nullptr;
      for (const Candidate& cand : candidates) {
        if (cand.key == tower) {
          tower_cand = &cand;
          break;
        }
      }
      if (tower_cand == nullptr) {
        throw GridError("tower candidate not present in this dataset's programs");
      }

      const RunState snapshot = runner.state();
      auto window_regret = [&](double q_init_value) {
        Runner arm(dataset, snapshot);
        const int action_id = arm.inject_abstraction(*tower_cand);
        arm.state().qtable.values[static_cast<std::size_t>(action_id)] = q_init_value;
        const double before = arm.state().regret;
        for (int epoch = 0; epoch < config.epochs; ++epoch) {
          arm.run_epoch(arm.generate_transitions());
        }
        return arm.state().regret - before;
      };
      report.regret_pessimistic[static_cast<std::size_t>(s)] = window_regret(0.0);
      report.regret_optimistic[static_cast<std::size_t>(s)] = window_regret(1.0);
    });
  }
  run_parallel(jobs, std::move(tasks));

  report.test = paired_one_sided_less(report.regret_pessimistic, report.regret_optimistic);

  if (out_dir) {
    std::filesystem::create_directories(*out_dir);
    std::ofstream out(*out_dir / "qinit.csv");
    out << "seed,regret_pessimistic,regret_optimistic\n";
    for (int s = 0; s < n_seeds; ++s) {
      out << (base.seed + static_cast<std::uint64_t>(s)) << ","
          << report.regret_pessimistic[static_cast<std::size_t>(s)] << ","
          << report.regret_optimistic[static_cast<std::size_t>(s)] << "\n";
    }
    nlohmann::json j{{"mean_pessimistic", mean_ci95(report.regret_pessimistic).mean},
                     {"mean_optimistic", mean_ci95(report.regret_optimistic).mean},
                     {"t", report.test.t},
                     {"dof", report.test.dof},
                     {"p_one_sided", report.test.p_one_sided}};
    std::ofstream summary(*out_dir / "qinit_summary.json");
    summary << j.dump(1) << "\n";
  }
  return report;
}

std::vector<TracePoint> trace_abstraction(std::span<const QTraceRow> rows, int action_id) {
  std::vector<TracePoint> out;
  for (const QTraceRow& row : rows) {
    if (row.action == action_id) out.push_back({row.step, row.epoch, row.q, row.usage});
  }
  if (out.empty()) {
    throw UnknownAction("action " + std::to_string(action_id) + " has no trace rows");
  }
  return out;
}

}  // namespace pace
