// Reproduction studies: baseline comparison, adoption sweep, efficiency
// frontier, and the Q-value initialization regret study.
#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pace/stats.hpp"
#include "pace/trainer.hpp"

namespace pace {

// ---------------------------------------------------------------------------
// Baseline comparison

struct RunRecord {
  Variant variant = Variant::Pace;
  std::uint64_t seed = 0;
  std::vector<EpochRow> metrics;
  std::vector<AbstractionRecord> abstraction_log;
  std::vector<CompositionRow> composition;
};

struct StepAggregate {
  int step = 0;
  MeanCi complexity;
  MeanCi reward;
};

struct CompareReport {
  std::vector<RunRecord> runs;
  std::map<Variant, std::vector<StepAggregate>> aggregates;
};

CompareReport run_baseline_comparison(const Dataset& dataset, const RunConfig& base,
                                      const std::vector<Variant>& variants,
                                      const std::vector<std::uint64_t>& seeds, int jobs,
                                      const std::optional<std::filesystem::path>& out_dir = {});

// End-of-step test reward per step, and the post-abstraction drops
// (end of step k minus the within-step minimum of step k+1).
std::vector<double> end_of_step_rewards(std::span<const EpochRow> rows);
std::vector<double> post_abstraction_drops(std::span<const EpochRow> rows);

// ---------------------------------------------------------------------------
// Adoption sweep

struct SweepArm {
  int bucket = 0;  // lexicon size at the snapshot
  std::string key;
  int size = 0;
  int frequency = 0;
  bool adopted = false;
  double final_avg_complexity = 0.0;
  int final_lexicon_size = 0;
};

struct SweepReport {
  std::vector<SweepArm> arms;
  std::map<int, double> adoption_rate;  // bucket -> adopted fraction
};

// Snapshots a base run when the lexicon first reaches each bucket size (before
// that step's abstraction phase), then trial-trains sampled candidates.
SweepReport run_adoption_sweep(const Dataset& dataset, const RunConfig& base,
                               const std::vector<int>& buckets, int total_arm_budget,
                               int budget_epochs, int max_arms_per_group, int jobs,
                               const std::optional<std::filesystem::path>& out_dir = {});

// ---------------------------------------------------------------------------
// Efficiency frontier

struct FrontierPoint {
  int lexicon_size = 0;
  double best_avg_mdl = 0.0;
};

// Greedy beam construction of the best language per size: at each size the
// pool candidate lowering total description length the most joins the beam.
std::vector<FrontierPoint> compute_frontier(std::span<const Candidate> pool,
                                            std::span<const Program> programs,
                                            const Lexicon& base, int max_size,
                                            int beam_width = 3);

// Frontier for a dataset's canonical training programs.
std::vector<FrontierPoint> dataset_frontier(const Dataset& dataset, int max_size,
                                            int max_pool = 400, int beam_width = 3);

// ---------------------------------------------------------------------------
// Q-value initialization study

struct QInitReport {
  std::vector<double> regret_pessimistic;  // per seed, window after injection
  std::vector<double> regret_optimistic;
  PairedTestResult test;  // H1: pessimistic < optimistic
};

QInitReport run_qinit_study(const Dataset& dataset, const RunConfig& base, int n_seeds, int jobs,
                            const std::optional<std::filesystem::path>& out_dir = {});

// ---------------------------------------------------------------------------
// Abstraction traces

struct TracePoint {
  int step = 0;
  int epoch = 0;
  double q = 0.0;
  long usage = 0;
};

// Per-epoch Q and selection frequency of one action; throws UnknownAction if
// the action never appears in the trace.
std::vector<TracePoint> trace_abstraction(std::span<const QTraceRow> rows, int action_id);

// Runs tasks on up to `jobs` worker threads.
void run_parallel(int jobs, std::vector<std::function<void()>> tasks);

}  // namespace pace
