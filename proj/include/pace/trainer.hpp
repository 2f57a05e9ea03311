// Run orchestration: alternating communication epochs and abstraction phases
// over a scene dataset, with per-epoch metrics.
#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pace/abstraction.hpp"
#include "pace/bandit.hpp"
#include "pace/net.hpp"
#include "pace/shapes.hpp"
#include "pace/symlang.hpp"

namespace pace {

enum class Variant { Pace, NoAbstractions, Greedy };

std::string variant_name(Variant v);
Variant parse_variant(const std::string& name);

struct RunConfig {
  int steps = 20;
  int epochs = 40;
  double alpha = 0.5;
  double gamma = 0.99;
  double epsilon = 0.1;
  double q_init = 0.0;
  double lr = 0.0009;
  int batch = 32;
  double tau = 1.0;
  double lambda_ps = 0.1;
  double beta_ps = 1.0;
  int vocab = 30;
  int hidden = 200;
  int n_cap = 64;
  int prune_keep = 3;
  int max_window = 6;
  std::uint64_t seed = 0;
  Variant variant = Variant::Pace;
};

struct Transition {
  Grid x;
  int action = 0;
  Cell anchor;
  Grid x_next;
};

struct EpochMetrics {
  double loss = 0.0;
  double reward = 0.0;
  std::map<int, double> action_reward_mean;
};

struct EvalResult {
  double test_reward = 0.0;
  double avg_complexity = 0.0;
};

struct EpochRow {
  int step = 0;
  int epoch = 0;
  double train_loss = 0.0;
  double train_reward = 0.0;
  double test_reward = 0.0;
  double avg_complexity = 0.0;
  int lexicon_size = 0;
  double cumulative_regret = 0.0;
};

struct AbstractionRecord {
  int step = 0;
  bool skipped = true;
  int action_id = -1;
  std::string key;
  int size = 0;
  int frequency = 0;
  double score = 0.0;
};

struct QTraceRow {
  int step = 0;
  int epoch = 0;
  int action = 0;
  double q = 0.0;
  long usage = 0;  // occurrences in this epoch's selected programs
};

struct MessageUsageRow {
  int step = 0;
  int epoch = 0;
  int action = 0;
  int message = 0;
  long count = 0;
};

struct CompositionRow {
  int step = 0;
  double primitive_frac = 0.0;
  double shape_frac = 0.0;
  double subshape_frac = 0.0;
};

struct RunState {
  RunConfig config;
  Lexicon lexicon;
  ProgramTable table;  // indexed by scene id, test scenes included
  QTable qtable;
  Agents agents;
  AdamState<double> architect_opt;
  AdamState<double> builder_opt;
  Rng rng;
  Rng eval_rng;  // greedy tie-breaks during evaluation, kept off the training stream
  int step = 0;
  double regret = 0.0;  // cumulative over training transitions

  std::vector<EpochRow> metrics;
  std::vector<AbstractionRecord> abstraction_log;
  std::vector<QTraceRow> qtrace;
  std::vector<MessageUsageRow> message_usage;
  std::vector<CompositionRow> composition;
};

// Occurrence-weighted action classes over a program selection: primitives,
// whole dataset shapes (by footprint), and other sub-shapes.
struct LanguageComposition {
  double primitive_frac = 0.0;
  double shape_frac = 0.0;
  double subshape_frac = 0.0;
};
LanguageComposition language_composition(const Lexicon& lexicon,
                                         const std::vector<Shape>& shapes,
                                         std::span<const Program> selected_programs);

class Runner {
 public:
  Runner(const Dataset& dataset, const RunConfig& config);
  Runner(const Dataset& dataset, RunState state);

  const RunState& state() const { return state_; }
  RunState& state() { return state_; }
  const Dataset& dataset() const { return *dataset_; }

  // One epoch's signalling-game dataset, chosen by the variant's bandit policy
  // and shuffled.
  std::vector<Transition> generate_transitions();

  EpochMetrics run_epoch(const std::vector<Transition>& transitions);

  // Greedy program per training scene under the variant's evaluation policy.
  std::vector<Program> preferred_programs();

  EvalResult evaluate();

  // Prune, mine candidates, select, apply; records the outcome either way.
  AbstractionRecord abstraction_phase();

  void run_step();
  void run(bool log_progress = false);

  // Forces `cand` into the lexicon the way an abstraction phase would.
  int inject_abstraction(const Candidate& cand);

  // Occurrences of `action` across the current greedy-selected training programs.
  long greedy_usage(int action);

 private:
  std::size_t select_arm_for_training(const std::vector<Program>& arms);
  std::size_t select_arm_greedy(const std::vector<Program>& arms, Rng& rng);
  std::vector<Transition> program_transitions(const Program& program) const;

  const Dataset* dataset_;
  RunState state_;
  std::map<int, long> epoch_usage_;  // action id -> selections this epoch
};

void save_checkpoint(const RunState& state, const std::filesystem::path& file);
RunState load_checkpoint(const std::filesystem::path& file);

// Writes metrics.csv, qtrace.csv, message_usage.csv, composition.csv,
// abstractions.jsonl, lexicon.json and manifest.json under `run_dir`.
void write_run_outputs(const std::filesystem::path& run_dir, const Dataset& dataset,
                       const RunState& state);

}  // namespace pace
