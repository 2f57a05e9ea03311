#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "oracles.hpp"
#include "pace/experiments.hpp"

using namespace pace;

namespace {

RunConfig tiny_config() {
  RunConfig c;
  c.steps = 2;
  c.epochs = 2;
  c.hidden = 24;
  c.vocab = 12;
  c.n_cap = 24;
  c.seed = 0;
  return c;
}

const Dataset& tiny_dataset() {
  static const Dataset d = make_dataset(builtin_shape_library(5), 0);
  return d;
}

// Exhaustive search over candidate subsets, the frontier's reference.
double best_total_mdl_for_size(std::span<const Candidate> pool,
                               std::span<const Program> programs, const Lexicon& base,
                               int extra) {
  std::vector<int> picks(pool.size(), 0);
  double best = 1e300;
  std::vector<std::size_t> chosen;
  auto evaluate = [&]() {
    Lexicon lex = base;
    for (std::size_t i : chosen) {
      lex.push_back(make_abstraction(static_cast<int>(lex.size()), "x", pool[i].expansion, lex));
    }
    double total = 0.0;
    for (const Program& p : programs) total += mdl(p, lex);
    best = std::min(best, total);
  };
  std::function<void(std::size_t, int)> recurse = [&](std::size_t from, int left) {
    if (left == 0) {
      evaluate();
      return;
    }
    for (std::size_t i = from; i < pool.size(); ++i) {
      chosen.push_back(i);
      recurse(i + 1, left - 1);
      chosen.pop_back();
    }
  };
  recurse(0, extra);
  return best;
}

}  // namespace

TEST_CASE("statistics helpers match known values") {
  CHECK(student_t_cdf(0.0, 5) == doctest::Approx(0.5));
  CHECK(student_t_cdf(1.0, 1) == doctest::Approx(0.75).epsilon(1e-6));
  CHECK(student_t_cdf(2.0, 10) == doctest::Approx(0.963306).epsilon(1e-4));
  CHECK(student_t_cdf(-2.0, 10) == doctest::Approx(1.0 - 0.963306).epsilon(1e-3));

  std::vector<double> a{1.0, 2.0, 3.0, 4.0};
  const MeanCi ci = mean_ci95(a);
  CHECK(ci.mean == doctest::Approx(2.5));
  CHECK(ci.lo < 2.5);
  CHECK(ci.hi > 2.5);

  std::vector<double> lower{1.0, 2.0, 1.5, 1.2, 1.8, 1.1, 2.1, 1.4};
  std::vector<double> higher{2.0, 3.1, 2.4, 2.2, 3.0, 2.3, 3.2, 2.5};
  const PairedTestResult t = paired_one_sided_less(lower, higher);
  CHECK(t.mean_diff > 0.0);
  CHECK(t.p_one_sided < 0.01);

  std::vector<std::pair<int, int>> perfectly_informative{{0, 0}, {1, 1}, {0, 0}, {1, 1}};
  CHECK(mutual_information(perfectly_informative) == doctest::Approx(std::log(2.0)));
  std::vector<std::pair<int, int>> uninformative{{0, 0}, {1, 0}, {0, 0}, {1, 0}};
  CHECK(mutual_information(uninformative) == doctest::Approx(0.0));
}

TEST_CASE("step reward series and post-abstraction drops") {
  std::vector<EpochRow> rows;
  auto push = [&](int step, int epoch, double reward) {
    EpochRow r;
    r.step = step;
    r.epoch = epoch;
    r.test_reward = reward;
    rows.push_back(r);
  };
  push(0, 0, 0.2);
  push(0, 1, 0.9);   // end of step 0
  push(1, 0, 0.5);   // dip after an abstraction
  push(1, 1, 0.95);  // recovery, end of step 1
  push(2, 0, 0.9);
  push(2, 1, 0.92);

  const std::vector<double> ends = end_of_step_rewards(rows);
  REQUIRE(ends.size() == 3);
  CHECK(ends[0] == 0.9);
  CHECK(ends[1] == 0.95);

  const std::vector<double> drops = post_abstraction_drops(rows);
  REQUIRE(drops.size() == 2);
  CHECK(drops[0] == doctest::Approx(0.4));   // 0.9 -> 0.5
  CHECK(drops[1] == doctest::Approx(0.05));  // 0.95 -> 0.9
}

TEST_CASE("frontier starts at the canonical mean and never increases") {
  const Dataset& d = tiny_dataset();
  const std::vector<FrontierPoint> frontier = dataset_frontier(d, 8, 60, 3);
  REQUIRE(!frontier.empty());
  CHECK(frontier.front().lexicon_size == 2);
  CHECK(frontier.front().best_avg_mdl == doctest::Approx(d.mean_canonical_length()));
  for (std::size_t i = 1; i < frontier.size(); ++i) {
    CHECK(frontier[i].best_avg_mdl <= frontier[i - 1].best_avg_mdl + 1e-12);
    CHECK(frontier[i].lexicon_size == frontier[i - 1].lexicon_size + 1);
  }
}

TEST_CASE("greedy beam frontier matches exhaustive subsets on a small corpus") {
  const Lexicon base = initial_lexicon();
  std::vector<Program> programs;
  for (int i = 0; i < 5; ++i) {
    programs.push_back(tiny_dataset().scene(tiny_dataset().split.train[i]).canonical_program);
  }
  std::vector<Candidate> pool = extract_candidates(programs, base, 4);
  // Keep the pool small enough for exhaustive search.
  std::stable_sort(pool.begin(), pool.end(), [](const Candidate& a, const Candidate& b) {
    if (a.frequency != b.frequency) return a.frequency > b.frequency;
    return a.key < b.key;
  });
  if (pool.size() > 12) pool.resize(12);

  const std::vector<FrontierPoint> frontier = compute_frontier(pool, programs, base, 5, 3);
  const double n = static_cast<double>(programs.size());
  for (const FrontierPoint& point : frontier) {
    const int extra = point.lexicon_size - 2;
    if (extra > 3) continue;
    const double expected = best_total_mdl_for_size(pool, programs, base, extra) / n;
    CHECK(point.best_avg_mdl == doctest::Approx(expected));
  }
}

TEST_CASE("baseline comparison aggregates per step") {
  RunConfig config = tiny_config();
  const CompareReport report = run_baseline_comparison(
      tiny_dataset(), config, {Variant::Pace, Variant::NoAbstractions}, {0, 1}, 2);
  REQUIRE(report.runs.size() == 4);
  REQUIRE(report.aggregates.count(Variant::Pace) == 1);
  const auto& steps = report.aggregates.at(Variant::Pace);
  REQUIRE(steps.size() == 2);
  CHECK(steps[0].complexity.mean > 0.0);

  // NoAbstractions stays flat at the canonical mean.
  for (const StepAggregate& agg : report.aggregates.at(Variant::NoAbstractions)) {
    CHECK(agg.complexity.mean == doctest::Approx(tiny_dataset().mean_canonical_length()));
  }

  // Runs are reproducible: the same variant and seed appear with equal series.
  const CompareReport again = run_baseline_comparison(
      tiny_dataset(), config, {Variant::Pace, Variant::NoAbstractions}, {0, 1}, 1);
  for (std::size_t i = 0; i < report.runs.size(); ++i) {
    REQUIRE(again.runs[i].metrics.size() == report.runs[i].metrics.size());
    for (std::size_t k = 0; k < report.runs[i].metrics.size(); ++k) {
      CHECK(again.runs[i].metrics[k].train_loss == report.runs[i].metrics[k].train_loss);
    }
  }
}

TEST_CASE("sweep arms are independent of execution order") {
  RunConfig config = tiny_config();
  config.steps = 2;
  const SweepReport forward = run_adoption_sweep(tiny_dataset(), config, {2, 3}, 4, 1, 1, 1);
  const SweepReport parallel = run_adoption_sweep(tiny_dataset(), config, {2, 3}, 4, 1, 1, 2);
  REQUIRE(forward.arms.size() == parallel.arms.size());
  for (std::size_t i = 0; i < forward.arms.size(); ++i) {
    CHECK(forward.arms[i].key == parallel.arms[i].key);
    CHECK(forward.arms[i].adopted == parallel.arms[i].adopted);
    CHECK(forward.arms[i].final_avg_complexity == parallel.arms[i].final_avg_complexity);
  }
  for (const SweepArm& arm : forward.arms) {
    CHECK(arm.final_lexicon_size >= arm.bucket);
    CHECK(arm.frequency >= 1);
  }
}

TEST_CASE("qinit study produces paired regret windows") {
  RunConfig config = tiny_config();
  config.epochs = 2;
  const QInitReport report = run_qinit_study(tiny_dataset(), config, 2, 2);
  REQUIRE(report.regret_pessimistic.size() == 2);
  REQUIRE(report.regret_optimistic.size() == 2);
  for (double r : report.regret_pessimistic) CHECK(r >= 0.0);
  for (double r : report.regret_optimistic) CHECK(r >= 0.0);
  CHECK(report.test.dof == 1);
}

TEST_CASE("abstraction traces cover introduced actions only") {
  RunConfig config = tiny_config();
  config.steps = 2;
  config.epochs = 2;
  Runner runner(tiny_dataset(), config);
  runner.run();
  const auto& rows = runner.state().qtrace;
  REQUIRE(!rows.empty());

  const auto trace = trace_abstraction(rows, 0);
  CHECK(trace.size() == static_cast<std::size_t>(config.steps * config.epochs));
  CHECK_THROWS_AS(trace_abstraction(rows, 77), UnknownAction);

  if (runner.state().lexicon.size() > 2) {
    const auto introduced = trace_abstraction(rows, 2);
    CHECK(introduced.size() < trace.size());  // traced only after introduction
    CHECK(introduced.front().q == 0.0);       // q_init
  }
}
