#include <doctest.h>

#include <cmath>

#include "pace/bandit.hpp"

using namespace pace;

namespace {

Program program_of(std::initializer_list<int> actions) {
  Program p;
  int col = 0;
  for (int a : actions) p.steps.push_back({a, {col++, 0}});
  return p;
}

QTable table_with(std::initializer_list<double> qs) {
  QTable t;
  t.values.assign(qs);
  return t;
}

}  // namespace

TEST_CASE("program quality is the discounted product of action values") {
  QTable t = table_with({1.0, 1.0});
  CHECK(program_quality(program_of({0, 1}), t) == doctest::Approx(0.9801).epsilon(1e-12));

  t = table_with({0.5, 0.8, 1.0});
  CHECK(program_quality(program_of({0, 1, 2}), t) ==
        doctest::Approx(0.99 * 0.99 * 0.99 * 0.4).epsilon(1e-12));

  t = table_with({0.0, 0.9});
  CHECK(program_quality(program_of({0, 1}), t) == 0.0);

  CHECK_THROWS_AS(program_quality(program_of({5}), t), MissingQ);
}

TEST_CASE("quality strictly decreases with length at equal action values") {
  for (double q : {0.2, 0.5, 1.0}) {
    QTable t = table_with({q});
    double previous = 1.0;
    for (int n = 1; n <= 6; ++n) {
      std::vector<int> ids(static_cast<std::size_t>(n), 0);
      Program p;
      for (int i = 0; i < n; ++i) p.steps.push_back({0, {i, 0}});
      const double quality = program_quality(p, t);
      CHECK(quality < previous);
      previous = quality;
    }
  }
}

TEST_CASE("selection modes behave as expected") {
  Rng rng(5);
  QTable t = table_with({0.2, 0.9});
  std::vector<Program> arms{program_of({0}), program_of({1})};

  CHECK(select_program({arms.data(), 1}, t, rng, SelectMode::Greedy) == 0);

  t.epsilon = 0.0;
  for (int i = 0; i < 20; ++i) {
    CHECK(select_program(arms, t, rng, SelectMode::EpsilonGreedy) == 1);
    CHECK(select_program(arms, t, rng, SelectMode::Greedy) == 1);
  }

  CHECK_THROWS_AS(select_program({}, t, rng, SelectMode::Greedy), EmptyArmSet);
}

TEST_CASE("full exploration selects arms uniformly") {
  Rng rng(17);
  QTable t = table_with({0.2, 0.9});
  t.epsilon = 1.0;
  std::vector<Program> arms{program_of({0}), program_of({1}), program_of({0, 0}),
                            program_of({1, 1})};
  std::array<int, 4> counts{};
  for (int i = 0; i < 40000; ++i) {
    counts[select_program(arms, t, rng, SelectMode::EpsilonGreedy)] += 1;
  }
  for (int c : counts) {
    CHECK(c > 9500);
    CHECK(c < 10500);
  }
}

TEST_CASE("never-communicated abstractions lose greedy selection") {
  Rng rng(23);
  QTable t = table_with({0.9, 0.9, 0.0});  // fresh abstraction at q_init = 0
  std::vector<Program> arms{program_of({0, 1}), program_of({2})};
  CHECK(program_quality(arms[1], t) == 0.0);
  for (int i = 0; i < 10; ++i) {
    CHECK(select_program(arms, t, rng, SelectMode::Greedy) == 0);
  }
}

TEST_CASE("update_q moves toward the reward and is a contraction") {
  QTable t = table_with({0.0});
  update_q(t, 0, 1.0);
  CHECK(t.q(0) == doctest::Approx(0.5));

  t = table_with({0.37});
  update_q(t, 0, 0.37);
  CHECK(t.q(0) == doctest::Approx(0.37));

  for (double q0 : {0.0, 0.3, 0.9}) {
    for (double r : {0.0, 1.0}) {
      QTable u = table_with({q0});
      update_q(u, 0, r);
      CHECK(std::abs(u.q(0) - r) == doctest::Approx((1.0 - u.alpha) * std::abs(q0 - r)));
    }
  }
  CHECK_THROWS_AS(update_q(t, 9, 1.0), MissingQ);
}

TEST_CASE("EMA of Bernoulli rewards concentrates near the success rate") {
  Rng rng(31);
  std::bernoulli_distribution coin(0.8);
  int inside = 0;
  for (int run = 0; run < 100; ++run) {
    QTable t = table_with({0.0});
    for (int i = 0; i < 200; ++i) update_q(t, 0, coin(rng) ? 1.0 : 0.0);
    if (t.q(0) >= 0.6 && t.q(0) <= 0.95) ++inside;
  }
  CHECK(inside >= 99);
}

TEST_CASE("cumulative regret sums shortfalls") {
  CHECK(cumulative_regret(std::vector<double>{1.0, 1.0, 1.0}) == 0.0);
  CHECK(cumulative_regret(std::vector<double>{0.0, 0.0, 1.0}) == doctest::Approx(2.0));
  CHECK(cumulative_regret(std::vector<double>{}) == 0.0);
  CHECK(cumulative_regret(std::vector<double>{0.5}, 0.5) == 0.0);
}

TEST_CASE("qtable extension uses the configured initial value") {
  QTable t = table_with({0.4, 0.6});
  t.q_init = 0.25;
  t.extend_to(4);
  REQUIRE(t.values.size() == 4);
  CHECK(t.q(2) == 0.25);
  CHECK(t.q(3) == 0.25);
}
