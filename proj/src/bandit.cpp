#include "pace/bandit.hpp"

#include <algorithm>

namespace pace {

double program_quality(const Program& program, const QTable& qtable) {
  double quality = 1.0;
  for (const PlacedAction& step : program.steps) {
    quality *= qtable.gamma * qtable.q(step.action);
  }
  return quality;
}

std::size_t select_program(std::span<const Program> programs, const QTable& qtable, Rng& rng,
                           SelectMode mode) {
  if (programs.empty()) throw EmptyArmSet("no programs to select from");
  if (programs.size() == 1) return 0;

  if (mode == SelectMode::EpsilonGreedy) {
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    if (coin(rng) < qtable.epsilon) {
      std::uniform_int_distribution<std::size_t> pick(0, programs.size() - 1);
      return pick(rng);
    }
  }

  double best_quality = -1.0;
  int best_length = 0;
  std::vector<std::size_t> best;
  for (std::size_t i = 0; i < programs.size(); ++i) {
    const double quality = program_quality(programs[i], qtable);
    const int length = programs[i].length();
    if (best.empty() || quality > best_quality ||
        (quality == best_quality && length < best_length)) {
      best_quality = quality;
      best_length = length;
      best.assign(1, i);
    } else if (quality == best_quality && length == best_length) {
      best.push_back(i);
    }
  }
  if (best.size() == 1) return best.front();
  std::uniform_int_distribution<std::size_t> pick(0, best.size() - 1);
  return best[pick(rng)];
}

void update_q(QTable& qtable, int action, double reward) {
  const double q = qtable.q(action);
  qtable.values[static_cast<std::size_t>(action)] = q + qtable.alpha * (reward - q);
}

double cumulative_regret(std::span<const double> rewards, double r_star) {
  double total = 0.0;
  for (double r : rewards) total += r_star - r;
  return total;
}

}  // namespace pace
