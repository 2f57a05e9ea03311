// Per-action value estimates and program selection for the architect.
#pragma once

#include <span>
#include <vector>

#include "pace/shapes.hpp"
#include "pace/symlang.hpp"

namespace pace {

struct MissingQ : GridError {
  using GridError::GridError;
};
struct EmptyArmSet : GridError {
  using GridError::GridError;
};

struct QTable {
  std::vector<double> values;  // indexed by action id
  double alpha = 0.5;
  double gamma = 0.99;
  double epsilon = 0.1;
  double q_init = 0.0;

  double q(int action) const {
    if (action < 0 || action >= static_cast<int>(values.size())) {
      throw MissingQ("no Q entry for action " + std::to_string(action));
    }
    return values[static_cast<std::size_t>(action)];
  }

  // Extends the table so every id < count has an entry, initialized to q_init.
  void extend_to(int count) {
    while (static_cast<int>(values.size()) < count) values.push_back(q_init);
  }
};

// Q(p) = prod_i gamma * Q(a_i); gamma < 1 biases toward shorter programs.
double program_quality(const Program& program, const QTable& qtable);

enum class SelectMode { EpsilonGreedy, Greedy };

// Index of the selected arm. Greedy takes the argmax of program_quality with
// ties broken toward shorter programs, then uniformly at random; EpsilonGreedy
// additionally explores a uniform arm with probability epsilon.
std::size_t select_program(std::span<const Program> programs, const QTable& qtable, Rng& rng,
                           SelectMode mode);

// Q(a) += alpha * (r - Q(a))
void update_q(QTable& qtable, int action, double reward);

// Sum of (r_star - r_t).
double cumulative_regret(std::span<const double> rewards, double r_star = 1.0);

}  // namespace pace
