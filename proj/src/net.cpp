#include "pace/net.hpp"

#include <algorithm>
#include <array>
#include <limits>

namespace pace {

Matrix softmax_columns(const Matrix& logits, double tau) {
  Matrix y(logits.rows(), logits.cols());
  for (Eigen::Index c = 0; c < logits.cols(); ++c) {
    Vector z = logits.col(c) / tau;
    const double m = z.maxCoeff();
    Vector e = (z.array() - m).exp();
    y.col(c) = e / e.sum();
  }
  return y;
}

Matrix softmax_backward_columns(const Matrix& y, const Matrix& dy, double tau) {
  Matrix dz(y.rows(), y.cols());
  for (Eigen::Index c = 0; c < y.cols(); ++c) {
    const double dot = y.col(c).dot(dy.col(c));
    dz.col(c) = (y.col(c).array() * (dy.col(c).array() - dot)).matrix() / tau;
  }
  return dz;
}

Matrix sample_gumbel(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  std::uniform_real_distribution<double> uniform(std::numeric_limits<double>::min(), 1.0);
  Matrix g(rows, cols);
  for (Eigen::Index c = 0; c < cols; ++c) {
    for (Eigen::Index r = 0; r < rows; ++r) {
      g(r, c) = -std::log(-std::log(uniform(rng)));
    }
  }
  return g;
}

Matrix onehot_argmax_columns(const Matrix& values) {
  Matrix out = Matrix::Zero(values.rows(), values.cols());
  for (Eigen::Index c = 0; c < values.cols(); ++c) {
    Eigen::Index row = 0;
    values.col(c).maxCoeff(&row);
    out(row, c) = 1.0;
  }
  return out;
}

Matrix gumbel_softmax(const Matrix& logits, const Matrix& gumbel, double tau, bool hard) {
  if (tau <= 0.0) throw GridError("gumbel-softmax temperature must be positive");
  if (logits.rows() != gumbel.rows() || logits.cols() != gumbel.cols()) {
    throw ShapeMismatch("gumbel noise shape mismatch");
  }
  const Matrix soft = softmax_columns(logits + gumbel, tau);
  return hard ? onehot_argmax_columns(soft) : soft;
}

double bce_mean(const Matrix& targets, const Matrix& probs) {
  constexpr double kEps = 1e-7;
  double total = 0.0;
  for (Eigen::Index c = 0; c < probs.cols(); ++c) {
    for (Eigen::Index r = 0; r < probs.rows(); ++r) {
      const double p = std::clamp(probs(r, c), kEps, 1.0 - kEps);
      const double t = targets(r, c);
      total -= t * std::log(p) + (1.0 - t) * std::log(1.0 - p);
    }
  }
  return total / static_cast<double>(probs.size());
}

double entropy(const Vector& distribution) {
  double h = 0.0;
  for (Eigen::Index i = 0; i < distribution.size(); ++i) {
    const double p = distribution(i);
    if (p > 0.0) h -= p * std::log(p);
  }
  return h;
}

Agents Agents::make(const AgentConfig& config, Rng& rng) {
  Agents agents;
  agents.config = config;
  const std::array<int, 3> arch_dims{config.n_cap, config.hidden, config.vocab};
  const std::array<int, 4> bldr_dims{config.grid_cells + config.vocab + config.grid_cells,
                                     config.hidden, config.hidden, config.grid_cells};
  agents.architect = DenseNet<double>::make(arch_dims, rng);
  agents.builder = DenseNet<double>::make(bldr_dims, rng);
  return agents;
}

Vector grid_to_vector(const Grid& grid) {
  Vector v = Vector::Zero(Grid::kCellCount);
  for (int row = 0; row < Grid::kSide; ++row) {
    for (int col = 0; col < Grid::kSide; ++col) {
      if (grid.test({col, row})) v(row * Grid::kSide + col) = 1.0;
    }
  }
  return v;
}

Vector cell_onehot(const Cell& cell) {
  if (!Grid::in_bounds(cell)) throw OutOfBounds("anchor cell out of bounds");
  Vector v = Vector::Zero(Grid::kCellCount);
  v(cell.row * Grid::kSide + cell.col) = 1.0;
  return v;
}

Vector action_onehot(int action_id, int n_cap) {
  if (action_id < 0 || action_id >= n_cap) {
    throw ActionIdOverflow("action id " + std::to_string(action_id) +
                           " exceeds encoder capacity " + std::to_string(n_cap));
  }
  Vector v = Vector::Zero(n_cap);
  v(action_id) = 1.0;
  return v;
}

namespace {

// Numerically stable softplus; bce via logits avoids clamping kinks.
inline double softplus(double x) { return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x))); }

Matrix builder_input(const SignalBatch& batch, const Matrix& message, const AgentConfig& config) {
  Matrix z(config.grid_cells + config.vocab + config.grid_cells, batch.size());
  z.topRows(config.grid_cells) = batch.grids;
  z.middleRows(config.grid_cells, config.vocab) = message;
  z.bottomRows(config.grid_cells) = batch.anchors;
  return z;
}

}  // namespace

SignalOutcome signalling_forward(const Agents& agents, const SignalBatch& batch,
                                 const Matrix& gumbel, const CommLossConfig& loss_config) {
  SignalOutcome out;
  out.logits = agents.architect.forward(batch.actions, &out.architect_acts);
  out.soft = softmax_columns(out.logits + gumbel, loss_config.tau);
  out.message = loss_config.hard ? onehot_argmax_columns(out.soft) : out.soft;

  const Matrix builder_in = builder_input(batch, out.message, agents.config);
  const Matrix builder_logits = agents.builder.forward(builder_in, &out.builder_acts);
  out.probs = (1.0 / (1.0 + (-builder_logits.array()).exp())).matrix();

  // Mean-over-cells BCE averaged over the batch, evaluated from logits.
  double bce = 0.0;
  for (Eigen::Index c = 0; c < builder_logits.cols(); ++c) {
    for (Eigen::Index r = 0; r < builder_logits.rows(); ++r) {
      bce += softplus(builder_logits(r, c)) - batch.targets(r, c) * builder_logits(r, c);
    }
  }
  out.bce = bce / static_cast<double>(builder_logits.size());

  // Positive signalling: high entropy of the mean message distribution, low
  // per-input entropy.
  const Matrix cond = softmax_columns(out.logits, 1.0);
  const Vector mean_dist = cond.rowwise().mean();
  double cond_entropy = 0.0;
  for (Eigen::Index c = 0; c < cond.cols(); ++c) cond_entropy += entropy(cond.col(c));
  cond_entropy /= static_cast<double>(cond.cols());
  out.positive_signalling = -(entropy(mean_dist) - loss_config.beta_ps * cond_entropy);

  out.loss = out.bce + loss_config.lambda_ps * out.positive_signalling;
  return out;
}

void signalling_backward(const Agents& agents, const SignalBatch& batch,
                         const SignalOutcome& outcome, const CommLossConfig& loss_config,
                         NetGrads<double>& architect_grads, NetGrads<double>& builder_grads) {
  const double inv_count = 1.0 / static_cast<double>(outcome.probs.size());
  const Matrix d_builder_logits = (outcome.probs - batch.targets) * inv_count;

  const Matrix d_builder_in =
      backprop(agents.builder, outcome.builder_acts, d_builder_logits, builder_grads);
  const Matrix d_message =
      d_builder_in.middleRows(agents.config.grid_cells, agents.config.vocab);

  // Straight-through: gradients flow through the soft sample in both modes.
  Matrix d_logits = softmax_backward_columns(outcome.soft, d_message, loss_config.tau);

  if (loss_config.lambda_ps != 0.0) {
    const Matrix cond = softmax_columns(outcome.logits, 1.0);
    const Vector mean_dist = cond.rowwise().mean();
    const double inv_batch = 1.0 / static_cast<double>(cond.cols());
    Matrix d_cond(cond.rows(), cond.cols());
    const Vector d_mean = (mean_dist.array().log() + 1.0).matrix();  // d(-H(mean))/d mean
    for (Eigen::Index c = 0; c < cond.cols(); ++c) {
      const Vector d_h = (-(cond.col(c).array().log()) - 1.0).matrix();  // dH(q)/dq
      d_cond.col(c) =
          loss_config.lambda_ps * inv_batch * (d_mean + loss_config.beta_ps * d_h);
    }
    d_logits += softmax_backward_columns(cond, d_cond, 1.0);
  }

  backprop(agents.architect, outcome.architect_acts, d_logits, architect_grads);
}

double exact_match_reward(const Matrix& probs, const Matrix& targets, Eigen::Index col) {
  for (Eigen::Index r = 0; r < probs.rows(); ++r) {
    const bool on = probs(r, col) > 0.5;
    if (on != (targets(r, col) > 0.5)) return 0.0;
  }
  return 1.0;
}

EvalOutcome signalling_eval(const Agents& agents, const SignalBatch& batch) {
  EvalOutcome out;
  const Matrix logits = agents.architect.forward(batch.actions);
  const Matrix message = onehot_argmax_columns(logits);

  out.message_ids.reserve(static_cast<std::size_t>(batch.size()));
  for (Eigen::Index c = 0; c < message.cols(); ++c) {
    Eigen::Index row = 0;
    message.col(c).maxCoeff(&row);
    out.message_ids.push_back(static_cast<int>(row));
  }

  const Matrix builder_in = builder_input(batch, message, agents.config);
  const Matrix builder_logits = agents.builder.forward(builder_in);
  out.probs = (1.0 / (1.0 + (-builder_logits.array()).exp())).matrix();
  out.rewards.reserve(static_cast<std::size_t>(batch.size()));
  for (Eigen::Index c = 0; c < batch.size(); ++c) {
    out.rewards.push_back(exact_match_reward(out.probs, batch.targets, c));
  }
  return out;
}

Vector architect_logits(const Agents& agents, int action_id) {
  const Vector input = action_onehot(action_id, agents.config.n_cap);
  return agents.architect.forward(input);
}

}  // namespace pace
