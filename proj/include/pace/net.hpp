// The emergent channel: architect message policy, builder reconstruction
// policy, straight-through gumbel-softmax sampling and the joint loss.
#pragma once

#include <Eigen/Core>
#include <cmath>
#include <span>
#include <vector>

#include "pace/grid.hpp"

namespace pace {

struct ShapeMismatch : GridError {
  using GridError::GridError;
};
struct ActionIdOverflow : GridError {
  using GridError::GridError;
};

// Fully connected net, rectifier on hidden layers, linear output.
// Columns of every activation matrix are samples.
template <typename Scalar = double>
struct DenseNet {
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  std::vector<Matrix> weights;  // layer l: out x in
  std::vector<Vector> biases;

  static DenseNet make(std::span<const int> dims, Rng& rng) {
    DenseNet net;
    for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
      const int in = dims[l];
      const int out = dims[l + 1];
      const Scalar bound = Scalar(1) / std::sqrt(Scalar(in));
      std::uniform_real_distribution<double> dist(-bound, bound);
      Matrix w(out, in);
      for (int j = 0; j < in; ++j) {
        for (int i = 0; i < out; ++i) w(i, j) = Scalar(dist(rng));
      }
      net.weights.push_back(std::move(w));
      net.biases.push_back(Vector::Zero(out));
    }
    return net;
  }

  int input_size() const { return static_cast<int>(weights.front().cols()); }
  int output_size() const { return static_cast<int>(weights.back().rows()); }
  std::size_t layer_count() const { return weights.size(); }

  // activations[0] = input, activations[l] = post-rectifier hidden output,
  // activations[back] = linear output.
  Matrix forward(const Matrix& input, std::vector<Matrix>* activations = nullptr) const {
    if (input.rows() != input_size()) throw ShapeMismatch("net input row mismatch");
    if (activations) {
      activations->clear();
      activations->push_back(input);
    }
    Matrix a = input;
    for (std::size_t l = 0; l < weights.size(); ++l) {
      Matrix z = (weights[l] * a).colwise() + biases[l];
      if (l + 1 < weights.size()) z = z.cwiseMax(Scalar(0));
      a = std::move(z);
      if (activations) activations->push_back(a);
    }
    return a;
  }
};

template <typename Scalar = double>
struct NetGrads {
  std::vector<typename DenseNet<Scalar>::Matrix> weights;
  std::vector<typename DenseNet<Scalar>::Vector> biases;

  static NetGrads zeros_like(const DenseNet<Scalar>& net) {
    using M = typename DenseNet<Scalar>::Matrix;
    using V = typename DenseNet<Scalar>::Vector;
    NetGrads g;
    for (std::size_t l = 0; l < net.weights.size(); ++l) {
      g.weights.push_back(M::Zero(net.weights[l].rows(), net.weights[l].cols()));
      g.biases.push_back(V::Zero(net.biases[l].size()));
    }
    return g;
  }
};

// Accumulates parameter gradients into `grads` and returns the input gradient.
template <typename Scalar>
typename DenseNet<Scalar>::Matrix backprop(const DenseNet<Scalar>& net,
                                           const std::vector<typename DenseNet<Scalar>::Matrix>&
                                               activations,
                                           typename DenseNet<Scalar>::Matrix output_grad,
                                           NetGrads<Scalar>& grads) {
  using Matrix = typename DenseNet<Scalar>::Matrix;
  Matrix delta = std::move(output_grad);
  for (std::size_t l = net.layer_count(); l-- > 0;) {
    grads.weights[l].noalias() += delta * activations[l].transpose();
    grads.biases[l] += delta.rowwise().sum();
    Matrix prev = net.weights[l].transpose() * delta;
    if (l > 0) {
      prev = prev.cwiseProduct(
          (activations[l].array() > Scalar(0)).template cast<Scalar>().matrix());
    }
    delta = std::move(prev);
  }
  return delta;
}

template <typename Scalar = double>
struct AdamState {
  Scalar lr = Scalar(0.0009);
  Scalar beta1 = Scalar(0.9);
  Scalar beta2 = Scalar(0.999);
  Scalar eps = Scalar(1e-8);
  long step = 0;
  std::vector<typename DenseNet<Scalar>::Matrix> mw, vw;
  std::vector<typename DenseNet<Scalar>::Vector> mb, vb;

  static AdamState for_net(const DenseNet<Scalar>& net, Scalar lr) {
    using M = typename DenseNet<Scalar>::Matrix;
    using V = typename DenseNet<Scalar>::Vector;
    AdamState s;
    s.lr = lr;
    for (std::size_t l = 0; l < net.weights.size(); ++l) {
      s.mw.push_back(M::Zero(net.weights[l].rows(), net.weights[l].cols()));
      s.vw.push_back(M::Zero(net.weights[l].rows(), net.weights[l].cols()));
      s.mb.push_back(V::Zero(net.biases[l].size()));
      s.vb.push_back(V::Zero(net.biases[l].size()));
    }
    return s;
  }
};

template <typename Scalar>
void adam_step(AdamState<Scalar>& state, DenseNet<Scalar>& net, const NetGrads<Scalar>& grads) {
  if (state.mw.size() != net.weights.size() || grads.weights.size() != net.weights.size()) {
    throw ShapeMismatch("optimizer/net layer count mismatch");
  }
  state.step += 1;
  const Scalar c1 = Scalar(1) - std::pow(state.beta1, Scalar(state.step));
  const Scalar c2 = Scalar(1) - std::pow(state.beta2, Scalar(state.step));
  for (std::size_t l = 0; l < net.weights.size(); ++l) {
    if (grads.weights[l].rows() != net.weights[l].rows() ||
        grads.weights[l].cols() != net.weights[l].cols()) {
      throw ShapeMismatch("gradient shape mismatch");
    }
    auto update = [&](auto& m, auto& v, auto& param, const auto& g) {
      m = state.beta1 * m + (Scalar(1) - state.beta1) * g;
      v = state.beta2 * v + (Scalar(1) - state.beta2) * g.cwiseProduct(g);
      param -= (state.lr * (m / c1).array() / ((v / c2).array().sqrt() + state.eps)).matrix();
    };
    update(state.mw[l], state.vw[l], net.weights[l], grads.weights[l]);
    update(state.mb[l], state.vb[l], net.biases[l], grads.biases[l]);
  }
}

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Columnwise softmax of logits / tau.
Matrix softmax_columns(const Matrix& logits, double tau = 1.0);

// d(loss)/d(logits) given columnwise soft outputs y and upstream dy.
Matrix softmax_backward_columns(const Matrix& y, const Matrix& dy, double tau = 1.0);

// One standard Gumbel draw per entry.
Matrix sample_gumbel(Eigen::Index rows, Eigen::Index cols, Rng& rng);

// Soft sample y = softmax((logits + gumbel)/tau); with `hard`, the forward
// value is the one-hot argmax of y while gradients follow y (straight-through).
Matrix gumbel_softmax(const Matrix& logits, const Matrix& gumbel, double tau, bool hard);

Matrix onehot_argmax_columns(const Matrix& values);

// Mean binary cross-entropy over all entries, probabilities clamped away from
// {0,1}.
double bce_mean(const Matrix& targets, const Matrix& probs);

double entropy(const Vector& distribution);

struct AgentConfig {
  int n_cap = 64;   // one-hot capacity for action ids
  int vocab = 30;   // message alphabet
  int hidden = 200;
  int grid_cells = 81;
};

struct Agents {
  AgentConfig config;
  DenseNet<double> architect;  // n_cap -> hidden -> vocab
  DenseNet<double> builder;    // grid + vocab + anchor -> hidden -> hidden -> grid

  static Agents make(const AgentConfig& config, Rng& rng);
};

Vector grid_to_vector(const Grid& grid);
Vector cell_onehot(const Cell& cell);
Vector action_onehot(int action_id, int n_cap);  // throws ActionIdOverflow

struct SignalBatch {
  std::vector<int> action_ids;
  Matrix actions;  // n_cap x B
  Matrix grids;    // 81 x B
  Matrix anchors;  // 81 x B
  Matrix targets;  // 81 x B

  Eigen::Index size() const { return actions.cols(); }
};

struct CommLossConfig {
  double tau = 1.0;
  bool hard = true;
  double lambda_ps = 0.1;
  double beta_ps = 1.0;
};

struct SignalOutcome {
  double loss = 0.0;
  double bce = 0.0;
  double positive_signalling = 0.0;
  Matrix logits;    // vocab x B
  Matrix soft;      // soft gumbel samples
  Matrix message;   // what the builder saw (hard or soft)
  Matrix probs;     // builder cell probabilities
  std::vector<Matrix> architect_acts;
  std::vector<Matrix> builder_acts;
};

// One signalling game over a batch of transitions with fixed gumbel noise.
SignalOutcome signalling_forward(const Agents& agents, const SignalBatch& batch,
                                 const Matrix& gumbel, const CommLossConfig& loss_config);

// Gradients of outcome.loss for both nets.
void signalling_backward(const Agents& agents, const SignalBatch& batch,
                         const SignalOutcome& outcome, const CommLossConfig& loss_config,
                         NetGrads<double>& architect_grads, NetGrads<double>& builder_grads);

// Deterministic evaluation: argmax messages, no parameter updates.
struct EvalOutcome {
  Matrix probs;
  std::vector<int> message_ids;
  std::vector<double> rewards;  // 1 when thresholded probs reproduce the target
};
EvalOutcome signalling_eval(const Agents& agents, const SignalBatch& batch);

// 1 when thresholding column `col` of probs at 0.5 equals the target column.
double exact_match_reward(const Matrix& probs, const Matrix& targets, Eigen::Index col);

Vector architect_logits(const Agents& agents, int action_id);

}  // namespace pace
