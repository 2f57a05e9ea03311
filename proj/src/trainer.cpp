#include "pace/trainer.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include "pace/json_io.hpp"

namespace pace {

std::string variant_name(Variant v) {
  switch (v) {
    case Variant::Pace: return "pace";
    case Variant::NoAbstractions: return "noabs";
    case Variant::Greedy: return "greedy";
  }
  return "pace";
}

Variant parse_variant(const std::string& name) {
  if (name == "pace") return Variant::Pace;
  if (name == "noabs" || name == "no-abstractions") return Variant::NoAbstractions;
  if (name == "greedy") return Variant::Greedy;
  throw GridError("unknown variant: " + name);
}

namespace {

std::string prim_seq_text(const PrimSeq& seq) {
  std::ostringstream out;
  for (std::size_t i = 0; i < seq.size(); ++i) {
    if (i > 0) out << " ";
    out << (seq[i].orientation == Orientation::Horizontal ? "H" : "V") << "("
        << seq[i].offset.dcol << "," << seq[i].offset.drow << ")";
  }
  return out.str();
}

Rng derived_rng(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  return Rng(seq);
}

}  // namespace

LanguageComposition language_composition(const Lexicon& lexicon,
                                         const std::vector<Shape>& shapes,
                                         std::span<const Program> selected_programs) {
  std::set<Footprint> shape_prints;
  for (const Shape& s : shapes) shape_prints.insert(s.footprint);

  long primitive = 0, shape = 0, subshape = 0;
  for (const Program& p : selected_programs) {
    for (const PlacedAction& step : p.steps) {
      const Action& a = lexicon.at(static_cast<std::size_t>(step.action));
      if (a.kind == ActionKind::Primitive) {
        ++primitive;
      } else if (shape_prints.count(a.footprint)) {
        ++shape;
      } else {
        ++subshape;
      }
    }
  }
  const double total = static_cast<double>(primitive + shape + subshape);
  LanguageComposition c;
  if (total > 0) {
    c.primitive_frac = primitive / total;
    c.shape_frac = shape / total;
    c.subshape_frac = subshape / total;
  }
  return c;
}

Runner::Runner(const Dataset& dataset, const RunConfig& config) : dataset_(&dataset) {
  state_.config = config;
  state_.lexicon = initial_lexicon();
  state_.table.by_scene.resize(dataset.scenes.size());
  for (const Scene& scene : dataset.scenes) {
    state_.table.by_scene[static_cast<std::size_t>(scene.id)] = {scene.canonical_program};
  }
  state_.qtable.alpha = config.alpha;
  state_.qtable.gamma = config.gamma;
  state_.qtable.epsilon = config.epsilon;
  state_.qtable.q_init = config.q_init;
  state_.qtable.extend_to(static_cast<int>(state_.lexicon.size()));

  state_.rng = derived_rng(config.seed, 0x706163655f72756e);
  state_.eval_rng = derived_rng(config.seed, 0x706163655f65766c);

  AgentConfig agent_config;
  agent_config.n_cap = config.n_cap;
  agent_config.vocab = config.vocab;
  agent_config.hidden = config.hidden;
  state_.agents = Agents::make(agent_config, state_.rng);
  state_.architect_opt = AdamState<double>::for_net(state_.agents.architect, config.lr);
  state_.builder_opt = AdamState<double>::for_net(state_.agents.builder, config.lr);
}

Runner::Runner(const Dataset& dataset, RunState state)
    : dataset_(&dataset), state_(std::move(state)) {}

std::vector<Transition> Runner::program_transitions(const Program& program) const {
  std::vector<Transition> out;
  out.reserve(program.steps.size());
  Grid grid;
  for (const PlacedAction& step : program.steps) {
    Transition t;
    t.x = grid;
    t.action = step.action;
    t.anchor = step.anchor;
    for (const PrimitiveBlock& b : flatten_step(step, state_.lexicon)) {
      grid = place_block(grid, b);
    }
    t.x_next = grid;
    out.push_back(std::move(t));
  }
  return out;
}

std::size_t Runner::select_arm_for_training(const std::vector<Program>& arms) {
  switch (state_.config.variant) {
    case Variant::Pace:
      return select_program(arms, state_.qtable, state_.rng, SelectMode::EpsilonGreedy);
    case Variant::NoAbstractions:
      return 0;
    case Variant::Greedy: {
      int best = arms.front().length();
      for (const Program& p : arms) best = std::min(best, p.length());
      std::vector<std::size_t> shortest;
      for (std::size_t i = 0; i < arms.size(); ++i) {
        if (arms[i].length() == best) shortest.push_back(i);
      }
      if (shortest.size() == 1) return shortest.front();
      std::uniform_int_distribution<std::size_t> pick(0, shortest.size() - 1);
      return shortest[pick(state_.rng)];
    }
  }
  return 0;
}

std::size_t Runner::select_arm_greedy(const std::vector<Program>& arms, Rng& rng) {
  switch (state_.config.variant) {
    case Variant::Pace:
      return select_program(arms, state_.qtable, rng, SelectMode::Greedy);
    case Variant::NoAbstractions:
      return 0;
    case Variant::Greedy: {
      int best = arms.front().length();
      for (const Program& p : arms) best = std::min(best, p.length());
      for (std::size_t i = 0; i < arms.size(); ++i) {
        if (arms[i].length() == best) return i;
      }
      return 0;
    }
  }
  return 0;
}

std::vector<Transition> Runner::generate_transitions() {
  epoch_usage_.clear();
  std::vector<Transition> out;
  for (int scene_id : dataset_->split.train) {
    const std::vector<Program>& arms = state_.table.by_scene[static_cast<std::size_t>(scene_id)];
    const Program& chosen = arms[select_arm_for_training(arms)];
    for (const PlacedAction& step : chosen.steps) epoch_usage_[step.action] += 1;
    for (Transition& t : program_transitions(chosen)) out.push_back(std::move(t));
  }
  std::shuffle(out.begin(), out.end(), state_.rng);
  return out;
}

EpochMetrics Runner::run_epoch(const std::vector<Transition>& transitions) {
  if (transitions.empty()) throw GridError("cannot train on an empty transition set");
  const RunConfig& cfg = state_.config;
  CommLossConfig loss_config{cfg.tau, true, cfg.lambda_ps, cfg.beta_ps};

  EpochMetrics metrics;
  std::map<int, std::pair<double, long>> per_action;
  std::map<std::pair<int, int>, long> msg_counts;
  double loss_sum = 0.0;
  double reward_sum = 0.0;

  const std::size_t total = transitions.size();
  for (std::size_t begin = 0; begin < total; begin += static_cast<std::size_t>(cfg.batch)) {
    const std::size_t count = std::min<std::size_t>(static_cast<std::size_t>(cfg.batch),
                                                    total - begin);
    SignalBatch batch;
    batch.action_ids.reserve(count);
    batch.actions = Matrix::Zero(cfg.n_cap, static_cast<Eigen::Index>(count));
    batch.grids = Matrix(Grid::kCellCount, static_cast<Eigen::Index>(count));
    batch.anchors = Matrix::Zero(Grid::kCellCount, static_cast<Eigen::Index>(count));
    batch.targets = Matrix(Grid::kCellCount, static_cast<Eigen::Index>(count));
    for (std::size_t i = 0; i < count; ++i) {
      const Transition& t = transitions[begin + i];
      if (t.action >= cfg.n_cap) {
        throw ActionIdOverflow("lexicon outgrew the architect's one-hot capacity");
      }
      batch.action_ids.push_back(t.action);
      batch.actions(t.action, static_cast<Eigen::Index>(i)) = 1.0;
      batch.grids.col(static_cast<Eigen::Index>(i)) = grid_to_vector(t.x);
      batch.anchors.col(static_cast<Eigen::Index>(i)) = cell_onehot(t.anchor);
      batch.targets.col(static_cast<Eigen::Index>(i)) = grid_to_vector(t.x_next);
    }

    const Matrix gumbel =
        sample_gumbel(cfg.vocab, static_cast<Eigen::Index>(count), state_.rng);
    const SignalOutcome outcome = signalling_forward(state_.agents, batch, gumbel, loss_config);

    // Bandit updates use the training-time outcome of each instruction.
    for (std::size_t i = 0; i < count; ++i) {
      const auto col = static_cast<Eigen::Index>(i);
      const double r = exact_match_reward(outcome.probs, batch.targets, col);
      update_q(state_.qtable, batch.action_ids[i], r);
      state_.regret += 1.0 - r;
      reward_sum += r;
      auto& [sum, n] = per_action[batch.action_ids[i]];
      sum += r;
      n += 1;

      Eigen::Index msg_row = 0;
      outcome.message.col(col).maxCoeff(&msg_row);
      msg_counts[{batch.action_ids[i], static_cast<int>(msg_row)}] += 1;
    }

    NetGrads<double> architect_grads = NetGrads<double>::zeros_like(state_.agents.architect);
    NetGrads<double> builder_grads = NetGrads<double>::zeros_like(state_.agents.builder);
    signalling_backward(state_.agents, batch, outcome, loss_config, architect_grads,
                        builder_grads);
    adam_step(state_.architect_opt, state_.agents.architect, architect_grads);
    adam_step(state_.builder_opt, state_.agents.builder, builder_grads);

    loss_sum += outcome.loss * static_cast<double>(count);
  }

  metrics.loss = loss_sum / static_cast<double>(total);
  metrics.reward = reward_sum / static_cast<double>(total);
  for (const auto& [action, acc] : per_action) {
    metrics.action_reward_mean[action] = acc.first / static_cast<double>(acc.second);
  }

  for (const auto& [key, n] : msg_counts) {
    state_.message_usage.push_back(
        {state_.step, -1, key.first, key.second, n});  // epoch filled by run_step
  }
  return metrics;
}

std::vector<Program> Runner::preferred_programs() {
  std::vector<Program> out;
  out.reserve(dataset_->split.train.size());
  for (int scene_id : dataset_->split.train) {
    const std::vector<Program>& arms = state_.table.by_scene[static_cast<std::size_t>(scene_id)];
    out.push_back(arms[select_arm_greedy(arms, state_.eval_rng)]);
  }
  return out;
}

long Runner::greedy_usage(int action) {
  long usage = 0;
  for (const Program& p : preferred_programs()) {
    for (const PlacedAction& step : p.steps) {
      if (step.action == action) ++usage;
    }
  }
  return usage;
}

EvalResult Runner::evaluate() {
  EvalResult result;

  // Complexity: greedy selection over training scenes.
  const std::vector<Program> preferred = preferred_programs();
  double length_sum = 0.0;
  for (const Program& p : preferred) length_sum += p.length();
  result.avg_complexity = length_sum / static_cast<double>(preferred.size());

  // Test reward: argmax messages over every transition of the test scenes.
  std::vector<Transition> transitions;
  for (int scene_id : dataset_->split.test) {
    const std::vector<Program>& arms = state_.table.by_scene[static_cast<std::size_t>(scene_id)];
    const Program& chosen = arms[select_arm_greedy(arms, state_.eval_rng)];
    for (Transition& t : program_transitions(chosen)) transitions.push_back(std::move(t));
  }
  const std::size_t count = transitions.size();
  SignalBatch batch;
  batch.actions = Matrix::Zero(state_.config.n_cap, static_cast<Eigen::Index>(count));
  batch.grids = Matrix(Grid::kCellCount, static_cast<Eigen::Index>(count));
  batch.anchors = Matrix::Zero(Grid::kCellCount, static_cast<Eigen::Index>(count));
  batch.targets = Matrix(Grid::kCellCount, static_cast<Eigen::Index>(count));
  for (std::size_t i = 0; i < count; ++i) {
    const Transition& t = transitions[i];
    batch.action_ids.push_back(t.action);
    batch.actions(t.action, static_cast<Eigen::Index>(i)) = 1.0;
    batch.grids.col(static_cast<Eigen::Index>(i)) = grid_to_vector(t.x);
    batch.anchors.col(static_cast<Eigen::Index>(i)) = cell_onehot(t.anchor);
    batch.targets.col(static_cast<Eigen::Index>(i)) = grid_to_vector(t.x_next);
  }
  const EvalOutcome outcome = signalling_eval(state_.agents, batch);
  double reward_sum = 0.0;
  for (double r : outcome.rewards) reward_sum += r;
  result.test_reward = count > 0 ? reward_sum / static_cast<double>(count) : 0.0;
  return result;
}

AbstractionRecord Runner::abstraction_phase() {
  AbstractionRecord record;
  record.step = state_.step;

  state_.table = prune_table(
      state_.table, [&](const Program& p) { return program_quality(p, state_.qtable); },
      state_.config.prune_keep);

  const std::vector<Program> preferred = preferred_programs();
  const std::vector<Candidate> candidates = extract_candidates(
      preferred, state_.lexicon, state_.config.max_window, dataset_->split.train);
  std::optional<Action> chosen = select_abstraction(candidates, preferred, state_.lexicon);
  if (!chosen) {
    state_.abstraction_log.push_back(record);
    return record;
  }

  for (const Candidate& cand : candidates) {
    if (cand.key == chosen->flat) {
      record.size = cand.size;
      record.frequency = cand.frequency;
      record.score = score_candidate(cand, preferred, state_.lexicon);
      break;
    }
  }
  record.skipped = false;
  record.action_id = chosen->id;
  record.key = prim_seq_text(chosen->flat);

  state_.lexicon.push_back(*chosen);
  state_.table = apply_abstraction(state_.table, state_.lexicon.back(), state_.lexicon);
  state_.qtable.extend_to(static_cast<int>(state_.lexicon.size()));
  state_.abstraction_log.push_back(record);
  return record;
}

int Runner::inject_abstraction(const Candidate& cand) {
  state_.table = prune_table(
      state_.table, [&](const Program& p) { return program_quality(p, state_.qtable); },
      state_.config.prune_keep);
  Action action = make_abstraction(static_cast<int>(state_.lexicon.size()),
                                   "a" + std::to_string(state_.lexicon.size()), cand.expansion,
                                   state_.lexicon);
  state_.lexicon.push_back(std::move(action));
  state_.table = apply_abstraction(state_.table, state_.lexicon.back(), state_.lexicon);
  state_.qtable.extend_to(static_cast<int>(state_.lexicon.size()));
  return state_.lexicon.back().id;
}

void Runner::run_step() {
  for (int epoch = 0; epoch < state_.config.epochs; ++epoch) {
    const std::size_t usage_mark = state_.message_usage.size();
    const std::vector<Transition> transitions = generate_transitions();
    const EpochMetrics m = run_epoch(transitions);
    for (std::size_t i = usage_mark; i < state_.message_usage.size(); ++i) {
      state_.message_usage[i].epoch = epoch;
    }
    const EvalResult ev = evaluate();

    EpochRow row;
    row.step = state_.step;
    row.epoch = epoch;
    row.train_loss = m.loss;
    row.train_reward = m.reward;
    row.test_reward = ev.test_reward;
    row.avg_complexity = ev.avg_complexity;
    row.lexicon_size = static_cast<int>(state_.lexicon.size());
    row.cumulative_regret = state_.regret;
    state_.metrics.push_back(row);

    for (const Action& a : state_.lexicon) {
      QTraceRow q;
      q.step = state_.step;
      q.epoch = epoch;
      q.action = a.id;
      q.q = state_.qtable.q(a.id);
      const auto it = epoch_usage_.find(a.id);
      q.usage = it == epoch_usage_.end() ? 0 : it->second;
      state_.qtrace.push_back(q);
    }
  }

  if (state_.config.variant != Variant::NoAbstractions) {
    abstraction_phase();
  }

  const std::vector<Program> preferred = preferred_programs();
  const LanguageComposition comp =
      language_composition(state_.lexicon, dataset_->shapes, preferred);
  state_.composition.push_back(
      {state_.step, comp.primitive_frac, comp.shape_frac, comp.subshape_frac});

  state_.step += 1;
}

void Runner::run(bool log_progress) {
  while (state_.step < state_.config.steps) {
    run_step();
    if (log_progress) {
      const EpochRow& row = state_.metrics.back();
      std::cout << "step " << row.step << " epoch " << row.epoch << " loss " << row.train_loss
                << " reward " << row.train_reward << " test " << row.test_reward
                << " complexity " << row.avg_complexity << " lexicon " << row.lexicon_size
                << "\n";
    }
  }
}

namespace {

nlohmann::json net_to_json(const DenseNet<double>& net) {
  nlohmann::json layers = nlohmann::json::array();
  for (std::size_t l = 0; l < net.weights.size(); ++l) {
    nlohmann::json weights = nlohmann::json::array();
    const auto& w = net.weights[l];
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
      nlohmann::json row = nlohmann::json::array();
      for (Eigen::Index c = 0; c < w.cols(); ++c) row.push_back(w(r, c));
      weights.push_back(std::move(row));
    }
    nlohmann::json bias = nlohmann::json::array();
    for (Eigen::Index r = 0; r < net.biases[l].size(); ++r) bias.push_back(net.biases[l](r));
    layers.push_back({{"rows", w.rows()}, {"cols", w.cols()}, {"weights", std::move(weights)},
                      {"bias", std::move(bias)}});
  }
  return layers;
}

DenseNet<double> net_from_json(const nlohmann::json& j) {
  DenseNet<double> net;
  for (const nlohmann::json& layer : j) {
    const auto rows = layer.at("rows").get<Eigen::Index>();
    const auto cols = layer.at("cols").get<Eigen::Index>();
    Matrix w(rows, cols);
    const nlohmann::json& weights = layer.at("weights");
    for (Eigen::Index r = 0; r < rows; ++r) {
      for (Eigen::Index c = 0; c < cols; ++c) w(r, c) = weights[r][c].get<double>();
    }
    Vector b(rows);
    const nlohmann::json& bias = layer.at("bias");
    for (Eigen::Index r = 0; r < rows; ++r) b(r) = bias[r].get<double>();
    net.weights.push_back(std::move(w));
    net.biases.push_back(std::move(b));
  }
  return net;
}

nlohmann::json adam_to_json(const AdamState<double>& s) {
  auto mats = [](const std::vector<Matrix>& ms) {
    nlohmann::json out = nlohmann::json::array();
    for (const Matrix& m : ms) {
      nlohmann::json flat = nlohmann::json::array();
      for (Eigen::Index c = 0; c < m.cols(); ++c) {
        for (Eigen::Index r = 0; r < m.rows(); ++r) flat.push_back(m(r, c));
      }
      out.push_back({{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(flat)}});
    }
    return out;
  };
  auto vecs = [](const std::vector<Vector>& vs) {
    nlohmann::json out = nlohmann::json::array();
    for (const Vector& v : vs) {
      nlohmann::json flat = nlohmann::json::array();
      for (Eigen::Index r = 0; r < v.size(); ++r) flat.push_back(v(r));
      out.push_back(std::move(flat));
    }
    return out;
  };
  return {{"lr", s.lr},   {"beta1", s.beta1}, {"beta2", s.beta2}, {"eps", s.eps},
          {"step", s.step}, {"mw", mats(s.mw)}, {"vw", mats(s.vw)}, {"mb", vecs(s.mb)},
          {"vb", vecs(s.vb)}};
}

AdamState<double> adam_from_json(const nlohmann::json& j) {
  AdamState<double> s;
  s.lr = j.at("lr").get<double>();
  s.beta1 = j.at("beta1").get<double>();
  s.beta2 = j.at("beta2").get<double>();
  s.eps = j.at("eps").get<double>();
  s.step = j.at("step").get<long>();
  auto mats = [](const nlohmann::json& arr) {
    std::vector<Matrix> out;
    for (const nlohmann::json& jm : arr) {
      Matrix m(jm.at("rows").get<Eigen::Index>(), jm.at("cols").get<Eigen::Index>());
      const nlohmann::json& data = jm.at("data");
      std::size_t k = 0;
      for (Eigen::Index c = 0; c < m.cols(); ++c) {
        for (Eigen::Index r = 0; r < m.rows(); ++r) m(r, c) = data[k++].get<double>();
      }
      out.push_back(std::move(m));
    }
    return out;
  };
  auto vecs = [](const nlohmann::json& arr) {
    std::vector<Vector> out;
    for (const nlohmann::json& jv : arr) {
      Vector v(jv.size());
      for (std::size_t r = 0; r < jv.size(); ++r) v(static_cast<Eigen::Index>(r)) =
          jv[r].get<double>();
      out.push_back(std::move(v));
    }
    return out;
  };
  s.mw = mats(j.at("mw"));
  s.vw = mats(j.at("vw"));
  s.mb = vecs(j.at("mb"));
  s.vb = vecs(j.at("vb"));
  return s;
}

nlohmann::json config_to_json(const RunConfig& c) {
  return {{"steps", c.steps},       {"epochs", c.epochs},     {"alpha", c.alpha},
          {"gamma", c.gamma},       {"epsilon", c.epsilon},   {"q_init", c.q_init},
          {"lr", c.lr},             {"batch", c.batch},       {"tau", c.tau},
          {"lambda_ps", c.lambda_ps}, {"beta_ps", c.beta_ps}, {"vocab", c.vocab},
          {"hidden", c.hidden},     {"n_cap", c.n_cap},       {"prune_keep", c.prune_keep},
          {"max_window", c.max_window}, {"seed", c.seed},
          {"variant", variant_name(c.variant)}};
}

RunConfig config_from_json(const nlohmann::json& j) {
  RunConfig c;
  c.steps = j.at("steps").get<int>();
  c.epochs = j.at("epochs").get<int>();
  c.alpha = j.at("alpha").get<double>();
  c.gamma = j.at("gamma").get<double>();
  c.epsilon = j.at("epsilon").get<double>();
  c.q_init = j.at("q_init").get<double>();
  c.lr = j.at("lr").get<double>();
  c.batch = j.at("batch").get<int>();
  c.tau = j.at("tau").get<double>();
  c.lambda_ps = j.at("lambda_ps").get<double>();
  c.beta_ps = j.at("beta_ps").get<double>();
  c.vocab = j.at("vocab").get<int>();
  c.hidden = j.at("hidden").get<int>();
  c.n_cap = j.at("n_cap").get<int>();
  c.prune_keep = j.at("prune_keep").get<int>();
  c.max_window = j.at("max_window").get<int>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.variant = parse_variant(j.at("variant").get<std::string>());
  return c;
}

}  // namespace

void save_checkpoint(const RunState& state, const std::filesystem::path& file) {
  nlohmann::json j;
  j["config"] = config_to_json(state.config);
  j["step"] = state.step;
  j["regret"] = state.regret;

  nlohmann::json lexicon = nlohmann::json::array();
  for (const Action& a : state.lexicon) lexicon.push_back(a);
  j["lexicon"] = std::move(lexicon);

  nlohmann::json table = nlohmann::json::array();
  for (const std::vector<Program>& programs : state.table.by_scene) table.push_back(programs);
  j["table"] = std::move(table);

  j["qtable"] = state.qtable.values;
  j["architect"] = net_to_json(state.agents.architect);
  j["builder"] = net_to_json(state.agents.builder);
  j["architect_opt"] = adam_to_json(state.architect_opt);
  j["builder_opt"] = adam_to_json(state.builder_opt);

  std::ostringstream rng_text;
  rng_text << state.rng;
  j["rng"] = rng_text.str();
  std::ostringstream eval_rng_text;
  eval_rng_text << state.eval_rng;
  j["eval_rng"] = eval_rng_text.str();

  std::ofstream out(file);
  if (!out) throw GridError("cannot write checkpoint " + file.string());
  out << j.dump() << "\n";
}

RunState load_checkpoint(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw GridError("cannot open checkpoint " + file.string());
  nlohmann::json j;
  in >> j;

  RunState state;
  state.config = config_from_json(j.at("config"));
  state.step = j.at("step").get<int>();
  state.regret = j.at("regret").get<double>();

  state.lexicon = initial_lexicon();
  for (const nlohmann::json& ja : j.at("lexicon")) {
    const int id = ja.at("id").get<int>();
    if (id < 2) continue;
    std::vector<ExpansionStep> expansion;
    ja.at("expansion").get_to(expansion);
    state.lexicon.push_back(
        make_abstraction(id, ja.at("name").get<std::string>(), expansion, state.lexicon));
  }

  for (const nlohmann::json& js : j.at("table")) {
    std::vector<Program> programs;
    js.get_to(programs);
    state.table.by_scene.push_back(std::move(programs));
  }

  state.qtable.alpha = state.config.alpha;
  state.qtable.gamma = state.config.gamma;
  state.qtable.epsilon = state.config.epsilon;
  state.qtable.q_init = state.config.q_init;
  j.at("qtable").get_to(state.qtable.values);

  state.agents.config.n_cap = state.config.n_cap;
  state.agents.config.vocab = state.config.vocab;
  state.agents.config.hidden = state.config.hidden;
  state.agents.architect = net_from_json(j.at("architect"));
  state.agents.builder = net_from_json(j.at("builder"));
  state.architect_opt = adam_from_json(j.at("architect_opt"));
  state.builder_opt = adam_from_json(j.at("builder_opt"));

  std::istringstream rng_text(j.at("rng").get<std::string>());
  rng_text >> state.rng;
  std::istringstream eval_rng_text(j.at("eval_rng").get<std::string>());
  eval_rng_text >> state.eval_rng;
  return state;
}

void write_run_outputs(const std::filesystem::path& run_dir, const Dataset& dataset,
                       const RunState& state) {
  std::filesystem::create_directories(run_dir);

  {
    std::ofstream out(run_dir / "metrics.csv");
    out << "step,epoch,train_loss,train_reward,test_reward,avg_complexity,lexicon_size,"
           "cumulative_regret\n";
    for (const EpochRow& r : state.metrics) {
      out << r.step << "," << r.epoch << "," << r.train_loss << "," << r.train_reward << ","
          << r.test_reward << "," << r.avg_complexity << "," << r.lexicon_size << ","
          << r.cumulative_regret << "\n";
    }
  }
  {
    std::ofstream out(run_dir / "qtrace.csv");
    out << "step,epoch,action,q,usage\n";
    for (const QTraceRow& r : state.qtrace) {
      out << r.step << "," << r.epoch << "," << r.action << "," << r.q << "," << r.usage << "\n";
    }
  }
  {
    std::ofstream out(run_dir / "message_usage.csv");
    out << "step,epoch,action,message,count\n";
    for (const MessageUsageRow& r : state.message_usage) {
      out << r.step << "," << r.epoch << "," << r.action << "," << r.message << "," << r.count
          << "\n";
    }
  }
  {
    std::ofstream out(run_dir / "composition.csv");
    out << "step,primitive_frac,shape_frac,subshape_frac\n";
    for (const CompositionRow& r : state.composition) {
      out << r.step << "," << r.primitive_frac << "," << r.shape_frac << "," << r.subshape_frac
          << "\n";
    }
  }
  {
    std::ofstream out(run_dir / "abstractions.jsonl");
    for (const AbstractionRecord& r : state.abstraction_log) {
      nlohmann::json j{{"step", r.step},   {"skipped", r.skipped}, {"action_id", r.action_id},
                       {"chosen_key", r.key}, {"size", r.size},    {"frequency", r.frequency},
                       {"score", r.score}};
      out << j.dump() << "\n";
    }
  }
  {
    nlohmann::json lexicon = nlohmann::json::array();
    for (const Action& a : state.lexicon) lexicon.push_back(a);
    std::ofstream out(run_dir / "lexicon.json");
    out << lexicon.dump(1) << "\n";
  }
  {
    nlohmann::json manifest;
    manifest["config"] = config_to_json(state.config);
    manifest["dataset_fingerprint"] = dataset_fingerprint(dataset);
    manifest["scenes"] = dataset.scenes.size();
    manifest["train_scenes"] = dataset.split.train.size();
    manifest["test_scenes"] = dataset.split.test.size();
    std::ofstream out(run_dir / "manifest.json");
    out << manifest.dump(1) << "\n";
  }
  {
    // Two illustrative scenes: the first training scene and the one whose
    // greedy program shrank the most.
    RunState scratch = state;
    Runner probe(dataset, std::move(scratch));
    const std::vector<Program> preferred = probe.preferred_programs();
    std::size_t best = 0;
    int best_gain = -1;
    for (std::size_t i = 0; i < preferred.size(); ++i) {
      const Scene& scene = dataset.scene(dataset.split.train[i]);
      const int gain = scene.canonical_program.length() - preferred[i].length();
      if (gain > best_gain) {
        best_gain = gain;
        best = i;
      }
    }
    nlohmann::json examples = nlohmann::json::array();
    for (std::size_t i : std::set<std::size_t>{0, best}) {
      const Scene& scene = dataset.scene(dataset.split.train[i]);
      examples.push_back({{"scene", scene.id},
                          {"goal", scene.goal.to_string()},
                          {"initial_program", scene.canonical_program},
                          {"final_program", preferred[i]}});
    }
    std::ofstream out(run_dir / "program_examples.json");
    out << examples.dump(1) << "\n";
  }
}

}  // namespace pace
