// Command-line driver: dataset generation, runs, baseline comparisons,
// adoption sweeps, the efficiency frontier, the q-init study and reports.
#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "pace/experiments.hpp"
#include "pace/report.hpp"
#include "pace/shapes.hpp"
#include "pace/trainer.hpp"

namespace {

struct CommonOptions {
  std::string dataset_file;
  int shapes = 31;
  std::uint64_t dataset_seed = 0;
  std::string out_dir;
  int jobs = 1;
  std::string variant = "pace";
  pace::RunConfig config;
};

void add_run_options(CLI::App* cmd, CommonOptions& opts) {
  cmd->add_option("--dataset", opts.dataset_file, "dataset file; omitted = builtin library");
  cmd->add_option("--shapes", opts.shapes, "builtin shapes to use when no dataset file is given")
      ->check(CLI::Range(2, 31));
  cmd->add_option("--dataset-seed", opts.dataset_seed, "split seed for the builtin dataset");
  cmd->add_option("--seed", opts.config.seed, "run seed");
  cmd->add_option("--steps", opts.config.steps, "interaction steps")->check(CLI::PositiveNumber);
  cmd->add_option("--epochs", opts.config.epochs, "epochs per step")->check(CLI::PositiveNumber);
  cmd->add_option("--alpha", opts.config.alpha, "Q learning rate");
  cmd->add_option("--gamma", opts.config.gamma, "per-action length discount");
  cmd->add_option("--epsilon", opts.config.epsilon, "exploration probability");
  cmd->add_option("--q-init", opts.config.q_init, "Q value for new actions");
  cmd->add_option("--lr", opts.config.lr, "optimizer learning rate");
  cmd->add_option("--batch", opts.config.batch, "batch size")->check(CLI::PositiveNumber);
  cmd->add_option("--tau", opts.config.tau, "gumbel-softmax temperature");
  cmd->add_option("--lambda-ps", opts.config.lambda_ps, "positive signalling weight");
  cmd->add_option("--beta-ps", opts.config.beta_ps, "conditional entropy weight");
  cmd->add_option("--vocab", opts.config.vocab, "message alphabet size");
  cmd->add_option("--hidden", opts.config.hidden, "hidden layer width");
  cmd->add_option("--n-cap", opts.config.n_cap, "action one-hot capacity");
  cmd->add_option("--prune-keep", opts.config.prune_keep, "programs kept per scene at pruning");
  cmd->add_option("--max-window", opts.config.max_window, "longest mined action window");
  cmd->add_option("--jobs", opts.jobs, "worker threads")->check(CLI::PositiveNumber);
}

pace::Dataset resolve_dataset(const CommonOptions& opts) {
  if (!opts.dataset_file.empty()) return pace::load_dataset(opts.dataset_file);
  return pace::make_dataset(pace::builtin_shape_library(opts.shapes), opts.dataset_seed);
}

void write_tool_manifest(const std::filesystem::path& dir, const std::string& tool,
                         const pace::Dataset& dataset, const nlohmann::json& extra) {
  std::filesystem::create_directories(dir);
  nlohmann::json j;
  j["tool"] = tool;
  j["dataset_fingerprint"] = pace::dataset_fingerprint(dataset);
  j["options"] = extra;
  std::ofstream out(dir / "manifest.json");
  out << j.dump(1) << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"architect-builder block communication experiments"};
  app.require_subcommand(1);
  app.set_config("--config", "", "config file (key=value, [section] headers allowed)");

  // dataset generate
  auto* dataset_cmd = app.add_subcommand("dataset", "dataset tools");
  dataset_cmd->require_subcommand(1);
  auto* generate = dataset_cmd->add_subcommand("generate", "build and save a scene dataset");
  std::string gen_spec = "builtin";
  std::uint64_t gen_seed = 0;
  int gen_shapes = 31;
  std::string gen_out = "dataset.json";
  generate->add_option("--spec", gen_spec, "shape spec JSON file or 'builtin'");
  generate->add_option("--seed", gen_seed, "split seed");
  generate->add_option("--shapes", gen_shapes, "builtin shapes to include")
      ->check(CLI::Range(2, 31));
  generate->add_option("--out", gen_out, "output file");

  // run
  auto* run_cmd = app.add_subcommand("run", "train one variant on one seed");
  CommonOptions run_opts;
  add_run_options(run_cmd, run_opts);
  run_cmd->add_option("--variant", run_opts.variant, "pace | noabs | greedy");
  run_cmd->add_option("--out", run_opts.out_dir, "run output directory")->required();
  bool run_checkpoints = true;
  run_cmd->add_flag("--checkpoints,!--no-checkpoints", run_checkpoints,
                    "write a checkpoint per step");

  // compare
  auto* compare_cmd = app.add_subcommand("compare", "baseline comparison across variants");
  CommonOptions cmp_opts;
  add_run_options(compare_cmd, cmp_opts);
  std::vector<std::string> cmp_variants{"pace", "noabs", "greedy"};
  std::vector<std::uint64_t> cmp_seeds{0, 1, 2};
  compare_cmd->add_option("--variants", cmp_variants, "variants to run")->delimiter(',');
  compare_cmd->add_option("--seeds", cmp_seeds, "seeds to run")->delimiter(',');
  compare_cmd->add_option("--out", cmp_opts.out_dir, "output directory")->required();

  // sweep
  auto* sweep_cmd = app.add_subcommand("sweep", "candidate adoption sweep by language size");
  CommonOptions sweep_opts;
  add_run_options(sweep_cmd, sweep_opts);
  std::vector<int> sweep_buckets{2, 8, 15};
  int sweep_arms = 30;
  int sweep_budget = 40;
  int sweep_per_group = 3;
  sweep_cmd->add_option("--buckets", sweep_buckets, "lexicon size snapshots")->delimiter(',');
  sweep_cmd->add_option("--arms", sweep_arms, "total trial arms");
  sweep_cmd->add_option("--budget-epochs", sweep_budget, "training epochs per arm");
  sweep_cmd->add_option("--per-group", sweep_per_group, "arms sampled per (size,freq) group");
  sweep_cmd->add_option("--out", sweep_opts.out_dir, "output directory")->required();

  // frontier
  auto* frontier_cmd = app.add_subcommand("frontier", "average length vs language size frontier");
  CommonOptions frontier_opts;
  add_run_options(frontier_cmd, frontier_opts);
  int frontier_max_size = 12;
  int frontier_pool = 300;
  int frontier_beam = 3;
  frontier_cmd->add_option("--max-size", frontier_max_size, "largest lexicon size");
  frontier_cmd->add_option("--max-pool", frontier_pool, "candidate pool cap");
  frontier_cmd->add_option("--beam", frontier_beam, "beam width");
  frontier_cmd->add_option("--out", frontier_opts.out_dir, "output directory")->required();

  // qinit
  auto* qinit_cmd = app.add_subcommand("qinit", "pessimistic vs optimistic Q-init regret study");
  CommonOptions qinit_opts;
  add_run_options(qinit_cmd, qinit_opts);
  int qinit_seeds = 8;
  qinit_cmd->add_option("--study-seeds", qinit_seeds, "independent seeds");
  qinit_cmd->add_option("--out", qinit_opts.out_dir, "output directory")->required();

  // report
  auto* report_cmd = app.add_subcommand("report", "render charts from a run directory");
  std::string report_dir;
  report_cmd->add_option("dir", report_dir, "run directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (*generate) {
      std::vector<pace::Shape> shapes = gen_spec == "builtin"
                                            ? pace::builtin_shape_library(gen_shapes)
                                            : pace::load_shape_spec(gen_spec);
      const pace::Dataset dataset = pace::make_dataset(std::move(shapes), gen_seed);
      pace::save_dataset(dataset, gen_out);
      std::cout << "wrote " << gen_out << " (" << dataset.scenes.size() << " scenes, "
                << dataset.split.train.size() << " train / " << dataset.split.test.size()
                << " test, mean length " << dataset.mean_canonical_length() << ")\n";
    } else if (*run_cmd) {
      run_opts.config.variant = pace::parse_variant(run_opts.variant);
      const pace::Dataset dataset = resolve_dataset(run_opts);
      pace::Runner runner(dataset, run_opts.config);
      const std::filesystem::path out_dir(run_opts.out_dir);
      std::filesystem::create_directories(out_dir / "checkpoints");
      while (runner.state().step < run_opts.config.steps) {
        runner.run_step();
        const pace::EpochRow& row = runner.state().metrics.back();
        std::cout << "step " << row.step << " epoch " << row.epoch << " loss " << row.train_loss
                  << " reward " << row.train_reward << " test " << row.test_reward
                  << " complexity " << row.avg_complexity << " lexicon " << row.lexicon_size
                  << "\n";
        if (run_checkpoints) {
          pace::save_checkpoint(runner.state(),
                                out_dir / "checkpoints" /
                                    ("step_" + std::to_string(row.step) + ".json"));
        }
      }
      pace::write_run_outputs(out_dir, dataset, runner.state());
    } else if (*compare_cmd) {
      const pace::Dataset dataset = resolve_dataset(cmp_opts);
      std::vector<pace::Variant> variants;
      for (const std::string& name : cmp_variants) variants.push_back(pace::parse_variant(name));
      write_tool_manifest(cmp_opts.out_dir, "compare", dataset,
                          {{"seeds", cmp_seeds}, {"variants", cmp_variants}});
      pace::run_baseline_comparison(dataset, cmp_opts.config, variants, cmp_seeds, cmp_opts.jobs,
                                    std::filesystem::path(cmp_opts.out_dir));
      std::cout << "comparison written to " << cmp_opts.out_dir << "\n";
    } else if (*sweep_cmd) {
      sweep_opts.config.variant = pace::Variant::Pace;
      const pace::Dataset dataset = resolve_dataset(sweep_opts);
      write_tool_manifest(sweep_opts.out_dir, "sweep", dataset,
                          {{"buckets", sweep_buckets},
                           {"arms", sweep_arms},
                           {"budget_epochs", sweep_budget}});
      const pace::SweepReport report = pace::run_adoption_sweep(
          dataset, sweep_opts.config, sweep_buckets, sweep_arms, sweep_budget, sweep_per_group,
          sweep_opts.jobs, std::filesystem::path(sweep_opts.out_dir));
      for (const auto& [bucket, rate] : report.adoption_rate) {
        std::cout << "lexicon size " << bucket << ": adoption rate " << rate << "\n";
      }
    } else if (*frontier_cmd) {
      const pace::Dataset dataset = resolve_dataset(frontier_opts);
      const std::vector<pace::FrontierPoint> frontier =
          pace::dataset_frontier(dataset, frontier_max_size, frontier_pool, frontier_beam);
      write_tool_manifest(frontier_opts.out_dir, "frontier", dataset,
                          {{"max_size", frontier_max_size}, {"max_pool", frontier_pool}});
      std::ofstream out(std::filesystem::path(frontier_opts.out_dir) / "frontier.csv");
      out << "lexicon_size,best_avg_mdl\n";
      for (const pace::FrontierPoint& p : frontier) {
        out << p.lexicon_size << "," << p.best_avg_mdl << "\n";
      }
      std::cout << "frontier written to " << frontier_opts.out_dir << "\n";
    } else if (*qinit_cmd) {
      const pace::Dataset dataset = resolve_dataset(qinit_opts);
      write_tool_manifest(qinit_opts.out_dir, "qinit", dataset, {{"seeds", qinit_seeds}});
      const pace::QInitReport report =
          pace::run_qinit_study(dataset, qinit_opts.config, qinit_seeds, qinit_opts.jobs,
                                std::filesystem::path(qinit_opts.out_dir));
      std::cout << "pessimistic mean regret " << pace::mean_ci95(report.regret_pessimistic).mean
                << ", optimistic mean regret " << pace::mean_ci95(report.regret_optimistic).mean
                << ", one-sided p " << report.test.p_one_sided << "\n";
    } else if (*report_cmd) {
      pace::render_report(report_dir);
      std::cout << "report written to " << (std::filesystem::path(report_dir) / "report") << "\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
