#include "amortized/cli.hpp"

#include <omp.h>

#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <json.hpp>

#include "amortized/checkpoint.hpp"
#include "amortized/config.hpp"
#include "amortized/csv.hpp"
#include "amortized/libsvm.hpp"
#include "amortized/svgd.hpp"

#ifndef AMORTIZED_SAMPLER_VERSION
#define AMORTIZED_SAMPLER_VERSION "unknown"
#endif

namespace amortized {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Independent streams hanging off the root seed.
constexpr std::uint64_t kEvalStream = 2;
constexpr std::uint64_t kBaselineStream = 3;
constexpr std::uint64_t kSvgdStream = 4;
constexpr std::uint64_t kClassifyStream = 5;

struct Flags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<int> refine_steps;
  std::optional<std::string> update_rule;
  std::optional<int> inner_steps;
  std::optional<std::string> checkpoint;
};

struct Run {
  std::string command;
  RunConfig cfg;
  fs::path out;
  std::vector<std::string> artifacts;

  std::string path(const std::string& name) {
    artifacts.push_back(name);
    return (out / name).string();
  }
};

void apply_thread_cap() {
  const char* env = std::getenv("AMORTIZED_SAMPLER_THREADS");
  if (env == nullptr || *env == '\0') return;
  const std::string_view text(env);
  int threads = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), threads);
  if (ec != std::errc() || ptr != text.data() + text.size() || threads < 1) {
    throw ConfigError("AMORTIZED_SAMPLER_THREADS must be a positive integer, got '" +
                      std::string(text) + "'");
  }
  omp_set_num_threads(threads);
}

RunConfig resolve_config(const Flags& flags) {
  RunConfig cfg = flags.config.empty() ? RunConfig{} : load_config(flags.config);
  if (flags.seed) cfg.seed = *flags.seed;
  if (flags.out) cfg.out = *flags.out;
  if (flags.refine_steps) cfg.eval.refine_steps = *flags.refine_steps;
  if (flags.update_rule) cfg.train.rule = parse_update_rule(*flags.update_rule);
  if (flags.inner_steps) cfg.train.inner_steps = *flags.inner_steps;
  if (flags.checkpoint) cfg.eval.checkpoint = *flags.checkpoint;
  cfg.validate();
  return cfg;
}

void write_manifest(Run& run) {
  json doc = {
      {"tool", "amortized-sampler"},
      {"version", AMORTIZED_SAMPLER_VERSION},
      {"command", run.command},
      {"seed", run.cfg.seed},
      {"config", json::parse(config_to_json(run.cfg))},
      {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) +
                    "." + std::to_string(EIGEN_MINOR_VERSION)},
      {"checkpoint_format_version", kCheckpointFormatVersion},
      {"artifacts", run.artifacts},
  };
  const std::string text = doc.dump(2) + "\n";
  write_file((run.out / "manifest.json").string(), [&](std::ostream& o) { o << text; });
}

// Real dataset as a single logistic-regression target plus its test split.
FamilyDraw libsvm_draw(const RunConfig& cfg) {
  const auto& family = std::get<LogRegFamily>(cfg.family);
  LibsvmDataset train = load_libsvm(cfg.libsvm->train);
  LibsvmDataset test = load_libsvm(cfg.libsvm->test);
  const Eigen::Index dim = std::max(train.X.cols(), test.X.cols());
  auto pad = [dim](Eigen::MatrixXd& X) {
    const Eigen::Index old = X.cols();
    X.conservativeResize(Eigen::NoChange, dim);
    X.rightCols(dim - old).setZero();
  };
  pad(train.X);
  pad(test.X);
  auto target = std::make_shared<const BayesLogReg>(train.X, train.y, family.prior_precision,
                                                    family.with_bias, family.minibatch);
  FamilyDraw draw;
  draw.theta_hash = hash_doubles(train.X.data(), static_cast<std::size_t>(train.X.size()));
  draw.test = TestSet{target->augment(test.X), test.y};
  draw.target = std::move(target);
  return draw;
}

Eigen::Index target_dim(const RunConfig& cfg) {
  if (cfg.libsvm) return libsvm_draw(cfg).target->dim();
  return family_dim(cfg.family);
}

LangevinSampler make_sampler(const RunConfig& cfg, Eigen::Index dim) {
  const auto& s = cfg.sampler;
  return LangevinSampler(s.steps, dim, s.block_size, s.init_log_step, s.scalar_step, s.init);
}

void cmd_svgd_demo(Run& run) {
  const RunConfig& cfg = run.cfg;
  Rng rng(derive_seed(cfg.seed, kSvgdStream));
  const FamilyDraw draw = cfg.libsvm ? libsvm_draw(cfg) : draw_family_params(cfg.family, rng);
  const Eigen::Index d = draw.target->dim();
  const auto n = static_cast<Eigen::Index>(cfg.svgd.particles);
  ParticleMatrix init(n, d);
  std::normal_distribution<double> normal(cfg.svgd.init.mean, cfg.svgd.init.stddev);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) init(i, j) = normal(rng);
  }
  std::vector<int> snapshots = cfg.svgd.snapshots;
  snapshots.push_back(cfg.svgd.options.steps);
  auto observer = [&](int it, const ParticleMatrix& z) {
    if (std::find(snapshots.begin(), snapshots.end(), it) == snapshots.end()) return;
    const std::string name = "particles_" + std::to_string(it) + ".csv";
    if (std::find(run.artifacts.begin(), run.artifacts.end(), name) != run.artifacts.end()) return;
    write_file(run.path(name), [&](std::ostream& o) { write_particles_csv(o, z); });
  };
  svgd_run(init, *draw.target, cfg.svgd.options, observer);
}

void cmd_train(Run& run, std::ostream& out) {
  const RunConfig& cfg = run.cfg;
  TargetProvider provider;
  Eigen::Index dim = 0;
  if (cfg.libsvm) {
    const FamilyDraw draw = libsvm_draw(cfg);
    dim = draw.target->dim();
    provider = [draw](Rng&) { return draw; };
  } else {
    dim = family_dim(cfg.family);
    provider = family_provider(cfg.family);
  }
  LangevinSampler model = make_sampler(cfg, dim);
  TrainConfig tc = cfg.train;
  tc.seed = cfg.seed;
  const TrainLog log = train(model, provider, tc);
  save_checkpoint(run.path("checkpoint.json"), model);
  write_file(run.path("metrics.csv"), [&](std::ostream& o) { write_metrics_csv(o, log); });
  if (!log.rows.empty()) {
    out << "final ksd_u " << format_double(log.rows.back().ksd) << "\n";
  }
}

void cmd_eval(Run& run, std::ostream& out) {
  const RunConfig& cfg = run.cfg;
  const Eigen::Index dim = target_dim(cfg);
  std::optional<LangevinSampler> sampler;
  std::string method;
  if (cfg.eval.checkpoint) {
    sampler = load_checkpoint(*cfg.eval.checkpoint);
    method = "amortized";
  } else if (cfg.eval.schedule) {
    PowerDecaySchedule schedule = *cfg.eval.schedule;
    schedule.steps = cfg.sampler.steps;
    sampler = schedule_sampler(schedule, dim, cfg.sampler.init);
    method = "power_decay";
  } else {
    throw ConfigError("eval needs eval.checkpoint (or --checkpoint) or eval.schedule");
  }
  if (sampler->dim() != dim) {
    throw ConfigError("sampler dimension " + std::to_string(sampler->dim()) +
                      " does not match the target dimension " + std::to_string(dim));
  }
  SampleSource source = model_source(*sampler);
  int steps = sampler->steps();
  if (cfg.eval.refine_steps > 0) {
    PowerDecaySchedule refine = cfg.eval.refine;
    refine.steps = cfg.eval.refine_steps;
    source = refined_source(std::move(source), refine.step_sizes());
    steps += refine.steps;
    method += "+refine";
  }

  std::vector<ResultRow> rows;
  const std::uint64_t eval_seed = derive_seed(cfg.seed, kEvalStream);
  if (std::holds_alternative<LogRegFamily>(cfg.family)) {
    std::vector<FamilyDraw> datasets;
    if (cfg.libsvm) {
      datasets.push_back(libsvm_draw(cfg));
    } else {
      Rng rng(eval_seed);
      for (int k = 0; k < cfg.eval.datasets; ++k) {
        datasets.push_back(draw_family_params(cfg.family, rng));
      }
    }
    const std::uint64_t sample_root = derive_seed(cfg.seed, kClassifyStream);
    for (std::size_t k = 0; k < datasets.size(); ++k) {
      Rng rng(derive_seed(sample_root, k));
      const ParticleMatrix z = source(*datasets[k].target, cfg.eval.samples, rng);
      const ClassifyResult r = predict_scores(z, *datasets[k].test);
      const int trial = static_cast<int>(k);
      rows.push_back({"logreg", method, steps, "accuracy", cfg.eval.samples, trial, r.accuracy});
      rows.push_back(
          {"logreg", method, steps, "log_likelihood", cfg.eval.samples, trial, r.log_likelihood});
    }
    write_file(run.path("classify.csv"), [&](std::ostream& o) { write_results_csv(o, rows); });
    out << "mean accuracy " << format_double(mean_value(rows, "accuracy", cfg.eval.samples))
        << "\n";
  } else {
    MseOptions options = cfg.eval.mse;
    options.seed = eval_seed;
    rows = mse_table(source, cfg.family, options, method, steps);
    write_file(run.path("mse.csv"), [&](std::ostream& o) { write_results_csv(o, rows); });
    for (auto kind : options.specs) {
      for (auto n : options.sample_sizes) {
        out << to_string(kind) << " n=" << n << " mean mse "
            << format_double(mean_value(rows, to_string(kind), n)) << "\n";
      }
    }
  }
}

void cmd_baseline(Run& run, std::ostream& out) {
  const RunConfig& cfg = run.cfg;
  if (cfg.libsvm) throw ConfigError("baseline runs on the synthetic family only; remove libsvm_*");
  GridOptions options = cfg.baseline;
  options.seed = derive_seed(cfg.seed, kBaselineStream);
  options.init = cfg.sampler.init;
  const GridResult result = grid_search_baseline(cfg.family, cfg.sampler.steps, options);
  write_file(run.path("grid.csv"), [&](std::ostream& o) {
    o << "a,b,status,score\n";
    for (const auto& c : result.cells) {
      const char* status = !c.valid ? "invalid" : c.diverged ? "diverged" : "ok";
      o << c.a << ',' << c.b << ',' << status << ',' << format_double(c.score) << '\n';
    }
  });
  out << "best a=" << result.best_a << " b=" << result.best_b
      << " score=" << format_double(result.best_score) << "\n";
}

void cmd_inspect(const RunConfig& cfg, std::ostream& out) {
  if (!cfg.eval.checkpoint) throw ConfigError("inspect needs --checkpoint PATH");
  const LangevinSampler sampler = load_checkpoint(*cfg.eval.checkpoint);
  out << "steps " << sampler.steps() << " dim " << sampler.dim() << " block_size "
      << sampler.block_size() << (sampler.scalar_step() ? " scalar" : " per-coordinate") << "\n";
  out << "t,block";
  const auto& lambda = sampler.log_step();
  for (Eigen::Index j = 0; j < lambda.cols(); ++j) out << ",eta" << j;
  out << "\n";
  for (int t = 0; t < sampler.steps(); ++t) {
    out << t << ',' << t / sampler.block_size();
    for (Eigen::Index j = 0; j < lambda.cols(); ++j) out << ',' << format_double(std::exp(lambda(t, j)));
    out << "\n";
  }
}

void add_common(CLI::App* sub, Flags& flags) {
  sub->add_option("--config", flags.config, "JSON run configuration")->check(CLI::ExistingFile);
  sub->add_option("--seed", flags.seed, "root random seed");
  sub->add_option("--out", flags.out, "output directory");
}

}  // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Amortized Stein variational samplers", "amortized-sampler"};
  app.set_version_flag("--version", AMORTIZED_SAMPLER_VERSION);
  app.require_subcommand(1);
  Flags flags;

  auto* svgd = app.add_subcommand("svgd-demo", "run SVGD on one target and dump particle CSVs");
  add_common(svgd, flags);

  auto* train_cmd = app.add_subcommand("train", "train a Langevin sampler; writes checkpoint and metrics");
  add_common(train_cmd, flags);
  train_cmd->add_option("--update-rule", flags.update_rule, "chain|full|linearized|aksd")
      ->check(CLI::IsMember({"chain", "full", "linearized", "aksd"}));
  train_cmd->add_option("--inner-steps", flags.inner_steps, "inner gradient steps of the full rule")
      ->check(CLI::PositiveNumber);

  auto* eval = app.add_subcommand("eval", "evaluate a checkpoint or schedule on held-out targets");
  add_common(eval, flags);
  eval->add_option("--checkpoint", flags.checkpoint, "checkpoint written by train");
  eval->add_option("--refine-steps", flags.refine_steps, "extra Langevin steps after sampling")
      ->check(CLI::NonNegativeNumber);

  auto* baseline = app.add_subcommand("baseline", "grid-search the power-decay step schedule");
  add_common(baseline, flags);

  auto* inspect = app.add_subcommand("inspect", "print the step-size schedule of a checkpoint");
  inspect->add_option("checkpoint", flags.checkpoint, "checkpoint file")->required();
  inspect->add_option("--out", flags.out, "also write a manifest to this directory");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitConfig;
  }

  Run run;
  run.command = app.get_subcommands().front()->get_name();
  try {
    apply_thread_cap();
    run.cfg = resolve_config(flags);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  }

  try {
    if (run.command == "inspect") {
      cmd_inspect(run.cfg, out);
      if (!flags.out) return kExitOk;
    }
    run.out = run.cfg.out;
    fs::create_directories(run.out);
    if (run.command == "svgd-demo") cmd_svgd_demo(run);
    if (run.command == "train") cmd_train(run, out);
    if (run.command == "eval") cmd_eval(run, out);
    if (run.command == "baseline") cmd_baseline(run, out);
    write_manifest(run);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitOk;
}

}  // namespace amortized
