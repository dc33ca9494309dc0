#include "amortized/config.hpp"

#include <fstream>
#include <set>
#include <sstream>
#include <type_traits>

#include <json.hpp>

namespace amortized {

using nlohmann::json;

namespace {

// Reads keys of one JSON object and rejects whatever it did not read.
class Section {
 public:
  Section(const json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
    if (!obj_.is_object()) throw ConfigError(where() + " must be an object");
  }

  bool has(const std::string& key) const { return obj_.contains(key); }

  template <typename T>
  void read(const std::string& key, T& dst) {
    if (!obj_.contains(key)) return;
    seen_.insert(key);
    dst = convert<T>(obj_.at(key), path_ + "." + key);
  }

  Section child(const std::string& key) {
    seen_.insert(key);
    return Section(obj_.at(key), path_ + "." + key);
  }

  const json& raw(const std::string& key) {
    seen_.insert(key);
    return obj_.at(key);
  }

  void finish() const {
    for (const auto& item : obj_.items()) {
      if (!seen_.count(item.key())) throw ConfigError("unknown key " + path_ + "." + item.key());
    }
  }

  template <typename T>
  static T convert(const json& v, const std::string& path) {
    if constexpr (std::is_same_v<T, bool>) {
      if (!v.is_boolean()) throw ConfigError(path + ": expected a boolean");
      return v.get<bool>();
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (!v.is_string()) throw ConfigError(path + ": expected a string");
      return v.get<std::string>();
    } else if constexpr (std::is_floating_point_v<T>) {
      if (!v.is_number()) throw ConfigError(path + ": expected a number");
      return v.get<T>();
    } else if constexpr (std::is_unsigned_v<T>) {
      if (!v.is_number_unsigned()) throw ConfigError(path + ": expected a non-negative integer");
      return v.get<T>();
    } else {
      static_assert(std::is_integral_v<T>);
      if (!v.is_number_integer()) throw ConfigError(path + ": expected an integer");
      const auto wide = v.get<long long>();
      if (wide < std::numeric_limits<T>::min() || wide > std::numeric_limits<T>::max()) {
        throw ConfigError(path + ": integer out of range");
      }
      return static_cast<T>(wide);
    }
  }

 private:
  std::string where() const { return path_; }

  const json& obj_;
  std::string path_;
  std::set<std::string> seen_;
};

template <typename T>
std::vector<T> read_list(const json& v, const std::string& path) {
  if (!v.is_array()) throw ConfigError(path + ": expected an array");
  std::vector<T> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    out.push_back(Section::convert<T>(v[i], path + "[" + std::to_string(i) + "]"));
  }
  return out;
}

PowerDecaySchedule read_schedule(Section s, PowerDecaySchedule dflt) {
  s.read("a", dflt.a);
  s.read("b", dflt.b);
  s.read("gamma", dflt.gamma);
  s.finish();
  return dflt;
}

InitDist read_init(Section& s, const std::string& prefix, InitDist init) {
  s.read(prefix + "mean", init.mean);
  s.read(prefix + "stddev", init.stddev);
  return init;
}

void read_target(Section s, RunConfig& cfg) {
  std::string family = "gmm";
  s.read("family", family);
  if (family == "gmm") {
    GmmFamily f;
    s.read("dim", f.dim);
    s.read("components", f.components);
    s.read("sigma", f.sigma);
    s.read("mean_range", f.mean_range);
    cfg.family = f;
  } else if (family == "rbm") {
    RbmFamily f;
    s.read("dim", f.dim);
    s.read("hidden", f.hidden);
    s.read("weight", f.weight);
    cfg.family = f;
  } else if (family == "logreg") {
    LogRegFamily f;
    s.read("features", f.features);
    s.read("train_size", f.train_size);
    s.read("test_size", f.test_size);
    s.read("prior_precision", f.prior_precision);
    s.read("bias", f.with_bias);
    s.read("minibatch", f.minibatch);
    if (s.has("libsvm_train") || s.has("libsvm_test")) {
      LibsvmSource src;
      s.read("libsvm_train", src.train);
      s.read("libsvm_test", src.test);
      if (src.train.empty() || src.test.empty()) {
        throw ConfigError("target: libsvm_train and libsvm_test must be given together");
      }
      cfg.libsvm = src;
    }
    cfg.family = f;
  } else {
    throw ConfigError("target.family: unknown family '" + family + "' (expected gmm|rbm|logreg)");
  }
  s.finish();
}

void read_train(Section s, TrainConfig& t) {
  s.read("batch", t.batch);
  s.read("step", t.step);
  if (s.has("rule")) {
    std::string rule;
    s.read("rule", rule);
    try {
      t.rule = parse_update_rule(rule);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("train.rule: ") + e.what());
    }
  }
  s.read("inner_steps", t.inner_steps);
  s.read("inner_step", t.inner_step);
  s.read("ridge", t.ridge);
  s.read("dense_cap", t.dense_cap);
  s.read("alpha", t.alpha);
  if (s.has("optimizer")) {
    std::string opt;
    s.read("optimizer", opt);
    if (opt == "sgd") {
      t.optimizer = OuterOptimizer::Sgd;
    } else if (opt == "adam") {
      t.optimizer = OuterOptimizer::Adam;
    } else {
      throw ConfigError("train.optimizer: expected sgd|adam, got '" + opt + "'");
    }
  }
  s.read("iterations", t.iterations);
  s.read("eval_batch", t.eval_batch);
  s.read("eval_every", t.eval_every);
  s.read("record_time", t.record_time);
  s.finish();
}

void read_eval(Section s, EvalConfig& e) {
  if (s.has("checkpoint")) {
    std::string path;
    s.read("checkpoint", path);
    e.checkpoint = path;
  }
  if (s.has("schedule")) e.schedule = read_schedule(s.child("schedule"), PowerDecaySchedule{});
  s.read("trials", e.mse.trials);
  if (s.has("sample_sizes")) {
    e.mse.sample_sizes = read_list<std::size_t>(s.raw("sample_sizes"), "eval.sample_sizes");
  }
  if (s.has("specs")) {
    e.mse.specs.clear();
    for (const auto& tag : read_list<std::string>(s.raw("specs"), "eval.specs")) {
      try {
        e.mse.specs.push_back(parse_moment_kind(tag));
      } catch (const std::invalid_argument& err) {
        throw ConfigError(std::string("eval.specs: ") + err.what());
      }
    }
  }
  s.read("datasets", e.datasets);
  s.read("samples", e.samples);
  s.read("refine_steps", e.refine_steps);
  if (s.has("refine_schedule")) e.refine = read_schedule(s.child("refine_schedule"), e.refine);
  s.finish();
}

void read_baseline(Section s, GridOptions& g) {
  s.read("a_min", g.a_min);
  s.read("a_max", g.a_max);
  s.read("b_min", g.b_min);
  s.read("b_max", g.b_max);
  s.read("gamma", g.gamma);
  s.read("train_draws", g.train_draws);
  s.read("samples", g.samples);
  s.finish();
}

void read_svgd(Section s, SvgdDemoConfig& d) {
  s.read("particles", d.particles);
  s.read("steps", d.options.steps);
  s.read("step_size", d.options.step_size);
  s.read("alpha", d.options.alpha);
  s.read("adagrad", d.options.adagrad);
  if (s.has("snapshots")) d.snapshots = read_list<int>(s.raw("snapshots"), "svgd.snapshots");
  d.init = read_init(s, "init_", d.init);
  s.finish();
}

void read_sampler(Section s, SamplerConfig& c) {
  s.read("steps", c.steps);
  s.read("block_size", c.block_size);
  s.read("init_log_step", c.init_log_step);
  s.read("scalar_step", c.scalar_step);
  c.init = read_init(s, "init_", c.init);
  s.finish();
}

json schedule_json(const PowerDecaySchedule& s) {
  return {{"a", s.a}, {"b", s.b}, {"gamma", s.gamma}};
}

}  // namespace

void RunConfig::validate() const {
  auto require = [](bool ok, const std::string& msg) {
    if (!ok) throw ConfigError(msg);
  };
  require(!out.empty(), "out: output directory must be non-empty");
  std::visit(
      [&](const auto& f) {
        using F = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<F, GmmFamily>) {
          require(f.dim >= 1 && f.components >= 1, "target: gmm needs dim, components >= 1");
          require(f.sigma > 0.0 && f.mean_range >= 0.0, "target: gmm needs sigma > 0, mean_range >= 0");
        } else if constexpr (std::is_same_v<F, RbmFamily>) {
          require(f.dim >= 1 && f.hidden >= 1, "target: rbm needs dim, hidden >= 1");
          require(f.hidden <= 20, "target: rbm hidden must be <= 20 for exact moments");
          require(f.weight >= 0.0, "target: rbm weight must be >= 0");
        } else {
          require(f.features >= 1 && f.train_size >= 1 && f.test_size >= 1,
                  "target: logreg needs features, train_size, test_size >= 1");
          require(f.prior_precision > 0.0, "target: prior_precision must be > 0");
        }
      },
      family);
  require(sampler.steps >= 1, "sampler.steps must be >= 1");
  require(sampler.block_size >= 1 && sampler.block_size <= sampler.steps,
          "sampler.block_size must be in [1, steps]");
  require(sampler.init.stddev >= 0.0, "sampler.init_stddev must be >= 0");
  require(train.iterations >= 0, "train.iterations must be >= 0");
  require(train.eval_every >= 1, "train.eval_every must be >= 1");
  require(train.eval_batch >= 2, "train.eval_batch must be >= 2");
  try {
    train.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("train: ") + e.what());
  }
  require(eval.mse.trials >= 1, "eval.trials must be >= 1");
  require(!eval.mse.sample_sizes.empty(), "eval.sample_sizes must be non-empty");
  for (auto n : eval.mse.sample_sizes) require(n >= 1, "eval.sample_sizes must be >= 1");
  require(!eval.mse.specs.empty(), "eval.specs must be non-empty");
  require(eval.datasets >= 1 && eval.samples >= 1, "eval.datasets and eval.samples must be >= 1");
  require(eval.refine_steps >= 0, "eval.refine_steps must be >= 0");
  require(eval.refine.b > 0, "eval.refine_schedule.b must be > 0");
  if (eval.schedule) require(eval.schedule->b > 0, "eval.schedule.b must be > 0");
  require(baseline.a_min <= baseline.a_max && baseline.b_min <= baseline.b_max,
          "baseline: empty grid");
  require(baseline.train_draws >= 1 && baseline.samples >= 1,
          "baseline: train_draws and samples must be >= 1");
  require(svgd.particles >= 1, "svgd.particles must be >= 1");
  require(svgd.options.steps >= 0, "svgd.steps must be >= 0");
  require(svgd.options.step_size > 0.0, "svgd.step_size must be > 0");
  require(svgd.options.alpha >= 0.0, "svgd.alpha must be >= 0");
  for (int s : svgd.snapshots) {
    require(s >= 0 && s <= svgd.options.steps, "svgd.snapshots must lie in [0, steps]");
  }
}

RunConfig parse_config(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  RunConfig cfg;
  Section root(doc, "config");
  root.read("seed", cfg.seed);
  root.read("out", cfg.out);
  if (root.has("target")) read_target(root.child("target"), cfg);
  if (root.has("sampler")) read_sampler(root.child("sampler"), cfg.sampler);
  if (root.has("train")) read_train(root.child("train"), cfg.train);
  if (root.has("eval")) read_eval(root.child("eval"), cfg.eval);
  if (root.has("baseline")) read_baseline(root.child("baseline"), cfg.baseline);
  if (root.has("svgd")) read_svgd(root.child("svgd"), cfg.svgd);
  root.finish();
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

std::string config_to_json(const RunConfig& cfg) {
  json target = std::visit(
      [&](const auto& f) -> json {
        using F = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<F, GmmFamily>) {
          return {{"family", "gmm"}, {"dim", f.dim}, {"components", f.components},
                  {"sigma", f.sigma}, {"mean_range", f.mean_range}};
        } else if constexpr (std::is_same_v<F, RbmFamily>) {
          return {{"family", "rbm"}, {"dim", f.dim}, {"hidden", f.hidden}, {"weight", f.weight}};
        } else {
          json j = {{"family", "logreg"},        {"features", f.features},
                    {"train_size", f.train_size}, {"test_size", f.test_size},
                    {"prior_precision", f.prior_precision}, {"bias", f.with_bias},
                    {"minibatch", f.minibatch}};
          if (cfg.libsvm) {
            j["libsvm_train"] = cfg.libsvm->train;
            j["libsvm_test"] = cfg.libsvm->test;
          }
          return j;
        }
      },
      cfg.family);

  const auto& t = cfg.train;
  json specs = json::array();
  for (auto k : cfg.eval.mse.specs) specs.push_back(to_string(k));
  json eval = {{"trials", cfg.eval.mse.trials},
               {"sample_sizes", cfg.eval.mse.sample_sizes},
               {"specs", specs},
               {"datasets", cfg.eval.datasets},
               {"samples", cfg.eval.samples},
               {"refine_steps", cfg.eval.refine_steps},
               {"refine_schedule", schedule_json(cfg.eval.refine)}};
  if (cfg.eval.checkpoint) eval["checkpoint"] = *cfg.eval.checkpoint;
  if (cfg.eval.schedule) eval["schedule"] = schedule_json(*cfg.eval.schedule);

  const auto& g = cfg.baseline;
  const auto& s = cfg.svgd;
  json doc = {
      {"seed", cfg.seed},
      {"out", cfg.out},
      {"target", target},
      {"sampler",
       {{"steps", cfg.sampler.steps},
        {"block_size", cfg.sampler.block_size},
        {"init_log_step", cfg.sampler.init_log_step},
        {"scalar_step", cfg.sampler.scalar_step},
        {"init_mean", cfg.sampler.init.mean},
        {"init_stddev", cfg.sampler.init.stddev}}},
      {"train",
       {{"batch", t.batch},
        {"step", t.step},
        {"rule", to_string(t.rule)},
        {"inner_steps", t.inner_steps},
        {"inner_step", t.inner_step},
        {"ridge", t.ridge},
        {"dense_cap", t.dense_cap},
        {"alpha", t.alpha},
        {"optimizer", t.optimizer == OuterOptimizer::Adam ? "adam" : "sgd"},
        {"iterations", t.iterations},
        {"eval_batch", t.eval_batch},
        {"eval_every", t.eval_every},
        {"record_time", t.record_time}}},
      {"eval", eval},
      {"baseline",
       {{"a_min", g.a_min},
        {"a_max", g.a_max},
        {"b_min", g.b_min},
        {"b_max", g.b_max},
        {"gamma", g.gamma},
        {"train_draws", g.train_draws},
        {"samples", g.samples}}},
      {"svgd",
       {{"particles", s.particles},
        {"steps", s.options.steps},
        {"step_size", s.options.step_size},
        {"alpha", s.options.alpha},
        {"adagrad", s.options.adagrad},
        {"snapshots", s.snapshots},
        {"init_mean", s.init.mean},
        {"init_stddev", s.init.stddev}}},
  };
  return doc.dump(2) + "\n";
}

}  // namespace amortized
