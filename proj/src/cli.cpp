#include "invforge/cli.hpp"

#include <CLI11.hpp>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>

#include "invforge/builders.hpp"
#include "invforge/checkpoint.hpp"
#include "invforge/idx.hpp"

namespace invforge {

namespace {

using Validator = std::function<void(const std::string&)>;

struct KeyRule {
  ConfigKey key;
  Validator check;
};

double as_double(const std::string& v) { return parse_double(v, "value"); }

std::uint64_t as_uint(const std::string& v) {
  const auto i = parse_int(v, "value");
  if (i < 0) throw ConfigError("expected a non-negative integer, got '" + v + "'");
  return static_cast<std::uint64_t>(i);
}

std::vector<std::size_t> as_uint_list(std::string_view v) {
  std::vector<std::size_t> out;
  if (trim(v).empty()) return out;
  for (const auto& part : split(v, ',')) {
    const auto x = as_uint(part);
    if (x == 0) throw ConfigError("layer widths must be positive");
    out.push_back(x);
  }
  return out;
}

Validator positive_uint() {
  return [](const std::string& v) {
    if (as_uint(v) == 0) throw ConfigError("must be >= 1");
  };
}
Validator any_uint() {
  return [](const std::string& v) { as_uint(v); };
}
Validator nonneg_double() {
  return [](const std::string& v) {
    const double d = as_double(v);
    if (!(d >= 0.0) || !std::isfinite(d)) throw ConfigError("must be finite and >= 0");
  };
}
Validator positive_double() {
  return [](const std::string& v) {
    const double d = as_double(v);
    if (!(d > 0.0) || !std::isfinite(d)) throw ConfigError("must be finite and > 0");
  };
}
Validator unit_open(bool allow_zero) {
  return [allow_zero](const std::string& v) {
    const double d = as_double(v);
    if (!((allow_zero ? d >= 0.0 : d > 0.0) && d < 1.0)) {
      throw ConfigError(allow_zero ? "must be in [0, 1)" : "must be in (0, 1)");
    }
  };
}
Validator finite_double() {
  return [](const std::string& v) {
    if (!std::isfinite(as_double(v))) throw ConfigError("must be finite");
  };
}
Validator activation_name() {
  return [](const std::string& v) { parse_activation(v); };
}
Validator width_list() {
  return [](const std::string& v) { as_uint_list(v); };
}
Validator any_string() {
  return [](const std::string&) {};
}
Validator model_kind() {
  return [](const std::string& v) { parse_model_kind(v); };
}
Validator grid() {
  return [](const std::string& v) { parse_sweep_grid(v); };
}

const std::vector<KeyRule>& rules() {
  static const std::vector<KeyRule> r = {
      {{"seed", "1", "root seed; every random stream is derived from it by name"}, any_uint()},
      {{"model.kind", "full", "full | b0 | b1"}, model_kind()},
      {{"data.manifest", "", "dataset manifest written by the data command"}, any_string()},
      {{"data.train_set", "train", "name of the training set in the manifest"}, any_string()},
      {{"data.test_set", "test", "evaluation set used by the sweep"}, any_string()},
      {{"arch.dim_e1", "32", "width of e1"}, positive_uint()},
      {{"arch.dim_e2", "32", "width of e2"}, positive_uint()},
      {{"arch.encoder_hidden", "512", "comma-separated encoder hidden widths"}, width_list()},
      {{"arch.predictor_hidden", "256", "comma-separated predictor hidden widths"}, width_list()},
      {{"arch.decoder_hidden", "512,512", "comma-separated decoder hidden widths"}, width_list()},
      {{"arch.dis_hidden", "", "disentangler hidden widths (empty = single layer)"}, width_list()},
      {{"arch.hidden_activation", "relu", "activation of hidden layers"}, activation_name()},
      {{"arch.embedding_activation", "tanh", "activation of the encoder output"}, activation_name()},
      {{"arch.decoder_output", "sigmoid", "activation of the decoder output"}, activation_name()},
      {{"arch.psi_rate", "0.5", "dropout rate of the noisy transformer"}, unit_open(true)},
      {{"train.alpha", "100", "weight of the prediction loss"}, nonneg_double()},
      {{"train.beta", "0.1", "weight of the reconstruction loss"}, nonneg_double()},
      {{"train.gamma", "1", "weight of the disentanglement losses"}, nonneg_double()},
      {{"train.k", "5", "M2 steps per M1 step"}, positive_uint()},
      {{"train.epochs", "50", "passes over the training set"}, any_uint()},
      {{"train.batch_size", "128", "minibatch size"}, positive_uint()},
      {{"train.lr_m1", "0.001", "Adam learning rate of encoder, predictor and decoder"}, positive_double()},
      {{"train.lr_m2", "0.001", "Adam learning rate of the disentanglers"}, positive_double()},
      {{"train.clip_norm", "5", "global gradient-norm clip for M1 updates (<= 0 disables)"}, finite_double()},
      {{"probe.hidden", "64", "probe hidden width"}, positive_uint()},
      {{"probe.epochs", "30", "probe training epochs"}, any_uint()},
      {{"probe.batch_size", "128", "probe minibatch size"}, positive_uint()},
      {{"probe.lr", "0.001", "probe Adam learning rate"}, positive_double()},
      {{"probe.train_fraction", "0.8", "fraction of rows used to fit each probe"}, unit_open(false)},
      {{"output.dir", "run", "directory for checkpoints, metrics and reports"}, any_string()},
      {{"sweep.grid", "100:0,100:0.1,0:0.1", "alpha:beta cells of the eta sweep"}, grid()},
  };
  return r;
}

}  // namespace

std::span<const ConfigKey> config_keys() {
  static const std::vector<ConfigKey> keys = [] {
    std::vector<ConfigKey> k;
    for (const auto& r : rules()) k.push_back(r.key);
    return k;
  }();
  return keys;
}

std::vector<SweepCell> parse_sweep_grid(std::string_view text) {
  std::vector<SweepCell> cells;
  if (trim(text).empty()) throw ConfigError("sweep grid is empty");
  for (const auto& item : split(text, ',')) {
    const auto parts = split(item, ':');
    if (parts.size() != 2) throw ConfigError("sweep cell '" + item + "' is not alpha:beta");
    SweepCell c{parse_double(parts[0], "alpha"), parse_double(parts[1], "beta")};
    LossWeights w;
    w.alpha = c.alpha;
    w.beta = c.beta;
    w.validate();
    cells.push_back(c);
  }
  return cells;
}

RunConfig RunConfig::resolve(const KeyValues& user) {
  std::vector<std::string> errors;
  for (const auto& [k, v] : user.entries()) {
    const bool known = std::any_of(rules().begin(), rules().end(), [&](const KeyRule& r) { return r.key.name == k; });
    if (!known) errors.push_back("unknown key '" + k + "'");
  }
  RunConfig rc;
  for (const auto& r : rules()) {
    const std::string value = user.get_or(r.key.name, std::string(r.key.default_value));
    try {
      r.check(value);
    } catch (const Error& e) {
      errors.push_back(std::string(r.key.name) + "=" + value + ": " + e.what());
    }
    rc.values_.set(std::string(r.key.name), value);
  }
  if (errors.empty()) {
    try {
      rc.train().validate();
    } catch (const Error& e) {
      errors.emplace_back(e.what());
    }
  }
  if (!errors.empty()) {
    std::string msg = std::to_string(errors.size()) + " configuration error(s):";
    for (const auto& e : errors) msg += "\n  " + e;
    throw ConfigError(msg);
  }
  return rc;
}

std::uint64_t RunConfig::seed() const { return values_.get_uint("seed"); }

ArchitectureOptions RunConfig::architecture(std::size_t input_dim, std::size_t num_classes) const {
  ArchitectureOptions o;
  o.input_dim = input_dim;
  o.num_classes = num_classes;
  o.dim_e1 = values_.get_uint("arch.dim_e1");
  o.dim_e2 = values_.get_uint("arch.dim_e2");
  o.encoder_hidden = as_uint_list(values_.get("arch.encoder_hidden"));
  o.predictor_hidden = as_uint_list(values_.get("arch.predictor_hidden"));
  o.decoder_hidden = as_uint_list(values_.get("arch.decoder_hidden"));
  o.dis_hidden = as_uint_list(values_.get("arch.dis_hidden"));
  o.hidden_activation = parse_activation(values_.get("arch.hidden_activation"));
  o.embedding_activation = parse_activation(values_.get("arch.embedding_activation"));
  o.decoder_output = parse_activation(values_.get("arch.decoder_output"));
  o.psi_rate = values_.get_double("arch.psi_rate");
  return o;
}

TrainConfig RunConfig::train() const {
  TrainConfig c;
  c.weights.alpha = values_.get_double("train.alpha");
  c.weights.beta = values_.get_double("train.beta");
  c.weights.gamma = values_.get_double("train.gamma");
  c.k = values_.get_uint("train.k");
  c.epochs = values_.get_uint("train.epochs");
  c.batch_size = values_.get_uint("train.batch_size");
  c.lr_m1 = values_.get_double("train.lr_m1");
  c.lr_m2 = values_.get_double("train.lr_m2");
  c.clip_norm = values_.get_double("train.clip_norm");
  c.seed = seed();
  return c;
}

ProbeConfig RunConfig::probe() const {
  ProbeConfig p;
  p.hidden = values_.get_uint("probe.hidden");
  p.epochs = values_.get_uint("probe.epochs");
  p.batch_size = values_.get_uint("probe.batch_size");
  p.lr = values_.get_double("probe.lr");
  p.train_fraction = values_.get_double("probe.train_fraction");
  p.seed = seed();
  return p;
}

std::vector<SweepCell> RunConfig::sweep_grid() const { return parse_sweep_grid(values_.get("sweep.grid")); }

// ---------------------------------------------------------------------------

namespace {

namespace fs = std::filesystem;

class UsageError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

std::uint64_t derive_seed(std::uint64_t seed, std::string_view name) {
  return RngStream::from_seed(seed).split(name).key();
}

fs::path default_mnist_dir() {
  const char* env = std::getenv("INVFORGE_MNIST_DIR");
  return env && *env ? fs::path(env) : fs::path("/root/data/mnist");
}

Dataset load_mnist_split(const fs::path& dir, bool train, std::size_t limit) {
  const std::string prefix = train ? "train" : "t10k";
  const fs::path images = dir / (prefix + "-images-idx3-ubyte");
  const fs::path labels = dir / (prefix + "-labels-idx1-ubyte");
  for (const auto& p : {images, labels}) {
    if (!fs::exists(p)) throw DataError("missing MNIST file " + p.string() + " (set --mnist-dir or INVFORGE_MNIST_DIR)");
  }
  Dataset ds = load_mnist(images, labels, train ? SplitTag::train : SplitTag::test);
  if (limit > 0 && limit < ds.size()) ds = ds.slice(0, limit);
  return ds;
}

std::string join_doubles(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + format_double(v[i]);
  return out;
}

struct RotArgs {
  std::string mnist_dir = default_mnist_dir().string();
  std::string angles = "0,22.5,-22.5,45,-45";
  std::string eval_angles = "55,65";
  std::string mode = "in-plane";
  std::uint64_t seed = 7;
  std::size_t train_limit = 0;
  std::size_t test_limit = 0;
  std::string out = "data/mnist-rot";
};

void cmd_data_rot(const RotArgs& a, std::ostream& out) {
  RotSpec spec;
  spec.angles = parse_double_list(a.angles, "--angles");
  if (a.mode == "in-plane") spec.mode = RotationMode::in_plane;
  else if (a.mode == "foreshorten") spec.mode = RotationMode::foreshorten;
  else throw UsageError("--mode must be in-plane or foreshorten");
  spec.validate();
  const std::vector<double> eval = parse_double_list(a.eval_angles, "--eval-angles");
  std::vector<double> eval_signed;
  for (double e : eval) {
    eval_signed.push_back(-std::abs(e));
    eval_signed.push_back(std::abs(e));
  }
  check_angles_disjoint(spec.angles, eval_signed);

  const Dataset train_base = load_mnist_split(a.mnist_dir, true, a.train_limit);
  const Dataset test_base = load_mnist_split(a.mnist_dir, false, a.test_limit);
  DatasetBundle b;
  b.meta.set("kind", std::string("mnist-rot"));
  b.meta.set("seed", a.seed);
  b.meta.set("angles", join_doubles(spec.angles));
  b.meta.set("eval_angles", a.eval_angles);
  b.meta.set("mode", a.mode);
  b.sets.push_back({"train", "train", false, build_mnist_rot(train_base, spec, derive_seed(a.seed, "train"))});
  b.sets.push_back({"test", "theta", true, build_mnist_rot(test_base, spec, derive_seed(a.seed, "test"))});
  for (double e : eval) {
    RotSpec es;
    es.angles = {-std::abs(e), std::abs(e)};
    es.mode = spec.mode;
    const std::string tag = format_double(std::abs(e));
    b.sets.push_back({"test_" + tag, tag, false, build_mnist_rot(test_base, es, derive_seed(a.seed, "test_" + tag))});
  }
  save_bundle(b, a.out);
  out << "wrote " << b.sets.size() << " sets to " << (fs::path(a.out) / kManifestName).string() << "\n";
}

struct DilArgs {
  std::string mnist_dir = default_mnist_dir().string();
  std::string kernels = "-2,2,3,4";
  std::size_t test_limit = 0;
  std::string out = "data/mnist-dil";
};

void cmd_data_dil(const DilArgs& a, std::ostream& out) {
  std::vector<DilSpec> kernels;
  for (double k : parse_double_list(a.kernels, "--kernels")) {
    if (k != std::floor(k)) throw UsageError("kernel sizes must be integers");
    kernels.push_back({static_cast<int>(k)});
  }
  const Dataset base = load_mnist_split(a.mnist_dir, false, a.test_limit);
  DatasetBundle b;
  b.meta.set("kind", std::string("mnist-dil"));
  b.meta.set("kernels", a.kernels);
  for (auto& [k, ds] : build_mnist_dil(base, kernels)) {
    const std::string tag = "dil_" + std::to_string(k);
    b.sets.push_back({tag, tag, false, std::move(ds)});
  }
  save_bundle(b, a.out);
  out << "wrote " << b.sets.size() << " sets to " << (fs::path(a.out) / kManifestName).string() << "\n";
}

struct SynthArgs {
  SyntheticSpec spec;
  std::size_t test_n = 10000;
  std::string out = "data/synth";
};

void cmd_data_synth(const SynthArgs& a, std::ostream& out) {
  SyntheticSpec train = a.spec;
  SyntheticSpec test = a.spec;
  if (a.test_n == 0) throw UsageError("--test-n must be positive");
  test.samples = a.test_n;
  test.first_index = train.samples;
  DatasetBundle b;
  b.meta.set("kind", std::string("synth"));
  b.meta.set("seed", a.spec.seed);
  b.meta.set("y_classes", static_cast<std::uint64_t>(a.spec.y_classes));
  b.meta.set("z_classes", static_cast<std::uint64_t>(a.spec.z_classes));
  b.meta.set("noise", a.spec.noise);
  b.meta.set("jitter", a.spec.jitter);
  b.meta.set("linear", a.spec.linear ? 1 : 0);
  b.meta.set("identity_mixing", a.spec.identity_mixing ? 1 : 0);
  Dataset tr = gen_synthetic(train);
  Dataset te = gen_synthetic(test);
  te.set_split(SplitTag::test);
  b.sets.push_back({"train", "train", false, std::move(tr)});
  b.sets.push_back({"test", "test", true, std::move(te)});
  save_bundle(b, a.out);
  out << "wrote 2 sets to " << (fs::path(a.out) / kManifestName).string() << "\n";
}

KeyValues user_config(const std::string& path, const std::vector<std::string>& overrides) {
  KeyValues kv = path.empty() ? KeyValues() : KeyValues::read_file(path);
  KeyValues merged;
  for (const auto& [k, v] : kv.entries()) {
    const bool overridden = std::any_of(overrides.begin(), overrides.end(), [&](const std::string& o) {
      return o.substr(0, o.find('=')) == k;
    });
    if (!overridden) merged.set(k, v);
  }
  for (const auto& o : overrides) {
    const auto eq = o.find('=');
    if (eq == std::string::npos) throw UsageError("--set expects key=value, got '" + o + "'");
    if (merged.contains(o.substr(0, eq))) throw UsageError("key '" + o.substr(0, eq) + "' set twice");
    merged.set(o.substr(0, eq), o.substr(eq + 1));
  }
  return merged;
}

struct TrainArgs {
  std::string config;
  std::string model;
  std::string out;
  std::string resume;
  std::vector<std::string> sets;
};

void cmd_train(const TrainArgs& a, std::ostream& out, std::ostream& err) {
  std::vector<std::string> overrides = a.sets;
  if (!a.model.empty()) overrides.push_back("model.kind=" + a.model);
  if (!a.out.empty()) overrides.push_back("output.dir=" + a.out);
  const KeyValues user = user_config(a.config, overrides);
  const RunConfig rc = RunConfig::resolve(user);
  const ModelKind kind = parse_model_kind(rc.values().get("model.kind"));
  if (kind == ModelKind::b0) {
    for (const char* k : {"train.beta", "train.gamma", "train.k"}) {
      if (user.contains(k)) err << "warning: " << k << " is ignored for the b0 model\n";
    }
  } else if (kind == ModelKind::b1) {
    for (const char* k : {"train.gamma", "train.k"}) {
      if (user.contains(k)) err << "warning: " << k << " is ignored for the b1 model\n";
    }
  }
  const std::string manifest = rc.values().get("data.manifest");
  if (manifest.empty()) throw ConfigError("data.manifest is required for training");
  const DatasetBundle bundle = load_bundle(manifest);
  const Dataset& data = bundle.get(rc.values().get("data.train_set")).data;

  const fs::path dir = rc.values().get("output.dir");
  fs::create_directories(dir);
  write_file_atomic((dir / "config.txt").string(), rc.echo());

  const TrainConfig config = rc.train();
  std::optional<Model> model;
  TrainState state;
  if (!a.resume.empty()) {
    Checkpoint ck = load_checkpoint(a.resume);
    if (!(ck.config == config)) throw ConfigError("resume checkpoint was trained with a different configuration");
    if (ck.model.spec().kind != kind) throw ConfigError("resume checkpoint holds a different model kind");
    model.emplace(std::move(ck.model));
    state = ck.state;
  } else {
    model.emplace(make_architecture(kind, rc.architecture(data.feature_dim(), data.num_classes())), config.seed);
  }

  const fs::path metrics_tmp = dir / "metrics.csv.tmp";
  std::ofstream metrics(metrics_tmp, std::ios::binary);
  if (!metrics) throw IoError("cannot write " + metrics_tmp.string());
  metrics << metrics_csv_header() << '\n';
  TrainHooks hooks;
  hooks.sink = [&](const MetricsRecord& r) { metrics << metrics_csv_row(r) << '\n'; };
  hooks.on_epoch = [&](const Model& m, const TrainState& s) {
    save_checkpoint(dir / "checkpoint.bin", m, config, s);
    metrics.flush();
  };
  auto finish_metrics = [&] {
    metrics.close();
    fs::rename(metrics_tmp, dir / "metrics.csv");
  };
  try {
    state = train(*model, data, config, hooks, state);
  } catch (...) {
    finish_metrics();
    throw;
  }
  finish_metrics();
  save_checkpoint(dir / "checkpoint.bin", *model, config, state);
  out << "trained " << to_string(kind) << " for " << state.step << " steps (" << state.m1_steps << " m1, "
      << state.m2_steps << " m2); checkpoint " << (dir / "checkpoint.bin").string() << "\n";
}

struct EvalArgs {
  std::string checkpoint;
  std::string test_sets;
  std::string out;
  std::string config;
  std::vector<std::string> sets;
  bool export_embeddings = false;
  bool probe_a_y = false;
};

void cmd_eval(const EvalArgs& a, std::ostream& out) {
  const Checkpoint ck = load_checkpoint(a.checkpoint);
  std::vector<std::string> overrides = a.sets;
  const KeyValues user = user_config(a.config, overrides);
  KeyValues seeded = user;
  if (!user.contains("seed")) seeded.set("seed", ck.config.seed);
  const RunConfig rc = RunConfig::resolve(seeded);
  const DatasetBundle bundle = load_bundle(a.test_sets);
  EvalOptions opts;
  opts.probe = rc.probe();
  opts.probe_a_y = a.probe_a_y;
  const EvalReport report = eval_invariance(ck.model, bundle.sets, opts);
  const fs::path report_path = a.out.empty() ? fs::path(a.checkpoint).parent_path() / "eval.txt" : fs::path(a.out);
  if (!report_path.parent_path().empty()) fs::create_directories(report_path.parent_path());
  const std::string text = report.to_kv().to_string();
  write_file_atomic(report_path.string(), text);
  out << text;
  if (a.export_embeddings) {
    for (const auto& s : bundle.sets) {
      if (s.data.split() == SplitTag::train) continue;
      const fs::path p = report_path.parent_path() / ("embeddings-" + s.name + ".csv");
      export_embeddings(embed_dataset(ck.model, s.data), p);
      out << "# embeddings " << p.string() << "\n";
    }
  }
}

struct SweepArgs {
  std::string config;
  std::string out;
  std::vector<std::string> sets;
};

void cmd_sweep(const SweepArgs& a, std::ostream& out) {
  std::vector<std::string> overrides = a.sets;
  if (!a.out.empty()) overrides.push_back("output.dir=" + a.out);
  const RunConfig rc = RunConfig::resolve(user_config(a.config, overrides));
  const std::string manifest = rc.values().get("data.manifest");
  if (manifest.empty()) throw ConfigError("data.manifest is required for the sweep");
  const DatasetBundle bundle = load_bundle(manifest);
  const Dataset& train_set = bundle.get(rc.values().get("data.train_set")).data;
  const Dataset& test = bundle.get(rc.values().get("data.test_set")).data;
  const fs::path dir = rc.values().get("output.dir");
  fs::create_directories(dir);
  write_file_atomic((dir / "config.txt").string(), rc.echo());
  const auto rows = eta_sweep(train_set, test, rc.sweep_grid(),
                              rc.architecture(train_set.feature_dim(), train_set.num_classes()), rc.train(),
                              rc.probe());
  const std::string csv = sweep_csv(rows);
  write_file_atomic((dir / "sweep.csv").string(), csv);
  out << csv;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Adversarial invariance induction: data, training, evaluation"};
  app.require_subcommand(1);

  auto* data = app.add_subcommand("data", "build datasets");
  data->require_subcommand(1);
  RotArgs rot;
  auto* rot_cmd = data->add_subcommand("mnist-rot", "rotated MNIST with angle labels");
  rot_cmd->add_option("--mnist-dir", rot.mnist_dir, "directory holding the MNIST IDX files");
  rot_cmd->add_option("--angles", rot.angles, "training angle set in degrees");
  rot_cmd->add_option("--eval-angles", rot.eval_angles, "held-out magnitudes; each gives a +/- test set");
  rot_cmd->add_option("--mode", rot.mode, "in-plane | foreshorten");
  rot_cmd->add_option("--seed", rot.seed);
  rot_cmd->add_option("--train-limit", rot.train_limit, "use only the first N training images (0 = all)");
  rot_cmd->add_option("--test-limit", rot.test_limit, "use only the first N test images (0 = all)");
  rot_cmd->add_option("--out", rot.out);
  DilArgs dil;
  auto* dil_cmd = data->add_subcommand("mnist-dil", "eroded / dilated MNIST test sets");
  dil_cmd->add_option("--mnist-dir", dil.mnist_dir);
  dil_cmd->add_option("--kernels", dil.kernels, "signed kernel sizes; negative = erosion");
  dil_cmd->add_option("--test-limit", dil.test_limit);
  dil_cmd->add_option("--out", dil.out);
  SynthArgs syn;
  auto* syn_cmd = data->add_subcommand("synth", "synthetic two-factor data");
  syn_cmd->add_option("--y-classes", syn.spec.y_classes);
  syn_cmd->add_option("--z-classes", syn.spec.z_classes);
  syn_cmd->add_option("--n", syn.spec.samples, "training samples");
  syn_cmd->add_option("--test-n", syn.test_n, "test samples");
  syn_cmd->add_option("--noise", syn.spec.noise);
  syn_cmd->add_option("--jitter", syn.spec.jitter);
  syn_cmd->add_option("--seed", syn.spec.seed);
  syn_cmd->add_flag("--linear", syn.spec.linear, "skip the tanh");
  syn_cmd->add_flag("--identity-mixing", syn.spec.identity_mixing, "use A = I");
  syn_cmd->add_option("--out", syn.out);

  TrainArgs tr;
  auto* train_cmd = app.add_subcommand("train", "train a model");
  train_cmd->add_option("--model", tr.model, "full | b0 | b1 (overrides model.kind)");
  train_cmd->add_option("--config", tr.config, "key=value config file");
  train_cmd->add_option("--set", tr.sets, "extra key=value overrides");
  train_cmd->add_option("--out", tr.out, "output directory (overrides output.dir)");
  train_cmd->add_option("--resume", tr.resume, "continue from a checkpoint");

  EvalArgs ev;
  auto* eval_cmd = app.add_subcommand("eval", "evaluate a checkpoint");
  eval_cmd->add_option("--checkpoint", ev.checkpoint)->required();
  eval_cmd->add_option("--test-sets", ev.test_sets, "dataset manifest")->required();
  eval_cmd->add_option("--out", ev.out, "report path (default: eval.txt next to the checkpoint)");
  eval_cmd->add_option("--config", ev.config, "config file for probe.* keys");
  eval_cmd->add_option("--set", ev.sets);
  eval_cmd->add_flag("--export-embeddings", ev.export_embeddings, "write embeddings-<set>.csv per test set");
  eval_cmd->add_flag("--probe-a-y", ev.probe_a_y, "measure a_y with a probe on e1");

  SweepArgs sw;
  auto* sweep_cmd = app.add_subcommand("sweep", "eta sweep over an alpha:beta grid");
  sweep_cmd->add_option("--config", sw.config);
  sweep_cmd->add_option("--set", sw.sets);
  sweep_cmd->add_option("--out", sw.out);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (rot_cmd->parsed()) cmd_data_rot(rot, out);
    else if (dil_cmd->parsed()) cmd_data_dil(dil, out);
    else if (syn_cmd->parsed()) cmd_data_synth(syn, out);
    else if (train_cmd->parsed()) cmd_train(tr, out, err);
    else if (eval_cmd->parsed()) cmd_eval(ev, out);
    else if (sweep_cmd->parsed()) cmd_sweep(sw, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace invforge
