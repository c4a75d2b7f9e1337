#include "invforge/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <set>
#include <sstream>

namespace invforge {

namespace {

std::size_t argmax_row(const Tensor& probs, std::size_t r) {
  const auto row = probs.row(r);
  return static_cast<std::size_t>(std::max_element(row.begin(), row.end()) - row.begin());
}

}  // namespace

Embeddings embed_dataset(const Model& model, const Dataset& data, std::size_t chunk) {
  check_width(data.feature_dim(), model.spec().input_dim(), "dataset features");
  if (chunk == 0) throw ConfigError("chunk size must be positive");
  Embeddings out;
  const bool split = model.spec().kind != ModelKind::b0;
  out.dim_e1 = split ? model.spec().dim_e1 : model.spec().embedding_dim();
  out.dim_e2 = split ? model.spec().dim_e2 : 0;
  out.e1.reserve(data.size() * out.dim_e1);
  out.e2.reserve(data.size() * out.dim_e2);
  for (std::size_t begin = 0; begin < data.size(); begin += chunk) {
    const Batch b = data.range(begin, std::min(data.size(), begin + chunk));
    const SplitEmbedding e = encode(model, b.x);
    out.e1.insert(out.e1.end(), e.e1.values().begin(), e.e1.values().end());
    if (split) out.e2.insert(out.e2.end(), e.e2.values().begin(), e.e2.values().end());
  }
  out.y.assign(data.labels().begin(), data.labels().end());
  out.z.assign(data.nuisance().begin(), data.nuisance().end());
  return out;
}

double predictor_accuracy(const Model& model, const Dataset& data, std::size_t chunk) {
  check_width(data.feature_dim(), model.spec().input_dim(), "dataset features");
  data.validate();
  std::size_t correct = 0;
  for (std::size_t begin = 0; begin < data.size(); begin += chunk) {
    const Batch b = data.range(begin, std::min(data.size(), begin + chunk));
    const Tensor probs = predict(model, encode(model, b.x).e1);
    for (std::size_t r = 0; r < b.y.size(); ++r) {
      if (argmax_row(probs, r) == static_cast<std::size_t>(b.y[r])) ++correct;
    }
  }
  return static_cast<double>(correct) / static_cast<double>(data.size());
}

void ProbeConfig::validate() const {
  if (hidden == 0 || batch_size == 0) throw ConfigError("probe hidden width and batch size must be positive");
  if (!(lr > 0.0)) throw ConfigError("probe learning rate must be positive");
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) throw ConfigError("probe train_fraction must be in (0, 1)");
}

double train_probe(std::span<const float> features, std::size_t dim, std::span<const int> labels,
                   const ProbeConfig& config) {
  config.validate();
  const std::size_t n = labels.size();
  if (dim == 0 || features.size() != n * dim) throw DimensionError("probe features do not match label count");
  const std::set<int> classes(labels.begin(), labels.end());
  if (classes.size() < 2) throw DegenerateDataError("probe needs at least two distinct labels");
  if (*classes.begin() < 0) throw DataError("negative probe label");
  const auto num_classes = static_cast<std::size_t>(*classes.rbegin()) + 1;

  const RngStream root = RngStream::from_seed(config.seed).split("probe");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  RngStream split_rng = root.split("split");
  split_rng.shuffle(std::span<std::size_t>(order));
  const auto n_train = std::clamp<std::size_t>(
      static_cast<std::size_t>(std::llround(config.train_fraction * static_cast<double>(n))), 1, n - 1);
  std::vector<std::size_t> train_idx(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
  const std::vector<std::size_t> test_idx(order.begin() + static_cast<std::ptrdiff_t>(n_train), order.end());

  std::vector<double> mu(dim, 0.0);
  std::vector<double> sd(dim, 1.0);
  if (config.standardize) {
    std::vector<double> sq(dim, 0.0);
    for (std::size_t i : train_idx) {
      for (std::size_t j = 0; j < dim; ++j) {
        const double v = features[i * dim + j];
        mu[j] += v;
        sq[j] += v * v;
      }
    }
    for (std::size_t j = 0; j < dim; ++j) {
      mu[j] /= static_cast<double>(n_train);
      const double var = sq[j] / static_cast<double>(n_train) - mu[j] * mu[j];
      sd[j] = var > 1e-12 ? std::sqrt(var) : 1.0;
    }
  }
  auto gather = [&](std::span<const std::size_t> idx, Tensor& x, std::vector<int>& y) {
    x = Tensor({idx.size(), dim});
    y.resize(idx.size());
    for (std::size_t r = 0; r < idx.size(); ++r) {
      for (std::size_t j = 0; j < dim; ++j) {
        x.at(r, j) = static_cast<float>((features[idx[r] * dim + j] - mu[j]) / sd[j]);
      }
      y[r] = labels[idx[r]];
    }
  };

  const std::vector<LayerSpec> layers{{dim, config.hidden, Activation::relu},
                                      {config.hidden, num_classes, Activation::softmax}};
  ParamStore store;
  const RngStream init = root.split("init");
  for (std::size_t i = 0; i < layers.size(); ++i) {
    const std::string w = layer_param_name("probe", i, "weight");
    store.add(w, glorot_uniform<float>(layers[i].input_dim, layers[i].output_dim, init.split(w)));
    store.add(layer_param_name("probe", i, "bias"), Tensor::zeros({layers[i].output_dim}));
  }
  const ComponentSet probe_only{"probe"};
  AdamConfig adam;
  adam.lr = config.lr;
  Tensor xb;
  std::vector<int> yb;
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    RngStream shuffle = root.split("shuffle").split(epoch);
    shuffle.shuffle(std::span<std::size_t>(train_idx));
    for (std::size_t begin = 0; begin < n_train; begin += config.batch_size) {
      const std::size_t end = std::min(n_train, begin + config.batch_size);
      gather(std::span<const std::size_t>(train_idx).subspan(begin, end - begin), xb, yb);
      Graph g;
      const NodeId probs = dense_stack(g, store, "probe", layers, g.constant(xb), true);
      g.backward(cross_entropy(g, probs, yb));
      optimizer_step(store, adam, probe_only);
    }
  }

  gather(test_idx, xb, yb);
  Graph g;
  const Tensor& probs = g.value(dense_stack(g, store, "probe", layers, g.constant(xb), false));
  std::size_t correct = 0;
  for (std::size_t r = 0; r < yb.size(); ++r) {
    if (argmax_row(probs, r) == static_cast<std::size_t>(yb[r])) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(yb.size());
}

KeyValues EvalReport::to_kv() const {
  KeyValues kv;
  for (const auto& [role, acc] : a_y) kv.set("a_y_" + role, acc);
  if (a_z_e1) kv.set("a_z_e1", *a_z_e1);
  if (a_z_e2) kv.set("a_z_e2", *a_z_e2);
  if (z_chance) kv.set("z_chance", *z_chance);
  return kv;
}

EvalReport EvalReport::from_kv(const KeyValues& kv) {
  EvalReport r;
  for (const auto& [k, v] : kv.entries()) {
    if (k.rfind("a_y_", 0) == 0) r.a_y[k.substr(4)] = parse_double(v, k);
  }
  if (kv.contains("a_z_e1")) r.a_z_e1 = kv.get_double("a_z_e1");
  if (kv.contains("a_z_e2")) r.a_z_e2 = kv.get_double("a_z_e2");
  if (kv.contains("z_chance")) r.z_chance = kv.get_double("z_chance");
  return r;
}

EvalReport eval_invariance(const Model& model, const std::vector<NamedDataset>& sets, const EvalOptions& options) {
  options.probe.validate();
  EvalReport report;
  for (const auto& s : sets) {
    if (s.data.split() == SplitTag::train) continue;
    check_width(s.data.feature_dim(), model.spec().input_dim(), "test set '" + s.name + "' features");
    if (options.probe_a_y) {
      const Embeddings emb = embed_dataset(model, s.data);
      report.a_y[s.role] = train_probe(emb.e1, emb.dim_e1, emb.y, options.probe);
    } else {
      report.a_y[s.role] = predictor_accuracy(model, s.data);
    }
  }
  for (const auto& s : sets) {
    if (!s.nuisance_probe || !s.data.has_nuisance()) continue;
    const Embeddings emb = embed_dataset(model, s.data);
    report.a_z_e1 = train_probe(emb.e1, emb.dim_e1, emb.z, options.probe);
    if (emb.dim_e2 > 0) report.a_z_e2 = train_probe(emb.e2, emb.dim_e2, emb.z, options.probe);
    const std::size_t zc = s.data.nuisance_classes().value_or(
        static_cast<std::size_t>(*std::max_element(emb.z.begin(), emb.z.end())) + 1);
    report.z_chance = 1.0 / static_cast<double>(zc);
    break;
  }
  return report;
}

double e2_only_reconstruction_mse(const Model& model, const Dataset& data, std::size_t chunk) {
  if (!model.spec().has_decoder()) throw ContractError("model kind has no decoder");
  data.validate();
  double total = 0.0;
  for (std::size_t begin = 0; begin < data.size(); begin += chunk) {
    const Batch b = data.range(begin, std::min(data.size(), begin + chunk));
    const SplitEmbedding e = encode(model, b.x);
    const Tensor x_hat = decode(model, Tensor::zeros(e.e1.shape()), e.e2);
    for (std::size_t i = 0; i < x_hat.size(); ++i) {
      const double d = static_cast<double>(x_hat[i]) - b.x[i];
      total += d * d;
    }
  }
  return total / static_cast<double>(data.size() * data.feature_dim());
}

std::vector<SweepRow> eta_sweep(const Dataset& train_set, const Dataset& test, const std::vector<SweepCell>& grid,
                                const ArchitectureOptions& arch, const TrainConfig& config,
                                const ProbeConfig& probe) {
  if (grid.empty()) throw ConfigError("eta sweep grid is empty");
  if (!test.has_nuisance()) throw DataError("eta sweep needs a test set with nuisance labels");
  std::vector<SweepRow> rows;
  for (const SweepCell& cell : grid) {
    TrainConfig c = config;
    c.weights.alpha = cell.alpha;
    c.weights.beta = cell.beta;
    c.validate();
    Model model(make_architecture(ModelKind::full, arch), c.seed);
    train(model, train_set, c);
    const Embeddings emb = embed_dataset(model, test);
    SweepRow row;
    row.alpha = cell.alpha;
    row.beta = cell.beta;
    row.eta = c.weights.eta();
    row.a_y = predictor_accuracy(model, test);
    row.a_y_probe = train_probe(emb.e1, emb.dim_e1, emb.y, probe);
    row.a_z_e1 = train_probe(emb.e1, emb.dim_e1, emb.z, probe);
    row.a_z_e2 = train_probe(emb.e2, emb.dim_e2, emb.z, probe);
    row.recon_mse_e2 = e2_only_reconstruction_mse(model, test);
    rows.push_back(row);
  }
  return rows;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::ostringstream os;
  os << "alpha,beta,eta,a_y,a_y_probe,a_z_e1,a_z_e2,recon_mse_e2\n";
  for (const auto& r : rows) {
    os << format_double(r.alpha) << ',' << format_double(r.beta) << ',' << (r.eta ? format_double(*r.eta) : "inf")
       << ',' << format_double(r.a_y) << ',' << format_double(r.a_y_probe) << ',' << format_double(r.a_z_e1) << ','
       << format_double(r.a_z_e2) << ',' << format_double(r.recon_mse_e2) << '\n';
  }
  return os.str();
}

namespace {
void append_float(std::string& out, float v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", static_cast<double>(v));
  out += buf;
}
}  // namespace

std::string embeddings_csv(const Embeddings& emb) {
  const std::size_t n = emb.size();
  if (emb.e1.size() != n * emb.dim_e1 || emb.e2.size() != n * emb.dim_e2 || (!emb.z.empty() && emb.z.size() != n)) {
    throw DimensionError("embedding matrices do not match the label count");
  }
  std::string out;
  for (std::size_t j = 0; j < emb.dim_e1; ++j) out += "e1_" + std::to_string(j) + ",";
  for (std::size_t j = 0; j < emb.dim_e2; ++j) out += "e2_" + std::to_string(j) + ",";
  out += "y,z\n";
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < emb.dim_e1; ++j) {
      append_float(out, emb.e1[i * emb.dim_e1 + j]);
      out += ',';
    }
    for (std::size_t j = 0; j < emb.dim_e2; ++j) {
      append_float(out, emb.e2[i * emb.dim_e2 + j]);
      out += ',';
    }
    out += std::to_string(emb.y[i]);
    out += ',';
    if (!emb.z.empty()) out += std::to_string(emb.z[i]);
    out += '\n';
  }
  return out;
}

void export_embeddings(const Embeddings& emb, const std::filesystem::path& path) {
  write_file_atomic(path.string(), embeddings_csv(emb));
}

Embeddings parse_embeddings_csv(std::string_view text) {
  std::vector<std::string> lines = split(text, '\n');
  while (!lines.empty() && trim(lines.back()).empty()) lines.pop_back();
  if (lines.empty()) throw DataError("embedding CSV has no header");
  const auto header = split(lines[0], ',');
  Embeddings emb;
  for (const auto& h : header) {
    if (h.rfind("e1_", 0) == 0) ++emb.dim_e1;
    else if (h.rfind("e2_", 0) == 0) ++emb.dim_e2;
  }
  const std::size_t cols = emb.dim_e1 + emb.dim_e2 + 2;
  if (header.size() != cols || header[cols - 2] != "y" || header[cols - 1] != "z") {
    throw DataError("malformed embedding CSV header");
  }
  bool any_z = false;
  bool missing_z = false;
  std::vector<int> z;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto f = split(lines[i], ',');
    if (f.size() != cols) throw DataError("embedding CSV row " + std::to_string(i) + " has wrong column count");
    for (std::size_t j = 0; j < emb.dim_e1; ++j) emb.e1.push_back(static_cast<float>(parse_double(f[j], "e1")));
    for (std::size_t j = 0; j < emb.dim_e2; ++j) {
      emb.e2.push_back(static_cast<float>(parse_double(f[emb.dim_e1 + j], "e2")));
    }
    emb.y.push_back(static_cast<int>(parse_int(f[cols - 2], "y")));
    if (trim(f[cols - 1]).empty()) {
      missing_z = true;
    } else {
      any_z = true;
      z.push_back(static_cast<int>(parse_int(f[cols - 1], "z")));
    }
  }
  if (any_z && missing_z) throw DataError("embedding CSV has z labels for some rows only");
  emb.z = std::move(z);
  return emb;
}

Embeddings read_embeddings_csv(const std::filesystem::path& path) {
  return parse_embeddings_csv(read_file(path.string()));
}

}  // namespace invforge
