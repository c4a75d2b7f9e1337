#include "invforge/builders.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <set>

#include "invforge/idx.hpp"
#include "invforge/parallel.hpp"
#include "invforge/rng.hpp"

namespace invforge {

void RotSpec::validate() const {
  if (angles.empty()) throw ConfigError("rotation angle set is empty");
  std::set<double> seen;
  for (double a : angles) {
    if (!(a > -90.0 && a < 90.0)) throw ConfigError("rotation angle " + format_double(a) + " outside (-90, 90)");
    if (!seen.insert(a).second) throw ConfigError("duplicate rotation angle " + format_double(a));
  }
}

namespace {

void require_image(const Dataset& base) {
  if (!base.is_image()) throw DataError("image transform needs a dataset with image geometry");
  base.validate();
}

Dataset like(const Dataset& base) {
  Dataset out(base.feature_dim(), base.num_classes(), base.split());
  out.set_image_shape(base.image_rows(), base.image_cols());
  out.reserve(base.size());
  return out;
}

}  // namespace

Dataset build_mnist_rot(const Dataset& base, const RotSpec& spec, std::uint64_t seed) {
  spec.validate();
  require_image(base);
  const RngStream root = RngStream::from_seed(seed).split("mnist-rot");
  const std::size_t n = base.size();
  std::vector<std::vector<float>> images(n);
  std::vector<int> z(n);
  parallel_for(n, [&](std::size_t i) {
    RngStream rng = root.split(static_cast<std::uint64_t>(i));
    z[i] = static_cast<int>(rng.below(spec.angles.size()));
    images[i] = rotate_image(base.features(i), base.image_rows(), base.image_cols(), spec.angles[z[i]], spec.mode);
  });
  Dataset out = like(base);
  out.set_nuisance_classes(spec.angles.size());
  for (std::size_t i = 0; i < n; ++i) out.add(images[i], base.labels()[i], z[i]);
  return out;
}

std::vector<std::pair<int, Dataset>> build_mnist_dil(const Dataset& base, const std::vector<DilSpec>& kernels) {
  require_image(base);
  if (kernels.empty()) throw ConfigError("kernel list is empty");
  std::vector<std::pair<int, Dataset>> out;
  for (const DilSpec& k : kernels) {
    k.validate();
    std::vector<std::vector<float>> images(base.size());
    parallel_for(base.size(), [&](std::size_t i) {
      images[i] = morph(base.features(i), base.image_rows(), base.image_cols(), k);
    });
    Dataset ds = like(base);
    for (std::size_t i = 0; i < base.size(); ++i) ds.add(images[i], base.labels()[i]);
    out.emplace_back(k.kernel, std::move(ds));
  }
  return out;
}

void check_angles_disjoint(const std::vector<double>& train, const std::vector<double>& eval) {
  for (double a : eval) {
    if (std::find(train.begin(), train.end(), a) != train.end()) {
      throw ConfigError("evaluation angle " + format_double(a) + " also appears in the training angle set");
    }
  }
}

void SyntheticSpec::validate() const {
  if (y_classes < 2 || z_classes < 2) throw ConfigError("synthetic data needs at least 2 classes per factor");
  if (y_dim() < y_classes || z_dim() < z_classes) throw ConfigError("latent width smaller than class count");
  if (y_classes > 255 || z_classes > 255) throw ConfigError("class counts must fit in a byte");
  if (!(jitter >= 0.0) || !(noise >= 0.0)) throw ConfigError("jitter and noise must be non-negative");
  if (samples == 0) throw ConfigError("synthetic sample count must be positive");
  if (!(max_condition >= 1.0)) throw ConfigError("max_condition must be >= 1");
}

double condition_number(const Tensor64& a) {
  if (a.rank() != 2 || a.rows() != a.cols()) throw DimensionError("condition number needs a square matrix");
  const auto n = static_cast<Eigen::Index>(a.rows());
  Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> m(a.raw(), n, n);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  const auto& s = svd.singularValues();
  if (s(n - 1) == 0.0) return std::numeric_limits<double>::infinity();
  return s(0) / s(n - 1);
}

Tensor64 synthetic_mixing(const SyntheticSpec& spec) {
  spec.validate();
  const std::size_t d = spec.feature_dim();
  Tensor64 a({d, d});
  if (spec.identity_mixing) {
    for (std::size_t i = 0; i < d; ++i) a.at(i, i) = 1.0;
    return a;
  }
  const RngStream root = RngStream::from_seed(spec.seed).split("synthetic-mixing");
  for (std::uint64_t attempt = 0; attempt < 100; ++attempt) {
    RngStream rng = root.split(attempt);
    for (double& v : a.data()) v = rng.normal();
    if (condition_number(a) <= spec.max_condition) return a;
  }
  throw DegenerateDataError("no mixing matrix with condition number <= " + format_double(spec.max_condition) +
                            " in 100 draws");
}

Dataset gen_synthetic(const SyntheticSpec& spec) {
  const Tensor64 a = synthetic_mixing(spec);
  const std::size_t d = spec.feature_dim();
  const RngStream root = RngStream::from_seed(spec.seed).split("synthetic-samples");
  Dataset out(d, spec.y_classes);
  out.set_nuisance_classes(spec.z_classes);
  out.reserve(spec.samples);
  std::vector<double> f(d);
  std::vector<float> x(d);
  for (std::size_t n = 0; n < spec.samples; ++n) {
    RngStream rng = root.split(spec.first_index + n);
    const auto y = static_cast<int>(rng.below(spec.y_classes));
    const auto z = static_cast<int>(rng.below(spec.z_classes));
    for (std::size_t i = 0; i < d; ++i) f[i] = spec.jitter > 0 ? spec.jitter * rng.normal() : 0.0;
    f[static_cast<std::size_t>(y)] += 1.0;
    f[spec.y_dim() + static_cast<std::size_t>(z)] += 1.0;
    for (std::size_t r = 0; r < d; ++r) {
      double acc = 0.0;
      for (std::size_t c = 0; c < d; ++c) acc += a.at(r, c) * f[c];
      if (!spec.linear) acc = std::tanh(acc);
      if (spec.noise > 0) acc += spec.noise * rng.normal();
      x[r] = static_cast<float>(acc);
    }
    out.add(x, y, z);
  }
  return out;
}

// ---------------------------------------------------------------------------

const NamedDataset* DatasetBundle::find(std::string_view name) const {
  for (const auto& s : sets) {
    if (s.name == name) return &s;
  }
  return nullptr;
}

const NamedDataset& DatasetBundle::get(std::string_view name) const {
  if (const auto* s = find(name)) return *s;
  throw DataError("dataset bundle has no set named '" + std::string(name) + "'");
}

void save_bundle(const DatasetBundle& bundle, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  KeyValues m;
  std::string names;
  for (const auto& s : bundle.sets) names += (names.empty() ? "" : ",") + s.name;
  m.set("bundle.sets", names);
  for (const auto& [k, v] : bundle.meta.entries()) m.set("meta." + k, v);
  for (const auto& s : bundle.sets) {
    if (s.name.empty() || s.name.find_first_of(",=/ ") != std::string::npos) {
      throw ConfigError("invalid dataset name '" + s.name + "'");
    }
    s.data.validate();
    const std::string p = "set." + s.name + ".";
    m.set(p + "split", std::string(to_string(s.data.split())));
    m.set(p + "role", s.role);
    m.set(p + "nuisance_probe", s.nuisance_probe ? 1 : 0);
    m.set(p + "num_classes", static_cast<std::uint64_t>(s.data.num_classes()));
    m.set(p + "features", s.name + "-features.idx");
    m.set(p + "labels", s.name + "-labels.idx");
    write_idx(dir / (s.name + "-features.idx"), features_to_idx(s.data));
    write_idx(dir / (s.name + "-labels.idx"), labels_to_idx(s.data.labels()));
    if (s.data.has_nuisance()) {
      m.set(p + "nuisance", s.name + "-nuisance.idx");
      m.set(p + "nuisance_classes", static_cast<std::uint64_t>(s.data.nuisance_classes().value_or(0)));
      write_idx(dir / (s.name + "-nuisance.idx"), labels_to_idx(s.data.nuisance()));
    }
  }
  write_file_atomic((dir / kManifestName).string(), m.to_string());
}

DatasetBundle load_bundle(const std::filesystem::path& manifest) {
  const KeyValues m = KeyValues::read_file(manifest.string());
  const std::filesystem::path dir = manifest.parent_path();
  DatasetBundle b;
  for (const auto& [k, v] : m.entries()) {
    if (k.rfind("meta.", 0) == 0) b.meta.set(k.substr(5), v);
  }
  for (const std::string& name : split(m.get("bundle.sets"), ',')) {
    const std::string p = "set." + name + ".";
    const IdxArray feats = read_idx(dir / m.get(p + "features"));
    const std::vector<int> y = idx_to_labels(read_idx(dir / m.get(p + "labels")));
    std::vector<int> z;
    if (m.contains(p + "nuisance")) z = idx_to_labels(read_idx(dir / m.get(p + "nuisance")));
    if (feats.dims.empty() || feats.dims[0] != y.size() || (!z.empty() && z.size() != y.size())) {
      throw DataError(name + ": feature, label and nuisance counts differ");
    }
    const std::size_t n = y.size();
    const std::size_t d = feats.count() / n;
    Dataset ds(d, m.get_uint(p + "num_classes"), parse_split(m.get(p + "split")));
    if (feats.type == IdxType::u8 && feats.dims.size() == 3) ds.set_image_shape(feats.dims[1], feats.dims[2]);
    if (!z.empty()) ds.set_nuisance_classes(m.get_uint(p + "nuisance_classes"));
    ds.reserve(n);
    std::vector<float> row(d);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < d; ++j) {
        row[j] = feats.type == IdxType::u8 ? static_cast<float>(feats.u8[i * d + j]) / 255.0f : feats.f32[i * d + j];
      }
      ds.add(row, y[i], z.empty() ? std::nullopt : std::optional<int>(z[i]));
    }
    b.sets.push_back({name, m.get(p + "role"), m.get_int(p + "nuisance_probe") != 0, std::move(ds)});
  }
  return b;
}

}  // namespace invforge
