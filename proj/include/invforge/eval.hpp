#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "invforge/builders.hpp"
#include "invforge/dataset.hpp"
#include "invforge/model.hpp"
#include "invforge/trainer.hpp"

namespace invforge {

/// Row-major embedding matrices. For b0 models e1 holds the whole unsplit
/// embedding and dim_e2 is 0.
struct Embeddings {
  std::size_t dim_e1 = 0;
  std::size_t dim_e2 = 0;
  std::vector<float> e1;
  std::vector<float> e2;
  std::vector<int> y;
  std::vector<int> z;  // empty when the dataset has no nuisance labels

  std::size_t size() const noexcept { return y.size(); }
};

/// Encodes every sample with noise disabled, `chunk` rows at a time.
Embeddings embed_dataset(const Model& model, const Dataset& data, std::size_t chunk = 1024);

/// Predictor accuracy of the model on a dataset.
double predictor_accuracy(const Model& model, const Dataset& data, std::size_t chunk = 1024);

struct ProbeConfig {
  std::size_t hidden = 64;
  std::size_t epochs = 30;
  std::size_t batch_size = 128;
  double lr = 1e-3;
  std::uint64_t seed = 1;
  double train_fraction = 0.8;
  // z-score features with statistics of the probe's training split.
  bool standardize = true;

  void validate() const;
};

/// Trains a fresh two-layer classifier (relu hidden, softmax output) on a
/// seeded train_fraction split of the rows and returns its accuracy on the
/// held-out rows. Throws DegenerateDataError if fewer than two classes occur.
double train_probe(std::span<const float> features, std::size_t dim, std::span<const int> labels,
                   const ProbeConfig& config);

struct EvalReport {
  // a_y per evaluation set role ("theta", "55", ...), reported as a_y_<role>.
  std::map<std::string, double> a_y;
  std::optional<double> a_z_e1;
  std::optional<double> a_z_e2;
  std::optional<double> z_chance;

  KeyValues to_kv() const;
  static EvalReport from_kv(const KeyValues& kv);
};

struct EvalOptions {
  ProbeConfig probe;
  // Use a probe on e1 instead of the model's predictor for a_y.
  bool probe_a_y = false;
};

/// a_y on every non-training set of the bundle; a_z_e1 / a_z_e2 from probes
/// on the set flagged for nuisance probing (absent when it has no z labels).
EvalReport eval_invariance(const Model& model, const std::vector<NamedDataset>& sets, const EvalOptions& options);

struct SweepCell {
  double alpha = 100.0;
  double beta = 0.1;
};

struct SweepRow {
  double alpha = 0.0;
  double beta = 0.0;
  std::optional<double> eta;
  double a_y = 0.0;        // model predictor accuracy on the test set
  double a_y_probe = 0.0;  // probe on e1
  double a_z_e1 = 0.0;
  double a_z_e2 = 0.0;
  double recon_mse_e2 = 0.0;  // decoder fed [0, e2]
};

/// Trains one full model per (alpha, beta) cell on `train` and measures it on
/// `test` (which must carry nuisance labels). Rows follow grid order.
std::vector<SweepRow> eta_sweep(const Dataset& train, const Dataset& test, const std::vector<SweepCell>& grid,
                                const ArchitectureOptions& arch, const TrainConfig& config,
                                const ProbeConfig& probe);

/// MSE between x and the decoding of [0, e2].
double e2_only_reconstruction_mse(const Model& model, const Dataset& data, std::size_t chunk = 1024);

std::string sweep_csv(const std::vector<SweepRow>& rows);

/// Header e1_0..,e2_0..,y,z; one row per sample. The z field is empty when
/// absent. Values use 9 significant digits (exact for float32).
std::string embeddings_csv(const Embeddings& emb);
void export_embeddings(const Embeddings& emb, const std::filesystem::path& path);
Embeddings parse_embeddings_csv(std::string_view text);
Embeddings read_embeddings_csv(const std::filesystem::path& path);

}  // namespace invforge
