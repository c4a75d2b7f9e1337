#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "invforge/dataset.hpp"
#include "invforge/image.hpp"
#include "invforge/kv.hpp"
#include "invforge/tensor.hpp"

namespace invforge {

struct RotSpec {
  std::vector<double> angles{0.0, 22.5, -22.5, 45.0, -45.0};
  RotationMode mode = RotationMode::in_plane;

  // Nonempty, distinct, every angle strictly inside (-90, 90).
  void validate() const;
};

/// Rotates every base image by an angle drawn uniformly from the set; the
/// nuisance label is the angle's index. Sample i draws from a stream keyed
/// by (seed, i), so the result does not depend on evaluation order.
Dataset build_mnist_rot(const Dataset& base, const RotSpec& spec, std::uint64_t seed);

/// One morphologically transformed copy of `base` per kernel, in order.
std::vector<std::pair<int, Dataset>> build_mnist_dil(const Dataset& base, const std::vector<DilSpec>& kernels);

/// Throws ConfigError if any evaluation angle is also a training angle.
void check_angles_disjoint(const std::vector<double>& train, const std::vector<double>& eval);

struct SyntheticSpec {
  std::size_t y_classes = 10;
  std::size_t z_classes = 5;
  // Latent block widths; 0 means "same as the class count".
  std::size_t y_latent_dim = 0;
  std::size_t z_latent_dim = 0;
  double jitter = 0.1;  // Gaussian jitter on the one-hot factor blocks
  double noise = 0.05;  // Gaussian noise added to x
  std::size_t samples = 50000;
  // Index of the first generated sample, so disjoint ranges share one mixing map.
  std::uint64_t first_index = 0;
  std::uint64_t seed = 1;
  double max_condition = 1e3;
  bool linear = false;           // skip the tanh
  bool identity_mixing = false;  // A = I

  std::size_t y_dim() const noexcept { return y_latent_dim ? y_latent_dim : y_classes; }
  std::size_t z_dim() const noexcept { return z_latent_dim ? z_latent_dim : z_classes; }
  std::size_t feature_dim() const noexcept { return y_dim() + z_dim(); }
  void validate() const;
};

double condition_number(const Tensor64& square);

/// Mixing matrix for a spec: Gaussian entries, redrawn while the condition
/// number exceeds spec.max_condition (at most 100 draws).
Tensor64 synthetic_mixing(const SyntheticSpec& spec);

/// x = tanh(A [f_y; f_z]) + noise, with f_y = onehot(y) + jitter and
/// f_z = onehot(z) + jitter, y and z drawn independently and uniformly.
Dataset gen_synthetic(const SyntheticSpec& spec);

// ---------------------------------------------------------------------------
// Persistence: named datasets stored as IDX files plus a key=value manifest.

struct NamedDataset {
  std::string name;
  // Evaluation role; accuracy on this set is reported as "a_y_<role>".
  std::string role;
  // Whether nuisance probes (A_z) run on this set.
  bool nuisance_probe = false;
  Dataset data;
};

struct DatasetBundle {
  KeyValues meta;
  std::vector<NamedDataset> sets;

  const NamedDataset& get(std::string_view name) const;
  const NamedDataset* find(std::string_view name) const;
};

inline constexpr const char* kManifestName = "manifest.txt";

void save_bundle(const DatasetBundle& bundle, const std::filesystem::path& dir);
DatasetBundle load_bundle(const std::filesystem::path& manifest);

}  // namespace invforge
