#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "invforge/tensor.hpp"

namespace invforge {

enum class SplitTag : std::uint8_t { train, test };

std::string_view to_string(SplitTag split) noexcept;
SplitTag parse_split(std::string_view text);

struct Sample {
  std::span<const float> x;
  int y = 0;
  std::optional<int> z;
};

struct Batch {
  Tensor x;  // [batch x feature_dim]
  std::vector<int> y;
  std::vector<int> z;  // empty when the dataset has no nuisance labels
};

/// Homogeneous labeled samples. Nuisance labels are all-or-nothing: the
/// first sample decides whether the dataset carries them.
class Dataset {
 public:
  Dataset(std::size_t feature_dim, std::size_t num_classes, SplitTag split = SplitTag::train);

  void reserve(std::size_t n);
  void add(std::span<const float> x, int y, std::optional<int> z = std::nullopt);

  std::size_t size() const noexcept { return labels_.size(); }
  bool empty() const noexcept { return labels_.empty(); }
  std::size_t feature_dim() const noexcept { return feature_dim_; }
  std::size_t num_classes() const noexcept { return num_classes_; }
  SplitTag split() const noexcept { return split_; }
  void set_split(SplitTag split) noexcept { split_ = split; }

  bool has_nuisance() const noexcept { return !nuisance_.empty(); }
  std::optional<std::size_t> nuisance_classes() const noexcept { return nuisance_classes_; }
  void set_nuisance_classes(std::size_t n);

  // Image geometry when samples are row-major images (rows * cols == d).
  std::size_t image_rows() const noexcept { return image_rows_; }
  std::size_t image_cols() const noexcept { return image_cols_; }
  bool is_image() const noexcept { return image_rows_ > 0; }
  void set_image_shape(std::size_t rows, std::size_t cols);

  Sample sample(std::size_t i) const;
  std::span<const float> features(std::size_t i) const;
  std::span<const float> all_features() const noexcept { return features_; }
  std::span<const int> labels() const noexcept { return labels_; }
  std::span<const int> nuisance() const noexcept { return nuisance_; }

  Batch batch(std::span<const std::size_t> indices) const;
  Batch range(std::size_t begin, std::size_t end) const;
  // Copy of samples [begin, end) with the same metadata.
  Dataset slice(std::size_t begin, std::size_t end) const;

  // Nonempty, labels in range, nuisance labels consistent.
  void validate() const;

 private:
  std::size_t feature_dim_;
  std::size_t num_classes_;
  SplitTag split_;
  std::optional<std::size_t> nuisance_classes_;
  std::size_t image_rows_ = 0;
  std::size_t image_cols_ = 0;
  std::vector<float> features_;
  std::vector<int> labels_;
  std::vector<int> nuisance_;
};

}  // namespace invforge
