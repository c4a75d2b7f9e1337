#include "invforge/dataset.hpp"

#include <algorithm>
#include <cmath>

namespace invforge {

std::string_view to_string(SplitTag split) noexcept { return split == SplitTag::train ? "train" : "test"; }

SplitTag parse_split(std::string_view text) {
  if (text == "train") return SplitTag::train;
  if (text == "test") return SplitTag::test;
  throw ConfigError("unknown split tag '" + std::string(text) + "'");
}

Dataset::Dataset(std::size_t feature_dim, std::size_t num_classes, SplitTag split)
    : feature_dim_(feature_dim), num_classes_(num_classes), split_(split) {
  if (feature_dim == 0) throw DataError("dataset feature dimension must be positive");
  if (num_classes == 0) throw DataError("dataset needs at least one class");
}

void Dataset::reserve(std::size_t n) {
  features_.reserve(n * feature_dim_);
  labels_.reserve(n);
}

void Dataset::add(std::span<const float> x, int y, std::optional<int> z) {
  if (x.size() != feature_dim_) {
    throw DimensionError("sample has " + std::to_string(x.size()) + " features, dataset expects " +
                         std::to_string(feature_dim_));
  }
  if (y < 0 || static_cast<std::size_t>(y) >= num_classes_) {
    throw DataError("label " + std::to_string(y) + " out of range [0, " + std::to_string(num_classes_) + ")");
  }
  const bool first = labels_.empty();
  if (!first && z.has_value() != has_nuisance()) {
    throw DataError("nuisance labels must be present for all samples or none");
  }
  if (z) {
    if (*z < 0) throw DataError("negative nuisance label");
    if (nuisance_classes_ && static_cast<std::size_t>(*z) >= *nuisance_classes_) {
      throw DataError("nuisance label " + std::to_string(*z) + " out of range");
    }
  }
  for (float v : x) {
    if (!std::isfinite(v)) throw DataError("non-finite feature value");
  }
  features_.insert(features_.end(), x.begin(), x.end());
  labels_.push_back(y);
  if (z) nuisance_.push_back(*z);
}

void Dataset::set_nuisance_classes(std::size_t n) {
  if (n == 0) throw DataError("nuisance cardinality must be positive");
  for (int z : nuisance_) {
    if (static_cast<std::size_t>(z) >= n) throw DataError("existing nuisance label exceeds cardinality");
  }
  nuisance_classes_ = n;
}

void Dataset::set_image_shape(std::size_t rows, std::size_t cols) {
  if (rows * cols != feature_dim_) throw DimensionError("image shape does not match feature dimension");
  image_rows_ = rows;
  image_cols_ = cols;
}

std::span<const float> Dataset::features(std::size_t i) const {
  return std::span<const float>(features_).subspan(i * feature_dim_, feature_dim_);
}

Sample Dataset::sample(std::size_t i) const {
  if (i >= size()) throw ContractError("sample index out of range");
  Sample s{features(i), labels_[i], std::nullopt};
  if (has_nuisance()) s.z = nuisance_[i];
  return s;
}

Batch Dataset::batch(std::span<const std::size_t> indices) const {
  if (indices.empty()) throw ContractError("empty batch");
  Batch b;
  b.x = Tensor({indices.size(), feature_dim_});
  b.y.reserve(indices.size());
  for (std::size_t r = 0; r < indices.size(); ++r) {
    const std::size_t i = indices[r];
    if (i >= size()) throw ContractError("batch index out of range");
    std::copy_n(features_.data() + i * feature_dim_, feature_dim_, b.x.raw() + r * feature_dim_);
    b.y.push_back(labels_[i]);
    if (has_nuisance()) b.z.push_back(nuisance_[i]);
  }
  return b;
}

Batch Dataset::range(std::size_t begin, std::size_t end) const {
  std::vector<std::size_t> idx(end - begin);
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = begin + i;
  return batch(idx);
}

Dataset Dataset::slice(std::size_t begin, std::size_t end) const {
  if (begin > end || end > size()) throw ContractError("slice out of range");
  Dataset out(feature_dim_, num_classes_, split_);
  out.nuisance_classes_ = nuisance_classes_;
  out.image_rows_ = image_rows_;
  out.image_cols_ = image_cols_;
  out.features_.assign(features_.begin() + static_cast<std::ptrdiff_t>(begin * feature_dim_),
                       features_.begin() + static_cast<std::ptrdiff_t>(end * feature_dim_));
  out.labels_.assign(labels_.begin() + static_cast<std::ptrdiff_t>(begin),
                     labels_.begin() + static_cast<std::ptrdiff_t>(end));
  if (has_nuisance()) {
    out.nuisance_.assign(nuisance_.begin() + static_cast<std::ptrdiff_t>(begin),
                         nuisance_.begin() + static_cast<std::ptrdiff_t>(end));
  }
  return out;
}

void Dataset::validate() const {
  if (empty()) throw DataError("dataset is empty");
  if (features_.size() != size() * feature_dim_) throw DataError("feature buffer size mismatch");
  if (has_nuisance() && nuisance_.size() != size()) throw DataError("nuisance labels incomplete");
}

}  // namespace invforge
