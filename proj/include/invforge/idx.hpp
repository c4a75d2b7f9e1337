#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "invforge/dataset.hpp"

namespace invforge {

// Element types of the IDX container that this library reads and writes.
enum class IdxType : std::uint8_t { u8 = 0x08, f32 = 0x0D };

/// An IDX array. Exactly one of `u8` / `f32` holds the payload, matching
/// `type`. Multi-byte values are big-endian on disk.
struct IdxArray {
  IdxType type = IdxType::u8;
  std::vector<std::uint32_t> dims;
  std::vector<std::uint8_t> u8;
  std::vector<float> f32;

  std::size_t count() const;
  friend bool operator==(const IdxArray&, const IdxArray&) = default;
};

IdxArray parse_idx(std::string_view bytes, std::string_view origin = "<memory>");
std::string serialize_idx(const IdxArray& array);
IdxArray read_idx(const std::filesystem::path& path);
void write_idx(const std::filesystem::path& path, const IdxArray& array);

/// Labeled image dataset from an IDX3 image file and an IDX1 label file.
/// Pixels are scaled to [0, 1].
Dataset load_mnist(const std::filesystem::path& images, const std::filesystem::path& labels, SplitTag split);

// Dataset <-> IDX arrays. Image datasets are quantized to u8 (round(v*255));
// everything else is stored as f32 [n x d].
IdxArray features_to_idx(const Dataset& data);
IdxArray labels_to_idx(std::span<const int> labels);
std::vector<int> idx_to_labels(const IdxArray& array);

}  // namespace invforge
