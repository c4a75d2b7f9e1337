#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "invforge/model.hpp"
#include "invforge/trainer.hpp"

namespace invforge {

inline constexpr std::uint32_t kCheckpointVersion = 1;

struct Checkpoint {
  Model model;
  TrainConfig config;
  TrainState state;
};

/// File layout:
///   invforge-checkpoint\n
///   version=<n>\n
///   header_bytes=<n>\n
///   <header: key=value text with arch.*, train.*, state.* and the tensor table>
///   <payload: float32 little-endian arrays in table order>
/// For each tensor the payload holds the value, then the Adam moments when
/// the entry has been updated at least once.
std::string serialize_checkpoint(const Model& model, const TrainConfig& config, const TrainState& state);
Checkpoint parse_checkpoint(std::string_view bytes, std::string_view origin = "<memory>");

/// Writes via a temporary file and rename.
void save_checkpoint(const std::filesystem::path& path, const Model& model, const TrainConfig& config,
                     const TrainState& state);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace invforge
