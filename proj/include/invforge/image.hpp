#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace invforge {

enum class RotationMode : std::uint8_t { in_plane, foreshorten };

/// Rotates a row-major image about its center, counter-clockwise as
/// displayed for positive theta. Bilinear sampling, zero fill, output
/// clamped to [0, 1]. theta == 0 returns an exact copy.
/// foreshorten mode instead squeezes columns by cos(theta) about the center.
std::vector<float> rotate_image(std::span<const float> img, std::size_t rows, std::size_t cols, double theta_deg,
                                RotationMode mode = RotationMode::in_plane);

/// Negative kernel = erosion, positive = dilation, |kernel| = window side.
struct DilSpec {
  int kernel = 1;
  void validate() const;
};

/// Grayscale dilation (window max) or erosion (window min). The window covers
/// offsets [-(s/2), s-1-(s/2)] and is clipped at the image border.
std::vector<float> morph(std::span<const float> img, std::size_t rows, std::size_t cols, DilSpec spec);

}  // namespace invforge
