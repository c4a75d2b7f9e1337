#include "invforge/image.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "invforge/errors.hpp"

namespace invforge {

namespace {

void check_image(std::span<const float> img, std::size_t rows, std::size_t cols) {
  if (rows == 0 || cols == 0 || img.size() != rows * cols) {
    throw DimensionError("image buffer of " + std::to_string(img.size()) + " values does not match " +
                         std::to_string(rows) + "x" + std::to_string(cols));
  }
}

// Coordinates within 1e-9 of a grid point are snapped so right-angle
// rotations land exactly on source pixels.
double snap(double v) {
  const double r = std::round(v);
  return std::abs(v - r) < 1e-9 ? r : v;
}

float bilinear(std::span<const float> img, std::size_t rows, std::size_t cols, double sy, double sx) {
  const double fy = std::floor(sy);
  const double fx = std::floor(sx);
  const double wy = sy - fy;
  const double wx = sx - fx;
  const auto y0 = static_cast<long>(fy);
  const auto x0 = static_cast<long>(fx);
  auto px = [&](long y, long x) -> double {
    if (y < 0 || x < 0 || y >= static_cast<long>(rows) || x >= static_cast<long>(cols)) return 0.0;
    return img[static_cast<std::size_t>(y) * cols + static_cast<std::size_t>(x)];
  };
  double v = (1 - wy) * ((1 - wx) * px(y0, x0) + wx * px(y0, x0 + 1));
  if (wy > 0) v += wy * ((1 - wx) * px(y0 + 1, x0) + wx * px(y0 + 1, x0 + 1));
  return static_cast<float>(v);
}

}  // namespace

std::vector<float> rotate_image(std::span<const float> img, std::size_t rows, std::size_t cols, double theta_deg,
                                RotationMode mode) {
  check_image(img, rows, cols);
  if (theta_deg == 0.0) return {img.begin(), img.end()};
  const double t = theta_deg * std::numbers::pi / 180.0;
  const double c = std::cos(t);
  const double s = std::sin(t);
  const double cy = (static_cast<double>(rows) - 1) / 2;
  const double cx = (static_cast<double>(cols) - 1) / 2;
  std::vector<float> out(rows * cols, 0.0f);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t q = 0; q < cols; ++q) {
      const double dy = static_cast<double>(r) - cy;
      const double dx = static_cast<double>(q) - cx;
      double sx;
      double sy;
      if (mode == RotationMode::in_plane) {
        // Inverse map of a counter-clockwise turn with y pointing down.
        sx = c * dx - s * dy;
        sy = s * dx + c * dy;
      } else {
        sx = dx / c;
        sy = dy;
      }
      const float v = bilinear(img, rows, cols, snap(sy + cy), snap(sx + cx));
      out[r * cols + q] = std::clamp(v, 0.0f, 1.0f);
    }
  }
  return out;
}

void DilSpec::validate() const {
  if (kernel == 0) throw ConfigError("morphology kernel must satisfy |kernel| >= 1");
}

std::vector<float> morph(std::span<const float> img, std::size_t rows, std::size_t cols, DilSpec spec) {
  spec.validate();
  check_image(img, rows, cols);
  const long side = std::abs(spec.kernel);
  if (side == 1) return {img.begin(), img.end()};
  const bool dilate = spec.kernel > 0;
  const long lo = -(side / 2);
  const long hi = lo + side - 1;
  const auto R = static_cast<long>(rows);
  const auto C = static_cast<long>(cols);
  std::vector<float> out(rows * cols);
  for (long r = 0; r < R; ++r) {
    for (long q = 0; q < C; ++q) {
      float best = img[static_cast<std::size_t>(r * C + q)];
      for (long y = std::max(0L, r + lo); y <= std::min(R - 1, r + hi); ++y) {
        for (long x = std::max(0L, q + lo); x <= std::min(C - 1, q + hi); ++x) {
          const float v = img[static_cast<std::size_t>(y * C + x)];
          best = dilate ? std::max(best, v) : std::min(best, v);
        }
      }
      out[static_cast<std::size_t>(r * C + q)] = best;
    }
  }
  return out;
}

}  // namespace invforge
