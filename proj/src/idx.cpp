#include "invforge/idx.hpp"

#include <algorithm>
#include <bit>
#include <cstdio>
#include <cmath>
#include <cstring>
#include <limits>

#include "invforge/kv.hpp"

namespace invforge {

std::size_t IdxArray::count() const {
  std::size_t n = 1;
  for (auto d : dims) n *= d;
  return n;
}

namespace {

std::uint32_t read_be32(std::string_view bytes, std::size_t offset) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v = (v << 8) | static_cast<std::uint8_t>(bytes[offset + i]);
  return v;
}

void append_be32(std::string& out, std::uint32_t v) {
  for (int shift = 24; shift >= 0; shift -= 8) out.push_back(static_cast<char>((v >> shift) & 0xFF));
}

std::size_t element_size(IdxType t) { return t == IdxType::u8 ? 1 : 4; }

}  // namespace

IdxArray parse_idx(std::string_view bytes, std::string_view origin) {
  const std::string where(origin);
  if (bytes.size() < 4) throw DataError(where + ": truncated IDX header");
  const auto b0 = static_cast<std::uint8_t>(bytes[0]);
  const auto b1 = static_cast<std::uint8_t>(bytes[1]);
  const auto type = static_cast<std::uint8_t>(bytes[2]);
  const auto ndim = static_cast<std::uint8_t>(bytes[3]);
  if (b0 != 0 || b1 != 0 || (type != 0x08 && type != 0x0D) || ndim == 0) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "0x%08X", read_be32(bytes, 0));
    throw DataError(where + ": bad IDX magic " + buf);
  }
  IdxArray out;
  out.type = static_cast<IdxType>(type);
  const std::size_t header = 4 + 4 * static_cast<std::size_t>(ndim);
  if (bytes.size() < header) throw DataError(where + ": truncated IDX dimension table");
  std::uint64_t count = 1;
  for (std::size_t i = 0; i < ndim; ++i) {
    const std::uint32_t d = read_be32(bytes, 4 + 4 * i);
    out.dims.push_back(d);
    count *= d;
    if (count > (std::uint64_t{1} << 40)) throw DataError(where + ": IDX dimensions overflow");
  }
  const std::uint64_t payload = count * element_size(out.type);
  if (bytes.size() - header < payload) {
    throw DataError(where + ": truncated IDX payload (expected " + std::to_string(payload) + " bytes, found " +
                    std::to_string(bytes.size() - header) + ")");
  }
  if (bytes.size() - header > payload) throw DataError(where + ": trailing bytes after IDX payload");
  const char* p = bytes.data() + header;
  if (out.type == IdxType::u8) {
    out.u8.assign(reinterpret_cast<const std::uint8_t*>(p), reinterpret_cast<const std::uint8_t*>(p) + count);
  } else {
    out.f32.resize(count);
    for (std::size_t i = 0; i < count; ++i) {
      const std::uint32_t bits = read_be32(bytes, header + 4 * i);
      out.f32[i] = std::bit_cast<float>(bits);
    }
  }
  return out;
}

std::string serialize_idx(const IdxArray& a) {
  if (a.dims.empty() || a.dims.size() > 255) throw DataError("IDX array needs 1..255 dimensions");
  const std::size_t n = a.count();
  if (n == 0) throw DataError("IDX array has zero elements");
  if ((a.type == IdxType::u8 ? a.u8.size() : a.f32.size()) != n) {
    throw DataError("IDX payload size does not match dimensions");
  }
  std::string out;
  out.reserve(4 + 4 * a.dims.size() + n * element_size(a.type));
  out.push_back(0);
  out.push_back(0);
  out.push_back(static_cast<char>(a.type));
  out.push_back(static_cast<char>(a.dims.size()));
  for (auto d : a.dims) append_be32(out, d);
  if (a.type == IdxType::u8) {
    out.append(reinterpret_cast<const char*>(a.u8.data()), n);
  } else {
    for (float v : a.f32) append_be32(out, std::bit_cast<std::uint32_t>(v));
  }
  return out;
}

IdxArray read_idx(const std::filesystem::path& path) {
  std::string bytes;
  try {
    bytes = read_file(path.string());
  } catch (const IoError& e) {
    throw DataError(e.what());
  }
  return parse_idx(bytes, path.string());
}

void write_idx(const std::filesystem::path& path, const IdxArray& array) {
  write_file_atomic(path.string(), serialize_idx(array));
}

std::vector<int> idx_to_labels(const IdxArray& a) {
  if (a.type != IdxType::u8 || a.dims.size() != 1) throw DataError("label IDX must be a 1-D u8 array");
  return std::vector<int>(a.u8.begin(), a.u8.end());
}

IdxArray labels_to_idx(std::span<const int> labels) {
  IdxArray a;
  a.type = IdxType::u8;
  a.dims = {static_cast<std::uint32_t>(labels.size())};
  a.u8.reserve(labels.size());
  for (int v : labels) {
    if (v < 0 || v > 255) throw DataError("label does not fit in u8");
    a.u8.push_back(static_cast<std::uint8_t>(v));
  }
  return a;
}

IdxArray features_to_idx(const Dataset& data) {
  IdxArray a;
  const auto n = static_cast<std::uint32_t>(data.size());
  const auto values = data.all_features();
  if (data.is_image()) {
    a.type = IdxType::u8;
    a.dims = {n, static_cast<std::uint32_t>(data.image_rows()), static_cast<std::uint32_t>(data.image_cols())};
    a.u8.reserve(values.size());
    for (float v : values) {
      const float c = std::clamp(v, 0.0f, 1.0f);
      a.u8.push_back(static_cast<std::uint8_t>(std::lround(c * 255.0f)));
    }
  } else {
    a.type = IdxType::f32;
    a.dims = {n, static_cast<std::uint32_t>(data.feature_dim())};
    a.f32.assign(values.begin(), values.end());
  }
  return a;
}

Dataset load_mnist(const std::filesystem::path& images, const std::filesystem::path& labels, SplitTag split) {
  const IdxArray img = read_idx(images);
  if (img.type != IdxType::u8 || img.dims.size() != 3) {
    throw DataError(images.string() + ": expected a 3-D u8 image array");
  }
  const std::vector<int> y = idx_to_labels(read_idx(labels));
  if (y.size() != img.dims[0]) throw DataError("image and label counts differ");
  const std::size_t rows = img.dims[1];
  const std::size_t cols = img.dims[2];
  int max_label = 0;
  for (int v : y) max_label = std::max(max_label, v);
  Dataset ds(rows * cols, std::max<std::size_t>(10, static_cast<std::size_t>(max_label) + 1), split);
  ds.set_image_shape(rows, cols);
  ds.reserve(y.size());
  std::vector<float> buf(rows * cols);
  for (std::size_t i = 0; i < y.size(); ++i) {
    for (std::size_t j = 0; j < buf.size(); ++j) buf[j] = static_cast<float>(img.u8[i * buf.size() + j]) / 255.0f;
    ds.add(buf, y[i]);
  }
  return ds;
}

}  // namespace invforge
