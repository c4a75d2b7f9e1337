#include "invforge/checkpoint.hpp"

#include <bit>
#include <cstring>

namespace invforge {

namespace {

constexpr std::string_view kMagic = "invforge-checkpoint\n";

void append_f32(std::string& out, std::span<const float> values) {
  const std::size_t at = out.size();
  out.resize(at + values.size() * 4);
  char* p = out.data() + at;
  for (float v : values) {
    const auto bits = std::bit_cast<std::uint32_t>(v);
    for (int b = 0; b < 4; ++b) *p++ = static_cast<char>((bits >> (8 * b)) & 0xFF);
  }
}

void read_f32(std::string_view bytes, std::size_t& pos, std::span<float> out) {
  for (float& v : out) {
    std::uint32_t bits = 0;
    for (int b = 0; b < 4; ++b) bits |= static_cast<std::uint32_t>(static_cast<std::uint8_t>(bytes[pos + b])) << (8 * b);
    v = std::bit_cast<float>(bits);
    pos += 4;
  }
}

std::string shape_text(const Shape& s) {
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) out += (i ? "x" : "") + std::to_string(s[i]);
  return out;
}

Shape parse_shape(std::string_view text) {
  Shape s;
  for (const auto& part : split(text, 'x')) {
    const auto v = parse_int(part, "tensor shape");
    if (v <= 0) throw CheckpointError("non-positive tensor dimension");
    s.push_back(static_cast<std::size_t>(v));
  }
  if (s.empty()) throw CheckpointError("empty tensor shape");
  return s;
}

std::string_view take_line(std::string_view bytes, std::size_t& pos, std::string_view origin) {
  const auto nl = bytes.find('\n', pos);
  if (nl == std::string_view::npos) throw CheckpointError(std::string(origin) + ": corrupt checkpoint header");
  const auto line = bytes.substr(pos, nl - pos);
  pos = nl + 1;
  return line;
}

}  // namespace

std::string serialize_checkpoint(const Model& model, const TrainConfig& config, const TrainState& state) {
  KeyValues h;
  model.spec().write(h);
  config.write(h);
  state.write(h);
  std::string payload;
  std::size_t i = 0;
  h.set("tensors", static_cast<std::uint64_t>(model.params().size()));
  for (const auto& [name, e] : model.params()) {
    const std::string p = "tensor." + std::to_string(i++) + ".";
    const bool adam = !e.adam_m.empty();
    h.set(p + "name", name);
    h.set(p + "shape", shape_text(e.value.shape()));
    h.set(p + "steps", e.steps);
    h.set(p + "adam", adam ? 1 : 0);
    append_f32(payload, e.value.data());
    if (adam) {
      append_f32(payload, e.adam_m.data());
      append_f32(payload, e.adam_v.data());
    }
  }
  h.set("payload_bytes", static_cast<std::uint64_t>(payload.size()));
  const std::string header = h.to_string();
  std::string out(kMagic);
  out += "version=" + std::to_string(kCheckpointVersion) + "\n";
  out += "header_bytes=" + std::to_string(header.size()) + "\n";
  out += header;
  out += payload;
  return out;
}

Checkpoint parse_checkpoint(std::string_view bytes, std::string_view origin) {
  const std::string where(origin);
  if (bytes.substr(0, kMagic.size()) != kMagic) throw CheckpointError(where + ": not a checkpoint file");
  std::size_t pos = kMagic.size();
  const auto version_line = take_line(bytes, pos, origin);
  if (version_line.substr(0, 8) != "version=") throw CheckpointError(where + ": missing version field");
  const auto version = parse_int(version_line.substr(8), "checkpoint version");
  if (version != kCheckpointVersion) {
    throw UnsupportedVersionError(where + ": unsupported checkpoint version " + std::to_string(version) +
                                  " (this build reads version " + std::to_string(kCheckpointVersion) + ")");
  }
  const auto size_line = take_line(bytes, pos, origin);
  if (size_line.substr(0, 13) != "header_bytes=") throw CheckpointError(where + ": corrupt checkpoint header");
  const auto header_bytes = static_cast<std::size_t>(parse_int(size_line.substr(13), "header_bytes"));
  if (bytes.size() - pos < header_bytes) throw CheckpointError(where + ": truncated checkpoint header");

  KeyValues h;
  ArchitectureSpec spec;
  TrainConfig config;
  TrainState state;
  std::size_t count = 0;
  std::size_t payload_bytes = 0;
  try {
    h = KeyValues::parse(bytes.substr(pos, header_bytes), origin);
    spec = ArchitectureSpec::read(h);
    config = TrainConfig::read(h);
    state = TrainState::read(h);
    count = h.get_uint("tensors");
    payload_bytes = h.get_uint("payload_bytes");
  } catch (const CheckpointError&) {
    throw;
  } catch (const Error& e) {
    throw CheckpointError(where + ": corrupt checkpoint header: " + e.what());
  }
  pos += header_bytes;
  if (bytes.size() - pos != payload_bytes) {
    throw CheckpointError(where + ": checkpoint payload is " + std::to_string(bytes.size() - pos) +
                          " bytes, header declares " + std::to_string(payload_bytes) + " (truncated or corrupt)");
  }

  ParamStore params;
  const std::size_t end = bytes.size();
  for (std::size_t i = 0; i < count; ++i) {
    const std::string p = "tensor." + std::to_string(i) + ".";
    std::string name;
    Shape shape;
    bool adam = false;
    std::uint64_t steps = 0;
    try {
      name = h.get(p + "name");
      shape = parse_shape(h.get(p + "shape"));
      adam = h.get_int(p + "adam") != 0;
      steps = h.get_uint(p + "steps");
    } catch (const CheckpointError&) {
      throw;
    } catch (const Error& e) {
      throw CheckpointError(where + ": corrupt tensor table: " + e.what());
    }
    const std::size_t n = shape_size(shape);
    if ((end - pos) / 4 < n * (adam ? 3 : 1)) throw CheckpointError(where + ": truncated tensor data for " + name);
    Tensor value(shape);
    read_f32(bytes, pos, value.data());
    auto& e = params.add(name, std::move(value));
    e.steps = steps;
    if (adam) {
      e.adam_m = Tensor(shape);
      e.adam_v = Tensor(shape);
      read_f32(bytes, pos, e.adam_m.data());
      read_f32(bytes, pos, e.adam_v.data());
    }
  }
  if (pos != end) throw CheckpointError(where + ": trailing bytes after checkpoint payload");
  try {
    return Checkpoint{Model(std::move(spec), std::move(params)), config, state};
  } catch (const DimensionError& e) {
    throw CheckpointError(where + ": tensors do not match the architecture: " + e.what());
  }
}

void save_checkpoint(const std::filesystem::path& path, const Model& model, const TrainConfig& config,
                     const TrainState& state) {
  write_file_atomic(path.string(), serialize_checkpoint(model, config, state));
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  return parse_checkpoint(read_file(path.string()), path.string());
}

}  // namespace invforge
