#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "invforge/eval.hpp"
#include "invforge/kv.hpp"
#include "invforge/model.hpp"
#include "invforge/trainer.hpp"

namespace invforge {

struct ConfigKey {
  std::string_view name;
  std::string_view default_value;
  std::string_view doc;
};

/// Every accepted run-config key with its default, in echo order.
std::span<const ConfigKey> config_keys();

/// Fully resolved run configuration: user values over defaults.
class RunConfig {
 public:
  /// Collects every problem (unknown keys, malformed or out-of-range values)
  /// and throws one ConfigError listing all of them.
  static RunConfig resolve(const KeyValues& user);

  const KeyValues& values() const noexcept { return values_; }
  // Resolved text, one key per line in table order.
  std::string echo() const { return values_.to_string(); }

  std::uint64_t seed() const;
  ArchitectureOptions architecture(std::size_t input_dim, std::size_t num_classes) const;
  TrainConfig train() const;
  ProbeConfig probe() const;
  std::vector<SweepCell> sweep_grid() const;

 private:
  KeyValues values_;
};

std::vector<SweepCell> parse_sweep_grid(std::string_view text);

/// Entry point shared by the executable and tests. Returns the exit code.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace invforge
