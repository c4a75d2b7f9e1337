#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "invforge/rng.hpp"
#include "invforge/tensor.hpp"

namespace invforge {

template <class T>
struct ParamEntry {
  BasicTensor<T> value;
  BasicTensor<T> grad;
  // Adam moment slots and the number of updates this entry has received.
  BasicTensor<T> adam_m;
  BasicTensor<T> adam_v;
  std::uint64_t steps = 0;
};

/// Component prefix of a parameter path: "enc.layer0.weight" -> "enc".
std::string_view component_of(std::string_view name);

using ComponentSet = std::set<std::string, std::less<>>;

/// Named parameter tensors with their gradient accumulators and optimizer
/// state. Entries are node-stable, so graphs may hold references into them.
template <class T>
class BasicParamStore {
 public:
  using Entry = ParamEntry<T>;
  using Map = std::map<std::string, Entry, std::less<>>;

  Entry& add(const std::string& name, BasicTensor<T> value);

  bool contains(std::string_view name) const { return entries_.find(name) != entries_.end(); }
  Entry& at(std::string_view name);
  const Entry& at(std::string_view name) const;

  std::vector<std::string> names() const;
  std::size_t size() const noexcept { return entries_.size(); }
  std::size_t parameter_count() const noexcept;
  ComponentSet components() const;

  void zero_grad() noexcept;

  typename Map::iterator begin() noexcept { return entries_.begin(); }
  typename Map::iterator end() noexcept { return entries_.end(); }
  typename Map::const_iterator begin() const noexcept { return entries_.begin(); }
  typename Map::const_iterator end() const noexcept { return entries_.end(); }

  template <class U>
  BasicParamStore<U> cast() const {
    BasicParamStore<U> out;
    for (const auto& [name, e] : entries_) {
      auto& dst = out.add(name, e.value.template cast<U>());
      dst.adam_m = e.adam_m.template cast<U>();
      dst.adam_v = e.adam_v.template cast<U>();
      dst.steps = e.steps;
    }
    return out;
  }

 private:
  Map entries_;
};

using ParamStore = BasicParamStore<float>;
using ParamStore64 = BasicParamStore<double>;

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// Adam update on every entry whose component is in `unfrozen`; all
/// gradient accumulators are cleared afterwards. Frozen entries are not
/// touched at all (value, moments and step count stay bit-identical).
template <class T>
void optimizer_step(BasicParamStore<T>& store, const AdamConfig& config, const ComponentSet& unfrozen);

/// Global L2 norm of the gradients of the listed components.
template <class T>
double grad_norm(const BasicParamStore<T>& store, const ComponentSet& components);

/// Rescales gradients of `components` so their global norm is at most
/// `max_norm`. Returns the norm before clipping. max_norm <= 0 disables.
template <class T>
double clip_grad_norm(BasicParamStore<T>& store, const ComponentSet& components, double max_norm);

template <class T>
BasicTensor<T> glorot_uniform(std::size_t fan_in, std::size_t fan_out, RngStream rng);

extern template class BasicParamStore<float>;
extern template class BasicParamStore<double>;

}  // namespace invforge
