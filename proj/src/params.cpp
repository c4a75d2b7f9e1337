#include "invforge/params.hpp"

#include <cmath>

namespace invforge {

std::string_view component_of(std::string_view name) {
  const auto dot = name.find('.');
  return dot == std::string_view::npos ? name : name.substr(0, dot);
}

template <class T>
ParamEntry<T>& BasicParamStore<T>::add(const std::string& name, BasicTensor<T> value) {
  if (name.empty() || component_of(name) == name) {
    throw ContractError("parameter name '" + name + "' needs a component prefix");
  }
  if (contains(name)) throw ContractError("duplicate parameter name '" + name + "'");
  Entry e;
  e.grad = BasicTensor<T>::zeros(value.shape());
  e.adam_m = BasicTensor<T>::zeros(value.shape());
  e.adam_v = BasicTensor<T>::zeros(value.shape());
  e.value = std::move(value);
  return entries_.emplace(name, std::move(e)).first->second;
}

template <class T>
ParamEntry<T>& BasicParamStore<T>::at(std::string_view name) {
  auto it = entries_.find(name);
  if (it == entries_.end()) throw ContractError("unknown parameter '" + std::string(name) + "'");
  return it->second;
}

template <class T>
const ParamEntry<T>& BasicParamStore<T>::at(std::string_view name) const {
  auto it = entries_.find(name);
  if (it == entries_.end()) throw ContractError("unknown parameter '" + std::string(name) + "'");
  return it->second;
}

template <class T>
std::vector<std::string> BasicParamStore<T>::names() const {
  std::vector<std::string> out;
  out.reserve(entries_.size());
  for (const auto& kv : entries_) out.push_back(kv.first);
  return out;
}

template <class T>
std::size_t BasicParamStore<T>::parameter_count() const noexcept {
  std::size_t n = 0;
  for (const auto& kv : entries_) n += kv.second.value.size();
  return n;
}

template <class T>
ComponentSet BasicParamStore<T>::components() const {
  ComponentSet out;
  for (const auto& kv : entries_) out.emplace(component_of(kv.first));
  return out;
}

template <class T>
void BasicParamStore<T>::zero_grad() noexcept {
  for (auto& kv : entries_) kv.second.grad.fill(T(0));
}

template <class T>
void optimizer_step(BasicParamStore<T>& store, const AdamConfig& config, const ComponentSet& unfrozen) {
  for (auto& [name, e] : store) {
    if (!unfrozen.contains(component_of(name))) continue;
    e.steps += 1;
    const double t = static_cast<double>(e.steps);
    const T b1 = static_cast<T>(config.beta1);
    const T b2 = static_cast<T>(config.beta2);
    const T c1 = static_cast<T>(1.0 / (1.0 - std::pow(config.beta1, t)));
    const T c2 = static_cast<T>(1.0 / (1.0 - std::pow(config.beta2, t)));
    const T lr = static_cast<T>(config.lr);
    const T eps = static_cast<T>(config.eps);
    T* p = e.value.raw();
    const T* g = e.grad.raw();
    T* m = e.adam_m.raw();
    T* v = e.adam_v.raw();
    for (std::size_t i = 0, n = e.value.size(); i < n; ++i) {
      m[i] = b1 * m[i] + (T(1) - b1) * g[i];
      v[i] = b2 * v[i] + (T(1) - b2) * g[i] * g[i];
      const T mhat = m[i] * c1;
      const T vhat = v[i] * c2;
      p[i] -= lr * mhat / (std::sqrt(vhat) + eps);
    }
  }
  store.zero_grad();
}

template <class T>
double grad_norm(const BasicParamStore<T>& store, const ComponentSet& components) {
  double sq = 0.0;
  for (const auto& [name, e] : store) {
    if (!components.contains(component_of(name))) continue;
    for (T g : e.grad.data()) sq += static_cast<double>(g) * static_cast<double>(g);
  }
  return std::sqrt(sq);
}

template <class T>
double clip_grad_norm(BasicParamStore<T>& store, const ComponentSet& components, double max_norm) {
  const double norm = grad_norm(store, components);
  if (max_norm <= 0.0 || !(norm > max_norm)) return norm;
  const T scale = static_cast<T>(max_norm / norm);
  for (auto& [name, e] : store) {
    if (!components.contains(component_of(name))) continue;
    for (T& g : e.grad.data()) g *= scale;
  }
  return norm;
}

template <class T>
BasicTensor<T> glorot_uniform(std::size_t fan_in, std::size_t fan_out, RngStream rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  BasicTensor<T> w({fan_in, fan_out});
  for (T& v : w.data()) v = static_cast<T>(rng.uniform(-limit, limit));
  return w;
}

template class BasicParamStore<float>;
template class BasicParamStore<double>;

#define INVFORGE_INSTANTIATE(T)                                                              \
  template void optimizer_step<T>(BasicParamStore<T>&, const AdamConfig&, const ComponentSet&); \
  template double grad_norm<T>(const BasicParamStore<T>&, const ComponentSet&);                \
  template double clip_grad_norm<T>(BasicParamStore<T>&, const ComponentSet&, double);         \
  template BasicTensor<T> glorot_uniform<T>(std::size_t, std::size_t, RngStream);

INVFORGE_INSTANTIATE(float)
INVFORGE_INSTANTIATE(double)
#undef INVFORGE_INSTANTIATE

}  // namespace invforge
