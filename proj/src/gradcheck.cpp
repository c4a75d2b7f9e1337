#include "invforge/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

namespace invforge {

namespace {
double evaluate(const LossBuilder& build, ParamStore64& params) {
  Graph64 g;
  const NodeId loss = build(g, params);
  return g.value(loss)[0];
}
}  // namespace

double finite_diff_check(const LossBuilder& build, ParamStore64& params, double epsilon) {
  if (!(epsilon > 0.0)) throw ConfigError("finite-difference epsilon must be positive");
  if (params.parameter_count() == 0) return 0.0;

  std::map<std::string, Tensor64> analytic;
  {
    Graph64 g;
    const NodeId loss = build(g, params);
    g.backward(loss);
    for (auto& [name, e] : params) analytic.emplace(name, e.grad);
  }
  params.zero_grad();

  double worst = 0.0;
  for (auto& [name, e] : params) {
    const Tensor64& a = analytic.at(name);
    for (std::size_t i = 0; i < e.value.size(); ++i) {
      const double original = e.value[i];
      e.value[i] = original + epsilon;
      const double plus = evaluate(build, params);
      e.value[i] = original - epsilon;
      const double minus = evaluate(build, params);
      e.value[i] = original;
      const double numeric = (plus - minus) / (2.0 * epsilon);
      const double denom = std::max({std::abs(a[i]), std::abs(numeric), 1e-8});
      worst = std::max(worst, std::abs(a[i] - numeric) / denom);
    }
  }
  return worst;
}

}  // namespace invforge
