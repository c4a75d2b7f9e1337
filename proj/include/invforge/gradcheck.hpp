#pragma once

#include <functional>

#include "invforge/graph.hpp"

namespace invforge {

// Builds a fresh graph over `params` and returns its scalar loss node.
using LossBuilder = std::function<NodeId(Graph64&, ParamStore64&)>;

/// Central-difference gradient oracle in double precision. Every parameter
/// coordinate is perturbed by +/-epsilon and (L+ - L-) / 2eps is compared to
/// the analytic gradient. Returns the worst relative error, using
/// max(|analytic|, |numeric|, 1e-8) as denominator. Parameter values are
/// restored on return. Builders must be deterministic (fix any dropout
/// mask outside the builder).
double finite_diff_check(const LossBuilder& build, ParamStore64& params, double epsilon);

}  // namespace invforge
