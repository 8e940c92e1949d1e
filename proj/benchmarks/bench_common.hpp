#pragma once

#include "rlex/enumerator.hpp"
#include "rlex/objective.hpp"
#include "rlex/surrogate.hpp"

namespace rlex::bench {

inline AnalyticObjective bowl(int dim) {
  AnalyticObjective obj;
  obj.dim = dim;
  obj.domain = Box::cube(dim, -1.0, 1.0);
  for (int d = 0; d < dim; ++d) {
    std::vector<int> exps(static_cast<std::size_t>(dim), 0);
    exps[static_cast<std::size_t>(d)] = 2;
    obj.poly.push_back({-1.0, exps});
  }
  return obj;
}

inline Surrogate fitted_surrogate(int dim, double eta, int features) {
  const AnalyticObjective obj = bowl(dim);
  const ObjectiveEvaluator ev = make_evaluator(synthetic_env(obj),
                                               Architecture::constant(dim, dim), 0, 0.0, 1, 17);
  const ParameterGrid grid = build_grid(obj.domain, eta);
  const GradientSamples samples = sample_gradient_grid(ev, grid, 0.01);
  return fit_mkl(samples, {{KernelSpec::Type::gaussian, 0.8}, {KernelSpec::Type::linear, 0.0}},
                 features, 1e-8, 5);
}

}  // namespace rlex::bench
