#pragma once

// Small two-layer network used by the linked-emulator tests and benchmarks:
// a 1-input curve family feeding a 2-input downstream response, wired the
// same way the pipeline wires the case study.

#include <cmath>

#include "emunet/design.hpp"
#include "emunet/linked.hpp"
#include "emunet/serialize.hpp"

namespace toy {

using namespace emunet;

inline Vector upstream_curve(double x, int l = 8) {
  Vector y(l);
  for (int j = 0; j < l; ++j)
    y[j] = (1.5 + std::sin(2.2 * x + 0.3 * j)) * (1.0 + 0.5 * x);
  return y;
}

inline Vector downstream_curve(const Vector& upstream, double z) {
  Vector y(upstream.size());
  for (int j = 0; j < y.size(); ++j)
    y[j] = upstream[j] * (1.0 + 0.3 * z) + 0.05 * j * z;
  return y;
}

inline LinkedNetwork make_network(std::uint64_t seed = 0, int n1 = 9, int n2 = 12) {
  MvSpec spec;
  spec.rule = TruncationRule{0.95, 2};
  spec.fit.n_starts = 4;
  spec.fit.seed = seed;

  const Domain dom1({{"x", 0.0, 1.0}});
  Ensemble ens1;
  ens1.design = lhc_maximin(n1, dom1, 4, seed + 1);
  ens1.outputs.resize(8, n1);
  for (int i = 0; i < n1; ++i) ens1.outputs.col(i) = upstream_curve(ens1.design.points(i, 0));
  const MvEmulator layer1 = fit_mv(ens1, spec, "upstream");

  const Domain base({{"x", 0.0, 1.0}, {"z", -1.0, 1.0}});
  const auto base_design = lhc_maximin(n2, base, 4, seed + 2);
  Matrix coeff(layer1.q(), n2);
  Matrix outputs(8, n2);
  for (int i = 0; i < n2; ++i) {
    const Vector up = upstream_curve(base_design.points(i, 0));
    coeff.col(i) = project(layer1.basis, up);
    outputs.col(i) = downstream_curve(up, base_design.points(i, 1));
  }

  std::vector<Dimension> dims;
  for (int k = 0; k < layer1.q(); ++k) {
    const double lo = coeff.row(k).minCoeff();
    const double hi = coeff.row(k).maxCoeff();
    const double pad = 0.15 * (hi - lo) + 1e-9;
    dims.push_back({"coeff_" + std::to_string(k + 1), lo - pad, hi + pad});
  }
  dims.push_back({"z", -1.0, 1.0});

  Ensemble ens2;
  Matrix pts(n2, layer1.q() + 1);
  pts.leftCols(layer1.q()) = coeff.transpose();
  pts.col(layer1.q()) = base_design.points.col(1);
  ens2.design = DesignMatrix{pts, Domain(dims)};
  ens2.outputs = outputs;
  MvSpec spec2 = spec;
  spec2.fit.seed = seed + 7;
  const MvEmulator layer2 = fit_mv(ens2, spec2, "downstream", basis_fingerprint(layer1.basis));

  return make_two_layer_network(layer1, layer2, 1);
}

}  // namespace toy
