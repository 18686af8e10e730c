#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "emunet/mvem.hpp"

namespace emunet {

// Per-coordinate expectation factors of the squared-exponential kernel under
// an independent Gaussian input N(m, v), against a training value w (all on
// the unit-cube scale). These are the building blocks of the closed-form
// linked moments; each is validated against numerical quadrature of the
// defining integral by the test suite.
namespace kernel_factors {

// E[exp(-(W-w)^2/delta^2)]
double xi(double m, double v, double delta, double w);
// E[exp(-(W-wt)^2/delta^2) * exp(-(W-ws)^2/delta^2)]
double zeta(double m, double v, double delta, double wt, double ws);
// E[W * exp(-(W-w)^2/delta^2)]
double psi(double m, double v, double delta, double w);

}  // namespace kernel_factors

// One input coordinate of a downstream GP: either an independent Gaussian
// (an upstream coefficient channel) or a fixed exogenous value.
struct InputCoord {
  double mean = 0.0;
  double variance = 0.0;
  bool stochastic = false;

  static InputCoord deterministic(double value) { return {value, 0.0, false}; }
  static InputCoord gaussian(double mean, double variance) { return {mean, variance, true}; }
};

// Expectations of kernel vectors against the input distribution:
//   xi_t   = E[r(W, w_t)]                       (n)
//   zeta   = E[r(W, w_t) r(W, w_s)]             (n x n, symmetric)
//   psi    = E[W_k r(W, w_t)]                   (n x p; deterministic
//            coordinates contribute value * xi_t)
struct KernelMoments {
  Vector xi;
  Matrix zeta;
  Matrix psi;
};

// Inputs in natural units; transformed to the model's unit cube internally.
KernelMoments kernel_moments(const GpModel& model, const std::vector<InputCoord>& input);

struct LinkedGpMoments {
  double mean = 0.0;
  double variance = 0.0;
  bool clamped = false;  // variance was within -1e-10 of zero and clamped
};

// Exact mean and variance of a GP's posterior prediction when some inputs
// are independent Gaussians (squared-exponential kernel, constant or linear
// trend): the law of total variance applied with the kernel-moment
// expectations above.
LinkedGpMoments linked_gp_moments(const GpModel& model, const std::vector<InputCoord>& input);

// Where one input dimension of a downstream emulator comes from: a retained
// coefficient channel of an upstream node, or an exogenous input.
struct WireSource {
  enum class Kind { Coefficient, Exogenous };
  Kind kind = Kind::Exogenous;
  int node = -1;    // upstream node index (Coefficient only)
  int index = 0;    // coefficient index, or exogenous dimension

  static WireSource coefficient(int node, int coeff) {
    return {Kind::Coefficient, node, coeff};
  }
  static WireSource exogenous(int dim) { return {Kind::Exogenous, -1, dim}; }
};

// Feed-forward DAG of emulators in topological order: node i may consume
// coefficient channels of nodes j < i plus exogenous inputs. The case study
// wires exactly two layers, but moment pairs propagate through deeper chains
// identically.
class LinkedNetwork {
 public:
  LinkedNetwork() = default;
  LinkedNetwork(std::vector<MvEmulator> nodes, std::vector<std::vector<WireSource>> wiring,
                int exogenous_dim);

  const std::vector<MvEmulator>& nodes() const { return nodes_; }
  const std::vector<std::vector<WireSource>>& wiring() const { return wiring_; }
  int exogenous_dim() const { return exogenous_dim_; }

  // Two-layer accessors used by the case-study paths.
  const MvEmulator& layer1() const { return nodes_.front(); }
  const MvEmulator& layer2() const { return nodes_.back(); }

 private:
  std::vector<MvEmulator> nodes_;
  std::vector<std::vector<WireSource>> wiring_;
  int exogenous_dim_ = 0;
};

// layer1 consumes exogenous dims [0, p1); layer2 consumes layer1's
// coefficient channels followed by `extra_exogenous` trailing dims. Verifies
// that layer2's recorded input provenance matches layer1's basis fingerprint.
LinkedNetwork make_two_layer_network(MvEmulator layer1, MvEmulator layer2, int extra_exogenous);

struct LinkedResult {
  std::vector<GaussianVector> node_coeff;  // per node
  Vector mean;      // terminal node reconstruction
  Vector variance;
  const GaussianVector& coeff2() const { return node_coeff.back(); }
};

// Analytic moment propagation through the network for exogenous input z
// (all deterministic). First-layer nodes reduce to plain GP prediction.
LinkedResult propagate(const LinkedNetwork& net, const Vector& z);

// Case-study signature: x1 feeds layer 1, z the trailing exogenous dims.
LinkedResult linked_predict(const LinkedNetwork& net, const Vector& x1, const Vector& z);

// Zero-input-variance composition: evaluates layer 2 at layer 1's mean
// coefficients, ignoring upstream uncertainty.
MvPrediction composed_predict(const LinkedNetwork& net, const Vector& x1, const Vector& z);

struct McResult {
  Vector mean;
  Vector variance;   // includes the basis truncation residual, as the
                     // analytic path does
  Vector se_mean;    // Monte Carlo standard error of the mean, per coordinate
  int n_samples = 0;
};

// Monte Carlo propagation: sample upstream coefficients, evaluate downstream
// predictive moments, sample downstream coefficients, reconstruct. Sharded
// into fixed-size blocks with per-block seeds so results are bitwise
// identical for any thread count; the serial reference walks the same blocks
// sequentially.
McResult mc_propagate(const LinkedNetwork& net, const Vector& x1, const Vector& z, int n_samples,
                      std::uint64_t seed);
McResult mc_propagate_serial(const LinkedNetwork& net, const Vector& x1, const Vector& z,
                             int n_samples, std::uint64_t seed);

}  // namespace emunet
