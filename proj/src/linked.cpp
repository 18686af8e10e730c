#include "emunet/linked.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "emunet/errors.hpp"
#include "emunet/parallel.hpp"
#include "emunet/rng.hpp"
#include "emunet/serialize.hpp"

namespace emunet {

namespace kernel_factors {

double xi(double m, double v, double delta, double w) {
  const double d2 = delta * delta;
  const double gap = m - w;
  return std::exp(-gap * gap / (d2 + 2.0 * v)) / std::sqrt(1.0 + 2.0 * v / d2);
}

double zeta(double m, double v, double delta, double wt, double ws) {
  const double d2 = delta * delta;
  const double sep = wt - ws;
  const double gap = m - 0.5 * (wt + ws);
  return std::exp(-sep * sep / (2.0 * d2)) * std::exp(-gap * gap / (0.5 * d2 + 2.0 * v)) /
         std::sqrt(1.0 + 4.0 * v / d2);
}

double psi(double m, double v, double delta, double w) {
  const double d2 = delta * delta;
  return xi(m, v, delta, w) * (m * d2 + 2.0 * v * w) / (d2 + 2.0 * v);
}

}  // namespace kernel_factors

namespace {

struct UnitInput {
  Vector mean;      // unit-cube scale
  Vector variance;  // unit-cube scale
};

UnitInput to_unit_input(const GpModel& model, const std::vector<InputCoord>& input) {
  const int p = model.p();
  if (static_cast<int>(input.size()) != p)
    throw ConfigError("kernel_moments: input coordinate count mismatch");
  UnitInput u;
  u.mean.resize(p);
  u.variance.resize(p);
  for (int k = 0; k < p; ++k) {
    const double width = model.domain().width(k);
    u.mean[k] = (input[k].mean - model.domain().dim(k).lower) / width;
    u.variance[k] = input[k].stochastic ? input[k].variance / (width * width) : 0.0;
    if (u.variance[k] < 0.0) throw ConfigError("kernel_moments: negative input variance");
  }
  return u;
}

// xi, zeta, psi assembled as products of per-coordinate factors. psi is
// expressed via the posterior-style mean shift so zero factors cannot
// produce 0/0:  E[W_k r(W,w_t)] = xi_t * (m_k d_k^2 + 2 v_k w_tk)/(d_k^2 + 2 v_k).
KernelMoments moments_from_unit(const GpModel& model, const UnitInput& in) {
  const int n = model.n();
  const int p = model.p();
  const Matrix& W = model.inputs_unit();
  const Vector& ls = model.kernel().lengthscales;

  KernelMoments km;
  km.xi.resize(n);
  km.zeta.resize(n, n);
  km.psi.resize(n, p);

  for (int t = 0; t < n; ++t) {
    double prod = 1.0;
    for (int k = 0; k < p; ++k)
      prod *= kernel_factors::xi(in.mean[k], in.variance[k], ls[k], W(t, k));
    km.xi[t] = prod;
    for (int k = 0; k < p; ++k) {
      const double d2 = ls[k] * ls[k];
      km.psi(t, k) =
          prod * (in.mean[k] * d2 + 2.0 * in.variance[k] * W(t, k)) / (d2 + 2.0 * in.variance[k]);
    }
  }
  for (int t = 0; t < n; ++t) {
    for (int s = t; s < n; ++s) {
      double prod = 1.0;
      for (int k = 0; k < p; ++k)
        prod *= kernel_factors::zeta(in.mean[k], in.variance[k], ls[k], W(t, k), W(s, k));
      km.zeta(t, s) = prod;
      km.zeta(s, t) = prod;
    }
  }
  return km;
}

}  // namespace

KernelMoments kernel_moments(const GpModel& model, const std::vector<InputCoord>& input) {
  return moments_from_unit(model, to_unit_input(model, input));
}

LinkedGpMoments linked_gp_moments(const GpModel& model, const std::vector<InputCoord>& input) {
  const UnitInput in = to_unit_input(model, input);
  const KernelMoments km = moments_from_unit(model, in);
  const int n = model.n();
  const int p = model.p();
  const int m = model.m();
  const Vector& alpha = model.alpha();
  const Vector& beta = model.beta();

  // Trend expectations over the input distribution (unit-cube coordinates,
  // matching the fitted trend).
  Vector B(m);
  Matrix omega(m, m);
  Matrix lambda(m, n);
  B[0] = 1.0;
  omega(0, 0) = 1.0;
  lambda.row(0) = km.xi.transpose();
  if (model.trend() == TrendKind::Linear) {
    for (int k = 0; k < p; ++k) {
      B[1 + k] = in.mean[k];
      omega(0, 1 + k) = in.mean[k];
      omega(1 + k, 0) = in.mean[k];
      for (int j = 0; j < p; ++j)
        omega(1 + k, 1 + j) = in.mean[k] * in.mean[j] + (k == j ? in.variance[k] : 0.0);
      lambda.row(1 + k) = km.psi.col(k).transpose();
    }
  }

  LinkedGpMoments out;
  const double xi_alpha = km.xi.dot(alpha);
  out.mean = B.dot(beta) + xi_alpha;

  // Var of the posterior mean under the input distribution.
  const double var_mean = beta.dot((omega - B * B.transpose()) * beta) +
                          2.0 * beta.dot((lambda - B * km.xi.transpose()) * alpha) +
                          alpha.dot(km.zeta * alpha) - xi_alpha * xi_alpha;

  // Expectation of the posterior variance.
  const Matrix& K = model.rinv_trend();  // R^{-1} H
  const double tr_corr = model.corr_llt().solve(km.zeta).trace();
  const Matrix lk = lambda * K;
  const Matrix euu = omega - lk - lk.transpose() + K.transpose() * km.zeta * K;
  const double tr_trend = model.trend_gram_llt().solve(euu).trace();
  const double exp_var = model.sigma2() * (1.0 - tr_corr + tr_trend);

  double var = var_mean + exp_var;
  const double tol = 1e-10 * std::max(1.0, model.sigma2() + out.mean * out.mean);
  if (var < -tol) throw NumericalError("linked variance assembled negative beyond tolerance");
  out.clamped = var < 0.0;
  out.variance = std::max(var, 0.0);
  return out;
}

LinkedNetwork::LinkedNetwork(std::vector<MvEmulator> nodes,
                             std::vector<std::vector<WireSource>> wiring, int exogenous_dim)
    : nodes_(std::move(nodes)), wiring_(std::move(wiring)), exogenous_dim_(exogenous_dim) {
  if (nodes_.empty()) throw ConfigError("linked network: no nodes");
  if (wiring_.size() != nodes_.size()) throw ConfigError("linked network: wiring size mismatch");
  if (exogenous_dim_ < 0) throw ConfigError("linked network: negative exogenous dimension");

  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    nodes_[i].validate();
    if (wiring_[i].size() != nodes_[i].domain().size())
      throw ConfigError("linked network: node " + std::to_string(i) +
                        " wiring does not cover every input dimension exactly once");
    std::set<int> upstream;
    for (const auto& wire : wiring_[i]) {
      if (wire.kind == WireSource::Kind::Exogenous) {
        if (wire.index < 0 || wire.index >= exogenous_dim_)
          throw ConfigError("linked network: exogenous index out of range");
      } else {
        if (wire.node < 0 || wire.node >= static_cast<int>(i))
          throw ConfigError("linked network: wiring must be feed-forward (upstream node only)");
        if (wire.index < 0 || wire.index >= nodes_[wire.node].q())
          throw ConfigError("linked network: coefficient index out of range");
        upstream.insert(wire.node);
      }
    }
    // Coefficient channels must have been produced by projecting through the
    // upstream node's own basis; the fingerprint recorded at training time
    // is the evidence.
    for (int j : upstream) {
      const std::string fp = basis_fingerprint(nodes_[j].basis);
      if (nodes_[i].input_provenance.find(fp) == std::string::npos)
        throw ConfigError("linked network: node " + std::to_string(i) +
                          " coefficient channels were not generated by node " +
                          std::to_string(j) + "'s basis (provenance mismatch)");
    }
  }
}

LinkedNetwork make_two_layer_network(MvEmulator layer1, MvEmulator layer2, int extra_exogenous) {
  const int p1 = static_cast<int>(layer1.domain().size());
  const int q1 = layer1.q();
  const int p2 = static_cast<int>(layer2.domain().size());
  if (p2 != q1 + extra_exogenous)
    throw ConfigError("make_two_layer_network: layer-2 input dimension must equal q1 + exogenous");

  std::vector<std::vector<WireSource>> wiring(2);
  wiring[0].reserve(p1);
  for (int d = 0; d < p1; ++d) wiring[0].push_back(WireSource::exogenous(d));
  wiring[1].reserve(p2);
  for (int k = 0; k < q1; ++k) wiring[1].push_back(WireSource::coefficient(0, k));
  for (int e = 0; e < extra_exogenous; ++e) wiring[1].push_back(WireSource::exogenous(p1 + e));

  std::vector<MvEmulator> nodes;
  nodes.push_back(std::move(layer1));
  nodes.push_back(std::move(layer2));
  return LinkedNetwork(std::move(nodes), std::move(wiring), p1 + extra_exogenous);
}

namespace {

std::vector<InputCoord> node_inputs(const LinkedNetwork& net, int node, const Vector& exo,
                                    const std::vector<GaussianVector>& coeffs) {
  const auto& wires = net.wiring()[node];
  std::vector<InputCoord> input;
  input.reserve(wires.size());
  for (const auto& wire : wires) {
    if (wire.kind == WireSource::Kind::Exogenous)
      input.push_back(InputCoord::deterministic(exo[wire.index]));
    else
      input.push_back(InputCoord::gaussian(coeffs[wire.node].means[wire.index],
                                           coeffs[wire.node].variances[wire.index]));
  }
  return input;
}

}  // namespace

LinkedResult propagate(const LinkedNetwork& net, const Vector& z) {
  if (static_cast<int>(z.size()) != net.exogenous_dim())
    throw ConfigError("propagate: exogenous input size mismatch");
  const auto& nodes = net.nodes();
  LinkedResult out;
  out.node_coeff.resize(nodes.size());

  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const auto input = node_inputs(net, static_cast<int>(i), z, out.node_coeff);
    const bool stochastic = std::any_of(input.begin(), input.end(),
                                        [](const InputCoord& c) { return c.stochastic; });
    GaussianVector& coeff = out.node_coeff[i];
    coeff.means.resize(nodes[i].q());
    coeff.variances.resize(nodes[i].q());
    if (!stochastic) {
      Vector x(input.size());
      for (std::size_t d = 0; d < input.size(); ++d) x[d] = input[d].mean;
      for (int k = 0; k < nodes[i].q(); ++k) {
        const Prediction p = nodes[i].coeff_models[k].predict(x);
        coeff.means[k] = p.mean;
        coeff.variances[k] = p.variance;
      }
    } else {
      for (int k = 0; k < nodes[i].q(); ++k) {
        const LinkedGpMoments m = linked_gp_moments(nodes[i].coeff_models[k], input);
        coeff.means[k] = m.mean;
        coeff.variances[k] = m.variance;
      }
    }
  }

  const Moments moments = reconstruct_moments(nodes.back().basis, out.node_coeff.back());
  out.mean = moments.mean;
  out.variance = moments.variance;
  return out;
}

LinkedResult linked_predict(const LinkedNetwork& net, const Vector& x1, const Vector& z) {
  const int p1 = static_cast<int>(net.layer1().domain().size());
  if (static_cast<int>(x1.size()) != p1) throw ConfigError("linked_predict: x1 size mismatch");
  if (static_cast<int>(x1.size() + z.size()) != net.exogenous_dim())
    throw ConfigError("linked_predict: exogenous size mismatch");
  Vector exo(net.exogenous_dim());
  exo.head(x1.size()) = x1;
  exo.tail(z.size()) = z;
  return propagate(net, exo);
}

MvPrediction composed_predict(const LinkedNetwork& net, const Vector& x1, const Vector& z) {
  const MvPrediction first = predict_mv(net.layer1(), x1);
  Vector exo(net.exogenous_dim());
  exo.head(x1.size()) = x1;
  exo.tail(z.size()) = z;

  const int last = static_cast<int>(net.nodes().size()) - 1;
  const auto& wires = net.wiring()[last];
  Vector x2(wires.size());
  for (std::size_t d = 0; d < wires.size(); ++d)
    x2[d] = wires[d].kind == WireSource::Kind::Exogenous ? exo[wires[d].index]
                                                         : first.coeff.means[wires[d].index];
  return predict_mv(net.layer2(), x2);
}

namespace {

constexpr int kMcBlock = 4096;

struct McAccum {
  Vector sum;
  Vector sumsq;
};

// One block of samples with its own derived seed. Deviations are accumulated
// around the terminal basis mean to avoid cancellation in the variance.
void mc_block(const LinkedNetwork& net, const Vector& exo, int count, std::uint64_t block_seed,
              McAccum& acc) {
  Rng rng(block_seed);
  const auto& nodes = net.nodes();
  const int n_nodes = static_cast<int>(nodes.size());
  const PcBasis& terminal = nodes.back().basis;

  // Nodes whose inputs are all exogenous see the same point every sample;
  // their predictive moments are cached.
  std::vector<bool> is_static(n_nodes);
  std::vector<std::vector<Prediction>> static_preds(n_nodes);
  for (int i = 0; i < n_nodes; ++i) {
    const auto& wires = net.wiring()[i];
    is_static[i] = std::all_of(wires.begin(), wires.end(), [](const WireSource& w) {
      return w.kind == WireSource::Kind::Exogenous;
    });
    if (is_static[i]) {
      Vector x(wires.size());
      for (std::size_t d = 0; d < wires.size(); ++d) x[d] = exo[wires[d].index];
      static_preds[i].resize(nodes[i].q());
      for (int k = 0; k < nodes[i].q(); ++k)
        static_preds[i][k] = nodes[i].coeff_models[k].predict(x);
    }
  }

  acc.sum = Vector::Zero(terminal.l());
  acc.sumsq = Vector::Zero(terminal.l());
  std::vector<Vector> sampled(n_nodes);

  for (int s = 0; s < count; ++s) {
    for (int i = 0; i < n_nodes; ++i) {
      sampled[i].resize(nodes[i].q());
      if (is_static[i]) {
        for (int k = 0; k < nodes[i].q(); ++k)
          sampled[i][k] =
              rng.normal(static_preds[i][k].mean, std::sqrt(static_preds[i][k].variance));
        continue;
      }
      const auto& wires = net.wiring()[i];
      Vector x(wires.size());
      for (std::size_t d = 0; d < wires.size(); ++d)
        x[d] = wires[d].kind == WireSource::Kind::Exogenous ? exo[wires[d].index]
                                                            : sampled[wires[d].node][wires[d].index];
      for (int k = 0; k < nodes[i].q(); ++k) {
        const Prediction p = nodes[i].coeff_models[k].predict(x);
        sampled[i][k] = rng.normal(p.mean, std::sqrt(p.variance));
      }
    }
    const Vector dev = terminal.scale() * (terminal.basis() * sampled[n_nodes - 1]);
    acc.sum += dev;
    acc.sumsq += dev.cwiseProduct(dev);
  }
}

McResult mc_run(const LinkedNetwork& net, const Vector& x1, const Vector& z, int n_samples,
                std::uint64_t seed, bool parallel) {
  if (n_samples < 100) throw ConfigError("mc_propagate: need at least 100 samples");
  const int p1 = static_cast<int>(net.layer1().domain().size());
  if (static_cast<int>(x1.size()) != p1) throw ConfigError("mc_propagate: x1 size mismatch");
  if (static_cast<int>(x1.size() + z.size()) != net.exogenous_dim())
    throw ConfigError("mc_propagate: exogenous size mismatch");
  Vector exo(net.exogenous_dim());
  exo.head(x1.size()) = x1;
  exo.tail(z.size()) = z;

  const int n_blocks = (n_samples + kMcBlock - 1) / kMcBlock;
  std::vector<McAccum> accs(n_blocks);
  auto run_block = [&](std::int64_t b) {
    const int count = std::min(kMcBlock, n_samples - static_cast<int>(b) * kMcBlock);
    mc_block(net, exo, count, derive_seed(seed, static_cast<std::uint64_t>(b)), accs[b]);
  };
  if (parallel)
    parallel_for(n_blocks, run_block);
  else
    serial_for(n_blocks, run_block);

  const PcBasis& terminal = net.nodes().back().basis;
  Vector sum = Vector::Zero(terminal.l());
  Vector sumsq = Vector::Zero(terminal.l());
  for (const auto& acc : accs) {  // fixed combination order: thread-count independent
    sum += acc.sum;
    sumsq += acc.sumsq;
  }

  McResult out;
  out.n_samples = n_samples;
  const double n = static_cast<double>(n_samples);
  const Vector dev_mean = sum / n;
  out.mean = terminal.mean() + dev_mean;
  const Vector var_emp =
      ((sumsq - n * dev_mean.cwiseProduct(dev_mean)) / (n - 1.0)).cwiseMax(0.0);
  // The analytic path adds the truncation residual deterministically, so the
  // sampled estimate carries the same term for a like-for-like comparison.
  out.variance = var_emp + terminal.residual_var();
  out.se_mean = (var_emp / n).cwiseSqrt();
  return out;
}

}  // namespace

McResult mc_propagate(const LinkedNetwork& net, const Vector& x1, const Vector& z, int n_samples,
                      std::uint64_t seed) {
  return mc_run(net, x1, z, n_samples, seed, true);
}

McResult mc_propagate_serial(const LinkedNetwork& net, const Vector& x1, const Vector& z,
                             int n_samples, std::uint64_t seed) {
  return mc_run(net, x1, z, n_samples, seed, false);
}

}  // namespace emunet
