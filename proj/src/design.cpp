#include "emunet/design.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "emunet/errors.hpp"
#include "emunet/parallel.hpp"
#include "emunet/rng.hpp"

namespace emunet {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Matrix random_unit_lhc(int n, int p, Rng& rng, bool jitter) {
  Matrix pts(n, p);
  std::vector<int> perm(n);
  for (int j = 0; j < p; ++j) {
    std::iota(perm.begin(), perm.end(), 0);
    rng.shuffle(perm.begin(), perm.end());
    for (int i = 0; i < n; ++i) {
      const double offset = jitter ? rng.uniform() : 0.5;
      pts(i, j) = (static_cast<double>(perm[i]) + offset) / n;
    }
  }
  return pts;
}

Matrix squared_distances(const Matrix& pts) {
  const int n = static_cast<int>(pts.rows());
  Matrix d2 = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int k = i + 1; k < n; ++k) {
      const double d = (pts.row(i) - pts.row(k)).squaredNorm();
      d2(i, k) = d;
      d2(k, i) = d;
    }
  return d2;
}

double min_off_diagonal(const Matrix& d2) {
  const int n = static_cast<int>(d2.rows());
  double best = kInf;
  for (int i = 0; i < n; ++i)
    for (int k = i + 1; k < n; ++k) best = std::min(best, d2(i, k));
  return best;
}

// Greedy stratum-preserving coordinate swaps: exchanging one column's values
// between two rows keeps each column a permutation of its strata. Accepts a
// swap only when the global minimum pairwise distance strictly increases, so
// the candidate sequence is monotone by construction.
double swap_hill_climb(Matrix& pts, int max_sweeps, std::vector<double>* trace) {
  const int n = static_cast<int>(pts.rows());
  const int p = static_cast<int>(pts.cols());
  if (n < 2) {
    if (trace) trace->push_back(kInf);
    return kInf;
  }
  double best = kInf;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    // Rebuild distances each sweep so incremental updates cannot drift.
    Matrix d2 = squared_distances(pts);
    best = min_off_diagonal(d2);
    if (sweep == 0 && trace) trace->push_back(std::sqrt(best));
    bool improved = false;
    for (int a = 0; a < n - 1; ++a) {
      for (int b = a + 1; b < n; ++b) {
        // Pairs not touching rows a or b are unaffected by any swap between
        // them, as is the (a,b) pair itself when one shared column flips.
        double base = d2(a, b);
        for (int i = 0; i < n - 1; ++i) {
          if (i == a || i == b) continue;
          for (int k = i + 1; k < n; ++k) {
            if (k == a || k == b) continue;
            base = std::min(base, d2(i, k));
          }
        }
        for (int j = 0; j < p; ++j) {
          const double va = pts(a, j);
          const double vb = pts(b, j);
          if (va == vb) continue;
          double cand = base;
          for (int k = 0; k < n && cand > best; ++k) {
            if (k == a || k == b) continue;
            const double xk = pts(k, j);
            const double da = (vb - xk) * (vb - xk) - (va - xk) * (va - xk);
            cand = std::min(cand, std::min(d2(a, k) + da, d2(b, k) - da));
          }
          if (cand > best) {
            pts(a, j) = vb;
            pts(b, j) = va;
            for (int k = 0; k < n; ++k) {
              if (k == a || k == b) continue;
              const double xk = pts(k, j);
              const double da = (vb - xk) * (vb - xk) - (va - xk) * (va - xk);
              d2(a, k) += da;
              d2(k, a) = d2(a, k);
              d2(b, k) -= da;
              d2(k, b) = d2(b, k);
            }
            best = cand;
            if (trace) trace->push_back(std::sqrt(best));
            improved = true;
          }
        }
      }
    }
    if (!improved) break;
  }
  return std::sqrt(min_off_diagonal(squared_distances(pts)));
}

}  // namespace

DesignMatrix lhc_maximin(int n, const Domain& domain, int restarts, std::uint64_t seed,
                         const LhcOptions& options) {
  if (domain.empty()) throw DomainError("lhc_maximin: empty domain");
  if (n < 1) throw ConfigError("lhc_maximin: n must be >= 1");
  if (restarts < 1) throw ConfigError("lhc_maximin: restarts must be >= 1");
  const int p = static_cast<int>(domain.size());

  std::vector<Matrix> candidates(restarts);
  std::vector<double> distances(restarts, -kInf);
  std::vector<std::vector<double>> traces(restarts);

  auto run_restart = [&](std::int64_t r) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(r)));
    Matrix pts = random_unit_lhc(n, p, rng, options.jitter);
    auto* trace = options.candidate_distances ? &traces[r] : nullptr;
    distances[r] = swap_hill_climb(pts, options.max_sweeps, trace);
    candidates[r] = std::move(pts);
  };
  if (options.parallel)
    parallel_for(restarts, run_restart);
  else
    serial_for(restarts, run_restart);

  // Lexicographic (distance, restart index) selection keeps the winner
  // independent of execution order.
  int winner = 0;
  for (int r = 1; r < restarts; ++r)
    if (distances[r] > distances[winner]) winner = r;

  if (options.candidate_distances)
    for (const auto& t : traces)
      options.candidate_distances->insert(options.candidate_distances->end(), t.begin(), t.end());

  DesignMatrix design{domain.from_unit_cube_rows(candidates[winner]), domain};
  return design;
}

DesignMatrix random_test_design(int n, const Domain& domain, std::uint64_t seed) {
  if (domain.empty()) throw DomainError("random_test_design: empty domain");
  if (n < 1) throw ConfigError("random_test_design: n must be >= 1");
  const int p = static_cast<int>(domain.size());
  Rng rng(seed);
  Matrix pts(n, p);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < p; ++j) pts(i, j) = rng.uniform(domain.dim(j).lower, domain.dim(j).upper);
  return DesignMatrix{std::move(pts), domain};
}

double min_pairwise_distance(const Matrix& points) {
  const int n = static_cast<int>(points.rows());
  if (n < 2) return kInf;
  double best = kInf;
#if defined(_OPENMP)
#pragma omp parallel for schedule(static) reduction(min : best)
#endif
  for (int i = 0; i < n - 1; ++i) {
    double local = kInf;
    for (int k = i + 1; k < n; ++k)
      local = std::min(local, (points.row(i) - points.row(k)).squaredNorm());
    best = std::min(best, local);
  }
  return std::sqrt(best);
}

double min_pairwise_distance_serial(const Matrix& points) {
  const int n = static_cast<int>(points.rows());
  if (n < 2) return kInf;
  double best = kInf;
  for (int i = 0; i < n - 1; ++i) {
    double local = kInf;
    for (int k = i + 1; k < n; ++k)
      local = std::min(local, (points.row(i) - points.row(k)).squaredNorm());
    best = std::min(best, local);
  }
  return std::sqrt(best);
}

}  // namespace emunet
