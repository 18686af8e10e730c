#pragma once

#include <cstdint>
#include <vector>

#include "emunet/domain.hpp"

namespace emunet {

struct LhcOptions {
  int max_sweeps = 20;      // swap hill-climb passes per restart
  bool jitter = false;      // sample within strata instead of midpoints
  bool parallel = true;     // run restarts across OpenMP threads
  // When set, receives the minimum pairwise distance (unit-cube scale) of
  // every candidate accepted during the search, in restart order. The
  // returned design's distance is >= every recorded value.
  std::vector<double>* candidate_distances = nullptr;
};

// Maximin Latin Hypercube: `restarts` random LHCs, each improved by greedy
// stratum-preserving coordinate swaps; the candidate with the largest minimum
// pairwise distance wins, ties broken by restart index so the result is
// independent of thread scheduling. Deterministic given seed.
DesignMatrix lhc_maximin(int n, const Domain& domain, int restarts, std::uint64_t seed,
                         const LhcOptions& options = {});

// n i.i.d. uniform points in the domain; deterministic given seed.
DesignMatrix random_test_design(int n, const Domain& domain, std::uint64_t seed);

// Minimum pairwise Euclidean distance between rows. The OpenMP kernel and the
// plain-loop reference must agree exactly; both are exercised by tests and
// the benchmark target.
double min_pairwise_distance(const Matrix& points);
double min_pairwise_distance_serial(const Matrix& points);

}  // namespace emunet
