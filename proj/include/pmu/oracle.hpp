#pragma once

// Exact and greedy baselines used to certify solver output on small cases.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "pmu/feasibility.hpp"
#include "pmu/network.hpp"
#include "pmu/observability.hpp"

namespace pmu {

struct OracleResult {
  bool found = false;
  std::size_t cardinality = 0;
  Placement witness;  // lexicographically smallest optimum
  std::size_t optimum_count = 0;
  std::uint64_t subsets_examined = 0;
};

class BudgetExceeded : public std::runtime_error {
 public:
  BudgetExceeded(std::size_t cardinality, std::uint64_t examined)
      : std::runtime_error("oracle budget exceeded at cardinality " + std::to_string(cardinality) +
                           " after " + std::to_string(examined) + " subsets"),
        cardinality_(cardinality) {}
  std::size_t cardinality_reached() const { return cardinality_; }

 private:
  std::size_t cardinality_;
};

struct OracleOptions {
  std::size_t size_cap = static_cast<std::size_t>(-1);  // clamped to N
  std::uint64_t budget = 10'000'000;
};

/// Enumerates placements by ascending cardinality, lexicographic within a
/// cardinality, and stops after the first cardinality that has a feasible
/// member (all optima at that cardinality are counted). `found` is false if
/// nothing up to size_cap is feasible. Throws BudgetExceeded once more than
/// `budget` subsets would be examined.
inline OracleResult exhaustive_min(const Network& net, const Regime& regime,
                                   const OracleOptions& opts = {}) {
  const PlacementChecker checker(net, regime);
  const std::size_t n = net.bus_count();
  const std::size_t cap = std::min(opts.size_cap, n);
  OracleResult r;

  for (std::size_t k = 0; k <= cap; ++k) {
    std::vector<std::size_t> idx(k);
    for (std::size_t i = 0; i < k; ++i) idx[i] = i;
    while (true) {
      if (r.subsets_examined >= opts.budget) throw BudgetExceeded(k, r.subsets_examined);
      ++r.subsets_examined;
      Placement p(n, idx);
      if (checker.feasible(p)) {
        if (!r.found) {
          r.found = true;
          r.cardinality = k;
          r.witness = p;
        }
        ++r.optimum_count;
      }
      // next k-combination in lexicographic order
      std::size_t i = k;
      while (i > 0 && idx[i - 1] == n - k + i - 1) --i;
      if (i == 0) break;
      ++idx[i - 1];
      for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
    }
    if (r.found) return r;
  }
  return r;
}

/// Greedy cover from the empty placement, then prune.
inline Placement greedy_cover(const Network& net, const Regime& regime) {
  const PlacementChecker checker(net, regime);
  Placement p(net.bus_count());
  greedy_repair(checker, p);
  greedy_prune(checker, p);
  return p;
}

}  // namespace pmu
