#pragma once

// Topological observability of a PMU placement.
//
// A PMU at bus j observes every bus i with K(i,j) = 1. A zero-injection bus
// (ZIB) z adds one inference: when exactly one bus of its closed
// neighbourhood {z} + N(z) is unobserved, Kirchhoff's current law at z
// determines it. Propagation iterates that rule to the least fixed point.

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "pmu/network.hpp"

namespace pmu {

/// Set of buses carrying a PMU (the binary decision vector U).
class Placement {
 public:
  Placement() = default;
  explicit Placement(std::size_t bus_count) : bits_(bus_count) {}
  Placement(std::size_t bus_count, const std::vector<std::size_t>& buses) : bits_(bus_count) {
    for (auto b : buses) add(b);
  }

  /// From 1-based bus numbers as printed in reports and tables.
  static Placement from_one_based(std::size_t bus_count, const std::vector<long long>& buses) {
    Placement p(bus_count);
    for (auto b : buses) {
      if (b < 1 || static_cast<unsigned long long>(b) > bus_count)
        throw std::out_of_range("bus " + std::to_string(b) + " out of range 1.." +
                                std::to_string(bus_count));
      p.add(static_cast<std::size_t>(b - 1));
    }
    return p;
  }

  static Placement all(std::size_t bus_count) {
    Placement p(bus_count);
    p.bits_.set();
    return p;
  }

  std::size_t bus_count() const { return bits_.size(); }
  std::size_t size() const { return bits_.count(); }
  bool empty() const { return bits_.none(); }
  bool contains(std::size_t bus) const { return bits_.test(bus); }

  void add(std::size_t bus) {
    if (bus >= bits_.size()) throw std::out_of_range("bus index out of range");
    bits_.set(bus);
  }
  void remove(std::size_t bus) { bits_.reset(bus); }
  void flip(std::size_t bus) { bits_.flip(bus); }

  const BusSet& bits() const { return bits_; }

  std::vector<std::size_t> buses() const {
    std::vector<std::size_t> out;
    for (auto b = bits_.find_first(); b != BusSet::npos; b = bits_.find_next(b)) out.push_back(b);
    return out;
  }
  std::vector<std::size_t> one_based() const {
    auto out = buses();
    for (auto& b : out) ++b;
    return out;
  }

  double cost(const Network& net) const {
    double s = 0.0;
    for (auto b = bits_.find_first(); b != BusSet::npos; b = bits_.find_next(b)) s += net.cost()[b];
    return s;
  }

  friend bool operator==(const Placement&, const Placement&) = default;

 private:
  BusSet bits_;
};

enum class Contingency { Base, LineOutage, PmuLoss };

enum class PmuLossMode {
  RemovalSim,      // every single-PMU removal leaves the system observable
  CountThreshold,  // direct count + ZIB gain >= mob at every bus
};

/// Observability regime a placement is checked against.
struct Regime {
  Contingency kind = Contingency::Base;
  bool use_zib = false;
  PmuLossMode loss_mode = PmuLossMode::RemovalSim;
  int mob = 2;
};

struct ObservabilityReport {
  std::vector<int> direct_counts;
  std::vector<bool> observed;
  bool fully_observable = false;
  std::vector<std::size_t> zib_derived;
};

struct LineOutageResult {
  bool robust = false;
  bool intact_observable = false;
  std::vector<int> failing_lines;
};

struct PmuLossResult {
  bool robust = false;
  bool intact_observable = false;
  std::vector<std::size_t> failing;  // removed PMUs (removal-sim) or short buses (count-threshold)
};

namespace detail {

inline void require_dims(const Network& net, const ConnectivityMatrix& k) {
  if (k.size() != net.bus_count())
    throw std::invalid_argument("connectivity matrix is " + std::to_string(k.size()) +
                                "x" + std::to_string(k.size()) + " but network has " +
                                std::to_string(net.bus_count()) + " buses");
}

inline void direct_observed(const ConnectivityMatrix& k, const BusSet& pmus, BusSet& out) {
  out.reset();
  for (auto j = pmus.find_first(); j != BusSet::npos; j = pmus.find_next(j)) out |= k.row(j);
}

// In-place least fixed point of the ZIB inference rule. `scratch` must have
// the same size as `observed`.
inline void propagate_zib_inplace(const ConnectivityMatrix& k, const std::vector<std::size_t>& zibs,
                                  BusSet& observed, BusSet& scratch) {
  bool changed = true;
  while (changed) {
    changed = false;
    for (auto z : zibs) {
      scratch = k.row(z);
      scratch -= observed;
      auto missing = scratch.find_first();
      if (missing == BusSet::npos || scratch.find_next(missing) != BusSet::npos) continue;
      observed.set(missing);
      changed = true;
    }
  }
}

}  // namespace detail

/// Per-bus count of PMUs observing the bus directly (no ZIB effects).
inline std::vector<int> observe_base(const Network& net, const ConnectivityMatrix& k,
                                     const Placement& p) {
  detail::require_dims(net, k);
  if (p.bus_count() != net.bus_count())
    throw std::invalid_argument("placement size does not match network");
  std::vector<int> counts(net.bus_count(), 0);
  for (auto j : p.buses())
    for (auto i = k.row(j).find_first(); i != BusSet::npos; i = k.row(j).find_next(i)) ++counts[i];
  return counts;
}

inline BusSet propagate_zib(const Network& net, const ConnectivityMatrix& k,
                            const BusSet& directly_observed) {
  detail::require_dims(net, k);
  BusSet observed = directly_observed;
  BusSet scratch(net.bus_count());
  detail::propagate_zib_inplace(k, net.zib_list(), observed, scratch);
  return observed;
}

inline ObservabilityReport evaluate(const Network& net, const Placement& p, bool use_zib,
                                    const ConnectivityMatrix& k) {
  ObservabilityReport r;
  r.direct_counts = observe_base(net, k, p);
  BusSet direct(net.bus_count());
  for (std::size_t i = 0; i < direct.size(); ++i)
    if (r.direct_counts[i] > 0) direct.set(i);
  BusSet observed = use_zib ? propagate_zib(net, k, direct) : direct;
  r.observed.resize(net.bus_count());
  for (std::size_t i = 0; i < observed.size(); ++i) {
    r.observed[i] = observed.test(i);
    if (observed.test(i) && !direct.test(i)) r.zib_derived.push_back(i);
  }
  r.fully_observable = observed.all();
  return r;
}

inline ObservabilityReport evaluate(const Network& net, const Placement& p, bool use_zib) {
  return evaluate(net, p, use_zib, connectivity_matrix(net));
}

/// Robust iff the intact network and every single-branch outage stay fully
/// observable. Bridges are not exempt.
inline LineOutageResult check_line_outage_robust(const Network& net, const Placement& p,
                                                 bool use_zib) {
  LineOutageResult r;
  r.intact_observable = evaluate(net, p, use_zib).fully_observable;
  for (const auto& b : net.branches())
    if (!evaluate(net, p, use_zib, line_outage_matrix(net, b.line_id)).fully_observable)
      r.failing_lines.push_back(b.line_id);
  r.robust = r.intact_observable && r.failing_lines.empty();
  return r;
}

inline PmuLossResult check_pmu_loss_robust(const Network& net, const Placement& p, bool use_zib,
                                           PmuLossMode mode = PmuLossMode::RemovalSim,
                                           int mob = 2) {
  if (mob < 1) throw std::invalid_argument("mob must be at least 1");
  const auto k = connectivity_matrix(net);
  PmuLossResult r;
  const auto intact = evaluate(net, p, use_zib, k);
  r.intact_observable = intact.fully_observable;

  if (mode == PmuLossMode::RemovalSim) {
    for (auto g : p.buses()) {
      Placement reduced = p;
      reduced.remove(g);
      if (!evaluate(net, reduced, use_zib, k).fully_observable) r.failing.push_back(g);
    }
  } else {
    for (std::size_t i = 0; i < net.bus_count(); ++i) {
      const bool gained = intact.observed[i] && intact.direct_counts[i] == 0;
      if (intact.direct_counts[i] + (gained ? 1 : 0) < mob) r.failing.push_back(i);
    }
  }
  r.robust = r.intact_observable && r.failing.empty();
  return r;
}

/// Mean number of PMUs observing each bus.
inline double redundancy_index(const ObservabilityReport& report) {
  if (report.direct_counts.empty()) return 0.0;
  const double sum = std::accumulate(report.direct_counts.begin(), report.direct_counts.end(), 0.0);
  return sum / static_cast<double>(report.direct_counts.size());
}

}  // namespace pmu
