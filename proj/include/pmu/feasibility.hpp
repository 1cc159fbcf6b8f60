#pragma once

// Fast regime-aware feasibility scoring shared by the metaheuristic and the
// oracle. Semantics match check_line_outage_robust / check_pmu_loss_robust;
// the difference is precomputed outage matrices, reusable bitset buffers and
// incremental re-scoring when a single PMU is added.

#include <compare>
#include <cstddef>
#include <vector>

#include "pmu/network.hpp"
#include "pmu/observability.hpp"

namespace pmu {

/// Lexicographic violation measure. `count` is what the fitness penalises:
/// unobserved buses on the intact network plus failing contingencies.
/// `deficit` (unobserved buses summed over failing contingencies) only
/// breaks ties during greedy repair.
struct Violation {
  std::size_t count = 0;
  std::size_t deficit = 0;

  bool feasible() const { return count == 0; }
  friend auto operator<=>(const Violation&, const Violation&) = default;
};

/// Violation plus the identities of the failing contingencies: branch
/// indices for line outages, removed PMU buses for removal-sim, short buses
/// for count-threshold.
struct Assessment {
  Violation violation;
  std::size_t intact_unobserved = 0;
  std::vector<std::size_t> failing;
};

class PlacementChecker {
 public:
  PlacementChecker(const Network& net, Regime regime)
      : net_(&net), regime_(regime), intact_(connectivity_matrix(net)), zibs_(net.zib_list()) {
    if (regime_.kind == Contingency::LineOutage) {
      outages_.reserve(net.branch_count());
      for (std::size_t l = 0; l < net.branch_count(); ++l)
        outages_.push_back(detail::build_matrix(net, l));
    }
    if (regime_.kind == Contingency::PmuLoss && regime_.loss_mode == PmuLossMode::CountThreshold &&
        regime_.mob < 1)
      throw std::invalid_argument("mob must be at least 1");
  }

  const Network& network() const { return *net_; }
  const Regime& regime() const { return regime_; }
  const ConnectivityMatrix& intact() const { return intact_; }

  Assessment assess(const Placement& p) const {
    Buffers buf(net_->bus_count());
    Assessment a;
    a.intact_unobserved = unobserved(intact_, p.bits(), buf);
    a.violation.count = a.intact_unobserved;
    switch (regime_.kind) {
      case Contingency::Base:
        break;
      case Contingency::LineOutage:
        for (std::size_t l = 0; l < outages_.size(); ++l)
          record(a, l, unobserved(outages_[l], p.bits(), buf));
        break;
      case Contingency::PmuLoss:
        if (regime_.loss_mode == PmuLossMode::RemovalSim) {
          BusSet reduced = p.bits();
          for (auto g : p.buses()) {
            reduced.reset(g);
            record(a, g, unobserved(intact_, reduced, buf));
            reduced.set(g);
          }
        } else {
          assess_threshold(p, a, buf);
        }
        break;
    }
    return a;
  }

  /// Violation of p + {bus}, given the assessment of p. Contingencies that
  /// p already survives are skipped: adding a PMU never shrinks an observed set.
  Violation violation_with(const Placement& p, const Assessment& a, std::size_t bus) const {
    if (regime_.kind == Contingency::PmuLoss && regime_.loss_mode == PmuLossMode::CountThreshold) {
      Placement q = p;
      q.add(bus);
      return assess(q).violation;
    }
    Buffers buf(net_->bus_count());
    BusSet pmus = p.bits();
    pmus.set(bus);
    Violation v;
    if (a.intact_unobserved > 0) v.count = unobserved(intact_, pmus, buf);
    auto add = [&v](std::size_t missing) {
      if (missing == 0) return;
      ++v.count;
      v.deficit += missing;
    };
    switch (regime_.kind) {
      case Contingency::Base:
        break;
      case Contingency::LineOutage:
        for (auto l : a.failing) add(unobserved(outages_[l], pmus, buf));
        break;
      case Contingency::PmuLoss:
        for (auto g : a.failing) {
          pmus.reset(g);
          add(unobserved(intact_, pmus, buf));
          pmus.set(g);
        }
        // losing the new PMU leaves exactly p
        add(a.intact_unobserved);
        break;
    }
    return v;
  }

  /// Early-exit feasibility test.
  bool feasible(const Placement& p) const {
    Buffers buf(net_->bus_count());
    if (unobserved(intact_, p.bits(), buf) != 0) return false;
    switch (regime_.kind) {
      case Contingency::Base:
        return true;
      case Contingency::LineOutage:
        for (const auto& k : outages_)
          if (unobserved(k, p.bits(), buf) != 0) return false;
        return true;
      case Contingency::PmuLoss:
        if (regime_.loss_mode == PmuLossMode::CountThreshold) return assess(p).violation.feasible();
        {
          BusSet reduced = p.bits();
          for (auto g = p.bits().find_first(); g != BusSet::npos; g = p.bits().find_next(g)) {
            reduced.reset(g);
            const bool ok = unobserved(intact_, reduced, buf) == 0;
            reduced.set(g);
            if (!ok) return false;
          }
        }
        return true;
    }
    return false;
  }

 private:
  struct Buffers {
    explicit Buffers(std::size_t n) : observed(n), scratch(n) {}
    BusSet observed;
    BusSet scratch;
  };

  std::size_t unobserved(const ConnectivityMatrix& k, const BusSet& pmus, Buffers& buf) const {
    detail::direct_observed(k, pmus, buf.observed);
    if (regime_.use_zib) detail::propagate_zib_inplace(k, zibs_, buf.observed, buf.scratch);
    return buf.observed.size() - buf.observed.count();
  }

  static void record(Assessment& a, std::size_t id, std::size_t missing) {
    if (missing == 0) return;
    a.failing.push_back(id);
    ++a.violation.count;
    a.violation.deficit += missing;
  }

  void assess_threshold(const Placement& p, Assessment& a, Buffers& buf) const {
    const std::size_t n = net_->bus_count();
    std::vector<int> counts(n, 0);
    for (auto j = p.bits().find_first(); j != BusSet::npos; j = p.bits().find_next(j)) {
      const auto& row = intact_.row(j);
      for (auto i = row.find_first(); i != BusSet::npos; i = row.find_next(i)) ++counts[i];
    }
    detail::direct_observed(intact_, p.bits(), buf.observed);
    BusSet direct = buf.observed;
    if (regime_.use_zib) detail::propagate_zib_inplace(intact_, zibs_, buf.observed, buf.scratch);
    for (std::size_t i = 0; i < n; ++i) {
      const int gain = (buf.observed.test(i) && !direct.test(i)) ? 1 : 0;
      if (counts[i] + gain < regime_.mob)
        record(a, i, static_cast<std::size_t>(regime_.mob - counts[i] - gain));
    }
  }

  const Network* net_;
  Regime regime_;
  ConnectivityMatrix intact_;
  std::vector<std::size_t> zibs_;
  std::vector<ConnectivityMatrix> outages_;
};

/// Greedy repair: while infeasible, add the bus giving the smallest
/// violation (count, then deficit, then lowest index). Returns the number of
/// full assessments performed.
inline std::size_t greedy_repair(const PlacementChecker& checker, Placement& p) {
  std::size_t evaluations = 1;
  Assessment a = checker.assess(p);
  while (!a.violation.feasible() && p.size() < p.bus_count()) {
    std::size_t best_bus = p.bus_count();
    Violation best;
    for (std::size_t c = 0; c < p.bus_count(); ++c) {
      if (p.contains(c)) continue;
      Violation v = checker.violation_with(p, a, c);
      if (best_bus == p.bus_count() || v < best) {
        best = v;
        best_bus = c;
      }
    }
    p.add(best_bus);
    a = checker.assess(p);
    ++evaluations;
  }
  return evaluations;
}

/// Greedy prune: drop each PMU, in ascending bus order, whose removal keeps
/// p feasible. One ascending pass reaches the fixed point because removals
/// only shrink observed sets. No-op on infeasible input.
inline std::size_t greedy_prune(const PlacementChecker& checker, Placement& p) {
  std::size_t evaluations = 1;
  if (!checker.feasible(p)) return evaluations;
  for (auto bus : p.buses()) {
    p.remove(bus);
    ++evaluations;
    if (!checker.feasible(p)) p.add(bus);
  }
  return evaluations;
}

}  // namespace pmu
