#pragma once

// Shared fixtures: bundled case loading, random small networks, and a naive
// observability reference that works on plain integer matrices.

#include <algorithm>
#include <cstddef>
#include <random>
#include <string>
#include <vector>

#include "pmu/pmu.hpp"

namespace pmu::test {

inline std::string data_path(const std::string& file) { return std::string(PMU_DATA_DIR) + "/" + file; }

inline Network ieee(int buses, bool detect_zib = true) {
  return load_case(data_path("case" + std::to_string(buses) + ".m"),
                   {CaseFormat::Matpower, detect_zib});
}

inline Placement one_based(const Network& net, std::vector<long long> buses) {
  return Placement::from_one_based(net.bus_count(), buses);
}

inline Network chain3(std::vector<std::size_t> zib = {}) {
  return Network(3, {{1, 0, 1}, {2, 1, 2}}, std::move(zib));
}

/// Random network with 1..max_buses buses, occasional parallel branches and
/// isolated buses, and a random ZIB subset.
inline Network random_network(std::mt19937_64& rng, std::size_t max_buses = 8,
                              double edge_prob = 0.35, double zib_prob = 0.3) {
  std::uniform_int_distribution<std::size_t> size(1, max_buses);
  std::bernoulli_distribution edge(edge_prob), parallel(0.1), zib(zib_prob);
  const std::size_t n = size(rng);
  std::vector<Branch> branches;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (edge(rng)) {
        branches.push_back({static_cast<int>(branches.size() + 1), i, j});
        if (parallel(rng)) branches.push_back({static_cast<int>(branches.size() + 1), j, i});
      }
  std::shuffle(branches.begin(), branches.end(), rng);
  for (std::size_t k = 0; k < branches.size(); ++k) branches[k].line_id = static_cast<int>(k + 1);
  std::vector<std::size_t> zibs;
  for (std::size_t i = 0; i < n; ++i)
    if (zib(rng)) zibs.push_back(i);
  return Network(n, std::move(branches), std::move(zibs));
}

inline Placement random_placement(std::mt19937_64& rng, std::size_t n, double density = 0.4) {
  std::bernoulli_distribution pick(density);
  Placement p(n);
  for (std::size_t i = 0; i < n; ++i)
    if (pick(rng)) p.add(i);
  return p;
}

// ---- naive reference -------------------------------------------------------

using IntMatrix = std::vector<std::vector<int>>;

/// K from the branch list, skipping branch position `skip` (or none).
inline IntMatrix naive_matrix(const Network& net, long skip = -1) {
  const std::size_t n = net.bus_count();
  IntMatrix k(n, std::vector<int>(n, 0));
  for (std::size_t i = 0; i < n; ++i) k[i][i] = 1;
  for (long idx = 0; idx < static_cast<long>(net.branch_count()); ++idx) {
    if (idx == skip) continue;
    const auto& b = net.branches()[idx];
    k[b.from][b.to] = k[b.to][b.from] = 1;
  }
  return k;
}

/// OBSV_i = sum_j U_j * K_ij.
inline std::vector<int> naive_counts(const IntMatrix& k, const std::vector<int>& u) {
  std::vector<int> obsv(k.size(), 0);
  for (std::size_t i = 0; i < k.size(); ++i)
    for (std::size_t j = 0; j < k.size(); ++j) obsv[i] += u[j] * k[i][j];
  return obsv;
}

inline std::vector<int> indicator(const Placement& p) {
  std::vector<int> u(p.bus_count(), 0);
  for (auto b : p.buses()) u[b] = 1;
  return u;
}

/// Applies R1 (ZIB and all neighbours but one observed: infer the one) and
/// R2 (all neighbours observed, ZIB not: infer the ZIB) by exhaustive scans
/// until nothing changes.
inline std::vector<bool> naive_observed(const Network& net, const IntMatrix& k,
                                        const std::vector<int>& u, bool use_zib) {
  const std::size_t n = k.size();
  auto counts = naive_counts(k, u);
  std::vector<bool> obs(n);
  for (std::size_t i = 0; i < n; ++i) obs[i] = counts[i] >= 1;
  if (!use_zib) return obs;
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t z = 0; z < n; ++z) {
      if (!net.is_zib(z)) continue;
      std::vector<std::size_t> unknown_nbrs;
      for (std::size_t j = 0; j < n; ++j)
        if (j != z && k[z][j] && !obs[j]) unknown_nbrs.push_back(j);
      if (obs[z] && unknown_nbrs.size() == 1) {
        obs[unknown_nbrs[0]] = true;
        changed = true;
      } else if (!obs[z] && unknown_nbrs.empty()) {
        obs[z] = true;
        changed = true;
      }
    }
  }
  return obs;
}

inline bool all_true(const std::vector<bool>& v) {
  for (bool b : v)
    if (!b) return false;
  return true;
}

inline bool naive_full(const Network& net, const IntMatrix& k, const Placement& p, bool use_zib) {
  return all_true(naive_observed(net, k, indicator(p), use_zib));
}

}  // namespace pmu::test
