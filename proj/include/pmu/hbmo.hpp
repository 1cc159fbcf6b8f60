#pragma once

// Honey bee mating optimisation for minimum-cost PMU placement.
//
// One generation: the queen (best placement so far) makes a mating flight
// over the drone population, accepting drones annealing-style into her
// spermatheca; broods are bred by uniform crossover with the stored sperm;
// workers improve each brood (mutation, greedy repair, greedy prune); the
// best brood replaces the queen when it is strictly fitter. Broods then
// join the next drone population, topped up with fresh random drones.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <thread>
#include <vector>

#include "pmu/feasibility.hpp"
#include "pmu/network.hpp"
#include "pmu/observability.hpp"

namespace pmu {

struct HbmoParams {
  std::size_t n_drones = 50;
  std::size_t spermatheca_capacity = 10;
  std::size_t n_broods = 20;
  double speed_init = 10.0;
  double speed_decay = 0.98;
  double speed_min = 0.1;
  std::size_t max_iterations = 200;
  double mutation_rate = 0.05;
  // Unset: resolved per network by default_penalty_weight().
  std::optional<double> penalty_weight;
  std::uint64_t seed = 0;
  // Stop after this many generations without improvement; 0 disables.
  std::size_t stagnation_window = 0;

  friend bool operator==(const HbmoParams&, const HbmoParams&) = default;
};

/// 1000 x the largest bus cost, raised if needed so that it exceeds the
/// cost of placing a PMU on every bus.
inline double default_penalty_weight(const Network& net) {
  return std::max(1000.0 * net.max_cost(), 2.0 * net.total_cost() + 1.0);
}

inline double resolved_penalty(const HbmoParams& params, const Network& net) {
  return params.penalty_weight ? *params.penalty_weight : default_penalty_weight(net);
}

/// Throws std::invalid_argument naming the first violated bound.
inline void validate(const HbmoParams& p, const Network& net) {
  auto fail = [](const char* what) { throw std::invalid_argument(what); };
  if (p.n_drones == 0) fail("n_drones must be positive");
  if (p.spermatheca_capacity == 0 || p.spermatheca_capacity > p.n_drones)
    fail("spermatheca_capacity must be in 1..n_drones");
  if (p.n_broods == 0) fail("n_broods must be positive");
  if (!(p.speed_init > 0.0)) fail("speed_init must be positive");
  if (!(p.speed_decay > 0.0 && p.speed_decay < 1.0)) fail("speed_decay must be in (0,1)");
  if (!(p.speed_min > 0.0)) fail("speed_min must be positive");
  if (p.max_iterations == 0) fail("max_iterations must be positive");
  if (!(p.mutation_rate >= 0.0 && p.mutation_rate <= 1.0)) fail("mutation_rate must be in [0,1]");
  if (!(resolved_penalty(p, net) > net.total_cost()))
    fail("penalty_weight must exceed the total cost of all buses");
}

struct SolveResult {
  Placement best;
  double best_fitness = 0.0;
  bool feasible = false;
  std::vector<double> history;  // queen fitness after each generation
  std::size_t evaluations = 0;
  double wall_time_ms = 0.0;
};

using Rng = std::mt19937_64;

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

enum StreamTag : std::uint64_t { kInit = 1, kFlight = 2, kDrones = 3, kBrood = 4 };

}  // namespace detail

/// Independent deterministic stream for (seed, iteration, slot). Each brood
/// owns one, so serial and threaded runs draw identical numbers.
inline Rng stream(std::uint64_t seed, std::uint64_t iteration, std::uint64_t tag,
                  std::uint64_t slot = 0) {
  std::uint64_t h = detail::splitmix64(seed);
  h = detail::splitmix64(h ^ iteration);
  h = detail::splitmix64(h ^ tag);
  h = detail::splitmix64(h ^ slot);
  return Rng(h);
}

inline double fitness(const PlacementChecker& checker, const Placement& p, double penalty) {
  return p.cost(checker.network()) +
         penalty * static_cast<double>(checker.assess(p).violation.count);
}

inline double fitness(const Network& net, const Placement& p, const Regime& regime,
                      const HbmoParams& params) {
  return fitness(PlacementChecker(net, regime), p, resolved_penalty(params, net));
}

/// n_drones placements, each bus included with probability 1/2.
inline std::vector<Placement> initialize_population(std::size_t bus_count, std::size_t count,
                                                    Rng& rng) {
  std::bernoulli_distribution coin(0.5);
  std::vector<Placement> drones;
  drones.reserve(count);
  for (std::size_t d = 0; d < count; ++d) {
    Placement p(bus_count);
    for (std::size_t b = 0; b < bus_count; ++b)
      if (coin(rng)) p.add(b);
    drones.push_back(std::move(p));
  }
  return drones;
}

inline std::vector<Placement> initialize_population(std::size_t bus_count,
                                                    const HbmoParams& params) {
  Rng rng = stream(params.seed, 0, detail::kInit);
  return initialize_population(bus_count, params.n_drones, rng);
}

inline double acceptance_probability(double fitness_gap, double speed) {
  return std::exp(-std::abs(fitness_gap) / speed);
}

/// Probes drones in random order; drone d joins the spermatheca with
/// probability exp(-|f(d) - f(queen)| / speed). Speed decays after every
/// probe; the flight ends when speed drops to speed_min, the spermatheca is
/// full, or every drone was probed. Returns accepted drone indices.
inline std::vector<std::size_t> mating_flight(double queen_fitness,
                                              std::span<const double> drone_fitness,
                                              const HbmoParams& params, Rng& rng) {
  std::vector<std::size_t> order(drone_fitness.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::shuffle(order.begin(), order.end(), rng);

  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<std::size_t> accepted;
  double speed = params.speed_init;
  for (auto d : order) {
    if (speed <= params.speed_min || accepted.size() >= params.spermatheca_capacity) break;
    const double prob = acceptance_probability(drone_fitness[d] - queen_fitness, speed);
    if (unit(rng) < prob) accepted.push_back(d);
    speed *= params.speed_decay;
  }
  return accepted;
}

/// Uniform crossover.
inline Placement breed(const Placement& queen, const Placement& sperm, Rng& rng) {
  if (queen.bus_count() != sperm.bus_count())
    throw std::invalid_argument("parents belong to different networks");
  std::bernoulli_distribution coin(0.5);
  Placement child(queen.bus_count());
  for (std::size_t b = 0; b < queen.bus_count(); ++b) {
    const bool from_queen = coin(rng);
    if (from_queen ? queen.contains(b) : sperm.contains(b)) child.add(b);
  }
  return child;
}

struct WorkerOutcome {
  Placement placement;
  std::size_t evaluations = 0;
};

/// Mutation, then greedy repair, then greedy prune.
inline WorkerOutcome worker_improve(const PlacementChecker& checker, Placement child,
                                    double mutation_rate, Rng& rng) {
  if (mutation_rate > 0.0) {
    std::bernoulli_distribution flip(mutation_rate);
    for (std::size_t b = 0; b < child.bus_count(); ++b)
      if (flip(rng)) child.flip(b);
  }
  std::size_t evals = greedy_repair(checker, child);
  evals += greedy_prune(checker, child);
  return {std::move(child), evals};
}

struct SolveOptions {
  // Worker threads for brood evaluation; results do not depend on it.
  std::size_t threads = 1;
};

inline SolveResult solve(const Network& net, const Regime& regime, const HbmoParams& params,
                         const SolveOptions& options = {}) {
  validate(params, net);
  const auto started = std::chrono::steady_clock::now();
  const double penalty = resolved_penalty(params, net);
  const PlacementChecker checker(net, regime);
  const std::size_t n = net.bus_count();

  SolveResult result;
  std::vector<Placement> drones = initialize_population(n, params);
  std::vector<double> drone_fit;
  drone_fit.reserve(drones.size());
  for (const auto& d : drones) drone_fit.push_back(fitness(checker, d, penalty));
  result.evaluations += drones.size();

  std::size_t q = static_cast<std::size_t>(
      std::min_element(drone_fit.begin(), drone_fit.end()) - drone_fit.begin());
  Placement queen = drones[q];
  double queen_fit = drone_fit[q];

  struct Brood {
    Placement placement;
    double fitness = 0.0;
    std::size_t evaluations = 0;
  };
  std::vector<Brood> broods(params.n_broods);

  std::size_t stagnant = 0;
  for (std::size_t it = 1; it <= params.max_iterations; ++it) {
    Rng flight_rng = stream(params.seed, it, detail::kFlight);
    const auto spermatheca = mating_flight(queen_fit, drone_fit, params, flight_rng);

    auto make_brood = [&](std::size_t c) {
      Rng rng = stream(params.seed, it, detail::kBrood, c);
      const Placement* sperm = &queen;
      if (!spermatheca.empty()) {
        std::uniform_int_distribution<std::size_t> pick(0, spermatheca.size() - 1);
        sperm = &drones[spermatheca[pick(rng)]];
      }
      auto outcome = worker_improve(checker, breed(queen, *sperm, rng), params.mutation_rate, rng);
      broods[c].fitness = fitness(checker, outcome.placement, penalty);
      broods[c].evaluations = outcome.evaluations + 1;
      broods[c].placement = std::move(outcome.placement);
    };

    const std::size_t workers = std::min(std::max<std::size_t>(options.threads, 1), broods.size());
    if (workers == 1) {
      for (std::size_t c = 0; c < broods.size(); ++c) make_brood(c);
    } else {
      std::vector<std::jthread> pool;
      for (std::size_t w = 0; w < workers; ++w)
        pool.emplace_back([&, w] {
          for (std::size_t c = w; c < broods.size(); c += workers) make_brood(c);
        });
    }

    std::size_t best = 0;
    for (std::size_t c = 0; c < broods.size(); ++c) {
      result.evaluations += broods[c].evaluations;
      if (broods[c].fitness < broods[best].fitness) best = c;
    }
    if (broods[best].fitness < queen_fit) {
      queen = broods[best].placement;
      queen_fit = broods[best].fitness;
      stagnant = 0;
    } else {
      ++stagnant;
    }
    result.history.push_back(queen_fit);

    // Next drone population: fittest broods first, then fresh random drones.
    std::vector<std::size_t> order(broods.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return broods[a].fitness < broods[b].fitness;
    });
    const std::size_t kept = std::min(order.size(), params.n_drones);
    Rng drone_rng = stream(params.seed, it, detail::kDrones);
    auto fresh = initialize_population(n, params.n_drones - kept, drone_rng);
    drones.clear();
    drone_fit.clear();
    for (std::size_t i = 0; i < kept; ++i) {
      drones.push_back(broods[order[i]].placement);
      drone_fit.push_back(broods[order[i]].fitness);
    }
    for (auto& d : fresh) {
      drone_fit.push_back(fitness(checker, d, penalty));
      drones.push_back(std::move(d));
    }
    result.evaluations += fresh.size();

    if (params.stagnation_window > 0 && stagnant >= params.stagnation_window) break;
  }

  result.best = std::move(queen);
  result.best_fitness = queen_fit;
  result.feasible = checker.feasible(result.best);
  result.wall_time_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started).count();
  return result;
}

}  // namespace pmu
