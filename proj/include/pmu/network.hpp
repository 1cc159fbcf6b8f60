#pragma once

// Grid topology model: buses, branches, zero-injection flags and per-bus
// PMU cost, plus the closed-neighbourhood connectivity matrix.
//
// Bus indices are 0-based inside the library. Everything that crosses an
// I/O boundary (case files, reports, CLI) is 1-based.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <boost/dynamic_bitset.hpp>

namespace pmu {

using BusSet = boost::dynamic_bitset<std::uint64_t>;

struct Branch {
  int line_id = 0;        // 1-based, unique, contiguous
  std::size_t from = 0;   // 0-based
  std::size_t to = 0;     // 0-based

  friend bool operator==(const Branch&, const Branch&) = default;
};

class Network {
 public:
  Network() = default;

  /// Validates every invariant; throws std::invalid_argument on violation.
  Network(std::size_t bus_count, std::vector<Branch> branches,
          std::vector<std::size_t> zib = {}, std::vector<double> cost = {})
      : bus_count_(bus_count),
        branches_(std::move(branches)),
        zib_(bus_count),
        cost_(std::move(cost)) {
    if (bus_count_ == 0) throw std::invalid_argument("network has no buses");
    if (cost_.empty()) cost_.assign(bus_count_, 1.0);
    if (cost_.size() != bus_count_)
      throw std::invalid_argument("cost vector length does not match bus count");
    for (double c : cost_)
      if (!(c >= 0.0)) throw std::invalid_argument("PMU cost must be nonnegative");

    std::vector<bool> seen(branches_.size() + 1, false);
    for (const Branch& b : branches_) {
      if (b.from >= bus_count_ || b.to >= bus_count_)
        throw std::invalid_argument("branch " + std::to_string(b.line_id) +
                                    " references a bus out of range");
      if (b.from == b.to)
        throw std::invalid_argument("branch " + std::to_string(b.line_id) + " is a self-loop");
      if (b.line_id < 1 || static_cast<std::size_t>(b.line_id) > branches_.size())
        throw std::invalid_argument("line ids must be contiguous from 1; got " +
                                    std::to_string(b.line_id));
      if (seen[b.line_id])
        throw std::invalid_argument("duplicate line id " + std::to_string(b.line_id));
      seen[b.line_id] = true;
    }
    for (std::size_t z : zib) {
      if (z >= bus_count_) throw std::invalid_argument("zero-injection bus out of range");
      zib_.set(z);
    }
  }

  std::size_t bus_count() const { return bus_count_; }
  std::size_t branch_count() const { return branches_.size(); }
  const std::vector<Branch>& branches() const { return branches_; }
  const BusSet& zib() const { return zib_; }
  bool is_zib(std::size_t bus) const { return zib_.test(bus); }
  const std::vector<double>& cost() const { return cost_; }

  std::vector<std::size_t> zib_list() const {
    std::vector<std::size_t> out;
    for (auto z = zib_.find_first(); z != BusSet::npos; z = zib_.find_next(z)) out.push_back(z);
    return out;
  }

  /// Position of `line_id` in branches(); throws std::out_of_range if absent.
  std::size_t branch_index(int line_id) const {
    auto it = std::find_if(branches_.begin(), branches_.end(),
                           [&](const Branch& b) { return b.line_id == line_id; });
    if (it == branches_.end())
      throw std::out_of_range("unknown line id " + std::to_string(line_id));
    return static_cast<std::size_t>(it - branches_.begin());
  }

  double max_cost() const { return *std::max_element(cost_.begin(), cost_.end()); }
  double total_cost() const {
    double s = 0.0;
    for (double c : cost_) s += c;
    return s;
  }

  friend bool operator==(const Network&, const Network&) = default;

 private:
  std::size_t bus_count_ = 0;
  std::vector<Branch> branches_;
  BusSet zib_;
  std::vector<double> cost_;
};

/// Binary N x N matrix K with K(i,j) = 1 iff i == j or an in-service branch
/// joins i and j. Stored as one closed-neighbourhood bitset per bus.
class ConnectivityMatrix {
 public:
  ConnectivityMatrix() = default;
  explicit ConnectivityMatrix(std::size_t n) : rows_(n, BusSet(n)) {
    for (std::size_t i = 0; i < n; ++i) rows_[i].set(i);
  }

  std::size_t size() const { return rows_.size(); }
  bool operator()(std::size_t i, std::size_t j) const { return rows_[i].test(j); }
  const BusSet& row(std::size_t i) const { return rows_[i]; }

  void connect(std::size_t i, std::size_t j) {
    rows_[i].set(j);
    rows_[j].set(i);
  }

  std::size_t degree(std::size_t i) const { return rows_[i].count() - 1; }

  friend bool operator==(const ConnectivityMatrix&, const ConnectivityMatrix&) = default;

 private:
  std::vector<BusSet> rows_;
};

namespace detail {
inline ConnectivityMatrix build_matrix(const Network& net, std::size_t skip_index) {
  ConnectivityMatrix k(net.bus_count());
  const auto& br = net.branches();
  for (std::size_t idx = 0; idx < br.size(); ++idx)
    if (idx != skip_index) k.connect(br[idx].from, br[idx].to);
  return k;
}
}  // namespace detail

inline ConnectivityMatrix connectivity_matrix(const Network& net) {
  return detail::build_matrix(net, static_cast<std::size_t>(-1));
}

/// Connectivity with branch `line_id` out of service. A parallel branch
/// between the same pair keeps the entry at 1.
inline ConnectivityMatrix line_outage_matrix(const Network& net, int line_id) {
  return detail::build_matrix(net, net.branch_index(line_id));
}

}  // namespace pmu
