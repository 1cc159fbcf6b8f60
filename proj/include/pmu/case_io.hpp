#pragma once

// Case-file readers and the native writer.
//
// Native format (line oriented, '#' starts a comment):
//   buses <N>
//   edge <line_id> <from> <to>
//   zib <bus>
//   cost <bus> <value>
//
// MATPOWER subset: only the bus count, the first two columns of
// mpc.branch and (for zero-injection auto-detection) the load columns of
// mpc.bus and the bus column of mpc.gen are read.

#include <charconv>
#include <cstddef>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "pmu/network.hpp"

namespace pmu {

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error(line ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

enum class CaseFormat { Native, Matpower };

struct ParseOptions {
  CaseFormat format = CaseFormat::Native;
  // MATPOWER only: flag buses with zero load and no generator as ZIBs.
  bool detect_zib = false;
};

namespace detail {

inline std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\r' || s[i] == ',')) ++i;
    std::size_t j = i;
    while (j < s.size() && !(s[j] == ' ' || s[j] == '\t' || s[j] == '\r' || s[j] == ',')) ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

template <class T>
T parse_number(std::string_view tok, std::size_t line, const char* what) {
  T value{};
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
  if (ec != std::errc{} || ptr != tok.data() + tok.size())
    throw ParseError(line, std::string("expected ") + what + ", got '" + std::string(tok) + "'");
  return value;
}

// Bus ids in files are 1-based; converts and range-checks.
inline std::size_t bus_index(long long id, std::size_t n, std::size_t line) {
  if (id < 1 || static_cast<unsigned long long>(id) > n)
    throw ParseError(line, "bus index " + std::to_string(id) + " out of range 1.." +
                               std::to_string(n));
  return static_cast<std::size_t>(id - 1);
}

inline Network parse_native(std::string_view text) {
  struct Pending {
    std::size_t line;
    long long a, b;
    double value;
  };
  std::optional<std::size_t> n;
  std::vector<std::pair<Pending, int>> edges;  // (endpoints, line id)
  std::vector<Pending> zibs, costs;
  std::set<int> ids;

  std::size_t lineno = 0;
  std::istringstream in{std::string(text)};
  std::string raw;
  while (std::getline(in, raw)) {
    ++lineno;
    std::string_view sv(raw);
    if (auto hash = sv.find('#'); hash != std::string_view::npos) sv = sv.substr(0, hash);
    auto tok = split_ws(sv);
    if (tok.empty()) continue;
    const auto& kw = tok[0];
    auto want = [&](std::size_t count) {
      if (tok.size() != count)
        throw ParseError(lineno, "'" + std::string(kw) + "' expects " +
                                     std::to_string(count - 1) + " argument(s)");
    };
    if (kw == "buses") {
      want(2);
      if (n) throw ParseError(lineno, "duplicate 'buses' directive");
      auto v = parse_number<long long>(tok[1], lineno, "bus count");
      if (v < 1) throw ParseError(lineno, "empty network");
      n = static_cast<std::size_t>(v);
    } else if (kw == "edge") {
      want(4);
      int id = parse_number<int>(tok[1], lineno, "line id");
      if (!ids.insert(id).second) throw ParseError(lineno, "duplicate line id " + std::to_string(id));
      edges.push_back({{lineno, parse_number<long long>(tok[2], lineno, "bus index"),
                        parse_number<long long>(tok[3], lineno, "bus index"), 0.0},
                       id});
    } else if (kw == "zib") {
      want(2);
      zibs.push_back({lineno, parse_number<long long>(tok[1], lineno, "bus index"), 0, 0.0});
    } else if (kw == "cost") {
      want(3);
      costs.push_back({lineno, parse_number<long long>(tok[1], lineno, "bus index"), 0,
                       parse_number<double>(tok[2], lineno, "cost value")});
    } else {
      throw ParseError(lineno, "unknown directive '" + std::string(kw) + "'");
    }
  }
  if (!n) throw ParseError(0, "empty network: missing 'buses' directive");

  std::vector<Branch> branches;
  for (const auto& [e, id] : edges) {
    Branch b{id, bus_index(e.a, *n, e.line), bus_index(e.b, *n, e.line)};
    if (b.from == b.to) throw ParseError(e.line, "self-loop on bus " + std::to_string(e.a));
    if (id < 1 || static_cast<std::size_t>(id) > edges.size())
      throw ParseError(e.line, "line ids must be contiguous from 1 to " +
                                   std::to_string(edges.size()));
    branches.push_back(b);
  }
  std::vector<std::size_t> zib;
  for (const auto& z : zibs) zib.push_back(bus_index(z.a, *n, z.line));
  std::vector<double> cost(*n, 1.0);
  for (const auto& c : costs) {
    if (!(c.value >= 0.0)) throw ParseError(c.line, "PMU cost must be nonnegative");
    cost[bus_index(c.a, *n, c.line)] = c.value;
  }
  return Network(*n, std::move(branches), std::move(zib), std::move(cost));
}

struct MatrixRow {
  std::size_t line;
  std::vector<double> values;
};

// Extracts the rows of `mpc.<name> = [ ... ];`. Returns nullopt if absent.
inline std::optional<std::vector<MatrixRow>> matpower_matrix(std::string_view text,
                                                             std::string_view name) {
  std::istringstream in{std::string(text)};
  std::string raw;
  std::size_t lineno = 0;
  bool inside = false;
  bool found = false;
  std::vector<MatrixRow> rows;
  const std::string head = "mpc." + std::string(name);

  while (std::getline(in, raw)) {
    ++lineno;
    std::string_view sv(raw);
    if (auto pct = sv.find('%'); pct != std::string_view::npos) sv = sv.substr(0, pct);
    if (!inside) {
      auto pos = sv.find(head);
      if (pos == std::string_view::npos) continue;
      auto rest = sv.substr(pos + head.size());
      auto first = rest.find_first_not_of(" \t");
      if (first == std::string_view::npos || rest[first] != '=') continue;
      auto open = rest.find('[');
      if (open == std::string_view::npos) throw ParseError(lineno, "expected '[' after " + head);
      inside = found = true;
      sv = rest.substr(open + 1);
    }
    bool closing = false;
    if (auto close = sv.find(']'); close != std::string_view::npos) {
      sv = sv.substr(0, close);
      closing = true;
    }
    // A row ends at ';' or at end of line.
    std::size_t start = 0;
    while (start <= sv.size()) {
      auto semi = sv.find(';', start);
      auto piece = sv.substr(start, semi == std::string_view::npos ? sv.size() - start : semi - start);
      auto tok = split_ws(piece);
      if (!tok.empty()) {
        MatrixRow row{lineno, {}};
        for (auto t : tok) row.values.push_back(parse_number<double>(t, lineno, "number"));
        rows.push_back(std::move(row));
      }
      if (semi == std::string_view::npos) break;
      start = semi + 1;
    }
    if (closing) {
      inside = false;
      break;
    }
  }
  if (inside) throw ParseError(lineno, "unterminated matrix " + head);
  if (!found) return std::nullopt;
  return rows;
}

inline Network parse_matpower(std::string_view text, bool detect_zib) {
  auto bus = matpower_matrix(text, "bus");
  if (!bus || bus->empty()) throw ParseError(0, "empty network: no mpc.bus rows");
  auto branch = matpower_matrix(text, "branch");
  if (!branch) throw ParseError(0, "missing mpc.branch matrix");

  const std::size_t n = bus->size();
  std::vector<bool> seen(n, false);
  for (const auto& row : *bus) {
    if (row.values.size() < (detect_zib ? 4u : 1u))
      throw ParseError(row.line, "bus row has too few columns");
    auto idx = bus_index(static_cast<long long>(row.values[0]), n, row.line);
    if (seen[idx]) throw ParseError(row.line, "duplicate bus number");
    seen[idx] = true;
  }

  std::vector<Branch> branches;
  for (const auto& row : *branch) {
    if (row.values.size() < 2) throw ParseError(row.line, "branch row has too few columns");
    Branch b{static_cast<int>(branches.size() + 1),
             bus_index(static_cast<long long>(row.values[0]), n, row.line),
             bus_index(static_cast<long long>(row.values[1]), n, row.line)};
    if (b.from == b.to) throw ParseError(row.line, "self-loop branch");
    branches.push_back(b);
  }

  std::vector<std::size_t> zib;
  if (detect_zib) {
    std::vector<bool> has_gen(n, false);
    if (auto gen = matpower_matrix(text, "gen")) {
      for (const auto& row : *gen) {
        if (row.values.empty()) continue;
        has_gen[bus_index(static_cast<long long>(row.values[0]), n, row.line)] = true;
      }
    }
    for (const auto& row : *bus) {
      auto idx = static_cast<std::size_t>(row.values[0]) - 1;
      if (row.values[2] == 0.0 && row.values[3] == 0.0 && !has_gen[idx]) zib.push_back(idx);
    }
    std::sort(zib.begin(), zib.end());
  }
  return Network(n, std::move(branches), std::move(zib));
}

}  // namespace detail

/// Parses case-file text. Throws ParseError (with the offending line where
/// one exists) on malformed input, out-of-range buses, duplicate line ids or
/// an empty network.
inline Network parse_case(std::string_view text, const ParseOptions& opts = {}) {
  try {
    if (opts.format == CaseFormat::Matpower) return detail::parse_matpower(text, opts.detect_zib);
    return detail::parse_native(text);
  } catch (const std::invalid_argument& e) {
    throw ParseError(0, e.what());
  }
}

inline Network load_case(const std::string& path, const ParseOptions& opts = {}) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open case file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_case(buf.str(), opts);
}

/// Serialises to the native format. parse_case(to_native(net)) == net.
inline std::string to_native(const Network& net) {
  std::ostringstream out;
  out.precision(17);
  out << "buses " << net.bus_count() << '\n';
  for (const auto& b : net.branches())
    out << "edge " << b.line_id << ' ' << b.from + 1 << ' ' << b.to + 1 << '\n';
  for (auto z : net.zib_list()) out << "zib " << z + 1 << '\n';
  for (std::size_t i = 0; i < net.bus_count(); ++i)
    if (net.cost()[i] != 1.0) out << "cost " << i + 1 << ' ' << net.cost()[i] << '\n';
  return out.str();
}

}  // namespace pmu
