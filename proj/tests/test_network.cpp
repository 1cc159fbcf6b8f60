#include <gtest/gtest.h>

#include <random>

#include "test_support.hpp"

namespace pmu {
namespace {

using test::ieee;

TEST(ParseNative, SmallestChainWithZib) {
  auto net = parse_case("buses 3\nedge 1 1 2\nedge 2 2 3\nzib 2\n");
  EXPECT_EQ(net.bus_count(), 3u);
  ASSERT_EQ(net.branch_count(), 2u);
  EXPECT_EQ(net.zib_list(), (std::vector<std::size_t>{1}));
  EXPECT_EQ(net.branches()[0], (Branch{1, 0, 1}));
  EXPECT_EQ(net.branches()[1], (Branch{2, 1, 2}));
  EXPECT_DOUBLE_EQ(net.cost()[0], 1.0);
}

TEST(ParseNative, CommentsCostsAndFileOrder) {
  auto net = parse_case(
      "# triangle\n"
      "buses 3   # three buses\n"
      "edge 2 3 1\n"
      "edge 1 1 2\n"
      "\n"
      "edge 3 2 3\n"
      "cost 3 2.5\n");
  ASSERT_EQ(net.branch_count(), 3u);
  EXPECT_EQ(net.branches()[0].line_id, 2);
  EXPECT_EQ(net.branches()[1].line_id, 1);
  EXPECT_DOUBLE_EQ(net.cost()[2], 2.5);
  EXPECT_TRUE(net.zib_list().empty());
}

TEST(ParseNative, Errors) {
  auto line_of = [](const std::string& text) -> std::size_t {
    try {
      parse_case(text);
    } catch (const ParseError& e) {
      return e.line();
    }
    return 999;
  };
  EXPECT_EQ(line_of("buses 2\nedge 1 1 x\n"), 2u);        // syntax
  EXPECT_EQ(line_of("buses 2\nfoo 1\n"), 2u);             // unknown directive
  EXPECT_EQ(line_of("buses 2\n\nedge 1 1 3\n"), 3u);      // bus out of range
  EXPECT_EQ(line_of("buses 3\nedge 1 1 2\nedge 1 2 3\n"), 3u);  // duplicate id
  EXPECT_EQ(line_of("buses 3\nzib 4\n"), 2u);
  EXPECT_EQ(line_of("buses 3\nedge 1 2 2\n"), 2u);        // self-loop
  EXPECT_EQ(line_of("buses 3\nedge 2 1 2\n"), 2u);        // ids not contiguous
  EXPECT_EQ(line_of("buses 0\n"), 1u);                    // empty
  EXPECT_THROW(parse_case("# nothing\n"), ParseError);    // empty
  EXPECT_THROW(parse_case("buses 2\nbuses 2\n"), ParseError);
  EXPECT_THROW(parse_case("buses 2\ncost 1 -1\n"), ParseError);
}

TEST(ParseMatpower, Ieee14) {
  auto plain = ieee(14, false);
  EXPECT_EQ(plain.bus_count(), 14u);
  EXPECT_EQ(plain.branch_count(), 20u);
  EXPECT_TRUE(plain.zib_list().empty());

  auto detected = ieee(14, true);
  EXPECT_EQ(detected.zib_list(), (std::vector<std::size_t>{6}));  // bus 7
  EXPECT_EQ(detected.branches(), plain.branches());
}

TEST(ParseMatpower, ZibDetectionMatchesPublishedLocations) {
  auto to_one_based = [](std::vector<std::size_t> v) {
    for (auto& b : v) ++b;
    return v;
  };
  auto n57 = ieee(57);
  EXPECT_EQ(n57.bus_count(), 57u);
  EXPECT_EQ(n57.branch_count(), 80u);
  EXPECT_EQ(to_one_based(n57.zib_list()),
            (std::vector<std::size_t>{4, 7, 11, 21, 22, 24, 26, 34, 36, 37, 39, 40, 45, 46, 48}));

  auto n118 = ieee(118);
  EXPECT_EQ(n118.bus_count(), 118u);
  EXPECT_EQ(n118.branch_count(), 186u);
  EXPECT_EQ(to_one_based(n118.zib_list()),
            (std::vector<std::size_t>{5, 9, 30, 37, 38, 63, 64, 68, 71, 81}));
}

TEST(ParseMatpower, InlineRowsAndErrors) {
  const char* text =
      "mpc.bus = [1 3 0 0; 2 1 10 0;\n 3 1 0 0];\n"
      "mpc.gen = [1 0 0];\n"
      "mpc.branch = [\n 1 2 0.1; % first\n 2 3 0.1;\n];\n";
  auto net = parse_case(text, {CaseFormat::Matpower, true});
  EXPECT_EQ(net.bus_count(), 3u);
  EXPECT_EQ(net.branch_count(), 2u);
  EXPECT_EQ(net.zib_list(), (std::vector<std::size_t>{2}));

  EXPECT_THROW(parse_case("mpc.bus = [1 3 0 0];\n", {CaseFormat::Matpower}), ParseError);
  EXPECT_THROW(parse_case("mpc.bus = [1 3 0 0; 2 1 0 0];\nmpc.branch = [1 5];\n",
                          {CaseFormat::Matpower}),
               ParseError);
  EXPECT_THROW(parse_case("mpc.branch = [1 2];\n", {CaseFormat::Matpower}), ParseError);
}

TEST(ConnectivityMatrix, SmallCases) {
  auto two = Network(2, {{1, 0, 1}});
  auto k2 = connectivity_matrix(two);
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j) EXPECT_TRUE(k2(i, j));

  auto k3 = connectivity_matrix(test::chain3());
  EXPECT_FALSE(k3(0, 2));
  EXPECT_TRUE(k3(0, 1));
  EXPECT_TRUE(k3(1, 2));
  for (std::size_t i = 0; i < 3; ++i) EXPECT_TRUE(k3(i, i));
}

TEST(ConnectivityMatrix, Ieee14RowSumsAreOnePlusDegree) {
  auto net = ieee(14);
  auto k = connectivity_matrix(net);
  std::vector<std::size_t> degree(14, 0);
  for (const auto& b : net.branches()) {
    ++degree[b.from];
    ++degree[b.to];
  }
  for (std::size_t i = 0; i < 14; ++i) {
    std::size_t row_sum = 0;
    for (std::size_t j = 0; j < 14; ++j) row_sum += k(i, j);
    EXPECT_EQ(row_sum, 1 + degree[i]) << "bus " << i + 1;
  }
}

TEST(LineOutageMatrix, Examples) {
  auto two = Network(2, {{1, 0, 1}});
  auto k = line_outage_matrix(two, 1);
  EXPECT_TRUE(k(0, 0));
  EXPECT_TRUE(k(1, 1));
  EXPECT_FALSE(k(0, 1));
  EXPECT_FALSE(k(1, 0));

  auto triangle = Network(3, {{1, 0, 1}, {2, 0, 2}, {3, 1, 2}});
  auto kt = line_outage_matrix(triangle, 1);
  EXPECT_FALSE(kt(0, 1));
  EXPECT_TRUE(kt(0, 2));
  EXPECT_TRUE(kt(1, 2));

  auto parallel = Network(2, {{1, 0, 1}, {2, 1, 0}});
  EXPECT_TRUE(line_outage_matrix(parallel, 1)(0, 1));
  EXPECT_TRUE(line_outage_matrix(parallel, 2)(0, 1));

  EXPECT_THROW(line_outage_matrix(two, 2), std::out_of_range);
}

TEST(NetworkInvariants, RejectsBadTopology) {
  EXPECT_THROW(Network(0, {}), std::invalid_argument);
  EXPECT_THROW(Network(2, {{1, 0, 2}}), std::invalid_argument);
  EXPECT_THROW(Network(2, {{1, 1, 1}}), std::invalid_argument);
  EXPECT_THROW(Network(2, {{1, 0, 1}, {1, 0, 1}}), std::invalid_argument);
  EXPECT_THROW(Network(2, {{2, 0, 1}}), std::invalid_argument);
  EXPECT_THROW(Network(2, {}, {5}), std::invalid_argument);
  EXPECT_THROW(Network(2, {}, {}, {1.0}), std::invalid_argument);
}

// Randomised properties over small networks.

TEST(NetworkProperties, MatrixSymmetricWithUnitDiagonal) {
  std::mt19937_64 rng(101);
  for (int trial = 0; trial < 1000; ++trial) {
    auto net = test::random_network(rng, 10);
    auto k = connectivity_matrix(net);
    for (std::size_t i = 0; i < net.bus_count(); ++i) {
      ASSERT_TRUE(k(i, i));
      for (std::size_t j = 0; j < net.bus_count(); ++j) ASSERT_EQ(k(i, j), k(j, i));
    }
  }
}

TEST(NetworkProperties, OutageChangesAtMostTwoEntries) {
  std::mt19937_64 rng(102);
  for (int trial = 0; trial < 1000; ++trial) {
    auto net = test::random_network(rng, 10);
    auto k = connectivity_matrix(net);
    for (const auto& b : net.branches()) {
      auto kl = line_outage_matrix(net, b.line_id);
      int changed = 0;
      for (std::size_t i = 0; i < net.bus_count(); ++i) {
        ASSERT_TRUE(kl(i, i));
        for (std::size_t j = 0; j < net.bus_count(); ++j) {
          if (k(i, j) != kl(i, j)) {
            ++changed;
            ASSERT_TRUE((i == b.from && j == b.to) || (i == b.to && j == b.from));
          }
        }
      }
      ASSERT_LE(changed, 2);
    }
  }
}

TEST(NetworkProperties, RemoveAndReAddBranchRestoresMatrix) {
  std::mt19937_64 rng(103);
  for (int trial = 0; trial < 1000; ++trial) {
    auto net = test::random_network(rng, 10);
    if (net.branch_count() == 0) continue;
    std::uniform_int_distribution<std::size_t> pick(0, net.branch_count() - 1);
    const std::size_t pos = pick(rng);
    auto branches = net.branches();
    Branch removed = branches[pos];
    branches.erase(branches.begin() + static_cast<long>(pos));
    for (auto& b : branches)
      if (b.line_id > removed.line_id) --b.line_id;
    Network without(net.bus_count(), branches, net.zib_list());
    auto k_without = connectivity_matrix(without);

    for (auto& b : branches)
      if (b.line_id >= removed.line_id) ++b.line_id;
    branches.push_back(removed);
    Network restored(net.bus_count(), branches, net.zib_list());
    ASSERT_EQ(connectivity_matrix(restored), connectivity_matrix(net));
    ASSERT_EQ(k_without, line_outage_matrix(net, removed.line_id));
  }
}

TEST(NetworkProperties, NativeRoundTrip) {
  std::mt19937_64 rng(104);
  std::uniform_real_distribution<double> cost(0.0, 5.0);
  std::bernoulli_distribution custom(0.3);
  for (int trial = 0; trial < 1000; ++trial) {
    auto net = test::random_network(rng, 12);
    std::vector<double> costs(net.bus_count(), 1.0);
    for (auto& c : costs)
      if (custom(rng)) c = cost(rng);
    Network weighted(net.bus_count(), net.branches(), net.zib_list(), costs);
    ASSERT_EQ(parse_case(to_native(weighted)), weighted) << to_native(weighted);
  }
}

}  // namespace
}  // namespace pmu
