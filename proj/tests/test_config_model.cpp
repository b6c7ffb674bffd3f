#include "rainbow/config_model.hpp"

#include <gtest/gtest.h>

#include <map>
#include <set>

using namespace rainbow;

TEST(Pairing, SampleIsFixedPointFreeInvolution) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto p = sample_pairing(DegreeSpec{7, 4}, seed);
    ASSERT_EQ(p.size(), 28u);
    for (HalfEdgeId h = 0; h < p.size(); ++h) {
      EXPECT_NE(p.partner(h), h);
      EXPECT_EQ(p.partner(p.partner(h)), h);
    }
  }
}

TEST(Pairing, RejectsBadPartnerTables) {
  EXPECT_THROW(Pairing(DegreeSpec{1, 2}, {0, 1}), ParameterError);
  EXPECT_THROW(Pairing(DegreeSpec{1, 2}, {1}), ParameterError);
  EXPECT_THROW(Pairing(DegreeSpec{2, 2}, {1, 2, 3, 0}), ParameterError);
  EXPECT_NO_THROW(Pairing(DegreeSpec{2, 2}, {1, 0, 3, 2}));
}

TEST(Pairing, OddHalfEdgeCountIsInvalid) {
  EXPECT_THROW(sample_pairing(DegreeSpec{3, 3}, 0), ParameterError);
  EXPECT_THROW(sample_pairing(DegreeSpec{0, 4}, 0), ParameterError);
}

TEST(Pairing, CountsAreDoubleFactorials) {
  EXPECT_EQ(pairing_count(6), 15u);
  EXPECT_EQ(pairing_count(12), 10395u);
  EXPECT_EQ(pairing_count(16), 2027025u);
}

TEST(Pairing, EnumerationIsCompleteAndDistinct) {
  std::set<std::vector<HalfEdgeId>> seen;
  for_each_pairing(DegreeSpec{3, 4}, [&](const Pairing& p) {
    seen.emplace(p.partners().begin(), p.partners().end());
  });
  EXPECT_EQ(seen.size(), 10395u);
}

TEST(Pairing, EnumerationSizeBound) {
  EXPECT_THROW(for_each_pairing(DegreeSpec{3, 6}, [](const Pairing&) {}), SizeError);
}

TEST(Pairing, UniformOverFifteenPairings) {
  std::map<std::vector<HalfEdgeId>, long> freq;
  const long draws = 1'000'000;
  Stream rng(12345);
  for (long t = 0; t < draws; ++t) {
    const auto p = sample_pairing(DegreeSpec{3, 2}, rng);
    ++freq[{p.partners().begin(), p.partners().end()}];
  }
  ASSERT_EQ(freq.size(), 15u);
  for (const auto& [k, c] : freq) EXPECT_NEAR(double(c) / draws, 1.0 / 15, 0.005);
}

TEST(Pairing, SameSeedSamePairing) {
  EXPECT_EQ(sample_pairing(DegreeSpec{10, 4}, 7), sample_pairing(DegreeSpec{10, 4}, 7));
  EXPECT_FALSE(sample_pairing(DegreeSpec{10, 4}, 7) == sample_pairing(DegreeSpec{10, 4}, 8));
}

TEST(Multigraph, ProjectionKeepsDegrees) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto g = project_multigraph(sample_pairing(DegreeSpec{9, 6}, seed));
    EXPECT_EQ(g.edge_count(), 27u);
    for (int deg : g.degrees()) EXPECT_EQ(deg, 6);
    for (std::size_t e = 1; e < g.edge_count(); ++e) EXPECT_LT(g.edges[e - 1].hu, g.edges[e].hu);
  }
}

TEST(Multigraph, LoopsAndMultiEdges) {
  const std::vector<std::pair<int, int>> pairs{{0, 0}, {0, 1}, {0, 1}};
  const auto g = Multigraph::from_vertex_pairs(2, pairs, 4);
  EXPECT_TRUE(g.has_loop());
  EXPECT_TRUE(g.has_multi_edge());
  EXPECT_FALSE(g.is_simple());
  EXPECT_EQ(g.degrees(), (std::vector<int>{4, 2}));
  const std::vector<std::pair<int, int>> tri{{0, 1}, {1, 2}, {2, 0}};
  EXPECT_TRUE(Multigraph::from_vertex_pairs(3, tri, 2).is_simple());
}

TEST(Serialization, RoundTrip) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto p = sample_pairing(DegreeSpec{6, 4}, seed);
    const auto lines = serialize_pairing(p);
    EXPECT_TRUE(std::is_sorted(lines.begin(), lines.end(), [](const std::string& a, const std::string& b) {
      int ca, sa, cb, sb;
      std::sscanf(a.c_str(), "%d.%d", &ca, &sa);
      std::sscanf(b.c_str(), "%d.%d", &cb, &sb);
      return std::pair(ca, sa) < std::pair(cb, sb);
    }));
    EXPECT_EQ(parse_pairing(DegreeSpec{6, 4}, lines), p);
  }
}

TEST(Serialization, Format) {
  const Pairing p(DegreeSpec{2, 2}, {2, 3, 0, 1});
  EXPECT_EQ(serialize_pairing(p), (std::vector<std::string>{"0.0-1.0", "0.1-1.1"}));
}

TEST(Serialization, RejectsMalformed) {
  const std::vector<std::string> dup{"0.0-1.0", "0.0-1.1"};
  EXPECT_THROW(parse_pairing(DegreeSpec{2, 2}, dup), ParameterError);
  const std::vector<std::string> junk{"0.0+1.0", "0.1-1.1"};
  EXPECT_THROW(parse_pairing(DegreeSpec{2, 2}, junk), ParameterError);
  const std::vector<std::string> range{"0.0-2.0", "0.1-1.1"};
  EXPECT_THROW(parse_pairing(DegreeSpec{2, 2}, range), ParameterError);
}
