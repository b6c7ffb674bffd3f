#include "rainbow/harness.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace rainbow;
using namespace rainbow::mc;

TEST(Accumulator, MergeMatchesSequential) {
  Stream rng(5);
  std::vector<double> xs(1000);
  for (auto& x : xs) x = rng.uniform() * 10;
  Accumulator all, left, right;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    all.add(xs[i]);
    (i < 377 ? left : right).add(xs[i]);
  }
  left.merge(right);
  EXPECT_EQ(left.count, all.count);
  EXPECT_NEAR(left.mean, all.mean, 1e-12);
  EXPECT_NEAR(left.m2, all.m2, 1e-9);
  const auto e = all.estimate();
  double m = 0, v = 0;
  for (double x : xs) m += x;
  m /= xs.size();
  for (double x : xs) v += (x - m) * (x - m);
  v /= xs.size() - 1;
  EXPECT_NEAR(e.stderr_, std::sqrt(v / xs.size()), 1e-12);
}

TEST(Plan, Validation) {
  ExperimentPlan p;
  p.trials = 0;
  EXPECT_THROW(p.validate(), ParameterError);
  p.trials = 10;
  p.d = 5;
  EXPECT_THROW(p.validate(), ParameterError);
  p.d = 4;
  p.model = Model::planted;
  EXPECT_THROW(p.validate(), ParameterError);
  p.model = Model::hamilton;
  p.i_max = 4;
  EXPECT_THROW(p.validate(), ParameterError);  // i_max > n
  p.i_max = 3;
  p.moments.push_back({true, {{1, 0, 4}, {2, 0, 3}}});
  EXPECT_THROW(p.validate(), ParameterError);
  p.moments = {{false, {{4, 0, 1}}}};
  EXPECT_THROW(p.validate(), ParameterError);
  p.moments = {{true, {{1, 0, 2}}}};
  EXPECT_NO_THROW(p.validate());
  p.matching_count = true;
  EXPECT_THROW(p.validate(), ParameterError);
}

TEST(Trials, DeterministicAcrossThreads) {
  ExperimentPlan p;
  p.n = 12;
  p.d = 6;
  p.trials = 1000;
  p.seed = 42;
  p.hamilton_count = true;
  p.i_max = 3;
  p.moments = {{true, {{1, 0, 1}}}, {false, {{2, 1, 2}}}};
  p.threads = 1;
  const auto one = results_document(run_trials(p)).dump();
  for (int t : {2, 4, 8}) {
    p.threads = t;
    EXPECT_EQ(results_document(run_trials(p)).dump(), one) << t;
  }
  p.seed = 43;
  EXPECT_NE(results_document(run_trials(p)).dump(), one);
}

TEST(Trials, SmallModelMatchesExactMeans) {
  ExperimentPlan p;
  p.n = 3;
  p.d = 4;
  p.trials = 100000;
  p.seed = 3;
  p.i_max = 3;
  p.hamilton_count = true;
  p.hamilton_exists = true;
  p.threads = 4;
  const auto r = run_trials(p);
  const auto y = r.at("Y");
  EXPECT_LT(std::fabs(y.mean - 10368.0 / 10395), 3 * y.stderr_);
  for (int i = 1; i <= 3; ++i)
    for (int j = 0; j <= i; ++j) {
      const auto e = r.at("X_" + std::to_string(i) + "_" + std::to_string(j));
      const double exact = to_double(theory::expected_census_exact(3, 4, i, j));
      EXPECT_LT(std::fabs(e.mean - exact), 3 * e.stderr_ + 1e-12) << i << ' ' << j;
    }
  const auto py = r.at("P(Y>0)");
  EXPECT_LT(std::fabs(py.mean - 192.0 / 385), 3 * py.stderr_);
}

TEST(Trials, MatchingMean) {
  ExperimentPlan p;
  p.model = Model::matching;
  p.n = 2;
  p.d = 5;
  p.trials = 20000;
  p.census = false;
  p.matching_count = true;
  const auto z = run_trials(p).at("Z");
  const double exact = to_double(theory::matching_theory(2, 5).expected);
  EXPECT_LT(std::fabs(z.mean - exact), 3 * z.stderr_);
}

TEST(Planted, StructureEveryTrial) {
  for (std::uint64_t s = 0; s < 200; ++s) {
    Stream rng(s);
    const auto inst = sample_planted_instance(10 + s % 7, 6 + 2 * (s % 3), rng);
    EXPECT_TRUE(planted_structure_ok(inst));
    EXPECT_NO_THROW(inst.colouring.validate(inst.graph.edge_count()));
    EXPECT_TRUE(count_rainbow_hamilton(inst.graph, inst.colouring, SearchMode::exists).exists);
  }
  Stream bad(0);
  EXPECT_THROW(sample_planted_instance(10, 4, bad), ParameterError);
}

TEST(Planted, StructureCheckRejectsBrokenInstance) {
  Stream rng(1);
  auto inst = sample_planted_instance(8, 6, rng);
  for (std::size_t e = 0; e < inst.graph.edge_count(); ++e) {
    const auto a = locate(inst.graph.edges[e].hu, 6);
    if (a.slot < 2) {
      // give the cycle edge the colour of some other cycle edge
      for (std::size_t f = 0; f < inst.graph.edge_count(); ++f)
        if (f != e && locate(inst.graph.edges[f].hu, 6).slot < 2) {
          inst.colouring.colour[e] = inst.colouring.colour[f];
          break;
        }
      break;
    }
  }
  EXPECT_FALSE(planted_structure_ok(inst));
}

TEST(Planted, RunReportsNoFailures) {
  ExperimentPlan p;
  p.model = Model::planted;
  p.n = 20;
  p.d = 6;
  p.trials = 300;
  p.i_max = 3;
  const auto r = run_trials(p);
  EXPECT_EQ(r.planted_failures, 0);
  EXPECT_EQ(results_document(r)["planted_structure_failures"], 0);
}

TEST(Poisson, ExactPoissonPasses) {
  Stream rng(8);
  std::vector<std::uint64_t> s(20000);
  for (auto& x : s) {
    // inversion sampling for Poisson(2)
    double u = rng.uniform(), p = std::exp(-2.0), c = p;
    std::uint64_t k = 0;
    while (u > c) {
      ++k;
      p *= 2.0 / k;
      c += p;
    }
    x = k;
  }
  const auto g = poisson_gof(s, 2.0);
  EXPECT_TRUE(g.pass) << g.tv << ' ' << g.mean_gap;
}

TEST(Poisson, ZerosFail) {
  std::vector<std::uint64_t> s(5000, 0);
  const auto g = poisson_gof(s, 1.5);
  EXPECT_FALSE(g.pass);
  EXPECT_NEAR(g.tv, 1 - std::exp(-1.5), 1e-12);
}

TEST(Poisson, Preconditions) {
  std::vector<std::uint64_t> s(999, 1);
  EXPECT_THROW(poisson_gof(s, 1.0), ParameterError);
  s.push_back(1);
  EXPECT_THROW(poisson_gof(s, 0.0), ParameterError);
}

TEST(Poisson, LoopsAtDegreeFour) {
  ExperimentPlan p;
  p.n = 200;
  p.d = 4;
  p.trials = 10000;
  p.i_max = 1;
  p.threads = 4;
  const auto r = run_trials(p);
  const auto g = poisson_gof(r.samples("X_1_0"), 1.5);
  EXPECT_TRUE(g.pass) << g.tv << ' ' << g.mean_gap;
}

TEST(Oracle, SmallestCase) {
  const auto rec = oracle_exhaustive(3, 4, 3);
  EXPECT_EQ(rec.instances, 10395u * 90u);
  EXPECT_EQ(rec.expected_y, Rational(BigInt(10368), BigInt(10395)));
  EXPECT_EQ(rec.expected_census[1][0], Rational(BigInt(18), BigInt(11)));
  EXPECT_EQ(rec.expected_census[2][0], Rational(BigInt(96), BigInt(55)));
  for (int i = 1; i <= 3; ++i)
    for (int j = 0; j <= i; ++j) EXPECT_EQ(rec.expected_census[i][j], theory::expected_census_exact(3, 4, i, j));
  EXPECT_EQ(rec.overlap.at({1, 0}), BigInt(192));
  EXPECT_EQ(rec.second_moment_ratio(), *variance::second_moment_finite(3, 4).ratio_exact);
  const auto j = to_json(rec);
  EXPECT_EQ(j["E_Y"]["exact"], "384/385");
}

TEST(Oracle, SizeBounds) {
  EXPECT_THROW(oracle_exhaustive(4, 4, 3), SizeError);
  EXPECT_THROW(oracle_exhaustive(3, 6, 3), SizeError);
  EXPECT_THROW(oracle_exhaustive(3, 4, 4), ParameterError);
}

TEST(Oracle, HamiltonCountsAgreeInsideEnumeration) {
  // every pairing at (3,4) against the transversal brute force, one colouring each
  long checked = 0;
  Stream rng(0);
  for_each_pairing(DegreeSpec{3, 4}, [&](const Pairing& p) {
    if (rng.below(20) != 0) return;
    const auto g = project_multigraph(p);
    const auto col = sample_colouring(g, 3, 2, rng);
    EXPECT_EQ(count_rainbow_hamilton(g, col).count, oracle::hamilton_cycles(g, col));
    ++checked;
  });
  EXPECT_GT(checked, 300);
}

TEST(Json, DocumentShape) {
  ExperimentPlan p;
  p.trials = 10;
  p.i_max = 2;
  const auto doc = results_document(run_trials(p));
  EXPECT_TRUE(doc.contains("plan"));
  EXPECT_TRUE(doc.contains("estimates"));
  EXPECT_TRUE(doc.contains("theory"));
  EXPECT_TRUE(doc.contains("oracle"));
  EXPECT_FALSE(doc["plan"].contains("threads"));
  for (const auto& e : doc["estimates"]) {
    EXPECT_TRUE(e.contains("stat"));
    EXPECT_TRUE(e.contains("mean"));
    EXPECT_TRUE(e.contains("stderr"));
  }
}
