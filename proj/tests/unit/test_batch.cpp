#include <gtest/gtest.h>

#include <stdexcept>
#include <vector>

#include "cotred/batch.hpp"

using namespace cotred;

TEST(ParallelMap, MatchesSerialOrder) {
  const auto f = [](std::size_t i) { return static_cast<double>(i * i) + 0.5; };
  EXPECT_EQ(parallel_map(1000, f, Execution::Serial), parallel_map(1000, f, Execution::Parallel));
  EXPECT_GE(parallel_threads(), 1);
}

TEST(ParallelMap, RethrowsTaskFailure) {
  const auto f = [](std::size_t i) -> int {
    if (i == 37) throw std::runtime_error("task 37");
    return 0;
  };
  EXPECT_THROW(parallel_map(100, f, Execution::Parallel), std::runtime_error);
  EXPECT_THROW(parallel_map(100, f, Execution::Serial), std::runtime_error);
}

TEST(SampleRng, DependsOnlyOnSeedAndIndex) {
  auto a = sample_rng(5, 12);
  auto b = sample_rng(5, 12);
  auto c = sample_rng(5, 13);
  const auto va = a();
  EXPECT_EQ(va, b());
  EXPECT_NE(va, c());
}

TEST(RandomRotation, IsRotation) {
  for (std::size_t i = 0; i < 100; ++i) {
    auto rng = sample_rng(1, i);
    EXPECT_LT(random_rotation(rng).orthonormality_error(), 1e-14);
  }
}

TEST(Sweeps, SerialEqualsParallel) {
  const InertiaTensor body(3.0, 2.0, 1.0);
  const auto s = connection_axiom_sweep(body, 300, 9, Execution::Serial);
  const auto p = connection_axiom_sweep(body, 300, 9, Execution::Parallel);
  EXPECT_EQ(s.reproduces_generators, p.reproduces_generators);
  EXPECT_EQ(s.kernel_horizontal, p.kernel_horizontal);
  EXPECT_EQ(s.connection_equivariance, p.connection_equivariance);
  EXPECT_EQ(s.alpha_equivariance, p.alpha_equivariance);

  const auto as = amended_potential_sweep(body, 3, 500, 10, Execution::Serial);
  const auto ap = amended_potential_sweep(body, 3, 500, 10, Execution::Parallel);
  EXPECT_EQ(as.closed_form_vs_h_alpha, ap.closed_form_vs_h_alpha);
  EXPECT_EQ(as.fibre_minimum_gap, ap.fibre_minimum_gap);
}

TEST(Sweeps, PhaseSweepSerialEqualsParallelAndReportsFailures) {
  const InertiaTensor body(3.0, 2.0, 1.0);
  rigidbody::OrbitSearch search;
  search.samples_per_period = 2000;
  const std::vector<Vec3> seeds = {{2.0, 0.3, 0.1}, {1.0, 0.0, 0.0}, {0.2, 0.3, 1.5}};
  const auto s = rigid_body_phase_sweep(seeds, body, search, Execution::Serial);
  const auto p = rigid_body_phase_sweep(seeds, body, search, Execution::Parallel);
  ASSERT_EQ(s.size(), 3u);
  EXPECT_FALSE(s[1].report);
  EXPECT_FALSE(s[1].error.empty());
  for (const std::size_t i : {0u, 2u}) {
    ASSERT_TRUE(s[i].report && p[i].report);
    EXPECT_EQ(s[i].report->direct, p[i].report->direct);
    EXPECT_EQ(s[i].report->method("solid_angle").total, p[i].report->method("solid_angle").total);
  }
}
