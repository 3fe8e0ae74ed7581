#include <cmath>
#include <sstream>

#include "doctest.h"
#include "sklimit/noise.hpp"

using namespace sklimit;

TEST_CASE("philox4x32-10 known-answer vectors") {
  using C = Philox4x32::Counter;
  using K = Philox4x32::Key;
  CHECK(Philox4x32::block(C{0, 0, 0, 0}, K{0, 0}) ==
        C{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
  CHECK(Philox4x32::block(C{0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff},
                          K{0xffffffff, 0xffffffff}) ==
        C{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
  CHECK(Philox4x32::block(C{0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344},
                          K{0xa4093822, 0x299f31d0}) ==
        C{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("sample_path is keyed by seed, stream and index") {
  const WienerPath a = sample_path(1.0, 4, 42);
  const WienerPath b = sample_path(1.0, 4, 42);
  CHECK(a.steps() == 4);
  CHECK(a.dt == doctest::Approx(0.25));
  CHECK(a.increments == b.increments);

  CHECK(sample_path(1.0, 16, 1).increments != sample_path(1.0, 16, 2).increments);
  CHECK(sample_path(1.0, 16, 1, 0).increments != sample_path(1.0, 16, 1, 1).increments);

  // Each increment depends only on its own index, not on how many were drawn.
  const WienerPath longer = sample_path(7.0, 7, 9, 3);
  for (Eigen::Index n = 0; n < 7; ++n)
    CHECK(longer.increments[n] == standard_normal(9, 3, static_cast<std::uint64_t>(n)));
}

TEST_CASE("first increment has mean 0 and variance dt over regenerated paths") {
  constexpr int kPaths = 1'000'000;
  double sum = 0.0, sum_sq = 0.0;
  for (int s = 0; s < kPaths; ++s) {
    const double dw = sample_path(1.0, 4, static_cast<std::uint64_t>(s)).increments[0];
    sum += dw;
    sum_sq += dw * dw;
  }
  const double mean = sum / kPaths;
  const double var = sum_sq / kPaths - mean * mean;
  CHECK(std::abs(mean) < 4.0 * std::sqrt(0.25 / kPaths));
  CHECK(std::abs(var - 0.25) / 0.25 < 0.01);
}

TEST_CASE("cumulative reconstructs W exactly") {
  const WienerPath p = sample_path(2.0, 100, 5);
  const Eigen::VectorXd w = p.cumulative();
  REQUIRE(w.size() == 101);
  CHECK(w[0] == 0.0);
  double acc = 0.0;
  for (Eigen::Index n = 0; n < 100; ++n) {
    acc += p.increments[n];
    CHECK(w[n + 1] == acc);
  }
  CHECK(p.total() == acc);
  CHECK(p.t_final() == doctest::Approx(2.0));
}

TEST_CASE("coarsen sums blocks") {
  WienerPath p;
  p.dt = 0.5;
  p.seed = 11;
  p.increments = Eigen::VectorXd{{1.0, 2.0, 4.0, 8.0}};
  const WienerPath c = coarsen(p, 2);
  CHECK(c.increments == Eigen::VectorXd{{3.0, 12.0}});
  CHECK(c.dt == 1.0);
  CHECK(c.seed == 11);
  CHECK(coarsen(p, 1).increments == p.increments);
  CHECK_THROWS_AS(coarsen(p, 3), std::invalid_argument);
  CHECK_THROWS_AS(coarsen(p, 0), std::invalid_argument);
}

TEST_CASE("coarsen is associative and preserves W(T)") {
  const WienerPath p = sample_path(1.0, 4096, 77);
  const WienerPath twice = coarsen(coarsen(p, 2), 2);
  const WienerPath once = coarsen(p, 4);
  CHECK((twice.increments - once.increments).cwiseAbs().maxCoeff() <=
        1e-15 * p.increments.cwiseAbs().maxCoeff() * 4);
  for (Eigen::Index f : {1, 2, 8, 64, 4096}) {
    const double total = coarsen(p, f).total();
    CHECK(std::abs(total - p.total()) <= 1e-12 * p.increments.cwiseAbs().sum());
  }
}

TEST_CASE("coarsened increments have variance dt'") {
  const WienerPath p = sample_path(4.0e4, 1 << 21, 3);
  const WienerPath c = coarsen(p, 16);
  REQUIRE(c.steps() >= 100'000);
  const double var = c.increments.squaredNorm() / static_cast<double>(c.steps());
  CHECK(std::abs(var - c.dt) / c.dt < 0.02);
}

TEST_CASE("path csv has header and cumulative column") {
  WienerPath p;
  p.dt = 0.5;
  p.increments = Eigen::VectorXd{{1.0, -2.0}};
  std::ostringstream os;
  write_path_csv(os, p);
  CHECK(os.str() == "n,t,dW,W\n0,0,1,0\n1,0.5,-2,1\n2,1,,-1\n");
}

TEST_CASE("invalid arguments") {
  CHECK_THROWS_AS(sample_path(1.0, 0, 1), std::invalid_argument);
  CHECK_THROWS_AS(sample_path(-1.0, 4, 1), std::invalid_argument);
}
