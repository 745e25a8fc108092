#include <doctest.h>

#include <cmath>

#include "dig/error.hpp"
#include "dig/estimate.hpp"
#include "test_support.hpp"

namespace {
#include "oracles/di_values.inc"
}

using namespace dig;

TEST_CASE("plug-in directed information matches the independent oracle") {
  const SamplePath path = test::lcg_path(400, 3);
  for (const auto &o : kPlugInOracle) {
    CAPTURE(o.k);
    CAPTURE(o.i);
    CAPTURE(o.j);
    const EdgeStatistic s = plug_in_directed_info(path, o.k, o.i, o.j);
    CHECK(s.di_hat == doctest::Approx(o.di).epsilon(1e-10));
    CHECK(s.lambda == doctest::Approx((400 - o.k) * o.di).epsilon(1e-10));
    CHECK(s.n == 400);
  }
}

TEST_CASE("log-likelihood ratio equals (n-k) times the plug-in estimate") {
  const SamplePath path = test::lcg_path(400, 3);
  for (int k : {1, 2}) {
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        if (i == j) {
          continue;
        }
        const double lambda = log_likelihood_ratio(path, k, i, j);
        const double plug = plug_in_directed_info(path, k, i, j).lambda;
        CHECK(lambda == doctest::Approx(plug).epsilon(1e-9));
      }
    }
  }
}

TEST_CASE("block counts and marginals") {
  const SamplePath path = test::lcg_path(100, 3);
  const EmpiricalDistribution dist = empirical_block_distribution(path, 1);
  CHECK(dist.total == 99);
  CHECK(dist.counts.size() == 64);
  std::uint64_t sum = 0;
  for (auto c : dist.counts) {
    sum += c;
  }
  CHECK(sum == 99);

  const EmpiricalDistribution node0 = marginalize(dist, {{0, 0}, {0, 1}});
  CHECK(node0.counts.size() == 4);
  // Direct count of consecutive pairs of node 0.
  std::vector<std::uint64_t> direct(4, 0);
  for (std::int64_t t = 0; t + 1 < path.n; ++t) {
    ++direct[static_cast<std::size_t>(path.at(t, 0) * 2 + path.at(t + 1, 0))];
  }
  CHECK(node0.counts == direct);
  CHECK_THROWS_AS(marginalize(dist, {}), Error);
  CHECK_THROWS_AS(empirical_block_distribution(path, 100), Error);
}

TEST_CASE("empirical entropy of a constant path is zero") {
  SamplePath path;
  path.m = 2;
  path.alphabet = 2;
  path.n = 50;
  path.symbols.assign(100, 1);
  const EmpiricalDistribution dist = empirical_block_distribution(path, 1);
  CHECK(empirical_entropy(dist) == 0.0);
  CHECK(plug_in_directed_info(dist, 0, 1).di_hat == 0.0);
}

TEST_CASE("estimate is nonnegative and invariant to relabeling") {
  const SamplePath path = test::lcg_path(300, 3);
  SamplePath flipped = path;
  for (auto &s : flipped.symbols) {
    s = static_cast<std::uint8_t>(1 - s);
  }
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      if (i == j) {
        continue;
      }
      const double a = plug_in_directed_info(path, 1, i, j).di_hat;
      CHECK(a >= 0.0);
      CHECK(plug_in_directed_info(flipped, 1, i, j).di_hat == doctest::Approx(a).epsilon(1e-12));
    }
  }
}

TEST_CASE("plug-in estimate converges to the exact value") {
  const JointMarkovModel model = binary_channel_model(0.1);
  const SamplePath path = simulate(model, 200000, 0, 77);
  const double exact = std::log(2.0) - test::binary_entropy(0.1);
  const double est = plug_in_directed_info(path, 1, 0, 1).di_hat;
  // sd of the estimate is about 0.66 / sqrt(n) = 1.5e-3.
  CHECK(std::abs(est - exact) < 8e-3);
  CHECK(plug_in_directed_info(path, 1, 0, 2).di_hat < 1e-3);
}

TEST_CASE("estimation argument errors") {
  const SamplePath path = test::lcg_path(50, 3);
  CHECK_THROWS_AS(plug_in_directed_info(path, 1, 0, 0), Error);
  CHECK_THROWS_AS(plug_in_directed_info(path, 1, 0, 3), Error);
  CHECK_THROWS_AS(plug_in_directed_info(path, 0, 0, 1), Error);
  CHECK_THROWS_AS(log_likelihood_ratio(path, 1, 2, 2), Error);
}

TEST_CASE("edge statistics CSV") {
  const SamplePath path = test::lcg_path(50, 3);
  const std::string csv = edge_statistics_csv({plug_in_directed_info(path, 1, 0, 1)});
  CHECK(csv.rfind("i,j,n,k,di_hat,lambda\n0,1,50,1,", 0) == 0);
}
