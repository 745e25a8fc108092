#include <doctest.h>

#include <algorithm>
#include <array>
#include <cmath>

#include "dig/error.hpp"
#include "dig/graphtest.hpp"
#include "dig/parallel.hpp"
#include "test_support.hpp"

namespace {
#include "oracles/special_values.inc"

double quantile(long dof, double level) {
  for (const auto &o : kChiSquareQuantile) {
    if (o.dof == dof && o.level == level) {
      return o.quantile;
    }
  }
  return -1.0;
}
} // namespace

using namespace dig;

TEST_CASE("edge decision detects on ties") {
  EdgeStatistic s;
  s.lambda = 0.0;
  CHECK_FALSE(edge_decision(s, 1.0));
  s.lambda = 3.25;
  CHECK(edge_decision(s, 3.25));
  CHECK_FALSE(edge_decision(s, std::nextafter(3.25, 4.0)));
  s.lambda = 48.0;
  CHECK(edge_decision(s, 12.0));
}

TEST_CASE("false alarm bound") {
  const DimensionSpec dims = dimensions(5, 2, 2);
  CHECK(false_alarm_upper_bound(dims, 1e-6) == doctest::Approx(1.0));
  CHECK(false_alarm_upper_bound(dims, 1e6) < 1e-12);
  const double mid = false_alarm_upper_bound(dims, 15872.0);
  CHECK(mid > 0.45);
  CHECK(mid < 0.55);
  CHECK_THROWS_AS(false_alarm_upper_bound(dims, 0.0), Error);
}

TEST_CASE("detection bound") {
  const DimensionSpec dims = dimensions(5, 2, 2);
  CHECK(detection_lower_bound(dims, 10.0, 0) == 1.0);
  CHECK(detection_lower_bound(dims, 1e-3, 4) == 0.0);
  for (double i_th = 15000.0; i_th < 17000.0; i_th += 100.0) {
    CHECK(detection_lower_bound(dims, i_th, 4) >= detection_lower_bound(dims, i_th, 12));
  }
  CHECK_THROWS_AS(detection_lower_bound(dims, 1.0, -1), Error);
}

TEST_CASE("bounds are monotone in the threshold") {
  const DimensionSpec dims = dimensions(3, 1, 2);
  double pf_prev = 1.0;
  double pd_prev = 0.0;
  for (double i_th = 0.5; i_th < 120.0; i_th += 0.5) {
    const double pf = false_alarm_upper_bound(dims, i_th);
    const double pd = detection_lower_bound(dims, i_th, 6);
    CHECK(pf <= pf_prev);
    CHECK(pd >= pd_prev);
    CHECK(pf >= 0.0);
    CHECK(pd <= 1.0);
    pf_prev = pf;
    pd_prev = pd;
  }
}

TEST_CASE("finite-n bounds") {
  const DimensionSpec dims = dimensions(3, 1, 2);
  SUBCASE("large n recovers the asymptotic bounds") {
    const FiniteNBounds b = finite_n_bounds(dims, 30.0, 10000000, 1, 0.1, 0.7, 4, 2);
    CHECK(b.pf_if_edge_present < 1e-12);
    CHECK(b.pf_if_edge_absent == doctest::Approx(false_alarm_upper_bound(dims, 30.0)));
    CHECK(b.pd_lower == doctest::Approx(detection_lower_bound(dims, 30.0, 4)).epsilon(1e-12));
    CHECK(b.pf_upper == std::max(b.pf_if_edge_present.value(), b.pf_if_edge_absent.value()));
  }
  SUBCASE("no true edges reduces to the asymptotic detection bound") {
    const FiniteNBounds b = finite_n_bounds(dims, 30.0, 1000, 1, 0.05, 0.7, 4, 0);
    CHECK(b.pd_lower == doctest::Approx(detection_lower_bound(dims, 30.0, 4)));
  }
  SUBCASE("threshold equal to the mean statistic puts one half in the N1 term") {
    const double i_th = 999.0 * 0.02;
    const FiniteNBounds b = finite_n_bounds(dims, i_th, 1000, 1, 0.02, 0.7, 0, 1);
    CHECK(b.pd_lower == doctest::Approx(0.5));
    CHECK(b.pf_if_edge_present == doctest::Approx(0.5));
  }
  CHECK_THROWS_AS(finite_n_bounds(dims, 30.0, 1000, 1, 0.0, 0.7, 4, 2), Error);
  CHECK_THROWS_AS(finite_n_bounds(dims, 30.0, 1000, 1, 0.1, 0.0, 4, 2), Error);
  CHECK_THROWS_AS(finite_n_bounds(dims, 30.0, 1, 1, 0.1, 0.7, 4, 2), Error);
}

TEST_CASE("threshold calibration") {
  DimensionSpec one;
  one.r = 2;
  one.dof_null = 2;
  CHECK(calibrate_threshold(one, 0.5, false) == doctest::Approx(std::log(2.0)).epsilon(1e-10));

  const DimensionSpec dims = dimensions(3, 1, 2);
  CHECK(calibrate_threshold(dims, 0.01, true) ==
        doctest::Approx(quantile(24, 0.99) / 2.0).epsilon(1e-10));
  CHECK(calibrate_threshold(dims, 0.01, false) ==
        doctest::Approx(quantile(56, 0.99) / 2.0).epsilon(1e-10));

  for (double p : {0.9, 0.5, 0.05, 1e-4, 1e-9}) {
    for (const DimensionSpec &d : {dims, dimensions(5, 2, 2)}) {
      CHECK(std::abs(false_alarm_upper_bound(d, calibrate_threshold(d, p, false)) - p) <= 1e-9);
    }
  }
  CHECK_THROWS_AS(calibrate_threshold(dims, 0.0, false), Error);
  CHECK_THROWS_AS(calibrate_threshold(dims, 1.0, false), Error);
}

TEST_CASE("hypothesis test against the estimate and its complement") {
  const SamplePath path = test::lcg_path(400, 3);
  TestConfig config{5.0, 1, dimensions(3, 1, 2)};
  const TestReport est = graph_estimate(path, config);
  CHECK(est.per_edge.size() == 6);
  CHECK_FALSE(est.accepted.has_value());

  const TestReport same = hypothesis_test(path, config, est.estimated);
  CHECK(same.accepted == true);
  REQUIRE(same.bounds.has_value());
  CHECK(same.bounds->pd_lower ==
        detection_lower_bound(config.dims, 5.0, est.estimated.absent_count()));

  Adjacency complement(3);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      complement.set(i, j, !est.estimated(i, j));
    }
  }
  CHECK(hypothesis_test(path, config, complement).accepted == false);
  CHECK_THROWS_AS(hypothesis_test(path, config, Adjacency(4)), Error);
  config.i_th = 0.0;
  CHECK_THROWS_AS(graph_estimate(path, config), Error);
}

TEST_CASE("degenerate path just above k still yields a report") {
  const SamplePath path = test::lcg_path(3, 3);
  const TestReport r = graph_estimate(path, TestConfig{1.0, 1, dimensions(3, 1, 2)});
  CHECK(r.per_edge.size() == 6);
}

TEST_CASE("graph estimate is permutation equivariant") {
  const SamplePath path = test::lcg_path(500, 3);
  const std::array<int, 3> perm{2, 0, 1}; // node v moves to perm[v]
  SamplePath moved = path;
  for (std::int64_t t = 0; t < path.n; ++t) {
    for (int v = 0; v < 3; ++v) {
      moved.symbols[static_cast<std::size_t>(t * 3 + perm[v])] =
          static_cast<std::uint8_t>(path.at(t, v));
    }
  }
  const TestConfig config{3.0, 1, dimensions(3, 1, 2)};
  const TestReport a = graph_estimate(path, config);
  const TestReport b = graph_estimate(moved, config);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      CHECK(a.estimated(i, j) == b.estimated(perm[i], perm[j]));
    }
  }
}

TEST_CASE("report JSON layout") {
  const SamplePath path = test::lcg_path(400, 3);
  const TestConfig config{5.0, 1, dimensions(3, 1, 2)};
  const TestReport r = graph_estimate(path, config);
  const std::string json = report_to_json(hypothesis_test(path, config, r.estimated));
  CHECK(json.find("\"estimated_adjacency\"") != std::string::npos);
  CHECK(json.find("\"accepted\": true") != std::string::npos);
  CHECK(json.find("\"pf_upper\": \"") != std::string::npos);
  CHECK(json.find("\"per_edge_csv\"") != std::string::npos);
}

namespace {

// Fraction of `seeds` replicas whose estimate equals `expected`.
double match_rate(const JointMarkovModel &model, double i_th, const Adjacency &expected,
                  std::uint64_t base_seed, std::size_t seeds) {
  const TestConfig config{i_th, model.order(),
                          dimensions(model.nodes(), model.order(), model.alphabet())};
  const Simulator sim(model);
  std::vector<int> hits(seeds, 0);
  parallel_for(seeds, [&](std::size_t s) {
    hits[s] = graph_estimate(sim.run(100000, 0, base_seed + s), config).estimated == expected;
  });
  return static_cast<double>(std::count(hits.begin(), hits.end(), 1)) /
         static_cast<double>(seeds);
}

} // namespace

TEST_CASE("Monte Carlo: all-false model is estimated empty") {
  const JointMarkovModel model = build_random_model(3, 1, 2, Adjacency(3), 0.02, 21);
  const double i_th = quantile(24, 0.999) / 2.0;
  CHECK(match_rate(model, i_th, Adjacency(3), 500, 100) >= 0.95);
}

TEST_CASE("Monte Carlo: single true edge is recovered") {
  const JointMarkovModel model = binary_channel_model(0.1);
  const double i_th = quantile(24, 0.999) / 2.0;
  CHECK(match_rate(model, i_th, model.parents(), 700, 100) >= 0.95);
}

TEST_CASE("Monte Carlo: acceptance rate respects the detection bound") {
  const JointMarkovModel model = binary_channel_model(0.1);
  const DimensionSpec dims = dimensions(3, 1, 2);
  const double i_th = calibrate_threshold(dims, 0.01, true);
  const int n0 = model.parents().absent_count();
  const double bound = 1.0 - n0 * (1.0 - chi2_cdf(dims.dof_null, 2.0 * i_th)) - 0.05;
  CHECK(match_rate(model, i_th, model.parents(), 900, 200) >= bound);
}
