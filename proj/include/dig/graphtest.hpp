#ifndef DIG_GRAPHTEST_HPP
#define DIG_GRAPHTEST_HPP

#include <optional>
#include <string>
#include <vector>

#include "dig/estimate.hpp"
#include "dig/model.hpp"
#include "dig/numerics.hpp"

namespace dig {

struct TestConfig {
  double i_th = 0.0;
  int k = 1;
  DimensionSpec dims;
};

struct BoundPair {
  Probability pf_upper;
  Probability pd_lower;
};

struct TestReport {
  Adjacency estimated;
  std::vector<EdgeStatistic> per_edge;
  double i_th = 0.0;
  std::optional<Adjacency> hypothesis;
  std::optional<bool> accepted;
  std::optional<BoundPair> bounds;
};

// Edge present iff lambda >= i_th (ties count as detections).
bool edge_decision(const EdgeStatistic &stat, double i_th);

TestReport graph_estimate(const SamplePath &path, const TestConfig &config);

// Fills `accepted` and the asymptotic bounds with N0 taken from v_star.
TestReport hypothesis_test(const SamplePath &path, const TestConfig &config,
                           const Adjacency &v_star);

// 1 - P_G(r/2, i_th)
Probability false_alarm_upper_bound(const DimensionSpec &dims, double i_th);

// max{1 - n0 (1 - P_G(r/2, i_th)), 0}
Probability detection_lower_bound(const DimensionSpec &dims, double i_th, int n0);

struct FiniteNBounds {
  Probability pf_if_edge_present; // branch where the differing edge is true
  Probability pf_if_edge_absent;  // branch where the differing edge is absent
  Probability pf_upper;           // max of the two branches
  Probability pd_lower;
};

FiniteNBounds finite_n_bounds(const DimensionSpec &dims, double i_th, std::int64_t n,
                              int k, double i_bar_min, double sigma, int n0, int n1);

// Threshold with 1 - P_G(a, i_th) = target_pf, a = r/2 for whole-graph tests
// and a = (r - d - d')/2 for a single edge. Bisection to 1e-10.
double calibrate_threshold(const DimensionSpec &dims, double target_pf,
                           bool single_edge);

std::string report_to_json(const TestReport &report);

} // namespace dig

#endif // DIG_GRAPHTEST_HPP
