#include "dig/graphtest.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "dig/error.hpp"
#include "dig/format.hpp"

namespace dig {

namespace {

double clamp01(double p) { return std::clamp(p, 0.0, 1.0); }

double null_tail(const DimensionSpec &dims, double i_th) {
  return reg_gamma_Q(0.5 * static_cast<double>(dims.r), i_th);
}

} // namespace

bool edge_decision(const EdgeStatistic &stat, double i_th) {
  return stat.lambda >= i_th;
}

TestReport graph_estimate(const SamplePath &path, const TestConfig &config) {
  require(config.i_th > 0.0, ErrorKind::Domain, "threshold must be positive");
  const auto dist = empirical_block_distribution(path, config.k);
  TestReport report;
  report.estimated = Adjacency(path.m);
  report.i_th = config.i_th;
  for (int i = 0; i < path.m; ++i) {
    for (int j = 0; j < path.m; ++j) {
      if (i == j) {
        continue;
      }
      EdgeStatistic stat = plug_in_directed_info(dist, i, j);
      report.estimated.set(i, j, edge_decision(stat, config.i_th));
      report.per_edge.push_back(stat);
    }
  }
  return report;
}

TestReport hypothesis_test(const SamplePath &path, const TestConfig &config,
                           const Adjacency &v_star) {
  require(v_star.nodes() == path.m, ErrorKind::Domain,
          "hypothesis matrix size does not match the path");
  TestReport report = graph_estimate(path, config);
  report.hypothesis = v_star;
  report.accepted = report.estimated == v_star;
  report.bounds = BoundPair{false_alarm_upper_bound(config.dims, config.i_th),
                            detection_lower_bound(config.dims, config.i_th,
                                                  v_star.absent_count())};
  return report;
}

Probability false_alarm_upper_bound(const DimensionSpec &dims, double i_th) {
  require(i_th > 0.0, ErrorKind::Domain, "threshold must be positive");
  return Probability(null_tail(dims, i_th));
}

Probability detection_lower_bound(const DimensionSpec &dims, double i_th, int n0) {
  require(i_th > 0.0, ErrorKind::Domain, "threshold must be positive");
  require(n0 >= 0, ErrorKind::Domain, "n0 must be nonnegative");
  if (n0 == 0) {
    return Probability(1.0);
  }
  return Probability(clamp01(1.0 - n0 * null_tail(dims, i_th)));
}

FiniteNBounds finite_n_bounds(const DimensionSpec &dims, double i_th, std::int64_t n,
                              int k, double i_bar_min, double sigma, int n0, int n1) {
  require(i_th > 0.0, ErrorKind::Domain, "threshold must be positive");
  require(i_bar_min > 0.0, ErrorKind::Domain, "minimum directed information must be positive");
  require(sigma > 0.0, ErrorKind::Domain, "sigma must be positive");
  require(n > k, ErrorKind::Domain, "n must exceed k");
  require(n0 >= 0 && n1 >= 0, ErrorKind::Domain, "edge counts must be nonnegative");
  const double windows = static_cast<double>(n - k);
  const double z = (i_th - windows * i_bar_min) / (std::sqrt(windows) * sigma);
  const double miss = 1.0 - q_function(z);
  const double tail = null_tail(dims, i_th);
  FiniteNBounds out;
  out.pf_if_edge_present = Probability(clamp01(miss));
  out.pf_if_edge_absent = Probability(clamp01(tail));
  out.pf_upper = Probability(std::max(out.pf_if_edge_present.value(),
                                      out.pf_if_edge_absent.value()));
  out.pd_lower = Probability(clamp01(1.0 - (n1 * miss + n0 * tail)));
  return out;
}

double calibrate_threshold(const DimensionSpec &dims, double target_pf,
                           bool single_edge) {
  require(target_pf > 0.0 && target_pf < 1.0, ErrorKind::Domain,
          "target false-alarm probability must lie in (0, 1)");
  const double a = 0.5 * static_cast<double>(single_edge ? dims.dof_null : dims.r);
  // 1 - P(a, x) decreases from 1 at x = 0 to 0; bracket then bisect.
  double lo = 0.0;
  double hi = std::max(1.0, a);
  int guard = 0;
  while (reg_gamma_Q(a, hi) > target_pf) {
    lo = hi;
    hi *= 2.0;
    require(++guard < 2000, ErrorKind::Domain, "target false-alarm probability unattainable");
  }
  for (int it = 0; it < 400 && hi - lo > 1e-10; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) {
      break; // interval at floating-point resolution
    }
    if (reg_gamma_Q(a, mid) > target_pf) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

std::string report_to_json(const TestReport &report) {
  auto matrix = [](const Adjacency &adj) {
    auto rows = nlohmann::ordered_json::array();
    for (int i = 0; i < adj.nodes(); ++i) {
      auto row = nlohmann::ordered_json::array();
      for (int j = 0; j < adj.nodes(); ++j) {
        row.push_back(adj(i, j) ? 1 : 0);
      }
      rows.push_back(row);
    }
    return rows;
  };
  nlohmann::ordered_json doc;
  doc["threshold"] = format_number(report.i_th);
  doc["estimated_adjacency"] = matrix(report.estimated);
  if (report.hypothesis) {
    doc["hypothesis"] = matrix(*report.hypothesis);
  } else {
    doc["hypothesis"] = nullptr;
  }
  if (report.accepted) {
    doc["accepted"] = *report.accepted;
  } else {
    doc["accepted"] = nullptr;
  }
  if (report.bounds) {
    doc["bounds"] = {{"pf_upper", format_number(report.bounds->pf_upper)},
                     {"pd_lower", format_number(report.bounds->pd_lower)}};
  } else {
    doc["bounds"] = nullptr;
  }
  doc["per_edge_csv"] = edge_statistics_csv(report.per_edge);
  return doc.dump(2) + "\n";
}

} // namespace dig
