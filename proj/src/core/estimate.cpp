#include "dig/estimate.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "dig/error.hpp"
#include "dig/format.hpp"

namespace dig {

namespace {

void check_edge(int m, int i, int j) {
  require(i >= 0 && j >= 0 && i < m && j < m, ErrorKind::Domain,
          "edge index out of range");
  require(i != j, ErrorKind::Domain, "edge needs two distinct nodes");
}

// Rolling code of every window over `layout` (a subset of the full block).
// Slots are grouped per node and each node keeps a rolling (k+1)-window.
std::vector<std::size_t> window_codes(const SamplePath &path, int k,
                                      const BlockLayout &layout) {
  const std::size_t a = static_cast<std::size_t>(path.alphabet);
  const std::size_t windows = static_cast<std::size_t>(path.n - k);
  std::vector<std::size_t> codes(windows, 0);
  std::size_t weight = 1;
  const auto &slots = layout.slots();
  for (std::size_t p = slots.size(); p-- > 0;) {
    const Slot s = slots[p];
    for (std::size_t t = 0; t < windows; ++t) {
      codes[t] += weight * static_cast<std::size_t>(
                               path.at(static_cast<std::int64_t>(t) + s.time, s.node));
    }
    weight *= a;
  }
  return codes;
}

} // namespace

std::vector<double> EmpiricalDistribution::probabilities() const {
  std::vector<double> p(counts.size());
  const double n = static_cast<double>(total);
  for (std::size_t c = 0; c < counts.size(); ++c) {
    p[c] = static_cast<double>(counts[c]) / n;
  }
  return p;
}

EmpiricalDistribution empirical_block_distribution(const SamplePath &path, int k) {
  require(k >= 0, ErrorKind::Domain, "order must be nonnegative");
  require(path.n > k, ErrorKind::Domain, "path must be longer than k");
  const int m = path.m;
  const std::size_t a = static_cast<std::size_t>(path.alphabet);
  BlockLayout layout = BlockLayout::full(m, k + 1, path.alphabet);
  std::size_t block_window = 1;
  for (int t = 0; t <= k; ++t) {
    block_window *= a;
  }

  std::vector<std::uint64_t> counts(layout.cell_count(), 0);
  // Per-node rolling (k+1)-windows; the joint code combines them node-major.
  std::vector<std::size_t> windows(static_cast<std::size_t>(m), 0);
  for (std::int64_t t = 0; t < k; ++t) {
    for (int j = 0; j < m; ++j) {
      windows[static_cast<std::size_t>(j)] =
          windows[static_cast<std::size_t>(j)] * a + static_cast<std::size_t>(path.at(t, j));
    }
  }
  for (std::int64_t t = k; t < path.n; ++t) {
    std::size_t code = 0;
    for (int j = 0; j < m; ++j) {
      auto &w = windows[static_cast<std::size_t>(j)];
      w = (w * a + static_cast<std::size_t>(path.at(t, j))) % block_window;
      code = code * block_window + w;
    }
    ++counts[code];
  }
  return EmpiricalDistribution{std::move(layout), std::move(counts),
                               static_cast<std::uint64_t>(path.n - k), m, k};
}

EmpiricalDistribution marginalize(const EmpiricalDistribution &dist,
                                  const std::vector<Slot> &keep) {
  require(!keep.empty(), ErrorKind::Domain, "marginalize: keep set is empty");
  std::vector<Slot> sorted = keep;
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  for (const Slot &s : sorted) {
    require(dist.layout.position(s) >= 0, ErrorKind::Domain,
            "marginalize: slot not present in distribution");
  }
  BlockLayout target(dist.layout.alphabet(), std::move(sorted));
  auto counts = marginal_values<std::uint64_t>(dist.layout, dist.counts, target);
  return EmpiricalDistribution{std::move(target), std::move(counts), dist.total,
                               dist.m, dist.k};
}

double empirical_entropy(const EmpiricalDistribution &dist) {
  return entropy(dist.probabilities());
}

EdgeStatistic plug_in_directed_info(const EmpiricalDistribution &dist, int i, int j) {
  check_edge(dist.m, i, j);
  const auto probabilities = dist.probabilities();
  const double di =
      std::max(0.0, conditional_directed_info(dist.layout, probabilities, i, j));
  EdgeStatistic stat;
  stat.i = i;
  stat.j = j;
  stat.k = dist.k;
  stat.n = static_cast<std::int64_t>(dist.total) + dist.k;
  stat.di_hat = di;
  stat.lambda = static_cast<double>(dist.total) * di;
  return stat;
}

EdgeStatistic plug_in_directed_info(const SamplePath &path, int k, int i, int j) {
  check_edge(path.m, i, j);
  require(k >= 1, ErrorKind::Domain, "order must be at least 1");
  return plug_in_directed_info(empirical_block_distribution(path, k), i, j);
}

double log_likelihood_ratio(const SamplePath &path, int k, int i, int j) {
  check_edge(path.m, i, j);
  require(k >= 1, ErrorKind::Domain, "order must be at least 1");
  require(path.n > k, ErrorKind::Domain, "path must be longer than k");
  const BlockLayout full = BlockLayout::full(path.m, k + 1, path.alphabet);
  const BlockLayout past = full.restrict_to([&](Slot s) { return s.time < k; });
  const auto layouts = directed_info_layouts(full, i, j);

  // Codes for each window over the slot sets the two likelihoods need.
  const auto full_code = window_codes(path, k, full);
  const auto past_code = window_codes(path, k, past);
  const auto rest_code = window_codes(path, k, layouts.without_target_now);
  const auto target_code = window_codes(path, k, layouts.without_source);
  const auto target_ctx_code = window_codes(path, k, layouts.conditioning);

  using Counter = std::unordered_map<std::size_t, double>;
  auto tally = [](const std::vector<std::size_t> &codes) {
    Counter c;
    for (std::size_t code : codes) {
      c[code] += 1.0;
    }
    return c;
  };
  const Counter n_full = tally(full_code);
  const Counter n_past = tally(past_code);
  const Counter n_rest = tally(rest_code);
  const Counter n_target = tally(target_code);
  const Counter n_target_ctx = tally(target_ctx_code);

  // L(theta*) = sum_t log Nfull/Npast ;
  // L(phi*)   = sum_t log Nrest/Npast + log Ntarget/Ntarget_ctx.
  double theta = 0.0;
  double phi = 0.0;
  for (std::size_t t = 0; t < full_code.size(); ++t) {
    const double past_n = n_past.at(past_code[t]);
    theta += std::log(n_full.at(full_code[t]) / past_n);
    phi += std::log(n_rest.at(rest_code[t]) / past_n) +
           std::log(n_target.at(target_code[t]) / n_target_ctx.at(target_ctx_code[t]));
  }
  return theta - phi;
}

std::string edge_statistics_csv(const std::vector<EdgeStatistic> &stats) {
  std::string out = "i,j,n,k,di_hat,lambda\n";
  for (const auto &s : stats) {
    out += std::to_string(s.i) + ',' + std::to_string(s.j) + ',' + std::to_string(s.n) +
           ',' + std::to_string(s.k) + ',' + format_number(s.di_hat) + ',' +
           format_number(s.lambda) + '\n';
  }
  return out;
}

} // namespace dig
