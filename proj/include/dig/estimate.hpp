#ifndef DIG_ESTIMATE_HPP
#define DIG_ESTIMATE_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "dig/block.hpp"
#include "dig/simulate.hpp"

namespace dig {

// Sliding-window counts of (k+1)-blocks, or a marginal of them.
struct EmpiricalDistribution {
  BlockLayout layout;
  std::vector<std::uint64_t> counts;
  std::uint64_t total = 0; // n - k windows
  int m = 0;
  int k = 0;

  std::vector<double> probabilities() const;
};

struct EdgeStatistic {
  int i = 0;
  int j = 0;
  std::int64_t n = 0;
  int k = 0;
  double di_hat = 0.0; // nats
  double lambda = 0.0; // (n - k) * di_hat
};

// Counts every window x_t..x_{t+k} of all nodes, t = 0..n-k-1.
EmpiricalDistribution empirical_block_distribution(const SamplePath &path, int k);

EmpiricalDistribution marginalize(const EmpiricalDistribution &dist,
                                  const std::vector<Slot> &keep);

double empirical_entropy(const EmpiricalDistribution &dist);

// Plug-in I(X_j,k+1 ; X_i,1..k+1 | X_j,1..k, rest_1..k+1) from marginal
// entropies of one block table. Tiny negative round-off is clamped to 0.
EdgeStatistic plug_in_directed_info(const SamplePath &path, int k, int i, int j);
EdgeStatistic plug_in_directed_info(const EmpiricalDistribution &dist, int i, int j);

// Lambda = L(theta*) - L(phi*), with both maximized likelihoods evaluated as
// sums of per-step log transition probabilities along the path. theta* is
// the empirical full transition; phi* the product of the empirical
// "everything but j" transition and the empirical law of j's next symbol
// given its own past and the other nodes' blocks.
double log_likelihood_ratio(const SamplePath &path, int k, int i, int j);

std::string edge_statistics_csv(const std::vector<EdgeStatistic> &stats);

} // namespace dig

#endif // DIG_ESTIMATE_HPP
