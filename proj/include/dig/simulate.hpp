#ifndef DIG_SIMULATE_HPP
#define DIG_SIMULATE_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "dig/model.hpp"

namespace dig {

// n time steps of m symbols, stored time-major (row t holds all nodes).
struct SamplePath {
  int m = 0;
  int k = 0;          // order of the generating model; 0 when unknown
  int alphabet = 0;
  std::int64_t n = 0;
  std::uint64_t seed = 0;
  std::int64_t burn_in = 0;
  std::vector<std::uint8_t> symbols;

  int at(std::int64_t t, int node) const {
    return symbols[static_cast<std::size_t>(t) * static_cast<std::size_t>(m) +
                   static_cast<std::size_t>(node)];
  }
};

inline std::int64_t default_burn_in(int k) { return 1000 * static_cast<std::int64_t>(k); }

// Precomputed sampling tables for one model. Starting states come from the
// exact stationary k-block law when the model fits the exact-analysis guard,
// otherwise from a uniform state followed by burn-in.
class Simulator {
public:
  explicit Simulator(const JointMarkovModel &model);

  bool has_stationary_start() const noexcept { return !start_cdf_.empty(); }

  SamplePath run(std::int64_t n, std::int64_t burn_in, std::uint64_t seed) const;

private:
  const JointMarkovModel *model_;
  std::vector<std::vector<double>> cumulative_; // per node, row-major CDFs
  std::vector<double> start_cdf_;
};

SamplePath simulate(const JointMarkovModel &model, std::int64_t n,
                    std::int64_t burn_in, std::uint64_t seed);

// Replica r uses seed base_seed + r. Output does not depend on `workers`.
std::vector<SamplePath> simulate_replicas(const JointMarkovModel &model,
                                          std::int64_t n, std::int64_t burn_in,
                                          std::uint64_t base_seed, std::size_t count,
                                          std::size_t workers = 0);

// CSV with header t,node0,...,node{m-1}; one row per time step.
std::string path_to_csv(const SamplePath &path);
SamplePath path_from_csv(const std::string &text);
void save_path_csv(const SamplePath &path, const std::string &file);
SamplePath load_path_csv(const std::string &file);

} // namespace dig

#endif // DIG_SIMULATE_HPP
