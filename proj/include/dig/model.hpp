#ifndef DIG_MODEL_HPP
#define DIG_MODEL_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dig/block.hpp"

namespace dig {

class Rng;

// Square boolean matrix; entry (i, j) means an edge from node i to node j.
// The diagonal is always false.
class Adjacency {
public:
  Adjacency() = default;
  explicit Adjacency(int nodes);

  static Adjacency from_rows(const std::vector<std::vector<int>> &rows);

  int nodes() const noexcept { return nodes_; }
  bool operator()(int i, int j) const;
  void set(int i, int j, bool value);
  // Off-diagonal entries equal to true / false.
  int edge_count() const;
  int absent_count() const;

  bool operator==(const Adjacency &other) const = default;

private:
  int nodes_ = 0;
  std::vector<std::uint8_t> cells_;
};

// Index-set sizes of the full and factorized transition families.
struct DimensionSpec {
  std::int64_t r = 0;
  std::int64_t d = 0;
  std::int64_t d_prime = 0;
  std::int64_t dof_null = 0; // r - d - d'
};

DimensionSpec dimensions(int m, int k, int alphabet_size);

// Law of the next symbol of one node given the k-step past of its context
// nodes (the node itself and its parents, ascending). Row-major table with
// one row per context value; the context is encoded node-major, time-minor
// and the next symbol is the least significant digit of the flat index.
struct NodeConditional {
  std::vector<int> context_nodes;
  std::vector<double> table;
};

class JointMarkovModel {
public:
  // Validates every invariant (row sums, epsilon floor, context sets that
  // match the adjacency). Throws dig::Error on violation.
  JointMarkovModel(int m, int k, int alphabet, Adjacency parents, double epsilon,
                   std::vector<NodeConditional> conditionals,
                   std::optional<std::uint64_t> seed = std::nullopt);

  int nodes() const noexcept { return m_; }
  int order() const noexcept { return k_; }
  int alphabet() const noexcept { return alphabet_; }
  double epsilon() const noexcept { return epsilon_; }
  std::optional<std::uint64_t> seed() const noexcept { return seed_; }
  const Adjacency &parents() const noexcept { return parents_; }
  const NodeConditional &conditional(int node) const;

  // Number of lifted states (joint k-pasts), A^{mk}.
  std::uint64_t lifted_state_count() const;
  // Cells of the full (k+1)-block table, A^{m(k+1)}.
  std::uint64_t block_cell_count() const;
  bool fits_exact_analysis() const;

  // Row of node `node`'s conditional for the lifted state `state` (full
  // node-major k-block code).
  std::size_t context_row(int node, std::size_t state) const;

  double next_probability(int node, std::size_t state, int symbol) const;

private:
  int m_;
  int k_;
  int alphabet_;
  Adjacency parents_;
  double epsilon_;
  std::vector<NodeConditional> conditionals_;
  std::optional<std::uint64_t> seed_;
};

// Stationary law of the full (k+1)-block of all nodes, plus the k-block
// marginal of the lifted chain it was extended from.
struct StationaryBlockDistribution {
  BlockLayout layout;               // all nodes, times 0..k
  std::vector<double> probabilities;
  std::vector<double> state_probabilities; // lifted chain, A^{mk}
};

inline constexpr double kDeltaFloor = 0.01;
inline constexpr int kMaxModelRetries = 100;
inline constexpr double kDefaultEpsilon = 0.02;
inline constexpr double kEdgePresenceCutoff = 1e-9;

// Draws a model whose node conditionals depend on the pasts of exactly the
// node and its parents. Rows are Dirichlet(1) draws lifted onto
// [epsilon, 1]. The whole model is redrawn until every edge carries at
// least `delta_floor` nats of exact directed information.
JointMarkovModel build_random_model(int m, int k, int alphabet,
                                    const Adjacency &adjacency, double epsilon,
                                    std::uint64_t seed,
                                    double delta_floor = kDeltaFloor,
                                    int max_retries = kMaxModelRetries);

// One random row-stochastic conditional for `node` with the given parents.
NodeConditional random_conditional(int node, const std::vector<int> &parent_nodes,
                                   int k, int alphabet, double epsilon, Rng &rng);

StationaryBlockDistribution stationary_distribution(const JointMarkovModel &model);

// || pi P - pi ||_1 for the lifted chain.
double stationary_residual(const JointMarkovModel &model,
                           const StationaryBlockDistribution &dist);

double exact_directed_info(const JointMarkovModel &model, int source, int target);
double exact_directed_info(const JointMarkovModel &model,
                           const StationaryBlockDistribution &dist, int source,
                           int target);

Adjacency true_adjacency(const JointMarkovModel &model);

// m = 3, k = 1, binary: node 0 i.i.d. uniform, node 1 repeats node 0's
// previous symbol flipped with probability `flip`, node 2 i.i.d. uniform.
JointMarkovModel binary_channel_model(double flip);

// Every node i.i.d. uniform, no edges.
JointMarkovModel uniform_independent_model(int m, int k, int alphabet);

// Parses an adjacency description for m nodes: "none", "all", a list of
// edges such as "0>1,2>0", "density=p" (each off-diagonal entry drawn with
// probability p from `seed`), or matrix rows such as "010;001;000".
Adjacency adjacency_from_spec(const std::string &spec, int m, std::uint64_t seed);

std::string model_to_json(const JointMarkovModel &model);
JointMarkovModel model_from_json(const std::string &text);
void save_model(const JointMarkovModel &model, const std::string &path);
JointMarkovModel load_model(const std::string &path);

} // namespace dig

#endif // DIG_MODEL_HPP
