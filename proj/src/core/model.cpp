#include "dig/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "dig/error.hpp"
#include "dig/rng.hpp"

namespace dig {

namespace {

constexpr double kRowSumTolerance = 1e-12;
constexpr double kStationaryTolerance = 1e-12;
constexpr long kStationaryMaxIterations = 1'000'000;

std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
  std::int64_t out = 0;
  require(!__builtin_mul_overflow(a, b, &out), ErrorKind::Domain,
          "dimension arithmetic overflows 64-bit integers");
  return out;
}

std::int64_t checked_pow(std::int64_t base, std::int64_t exponent) {
  std::int64_t out = 1;
  for (std::int64_t e = 0; e < exponent; ++e) {
    out = checked_mul(out, base);
  }
  return out;
}

std::uint64_t power(std::uint64_t base, int exponent) {
  std::uint64_t out = 1;
  for (int e = 0; e < exponent; ++e) {
    out *= base;
  }
  return out;
}

// Number of cells when the product stays within the exact-analysis guard,
// otherwise kMaxTableCells + 1.
std::uint64_t guarded_power(std::uint64_t base, int exponent) {
  std::uint64_t out = 1;
  for (int e = 0; e < exponent; ++e) {
    if (out > kMaxTableCells / base) {
      return kMaxTableCells + 1;
    }
    out *= base;
  }
  return out;
}

} // namespace

Adjacency::Adjacency(int nodes)
    : nodes_(nodes), cells_(static_cast<std::size_t>(nodes) * nodes, 0) {
  require(nodes >= 0, ErrorKind::Domain, "negative node count");
}

Adjacency Adjacency::from_rows(const std::vector<std::vector<int>> &rows) {
  Adjacency adj(static_cast<int>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    require(rows[i].size() == rows.size(), ErrorKind::Domain,
            "adjacency matrix must be square");
    for (std::size_t j = 0; j < rows.size(); ++j) {
      require(rows[i][j] == 0 || rows[i][j] == 1, ErrorKind::Domain,
              "adjacency entries must be 0 or 1");
      if (i != j) {
        adj.set(static_cast<int>(i), static_cast<int>(j), rows[i][j] == 1);
      }
    }
  }
  return adj;
}

bool Adjacency::operator()(int i, int j) const {
  require(i >= 0 && j >= 0 && i < nodes_ && j < nodes_, ErrorKind::Domain,
          "adjacency index out of range");
  return cells_[static_cast<std::size_t>(i) * nodes_ + j] != 0;
}

void Adjacency::set(int i, int j, bool value) {
  require(i >= 0 && j >= 0 && i < nodes_ && j < nodes_, ErrorKind::Domain,
          "adjacency index out of range");
  if (i != j) {
    cells_[static_cast<std::size_t>(i) * nodes_ + j] = value ? 1 : 0;
  }
}

int Adjacency::edge_count() const {
  return static_cast<int>(std::count(cells_.begin(), cells_.end(), 1));
}

int Adjacency::absent_count() const {
  return nodes_ * (nodes_ - 1) - edge_count();
}

DimensionSpec dimensions(int m, int k, int alphabet_size) {
  require(m >= 2 && k >= 1 && alphabet_size >= 2, ErrorKind::Domain,
          "dimensions: need m >= 2, k >= 1, |X| >= 2");
  const std::int64_t a = alphabet_size;
  const std::int64_t contexts = checked_pow(a, checked_mul(m, k));
  DimensionSpec dims;
  dims.r = checked_mul(contexts, checked_pow(a, m) - 1);
  dims.d = checked_mul(contexts, checked_pow(a, m - 1) - 1);
  // Target's next symbol given its own k-past and the (k+1)-blocks of the
  // remaining m - 2 nodes.
  const std::int64_t target_context =
      k + checked_mul(m - 2, static_cast<std::int64_t>(k) + 1);
  dims.d_prime = checked_mul(checked_pow(a, target_context), a - 1);
  dims.dof_null = dims.r - dims.d - dims.d_prime;
  require(dims.dof_null > 0, ErrorKind::Domain, "dimensions: r <= d + d'");
  return dims;
}

JointMarkovModel::JointMarkovModel(int m, int k, int alphabet, Adjacency parents,
                                   double epsilon,
                                   std::vector<NodeConditional> conditionals,
                                   std::optional<std::uint64_t> seed)
    : m_(m), k_(k), alphabet_(alphabet), parents_(std::move(parents)),
      epsilon_(epsilon), conditionals_(std::move(conditionals)), seed_(seed) {
  require(m_ >= 2, ErrorKind::Domain, "model needs at least 2 nodes");
  require(k_ >= 1, ErrorKind::Domain, "Markov order must be at least 1");
  require(alphabet_ >= 2 && alphabet_ <= 256, ErrorKind::Domain,
          "alphabet size must be in [2, 256]");
  require(parents_.nodes() == m_, ErrorKind::Domain,
          "adjacency size does not match node count");
  require(epsilon_ > 0.0 && epsilon_ * alphabet_ <= 1.0 + 1e-12,
          ErrorKind::Domain, "epsilon must satisfy 0 < epsilon * |X| <= 1");
  require(static_cast<int>(conditionals_.size()) == m_, ErrorKind::Domain,
          "one conditional per node required");

  for (int j = 0; j < m_; ++j) {
    const NodeConditional &c = conditionals_[static_cast<std::size_t>(j)];
    std::vector<int> expected{j};
    for (int i = 0; i < m_; ++i) {
      if (parents_(i, j)) {
        expected.push_back(i);
      }
    }
    std::sort(expected.begin(), expected.end());
    require(c.context_nodes == expected, ErrorKind::Domain,
            "node " + std::to_string(j) +
                ": context nodes must be the node and its parents, ascending");
    const std::uint64_t rows = guarded_power(
        static_cast<std::uint64_t>(alphabet_),
        static_cast<int>(c.context_nodes.size()) * k_);
    require(rows * alphabet_ <= kMaxTableCells, ErrorKind::Resource,
            "node " + std::to_string(j) + ": conditional table too large");
    require(c.table.size() == rows * alphabet_, ErrorKind::Domain,
            "node " + std::to_string(j) + ": conditional table has wrong size");
    for (std::size_t row = 0; row < rows; ++row) {
      double sum = 0.0;
      for (int s = 0; s < alphabet_; ++s) {
        const double p = c.table[row * alphabet_ + s];
        require(p >= epsilon_ && p <= 1.0, ErrorKind::Domain,
                "node " + std::to_string(j) +
                    ": conditional entry outside [epsilon, 1]");
        sum += p;
      }
      require(std::fabs(sum - 1.0) <= kRowSumTolerance, ErrorKind::Domain,
              "node " + std::to_string(j) + ": conditional row does not sum to 1");
    }
  }
}

const NodeConditional &JointMarkovModel::conditional(int node) const {
  require(node >= 0 && node < m_, ErrorKind::Domain, "node index out of range");
  return conditionals_[static_cast<std::size_t>(node)];
}

std::uint64_t JointMarkovModel::lifted_state_count() const {
  return guarded_power(static_cast<std::uint64_t>(alphabet_), m_ * k_);
}

std::uint64_t JointMarkovModel::block_cell_count() const {
  return guarded_power(static_cast<std::uint64_t>(alphabet_), m_ * (k_ + 1));
}

bool JointMarkovModel::fits_exact_analysis() const {
  return block_cell_count() <= kMaxTableCells;
}

std::size_t JointMarkovModel::context_row(int node, std::size_t state) const {
  const std::size_t a = static_cast<std::size_t>(alphabet_);
  const std::size_t window = power(a, k_);
  std::size_t row = 0;
  for (int p : conditional(node).context_nodes) {
    const std::size_t shift = power(window, m_ - 1 - p);
    row = row * window + (state / shift) % window;
  }
  return row;
}

double JointMarkovModel::next_probability(int node, std::size_t state,
                                          int symbol) const {
  return conditional(node).table[context_row(node, state) * alphabet_ + symbol];
}

NodeConditional random_conditional(int node, const std::vector<int> &parent_nodes,
                                   int k, int alphabet, double epsilon, Rng &rng) {
  NodeConditional c;
  c.context_nodes = parent_nodes;
  c.context_nodes.push_back(node);
  std::sort(c.context_nodes.begin(), c.context_nodes.end());
  c.context_nodes.erase(std::unique(c.context_nodes.begin(), c.context_nodes.end()),
                        c.context_nodes.end());
  const std::uint64_t rows = guarded_power(
      static_cast<std::uint64_t>(alphabet),
      static_cast<int>(c.context_nodes.size()) * k);
  require(rows * alphabet <= kMaxTableCells, ErrorKind::Resource,
          "conditional table too large");
  c.table.resize(rows * alphabet);
  const double spread = 1.0 - epsilon * alphabet;
  std::vector<double> draw(static_cast<std::size_t>(alphabet));
  for (std::size_t row = 0; row < rows; ++row) {
    double total = 0.0;
    for (auto &e : draw) {
      e = -std::log(rng.uniform_positive());
      total += e;
    }
    double sum = 0.0;
    for (int s = 0; s + 1 < alphabet; ++s) {
      const double p = epsilon + spread * draw[static_cast<std::size_t>(s)] / total;
      c.table[row * alphabet + s] = p;
      sum += p;
    }
    // The last entry absorbs rounding so the row sums to 1 up to one ulp.
    c.table[row * alphabet + alphabet - 1] = std::max(epsilon, 1.0 - sum);
  }
  return c;
}

JointMarkovModel build_random_model(int m, int k, int alphabet,
                                    const Adjacency &adjacency, double epsilon,
                                    std::uint64_t seed, double delta_floor,
                                    int max_retries) {
  require(epsilon > 0.0 && epsilon * alphabet <= 1.0, ErrorKind::Domain,
          "epsilon must satisfy 0 < epsilon * |X| <= 1");
  require(adjacency.nodes() == m, ErrorKind::Domain,
          "adjacency size does not match node count");
  Rng rng(seed);
  for (int attempt = 0; attempt < max_retries; ++attempt) {
    std::vector<NodeConditional> conditionals;
    conditionals.reserve(static_cast<std::size_t>(m));
    for (int j = 0; j < m; ++j) {
      std::vector<int> parent_nodes;
      for (int i = 0; i < m; ++i) {
        if (adjacency(i, j)) {
          parent_nodes.push_back(i);
        }
      }
      conditionals.push_back(random_conditional(j, parent_nodes, k, alphabet, epsilon, rng));
    }
    JointMarkovModel model(m, k, alphabet, adjacency, epsilon, std::move(conditionals),
                           seed);
    if (adjacency.edge_count() == 0) {
      return model;
    }
    require(model.fits_exact_analysis(), ErrorKind::Resource,
            "model too large to verify edge strength exactly");
    const auto dist = stationary_distribution(model);
    bool strong = true;
    for (int i = 0; i < m && strong; ++i) {
      for (int j = 0; j < m && strong; ++j) {
        if (adjacency(i, j) && exact_directed_info(model, dist, i, j) < delta_floor) {
          strong = false;
        }
      }
    }
    if (strong) {
      return model;
    }
  }
  fail(ErrorKind::Construction,
       "no model with every edge above the directed-information floor after " +
           std::to_string(max_retries) + " draws");
}

namespace {

// Applies the lifted transition once: out = in * P.
void lifted_step(const JointMarkovModel &model, const std::vector<double> &in,
                 std::vector<double> &out) {
  const int m = model.nodes();
  const std::size_t a = static_cast<std::size_t>(model.alphabet());
  const std::size_t window = power(a, model.order());
  const std::size_t joint_next = power(a, m);
  std::fill(out.begin(), out.end(), 0.0);
  std::vector<std::size_t> rows(static_cast<std::size_t>(m));
  std::vector<std::size_t> shifted(static_cast<std::size_t>(m));
  for (std::size_t state = 0; state < in.size(); ++state) {
    const double mass = in[state];
    if (mass == 0.0) {
      continue;
    }
    for (int j = 0; j < m; ++j) {
      rows[static_cast<std::size_t>(j)] = model.context_row(j, state) * a;
      const std::size_t w = (state / power(window, m - 1 - j)) % window;
      shifted[static_cast<std::size_t>(j)] = (w * a) % window;
    }
    for (std::size_t next = 0; next < joint_next; ++next) {
      double p = mass;
      std::size_t target = 0;
      std::size_t rest = next;
      for (int j = m - 1; j >= 0; --j) {
        const std::size_t s = rest % a;
        rest /= a;
        p *= model.conditional(j).table[rows[static_cast<std::size_t>(j)] + s];
      }
      rest = next;
      std::size_t scale = 1;
      for (int j = m - 1; j >= 0; --j) {
        const std::size_t s = rest % a;
        rest /= a;
        target += (shifted[static_cast<std::size_t>(j)] + s) * scale;
        scale *= window;
      }
      out[target] += p;
    }
  }
}

} // namespace

StationaryBlockDistribution stationary_distribution(const JointMarkovModel &model) {
  require(model.fits_exact_analysis(), ErrorKind::Resource,
          "block table exceeds the exact-analysis size guard");
  const int m = model.nodes();
  const int k = model.order();
  const std::size_t a = static_cast<std::size_t>(model.alphabet());
  const std::size_t states = model.lifted_state_count();

  std::vector<double> pi(states, 1.0 / static_cast<double>(states));
  std::vector<double> next(states);
  bool converged = false;
  for (long it = 0; it < kStationaryMaxIterations; ++it) {
    lifted_step(model, pi, next);
    double total = 0.0;
    for (double p : next) {
      total += p;
    }
    double change = 0.0;
    for (std::size_t s = 0; s < states; ++s) {
      next[s] /= total;
      change += std::fabs(next[s] - pi[s]);
    }
    pi.swap(next);
    if (change <= kStationaryTolerance) {
      converged = true;
      break;
    }
  }
  require(converged, ErrorKind::Domain, "stationary power iteration did not converge");

  // Extend to (k+1)-blocks: P(block) = pi(past) * prod_j Q_j(next_j | past).
  BlockLayout layout = BlockLayout::full(m, k + 1, model.alphabet());
  std::vector<double> blocks(layout.cell_count(), 0.0);
  const std::size_t window = power(a, k);
  const std::size_t block_window = window * a;
  const std::size_t joint_next = power(a, m);
  for (std::size_t state = 0; state < states; ++state) {
    for (std::size_t next_code = 0; next_code < joint_next; ++next_code) {
      double p = pi[state];
      std::size_t block = 0;
      std::size_t scale = 1;
      std::size_t rest = next_code;
      for (int j = m - 1; j >= 0; --j) {
        const std::size_t s = rest % a;
        rest /= a;
        p *= model.next_probability(j, state, static_cast<int>(s));
        const std::size_t w = (state / power(window, m - 1 - j)) % window;
        block += (w * a + s) * scale;
        scale *= block_window;
      }
      blocks[block] = p;
    }
  }
  return StationaryBlockDistribution{std::move(layout), std::move(blocks), std::move(pi)};
}

double stationary_residual(const JointMarkovModel &model,
                           const StationaryBlockDistribution &dist) {
  std::vector<double> next(dist.state_probabilities.size());
  lifted_step(model, dist.state_probabilities, next);
  double residual = 0.0;
  for (std::size_t s = 0; s < next.size(); ++s) {
    residual += std::fabs(next[s] - dist.state_probabilities[s]);
  }
  return residual;
}

double exact_directed_info(const JointMarkovModel &model,
                           const StationaryBlockDistribution &dist, int source,
                           int target) {
  require(source >= 0 && target >= 0 && source < model.nodes() &&
              target < model.nodes(),
          ErrorKind::Domain, "node index out of range");
  require(source != target, ErrorKind::Domain, "directed information needs i != j");
  const double di = conditional_directed_info(dist.layout, dist.probabilities,
                                              source, target);
  return std::max(0.0, di);
}

double exact_directed_info(const JointMarkovModel &model, int source, int target) {
  return exact_directed_info(model, stationary_distribution(model), source, target);
}

Adjacency true_adjacency(const JointMarkovModel &model) {
  const auto dist = stationary_distribution(model);
  Adjacency adj(model.nodes());
  for (int i = 0; i < model.nodes(); ++i) {
    for (int j = 0; j < model.nodes(); ++j) {
      if (i != j) {
        adj.set(i, j, exact_directed_info(model, dist, i, j) > kEdgePresenceCutoff);
      }
    }
  }
  return adj;
}

JointMarkovModel binary_channel_model(double flip) {
  require(flip > 0.0 && flip < 1.0, ErrorKind::Domain, "flip must be in (0, 1)");
  Adjacency adj(3);
  adj.set(0, 1, true);
  const NodeConditional uniform_x{{0}, {0.5, 0.5, 0.5, 0.5}};
  const NodeConditional uniform_z{{2}, {0.5, 0.5, 0.5, 0.5}};
  // Context (x_prev, y_prev); x_prev is the most significant digit.
  NodeConditional channel{{0, 1}, {}};
  for (int x = 0; x < 2; ++x) {
    for (int y = 0; y < 2; ++y) {
      channel.table.push_back(x == 0 ? 1.0 - flip : flip);
      channel.table.push_back(x == 1 ? 1.0 - flip : flip);
    }
  }
  const double epsilon = std::min({flip, 1.0 - flip, 0.5});
  return JointMarkovModel(3, 1, 2, adj, epsilon, {uniform_x, channel, uniform_z});
}

JointMarkovModel uniform_independent_model(int m, int k, int alphabet) {
  std::vector<NodeConditional> conditionals;
  for (int j = 0; j < m; ++j) {
    const std::uint64_t rows =
        guarded_power(static_cast<std::uint64_t>(alphabet), k);
    conditionals.push_back(
        {{j}, std::vector<double>(rows * alphabet, 1.0 / alphabet)});
  }
  return JointMarkovModel(m, k, alphabet, Adjacency(m), 1.0 / alphabet,
                          std::move(conditionals));
}

} // namespace dig
