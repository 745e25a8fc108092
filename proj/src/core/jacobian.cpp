#include <algorithm>
#include <cmath>
#include <limits>

#include "dig/error.hpp"
#include "dig/experiments.hpp"
#include "dig/rng.hpp"

namespace dig {

namespace {

struct Shape {
  std::size_t a = 0;      // alphabet
  std::size_t past = 0;   // A^k
  std::size_t states = 0; // joint pasts, A^{3k}
  std::size_t w_rows = 0; // gamma' rows, A^{2k+1}
  std::size_t pairs = 0;  // A^2
  std::size_t d = 0;
  std::size_t d_prime = 0;
};

std::size_t power(std::size_t base, int exp) {
  std::size_t out = 1;
  for (int e = 0; e < exp; ++e) {
    out *= base;
  }
  return out;
}

Shape shape_of(int k, int alphabet) {
  require(k >= 1 && alphabet >= 2, ErrorKind::Domain, "need k >= 1 and alphabet >= 2");
  require(power(static_cast<std::size_t>(alphabet), 3 * (k + 1)) <= kMaxTableCells,
          ErrorKind::Resource, "factorized parameter table exceeds the size guard");
  Shape s;
  s.a = static_cast<std::size_t>(alphabet);
  s.past = power(s.a, k);
  s.states = s.past * s.past * s.past;
  s.w_rows = s.past * s.past * s.a;
  s.pairs = s.a * s.a;
  s.d = s.states * (s.pairs - 1);
  s.d_prime = s.w_rows * (s.a - 1);
  return s;
}

void check_rows(const std::vector<double> &values, std::size_t rows, std::size_t width,
                const char *name) {
  require(values.size() == rows * width, ErrorKind::Domain,
          std::string(name) + " has the wrong number of entries");
  for (std::size_t r = 0; r < rows; ++r) {
    double sum = 0.0;
    for (std::size_t c = 0; c < width; ++c) {
      const double v = values[r * width + c];
      require(std::isfinite(v) && v > 0.0, ErrorKind::Domain,
              std::string(name) + " entries must be strictly positive");
      sum += v;
    }
    require(std::abs(sum - 1.0) <= 1e-12, ErrorKind::Domain,
            std::string(name) + " rows must sum to 1");
  }
}

Shape validated_shape(const FactorizedParameters &phi) {
  const Shape s = shape_of(phi.k, phi.alphabet);
  check_rows(phi.gamma, s.states, s.pairs, "gamma");
  check_rows(phi.gamma_prime, s.w_rows, s.a, "gamma_prime");
  return s;
}

// Splits a K row into the joint past u, the (x', z') pair index, y', and the
// gamma' row w = (y past, z past, z').
struct RowIndex {
  std::size_t u;
  std::size_t pair;
  std::size_t y;
  std::size_t w;
};

RowIndex split_row(const Shape &s, std::size_t row) {
  const std::size_t u = row / (s.pairs * s.a);
  const std::size_t next = row % (s.pairs * s.a);
  const std::size_t x = next / s.pairs;
  const std::size_t y = (next / s.a) % s.a;
  const std::size_t z = next % s.a;
  const std::size_t y_past = (u / s.past) % s.past;
  const std::size_t z_past = u % s.past;
  return RowIndex{u, x * s.a + z, y, (y_past * s.past + z_past) * s.a + z};
}

double transition(const Shape &s, const FactorizedParameters &phi, std::size_t row) {
  const RowIndex ix = split_row(s, row);
  return phi.gamma[ix.u * s.pairs + ix.pair] * phi.gamma_prime[ix.w * s.a + ix.y];
}

// Moves `h` of mass into free parameter `col`, taking it from the implied
// last entry of the same row.
void nudge(const Shape &s, FactorizedParameters &phi, std::size_t col, double h) {
  if (col < s.d) {
    const std::size_t u = col / (s.pairs - 1);
    const std::size_t p = col % (s.pairs - 1);
    phi.gamma[u * s.pairs + p] += h;
    phi.gamma[u * s.pairs + s.pairs - 1] -= h;
  } else {
    const std::size_t w = (col - s.d) / (s.a - 1);
    const std::size_t b = (col - s.d) % (s.a - 1);
    phi.gamma_prime[w * s.a + b] += h;
    phi.gamma_prime[w * s.a + s.a - 1] -= h;
  }
}

} // namespace

FactorizedParameters random_factorized_parameters(int k, int alphabet, double epsilon,
                                                  std::uint64_t seed) {
  const Shape s = shape_of(k, alphabet);
  require(epsilon > 0.0 && epsilon * static_cast<double>(s.pairs) < 1.0,
          ErrorKind::Domain, "epsilon too large for the alphabet");
  Rng rng(seed);
  auto draw = [&](std::vector<double> &out, std::size_t rows, std::size_t width) {
    out.assign(rows * width, 0.0);
    const double spare = 1.0 - epsilon * static_cast<double>(width);
    for (std::size_t r = 0; r < rows; ++r) {
      double sum = 0.0;
      for (std::size_t c = 0; c < width; ++c) {
        out[r * width + c] = -std::log(rng.uniform_positive());
        sum += out[r * width + c];
      }
      double total = 0.0;
      for (std::size_t c = 0; c + 1 < width; ++c) {
        out[r * width + c] = epsilon + spare * out[r * width + c] / sum;
        total += out[r * width + c];
      }
      out[r * width + width - 1] = 1.0 - total;
    }
  };
  FactorizedParameters phi;
  phi.k = k;
  phi.alphabet = alphabet;
  draw(phi.gamma, s.states, s.pairs);
  draw(phi.gamma_prime, s.w_rows, s.a);
  return phi;
}

double factorized_transition(const FactorizedParameters &phi, std::size_t row) {
  const Shape s = validated_shape(phi);
  require(row < s.states * s.pairs * s.a, ErrorKind::Domain, "row out of range");
  return transition(s, phi, row);
}

DenseMatrix factorization_jacobian(const FactorizedParameters &phi) {
  const Shape s = validated_shape(phi);
  DenseMatrix k_mat;
  k_mat.rows = s.states * s.pairs * s.a;
  k_mat.cols = s.d + s.d_prime;
  k_mat.values.assign(k_mat.rows * k_mat.cols, 0.0);
  const std::size_t last_pair = s.pairs - 1;
  const std::size_t last_y = s.a - 1;
  for (std::size_t row = 0; row < k_mat.rows; ++row) {
    const RowIndex ix = split_row(s, row);
    double *out = &k_mat.values[row * k_mat.cols];
    const double g = phi.gamma[ix.u * s.pairs + ix.pair];
    const double gp = phi.gamma_prime[ix.w * s.a + ix.y];
    const std::size_t g_base = ix.u * (s.pairs - 1);
    const std::size_t gp_base = s.d + ix.w * (s.a - 1);
    if (ix.pair != last_pair && ix.y != last_y) {
      out[g_base + ix.pair] = gp;
      out[gp_base + ix.y] = g;
    } else if (ix.pair != last_pair) {
      out[g_base + ix.pair] = gp;
      for (std::size_t b = 0; b < last_y; ++b) {
        out[gp_base + b] = -g;
      }
    } else if (ix.y != last_y) {
      for (std::size_t p = 0; p < last_pair; ++p) {
        out[g_base + p] = -gp;
      }
      out[gp_base + ix.y] = g;
    } else {
      for (std::size_t p = 0; p < last_pair; ++p) {
        out[g_base + p] = -gp;
      }
      for (std::size_t b = 0; b < last_y; ++b) {
        out[gp_base + b] = -g;
      }
    }
  }
  return k_mat;
}

std::size_t numerical_rank(DenseMatrix m, double pivot_threshold) {
  double scale = 1.0;
  for (double v : m.values) {
    scale = std::max(scale, std::abs(v));
  }
  const double limit = pivot_threshold * scale;
  std::size_t rank = 0;
  std::vector<bool> used_col(m.cols, false);
  for (std::size_t step = 0; step < std::min(m.rows, m.cols); ++step) {
    double best = 0.0;
    std::size_t br = 0;
    std::size_t bc = 0;
    for (std::size_t r = rank; r < m.rows; ++r) {
      for (std::size_t c = 0; c < m.cols; ++c) {
        if (!used_col[c] && std::abs(m.values[r * m.cols + c]) > best) {
          best = std::abs(m.values[r * m.cols + c]);
          br = r;
          bc = c;
        }
      }
    }
    if (best <= limit) {
      break;
    }
    if (br != rank) {
      std::swap_ranges(m.values.begin() + static_cast<std::ptrdiff_t>(br * m.cols),
                       m.values.begin() + static_cast<std::ptrdiff_t>((br + 1) * m.cols),
                       m.values.begin() + static_cast<std::ptrdiff_t>(rank * m.cols));
    }
    const double pivot = m.values[rank * m.cols + bc];
    for (std::size_t r = rank + 1; r < m.rows; ++r) {
      const double factor = m.values[r * m.cols + bc] / pivot;
      if (factor == 0.0) {
        continue;
      }
      for (std::size_t c = 0; c < m.cols; ++c) {
        m.values[r * m.cols + c] -= factor * m.values[rank * m.cols + c];
      }
    }
    used_col[bc] = true;
    ++rank;
  }
  return rank;
}

ExperimentResult jacobian_rank_suite(const ExperimentConfig &config) {
  require(config.model.m == 3, ErrorKind::Configuration,
          "jacobian-rank is defined for three nodes only");
  require(config.trials >= 1, ErrorKind::Configuration, "need at least one trial");
  const int k = config.model.k;
  const int alphabet = config.model.alphabet;
  const DimensionSpec dims = dimensions(3, k, alphabet);
  const auto expected = static_cast<std::size_t>(dims.d + dims.d_prime);
  const double h = 1e-6;

  ExperimentResult result;
  result.suite = "jacobian-rank";
  result.config_hash = config_hash(config);
  std::size_t min_rank = std::numeric_limits<std::size_t>::max();
  std::size_t max_rank = 0;
  double max_fd_error = 0.0;
  DenseMatrix last;
  for (int t = 0; t < config.trials; ++t) {
    const std::uint64_t seed = config.base_seed + static_cast<std::uint64_t>(t);
    const FactorizedParameters phi =
        random_factorized_parameters(k, alphabet, config.model.epsilon, seed);
    last = factorization_jacobian(phi);
    const std::size_t rank = numerical_rank(last, config.tolerances.pivot_threshold);
    min_rank = std::min(min_rank, rank);
    max_rank = std::max(max_rank, rank);

    const Shape s = shape_of(k, alphabet);
    Rng pick(seed ^ 0x5bd1e9955bd1e995ULL);
    for (int c = 0; c < config.fd_checks_per_trial; ++c) {
      const std::size_t row = pick() % last.rows;
      std::size_t col = pick() % last.cols;
      if (c % 2 == 0) {
        // Half of the checks land on a structurally nonzero entry.
        std::vector<std::size_t> nonzero;
        for (std::size_t j = 0; j < last.cols; ++j) {
          if (last.at(row, j) != 0.0) {
            nonzero.push_back(j);
          }
        }
        col = nonzero[pick() % nonzero.size()];
      }
      FactorizedParameters up = phi;
      FactorizedParameters down = phi;
      nudge(s, up, col, h);
      nudge(s, down, col, -h);
      const double fd = (transition(s, up, row) - transition(s, down, row)) / (2.0 * h);
      max_fd_error = std::max(max_fd_error, std::abs(fd - last.at(row, col)));
    }
  }
  result.rows.push_back({0, "matrix_rows", static_cast<double>(last.rows)});
  result.rows.push_back({0, "matrix_cols", static_cast<double>(last.cols)});
  result.rows.push_back({0, "expected_rank", static_cast<double>(expected)});
  result.rows.push_back({0, "min_rank", static_cast<double>(min_rank)});
  result.rows.push_back({0, "max_rank", static_cast<double>(max_rank)});
  result.rows.push_back({0, "max_fd_error", max_fd_error});
  const auto e = static_cast<double>(expected);
  result.checks.push_back(Check{"min_rank", static_cast<double>(min_rank), e, e,
                                min_rank == expected});
  result.checks.push_back(Check{"max_rank", static_cast<double>(max_rank), e, e,
                                max_rank == expected});
  result.checks.push_back(Check{"max_fd_error", max_fd_error, 0.0,
                                config.tolerances.fd_tolerance,
                                max_fd_error <= config.tolerances.fd_tolerance});
  result.passed = min_rank == expected && max_rank == expected &&
                  max_fd_error <= config.tolerances.fd_tolerance;
  return result;
}

} // namespace dig
