#ifndef DIG_EXPERIMENTS_HPP
#define DIG_EXPERIMENTS_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dig/model.hpp"

namespace dig {

// How a suite obtains its model.
struct ModelRecipe {
  enum class Kind { Random, BinaryChannel, File };
  Kind kind = Kind::Random;
  int m = 3;
  int k = 1;
  int alphabet = 2;
  std::string edges = "none";
  double epsilon = kDefaultEpsilon;
  std::uint64_t seed = 7;
  double flip = 0.1;
  std::string file;
};

JointMarkovModel make_model(const ModelRecipe &recipe);

// Pass/fail thresholds. Suites read every threshold from here.
struct Tolerances {
  double mean_relative = 0.15;     // null chi2: |mean - dof| <= this * dof
  double ks_coefficient = 1.63;    // KS critical value c / sqrt(replicas)
  double clt_se_multiplier = 3.0;  // |mean| <= this * sd / sqrt(replicas)
  double sigma_ratio_low = 0.75;
  double sigma_ratio_high = 1.33;
  double null_slope = -1.0;
  double alt_slope = -0.5;
  double slope_tolerance = 0.15;
  double kl_decay_factor = 2.0;
  double kl_min_range = 16.0;
  double pivot_threshold = 1e-10;
  double fd_tolerance = 1e-6;
  double alpha = 0.05;
  double rejection_tolerance = 0.02;
  double min_detection_rate = 0.99;
};

struct ExperimentConfig {
  std::string suite;
  ModelRecipe model;
  std::vector<std::int64_t> n_grid;
  int replicas = 0;
  std::uint64_t base_seed = 1;
  std::int64_t burn_in = 0;
  std::pair<int, int> edge{0, 1};
  std::pair<int, int> null_edge{0, 2};
  int trials = 50;
  int fd_checks_per_trial = 10;
  Tolerances tolerances;
};

// Built-in configuration of a suite: null-chi2, alt-clt, rate, kl-decay,
// jacobian-rank, single-edge.
ExperimentConfig default_config(const std::string &suite);

// Fields missing from `json_text` keep the suite defaults.
ExperimentConfig config_from_json(const std::string &suite, const std::string &json_text);
std::string config_to_json(const ExperimentConfig &config);
std::string config_hash(const ExperimentConfig &config);

struct ResultRow {
  std::int64_t n = 0; // 0 when the row is not tied to a path length
  std::string statistic;
  double value = 0.0;
};

struct Check {
  std::string name;
  double value = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  bool passed = false;
};

struct ExperimentResult {
  std::string suite;
  std::string config_hash;
  std::vector<ResultRow> rows;
  std::vector<Check> checks;
  bool passed = false;
};

ExperimentResult null_chi2_suite(const ExperimentConfig &config);
ExperimentResult alternative_clt_suite(const ExperimentConfig &config);
ExperimentResult rate_dichotomy_suite(const ExperimentConfig &config);
ExperimentResult kl_decay_suite(const ExperimentConfig &config);
ExperimentResult jacobian_rank_suite(const ExperimentConfig &config);
ExperimentResult single_edge_suite(const ExperimentConfig &config);

ExperimentResult run_suite(const ExperimentConfig &config);

// Slope checks shared by the rate suite; exposed so a synthetic statistic
// can be fed through the same code path.
struct RateFit {
  double slope = 0.0;
  Check check;
};
RateFit fit_rate(const std::vector<std::int64_t> &n_grid, int k,
                 const std::vector<double> &medians, double target, double tolerance,
                 const std::string &name);

// Sample standard deviation of sqrt(n-k)(I_hat - I_bar) values.
double estimate_sigma(const std::vector<double> &scaled_errors);
double estimate_sigma(const ExperimentConfig &config);

// sqrt(n-k) * (I_hat - I_bar) for every replica at path length n.
std::vector<double> scaled_errors(const JointMarkovModel &model, int i, int j,
                                  std::int64_t n, std::int64_t burn_in,
                                  std::uint64_t base_seed, int replicas);

struct Figure1Table {
  std::vector<int> n0_list;
  std::vector<double> i_th;
  std::vector<double> pf_upper;
  std::vector<std::vector<double>> pd_lower; // [grid point][n0 index]
};

Figure1Table figure1_curves(const DimensionSpec &dims, const std::vector<double> &i_th_grid,
                            const std::vector<int> &n0_list);
std::string figure1_csv(const Figure1Table &table);

// Parameters of the factorized transition family for m = 3 (source x = 0,
// target y = 1, other z = 2). gamma holds one row per joint k-past over the
// pairs (x', z'); gamma_prime one row per (y past, z past, z') over y'. Rows
// are stored in full; the last entry of each row is the implied one.
struct FactorizedParameters {
  int k = 1;
  int alphabet = 2;
  std::vector<double> gamma;
  std::vector<double> gamma_prime;
};

FactorizedParameters random_factorized_parameters(int k, int alphabet, double epsilon,
                                                  std::uint64_t seed);

// Dense row-major matrix with one row per transition entry (every joint past
// and every next triple, including the implied last column) and one column
// per free parameter (gamma first, then gamma_prime).
struct DenseMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;
  double at(std::size_t r, std::size_t c) const { return values[r * cols + c]; }
};

DenseMatrix factorization_jacobian(const FactorizedParameters &phi);
// Transition entry Q_{h(phi)}(row), used for finite-difference checks.
double factorized_transition(const FactorizedParameters &phi, std::size_t row);
std::size_t numerical_rank(DenseMatrix matrix, double pivot_threshold);

std::string result_rows_csv(const ExperimentResult &result);
std::string result_summary_json(const ExperimentResult &result,
                                const ExperimentConfig &config);
// Writes <suite>.csv, <suite>.summary.json and, for the rate suite,
// <suite>.slopes.csv into `directory`. Returns the written paths.
std::vector<std::string> write_result(const ExperimentResult &result,
                                      const ExperimentConfig &config,
                                      const std::string &directory);

} // namespace dig

#endif // DIG_EXPERIMENTS_HPP
