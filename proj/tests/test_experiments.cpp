#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>

#include "dig/error.hpp"
#include "dig/experiments.hpp"
#include "dig/format.hpp"
#include "dig/graphtest.hpp"
#include "test_support.hpp"

using namespace dig;

namespace {

ErrorKind kind_of(const std::function<void()> &fn) {
  try {
    fn();
  } catch (const Error &e) {
    return e.kind();
  }
  FAIL("expected dig::Error");
  return ErrorKind::Io;
}

ExperimentConfig small_clt() {
  ExperimentConfig c = default_config("alt-clt");
  c.n_grid = {2000, 4000};
  c.replicas = 40;
  return c;
}

} // namespace

TEST_CASE("config JSON round trip and hash") {
  for (const char *suite :
       {"null-chi2", "alt-clt", "rate", "kl-decay", "jacobian-rank", "single-edge"}) {
    const ExperimentConfig c = default_config(suite);
    const std::string text = config_to_json(c);
    const ExperimentConfig back = config_from_json(suite, text);
    CHECK(config_to_json(back) == text);
    CHECK(config_hash(back) == config_hash(c));
    CHECK(config_hash(c).size() == 16);
  }
  const ExperimentConfig changed = config_from_json("rate", R"({"replicas": 50})");
  CHECK(changed.replicas == 50);
  CHECK(changed.n_grid == default_config("rate").n_grid);
  CHECK(config_hash(changed) != config_hash(default_config("rate")));

  CHECK(kind_of([] { default_config("nope"); }) == ErrorKind::Configuration);
  CHECK(kind_of([] { config_from_json("rate", "{"); }) == ErrorKind::Parse);
  CHECK(kind_of([] { config_from_json("rate", R"({"replicas": "many"})"); }) == ErrorKind::Parse);
  CHECK(kind_of([] { config_from_json("rate", R"({"suite": "kl-decay"})"); }) ==
        ErrorKind::Configuration);
}

TEST_CASE("tolerances come from the config") {
  ExperimentConfig c = small_clt();
  c.tolerances.sigma_ratio_low = 100.0;
  c.tolerances.sigma_ratio_high = 200.0;
  const ExperimentResult r = alternative_clt_suite(c);
  CHECK_FALSE(r.passed);
  CHECK(config_from_json("alt-clt", config_to_json(c)).tolerances.sigma_ratio_low == 100.0);
}

TEST_CASE("suite preconditions") {
  ExperimentConfig c = small_clt();
  c.replicas = 10;
  CHECK(kind_of([&] { alternative_clt_suite(c); }) == ErrorKind::Configuration);
  c = small_clt();
  c.n_grid = {4000, 2000};
  CHECK(kind_of([&] { alternative_clt_suite(c); }) == ErrorKind::Configuration);

  // The binary channel's 0 -> 1 edge is true, so the null suite refuses it.
  ExperimentConfig null_cfg = default_config("null-chi2");
  null_cfg.model.kind = ModelRecipe::Kind::BinaryChannel;
  null_cfg.replicas = 30;
  CHECK(kind_of([&] { null_chi2_suite(null_cfg); }) == ErrorKind::Configuration);

  // An independent model has no edge for the alternative suite.
  ExperimentConfig alt_cfg = small_clt();
  alt_cfg.model.kind = ModelRecipe::Kind::Random;
  alt_cfg.model.edges = "none";
  CHECK(kind_of([&] { alternative_clt_suite(alt_cfg); }) == ErrorKind::Configuration);
  CHECK(kind_of([&] { estimate_sigma(alt_cfg); }) == ErrorKind::Configuration);

  ExperimentConfig rate_cfg = default_config("rate");
  rate_cfg.n_grid = {4096, 8192, 16384};
  CHECK(kind_of([&] { rate_dichotomy_suite(rate_cfg); }) == ErrorKind::Configuration);

  ExperimentConfig kl_cfg = default_config("kl-decay");
  kl_cfg.n_grid = {4096, 8192};
  CHECK(kind_of([&] { kl_decay_suite(kl_cfg); }) == ErrorKind::Configuration);

  ExperimentConfig jac = default_config("jacobian-rank");
  jac.model.m = 4;
  CHECK(kind_of([&] { jacobian_rank_suite(jac); }) == ErrorKind::Configuration);
}

TEST_CASE("suites are deterministic and independent of the worker count") {
  const ExperimentConfig c = small_clt();
  const ExperimentResult a = alternative_clt_suite(c);
  ::setenv("DIG_THREADS", "3", 1);
  const ExperimentResult b = alternative_clt_suite(c);
  ::unsetenv("DIG_THREADS");
  CHECK(result_rows_csv(a) == result_rows_csv(b));
  CHECK(a.config_hash == config_hash(c));
  for (const ResultRow &row : a.rows) {
    CHECK(std::isfinite(row.value));
  }
}

TEST_CASE("rate fit on a constant statistic fails the slope check") {
  const std::vector<std::int64_t> grid{4096, 16384, 65536, 262144};
  const std::vector<double> constant(4, 0.3);
  const RateFit fit = fit_rate(grid, 1, constant, -1.0, 0.15, "null_slope");
  CHECK(fit.slope == doctest::Approx(0.0).epsilon(1e-12));
  CHECK_FALSE(fit.check.passed);

  std::vector<double> ideal;
  for (auto n : grid) {
    ideal.push_back(2.0 / static_cast<double>(n - 1));
  }
  const RateFit good = fit_rate(grid, 1, ideal, -1.0, 0.15, "null_slope");
  CHECK(good.slope == doctest::Approx(-1.0));
  CHECK(good.check.passed);
}

TEST_CASE("estimate_sigma") {
  CHECK(estimate_sigma(std::vector<double>(50, 0.25)) == 0.0);
  CHECK_THROWS_AS(estimate_sigma(std::vector<double>{1.0}), Error);

  const JointMarkovModel model = binary_channel_model(0.1);
  const auto first = scaled_errors(model, 0, 1, 20000, 0, 10, 150);
  const auto second = scaled_errors(model, 0, 1, 20000, 0, 10 + 150, 150);
  const double s1 = estimate_sigma(first);
  const double s2 = estimate_sigma(second);
  CHECK(s1 > 0.0);
  CHECK(std::isfinite(s1));
  CHECK(s1 / s2 > 0.75);
  CHECK(s1 / s2 < 1.25);

  ExperimentConfig c = small_clt();
  const double sigma = estimate_sigma(c);
  CHECK(sigma > 0.0);
  CHECK(std::isfinite(sigma));
}

TEST_CASE("factorization Jacobian shape, rank and finite differences") {
  const FactorizedParameters phi = random_factorized_parameters(1, 2, 0.02, 3);
  const DenseMatrix k = factorization_jacobian(phi);
  const DimensionSpec dims = dimensions(3, 1, 2);
  CHECK(k.rows == 64);
  CHECK(k.cols == static_cast<std::size_t>(dims.d + dims.d_prime));
  CHECK(numerical_rank(k, 1e-10) == 32);

  // Every entry against a central difference.
  const double h = 1e-6;
  double worst = 0.0;
  for (std::size_t col = 0; col < k.cols; ++col) {
    FactorizedParameters up = phi;
    FactorizedParameters down = phi;
    auto shift = [&](FactorizedParameters &p, double step) {
      if (col < 24) {
        p.gamma[(col / 3) * 4 + col % 3] += step;
        p.gamma[(col / 3) * 4 + 3] -= step;
      } else {
        p.gamma_prime[(col - 24) * 2] += step;
        p.gamma_prime[(col - 24) * 2 + 1] -= step;
      }
    };
    shift(up, h);
    shift(down, -h);
    for (std::size_t row = 0; row < k.rows; ++row) {
      const double fd =
          (factorized_transition(up, row) - factorized_transition(down, row)) / (2.0 * h);
      worst = std::max(worst, std::abs(fd - k.at(row, col)));
    }
  }
  CHECK(worst < 1e-6);

  // Rows of the transition sum to one over the next triple.
  for (std::size_t u = 0; u < 8; ++u) {
    double sum = 0.0;
    for (std::size_t c = 0; c < 8; ++c) {
      sum += factorized_transition(phi, u * 8 + c);
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("Jacobian rank for other alphabets and orders") {
  for (auto [k, a] : {std::pair{1, 3}, {2, 2}}) {
    const DimensionSpec dims = dimensions(3, k, a);
    const DenseMatrix mat = factorization_jacobian(random_factorized_parameters(k, a, 0.01, 8));
    CHECK(numerical_rank(mat, 1e-10) == static_cast<std::size_t>(dims.d + dims.d_prime));
  }
}

TEST_CASE("duplicated gamma row keeps the rank") {
  FactorizedParameters phi = random_factorized_parameters(1, 2, 0.02, 4);
  std::copy(phi.gamma.begin(), phi.gamma.begin() + 4, phi.gamma.begin() + 4);
  CHECK(numerical_rank(factorization_jacobian(phi), 1e-10) == 32);
}

TEST_CASE("invalid factorized parameters are domain errors") {
  FactorizedParameters zeroed = random_factorized_parameters(1, 2, 0.02, 5);
  zeroed.gamma[3] += zeroed.gamma[0];
  zeroed.gamma[0] = 0.0;
  CHECK(kind_of([&] { factorization_jacobian(zeroed); }) == ErrorKind::Domain);

  FactorizedParameters unnormalized = random_factorized_parameters(1, 2, 0.02, 5);
  unnormalized.gamma_prime[0] += 0.01;
  CHECK(kind_of([&] { factorization_jacobian(unnormalized); }) == ErrorKind::Domain);
  CHECK(kind_of([&] { factorized_transition(unnormalized, 0); }) == ErrorKind::Domain);
  CHECK(kind_of([] { random_factorized_parameters(1, 2, 0.3, 1); }) == ErrorKind::Domain);
}

TEST_CASE("numerical rank of simple matrices") {
  DenseMatrix m{3, 3, {1, 2, 3, 2, 4, 6, 0, 1, 1}};
  CHECK(numerical_rank(m, 1e-10) == 2);
  DenseMatrix zero{2, 2, {0, 0, 0, 0}};
  CHECK(numerical_rank(zero, 1e-10) == 0);
  DenseMatrix tiny{2, 2, {1, 0, 0, 1e-14}};
  CHECK(numerical_rank(tiny, 1e-10) == 1);
}

TEST_CASE("figure 1 curves") {
  const DimensionSpec dims = dimensions(5, 2, 2);
  std::vector<double> grid;
  for (int g = 1; g <= 400; ++g) {
    grid.push_back(2.0 * static_cast<double>(dims.r) * g / 400.0);
  }
  grid.insert(grid.begin(), 1e-3);
  const Figure1Table t = figure1_curves(dims, grid, {4, 8, 12, 0});
  CHECK(t.pf_upper.front() == doctest::Approx(1.0));
  CHECK(t.pd_lower.front()[0] == 0.0);
  for (std::size_t g = 1; g < grid.size(); ++g) {
    CHECK(t.pf_upper[g] <= t.pf_upper[g - 1]);
    for (std::size_t c = 0; c < 4; ++c) {
      CHECK(t.pd_lower[g][c] >= t.pd_lower[g - 1][c]);
    }
    CHECK(t.pd_lower[g][0] >= t.pd_lower[g][2]);
    CHECK(t.pd_lower[g][3] == 1.0);
  }
  CHECK(t.pf_upper.back() < 1e-6);
  CHECK(t.pd_lower.back()[2] > 1.0 - 1e-5);

  const std::string csv = figure1_csv(figure1_curves(dims, {100.0}, {4, 12}));
  CHECK(csv.rfind("i_th,pf_upper,pd_lower_n0_4,pd_lower_n0_12\n100,1,0,0\n", 0) == 0);
  CHECK_THROWS_AS(figure1_curves(dims, {}, {4}), Error);
}

TEST_CASE("KL terms of an i.i.d. uniform model follow the chi-squared scale") {
  ExperimentConfig c = default_config("kl-decay");
  c.model.kind = ModelRecipe::Kind::Random;
  c.model.edges = "none";
  const JointMarkovModel model = uniform_independent_model(3, 1, 2);
  const std::string file = (test::scratch_dir("kl_uniform") / "uniform.json").string();
  save_model(model, file);
  c.model.kind = ModelRecipe::Kind::File;
  c.model.file = file;
  c.replicas = 100;
  const ExperimentResult r = kl_decay_suite(c);
  // Full block: 64 cells; the three marginals have 16, 8 and 32 cells.
  const std::vector<std::pair<std::string, double>> cells = {
      {"full", 64}, {"without_source", 16}, {"conditioning", 8}, {"without_target_now", 32}};
  for (const ResultRow &row : r.rows) {
    for (const auto &[name, count] : cells) {
      if (row.statistic == "median_kl_" + name) {
        const double approx = (count - 1.0) / (2.0 * static_cast<double>(row.n - 1));
        CAPTURE(row.statistic);
        CAPTURE(row.n);
        CHECK(row.value >= 0.0);
        CHECK(row.value > 0.5 * approx);
        CHECK(row.value < 1.5 * approx);
      }
    }
  }
}

TEST_CASE("result files") {
  ExperimentConfig c = default_config("rate");
  c.replicas = 30;
  c.n_grid = {1024, 2048, 4096, 8192};
  const ExperimentResult r = rate_dichotomy_suite(c);
  const auto dir = test::scratch_dir("result_files");
  const auto written = write_result(r, c, dir.string());
  CHECK(written.size() == 3);
  const std::string csv = read_text_file((dir / "rate.csv").string());
  CHECK(csv.rfind("suite,n,statistic,value,config_hash\n", 0) == 0);
  CHECK(csv.find(r.config_hash) != std::string::npos);
  const std::string slopes = read_text_file((dir / "rate.slopes.csv").string());
  CHECK(std::count(slopes.begin(), slopes.end(), '\n') == 3);
  CHECK(slopes.find("\nnull,") != std::string::npos);
  CHECK(slopes.find("\nalt,") != std::string::npos);
  const std::string summary = read_text_file((dir / "rate.summary.json").string());
  CHECK(summary.find("\"config_hash\": \"" + r.config_hash + "\"") != std::string::npos);
}
