#include "dig/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>

#include <json.hpp>

#include "dig/error.hpp"
#include "dig/estimate.hpp"
#include "dig/format.hpp"
#include "dig/graphtest.hpp"
#include "dig/numerics.hpp"
#include "dig/parallel.hpp"
#include "dig/simulate.hpp"

namespace dig {

namespace {

using Json = nlohmann::ordered_json;

constexpr int kMinReplicas = 30;

std::string kind_name(ModelRecipe::Kind kind) {
  switch (kind) {
  case ModelRecipe::Kind::Random:
    return "random";
  case ModelRecipe::Kind::BinaryChannel:
    return "binary_channel";
  case ModelRecipe::Kind::File:
    return "file";
  }
  return "random";
}

ModelRecipe::Kind kind_from_name(const std::string &name) {
  if (name == "random") {
    return ModelRecipe::Kind::Random;
  }
  if (name == "binary_channel") {
    return ModelRecipe::Kind::BinaryChannel;
  }
  if (name == "file") {
    return ModelRecipe::Kind::File;
  }
  fail(ErrorKind::Configuration, "unknown model kind '" + name + "'");
}

void validate_grid(const ExperimentConfig &config, int k) {
  require(!config.n_grid.empty(), ErrorKind::Configuration, "n_grid is empty");
  for (std::size_t g = 0; g < config.n_grid.size(); ++g) {
    require(config.n_grid[g] > k + 1, ErrorKind::Configuration,
            "every path length must exceed k + 1");
    if (g > 0) {
      require(config.n_grid[g] > config.n_grid[g - 1], ErrorKind::Configuration,
              "n_grid must be strictly increasing");
    }
  }
  require(config.replicas >= kMinReplicas, ErrorKind::Configuration,
          "distributional suites need at least 30 replicas");
}

void validate_edge(const JointMarkovModel &model, std::pair<int, int> edge) {
  const auto [i, j] = edge;
  require(i >= 0 && j >= 0 && i < model.nodes() && j < model.nodes() && i != j,
          ErrorKind::Configuration, "edge endpoints out of range");
}

std::uint64_t replica_seed(const ExperimentConfig &config, std::size_t grid_index,
                           std::size_t replica) {
  return config.base_seed +
         static_cast<std::uint64_t>(grid_index) *
             static_cast<std::uint64_t>(config.replicas) +
         replica;
}

// Applies `body` to one freshly simulated path per replica at grid point g.
template <typename T, typename Body>
std::vector<T> per_replica(const Simulator &sim, const ExperimentConfig &config,
                           std::size_t g, Body body) {
  std::vector<T> out(static_cast<std::size_t>(config.replicas));
  parallel_for(out.size(), [&](std::size_t r) {
    const SamplePath path =
        sim.run(config.n_grid[g], config.burn_in, replica_seed(config, g, r));
    out[r] = body(path);
  });
  return out;
}

Check range_check(std::string name, double value, double lower, double upper) {
  return Check{std::move(name), value, lower, upper, value >= lower && value <= upper};
}

bool all_passed(const std::vector<Check> &checks) {
  return !checks.empty() &&
         std::all_of(checks.begin(), checks.end(), [](const Check &c) { return c.passed; });
}

ExperimentResult start_result(const ExperimentConfig &config, const std::string &suite) {
  ExperimentResult result;
  result.suite = suite;
  result.config_hash = config_hash(config);
  return result;
}

double divergence(std::span<const double> p, std::span<const double> q) {
  double d = 0.0;
  for (std::size_t c = 0; c < p.size(); ++c) {
    if (p[c] > 0.0) {
      d += p[c] * std::log(p[c] / q[c]);
    }
  }
  return std::max(d, 0.0);
}

Json tolerances_to_json(const Tolerances &t) {
  Json j;
  j["mean_relative"] = t.mean_relative;
  j["ks_coefficient"] = t.ks_coefficient;
  j["clt_se_multiplier"] = t.clt_se_multiplier;
  j["sigma_ratio_low"] = t.sigma_ratio_low;
  j["sigma_ratio_high"] = t.sigma_ratio_high;
  j["null_slope"] = t.null_slope;
  j["alt_slope"] = t.alt_slope;
  j["slope_tolerance"] = t.slope_tolerance;
  j["kl_decay_factor"] = t.kl_decay_factor;
  j["kl_min_range"] = t.kl_min_range;
  j["pivot_threshold"] = t.pivot_threshold;
  j["fd_tolerance"] = t.fd_tolerance;
  j["alpha"] = t.alpha;
  j["rejection_tolerance"] = t.rejection_tolerance;
  j["min_detection_rate"] = t.min_detection_rate;
  return j;
}

template <typename T> void read_field(const Json &j, const char *key, T &field) {
  if (j.contains(key)) {
    field = j.at(key).get<T>();
  }
}

void tolerances_from_json(const Json &j, Tolerances &t) {
  read_field(j, "mean_relative", t.mean_relative);
  read_field(j, "ks_coefficient", t.ks_coefficient);
  read_field(j, "clt_se_multiplier", t.clt_se_multiplier);
  read_field(j, "sigma_ratio_low", t.sigma_ratio_low);
  read_field(j, "sigma_ratio_high", t.sigma_ratio_high);
  read_field(j, "null_slope", t.null_slope);
  read_field(j, "alt_slope", t.alt_slope);
  read_field(j, "slope_tolerance", t.slope_tolerance);
  read_field(j, "kl_decay_factor", t.kl_decay_factor);
  read_field(j, "kl_min_range", t.kl_min_range);
  read_field(j, "pivot_threshold", t.pivot_threshold);
  read_field(j, "fd_tolerance", t.fd_tolerance);
  read_field(j, "alpha", t.alpha);
  read_field(j, "rejection_tolerance", t.rejection_tolerance);
  read_field(j, "min_detection_rate", t.min_detection_rate);
}

std::vector<std::int64_t> dyadic_grid(int first, int last, int step) {
  std::vector<std::int64_t> grid;
  for (int e = first; e <= last; e += step) {
    grid.push_back(std::int64_t{1} << e);
  }
  return grid;
}

} // namespace

JointMarkovModel make_model(const ModelRecipe &recipe) {
  switch (recipe.kind) {
  case ModelRecipe::Kind::BinaryChannel:
    return binary_channel_model(recipe.flip);
  case ModelRecipe::Kind::File:
    return load_model(recipe.file);
  case ModelRecipe::Kind::Random:
    break;
  }
  const Adjacency adj = adjacency_from_spec(recipe.edges, recipe.m, recipe.seed);
  return build_random_model(recipe.m, recipe.k, recipe.alphabet, adj, recipe.epsilon,
                            recipe.seed);
}

ExperimentConfig default_config(const std::string &suite) {
  ExperimentConfig c;
  c.suite = suite;
  if (suite == "null-chi2") {
    c.model.kind = ModelRecipe::Kind::Random;
    c.n_grid = {5000, 10000, 20000};
    c.replicas = 500;
    c.base_seed = 1000;
  } else if (suite == "alt-clt") {
    c.model.kind = ModelRecipe::Kind::BinaryChannel;
    c.n_grid = {10000, 40000};
    c.replicas = 300;
    c.base_seed = 2000;
  } else if (suite == "rate") {
    c.model.kind = ModelRecipe::Kind::BinaryChannel;
    c.n_grid = dyadic_grid(12, 18, 1);
    c.replicas = 200;
    c.base_seed = 3000;
  } else if (suite == "kl-decay") {
    c.model.kind = ModelRecipe::Kind::BinaryChannel;
    c.n_grid = dyadic_grid(12, 16, 2);
    c.replicas = 200;
    c.base_seed = 4000;
  } else if (suite == "jacobian-rank") {
    c.model.kind = ModelRecipe::Kind::Random;
    c.trials = 50;
    c.base_seed = 5000;
  } else if (suite == "single-edge") {
    c.model.kind = ModelRecipe::Kind::BinaryChannel;
    c.n_grid = {100000};
    c.replicas = 500;
    c.base_seed = 6000;
  } else {
    fail(ErrorKind::Configuration, "unknown suite '" + suite + "'");
  }
  return c;
}

ExperimentConfig config_from_json(const std::string &suite, const std::string &json_text) {
  ExperimentConfig c = default_config(suite);
  try {
    const Json j = Json::parse(json_text);
    require(j.is_object(), ErrorKind::Parse, "experiment config must be a JSON object");
    if (j.contains("suite")) {
      require(j.at("suite").get<std::string>() == suite, ErrorKind::Configuration,
              "config file names a different suite");
    }
    if (j.contains("model")) {
      const Json &m = j.at("model");
      if (m.contains("kind")) {
        c.model.kind = kind_from_name(m.at("kind").get<std::string>());
      }
      read_field(m, "m", c.model.m);
      read_field(m, "k", c.model.k);
      read_field(m, "alphabet", c.model.alphabet);
      read_field(m, "edges", c.model.edges);
      read_field(m, "epsilon", c.model.epsilon);
      read_field(m, "seed", c.model.seed);
      read_field(m, "flip", c.model.flip);
      read_field(m, "file", c.model.file);
    }
    read_field(j, "n_grid", c.n_grid);
    read_field(j, "replicas", c.replicas);
    read_field(j, "base_seed", c.base_seed);
    read_field(j, "burn_in", c.burn_in);
    read_field(j, "edge", c.edge);
    read_field(j, "null_edge", c.null_edge);
    read_field(j, "trials", c.trials);
    read_field(j, "fd_checks_per_trial", c.fd_checks_per_trial);
    if (j.contains("tolerances")) {
      tolerances_from_json(j.at("tolerances"), c.tolerances);
    }
  } catch (const nlohmann::json::exception &e) {
    fail(ErrorKind::Parse, std::string("invalid experiment config: ") + e.what());
  }
  return c;
}

std::string config_to_json(const ExperimentConfig &c) {
  Json j;
  j["suite"] = c.suite;
  Json m;
  m["kind"] = kind_name(c.model.kind);
  m["m"] = c.model.m;
  m["k"] = c.model.k;
  m["alphabet"] = c.model.alphabet;
  m["edges"] = c.model.edges;
  m["epsilon"] = c.model.epsilon;
  m["seed"] = c.model.seed;
  m["flip"] = c.model.flip;
  m["file"] = c.model.file;
  j["model"] = m;
  j["n_grid"] = c.n_grid;
  j["replicas"] = c.replicas;
  j["base_seed"] = c.base_seed;
  j["burn_in"] = c.burn_in;
  j["edge"] = {c.edge.first, c.edge.second};
  j["null_edge"] = {c.null_edge.first, c.null_edge.second};
  j["trials"] = c.trials;
  j["fd_checks_per_trial"] = c.fd_checks_per_trial;
  j["tolerances"] = tolerances_to_json(c.tolerances);
  return j.dump(2) + "\n";
}

std::string config_hash(const ExperimentConfig &config) {
  return fnv1a_hex(config_to_json(config));
}

std::vector<double> scaled_errors(const JointMarkovModel &model, int i, int j,
                                  std::int64_t n, std::int64_t burn_in,
                                  std::uint64_t base_seed, int replicas) {
  const double i_bar = exact_directed_info(model, i, j);
  const Simulator sim(model);
  const int k = model.order();
  std::vector<double> out(static_cast<std::size_t>(replicas));
  parallel_for(out.size(), [&](std::size_t r) {
    const SamplePath path = sim.run(n, burn_in, base_seed + r);
    const double di = plug_in_directed_info(path, k, i, j).di_hat;
    out[r] = std::sqrt(static_cast<double>(n - k)) * (di - i_bar);
  });
  return out;
}

double estimate_sigma(const std::vector<double> &errors) {
  require(errors.size() >= 2, ErrorKind::Domain, "sigma needs at least two samples");
  return summarize(errors).sd;
}

double estimate_sigma(const ExperimentConfig &config) {
  const JointMarkovModel model = make_model(config.model);
  validate_edge(model, config.edge);
  validate_grid(config, model.order());
  const double i_bar = exact_directed_info(model, config.edge.first, config.edge.second);
  require(i_bar >= kDeltaFloor, ErrorKind::Configuration,
          "sigma estimation needs a true edge");
  const std::size_t last = config.n_grid.size() - 1;
  return estimate_sigma(scaled_errors(model, config.edge.first, config.edge.second,
                                      config.n_grid[last], config.burn_in,
                                      replica_seed(config, last, 0), config.replicas));
}

ExperimentResult null_chi2_suite(const ExperimentConfig &config) {
  const JointMarkovModel model = make_model(config.model);
  validate_edge(model, config.edge);
  validate_grid(config, model.order());
  const auto [i, j] = config.edge;
  require(!model.parents()(i, j), ErrorKind::Configuration,
          "null suite needs an edge that is absent from the model");
  const DimensionSpec dims = dimensions(model.nodes(), model.order(), model.alphabet());
  const long dof = static_cast<long>(dims.dof_null);
  const auto cdf = [dof](double x) { return static_cast<double>(chi2_cdf(dof, x)); };

  ExperimentResult result = start_result(config, "null-chi2");
  const Simulator sim(model);
  const int k = model.order();
  double last_mean = 0.0;
  double last_ks = 0.0;
  for (std::size_t g = 0; g < config.n_grid.size(); ++g) {
    const auto stats = per_replica<double>(sim, config, g, [&](const SamplePath &path) {
      return 2.0 * plug_in_directed_info(path, k, i, j).lambda;
    });
    const SampleSummary s = summarize(stats);
    const double ks = ks_statistic(stats, cdf);
    const std::int64_t n = config.n_grid[g];
    result.rows.push_back({n, "mean_2lambda", s.mean});
    result.rows.push_back({n, "variance_2lambda", s.variance});
    result.rows.push_back({n, "ks_chi2", ks});
    last_mean = s.mean;
    last_ks = ks;
  }
  const double d = static_cast<double>(dof);
  const double tol = config.tolerances.mean_relative;
  result.checks.push_back(range_check("mean_2lambda", last_mean, d * (1.0 - tol), d * (1.0 + tol)));
  const double ks_limit =
      config.tolerances.ks_coefficient / std::sqrt(static_cast<double>(config.replicas));
  Check ks{"ks_chi2", last_ks, 0.0, ks_limit, last_ks < ks_limit};
  result.checks.push_back(ks);
  result.passed = all_passed(result.checks);
  return result;
}

ExperimentResult alternative_clt_suite(const ExperimentConfig &config) {
  const JointMarkovModel model = make_model(config.model);
  validate_edge(model, config.edge);
  validate_grid(config, model.order());
  const auto [i, j] = config.edge;
  const double i_bar = exact_directed_info(model, i, j);
  require(i_bar >= kDeltaFloor, ErrorKind::Configuration,
          "alternative suite needs an edge with directed information above the floor");

  ExperimentResult result = start_result(config, "alt-clt");
  result.rows.push_back({0, "exact_directed_info", i_bar});
  const Simulator sim(model);
  const int k = model.order();
  std::vector<double> sds;
  for (std::size_t g = 0; g < config.n_grid.size(); ++g) {
    const std::int64_t n = config.n_grid[g];
    const double scale = std::sqrt(static_cast<double>(n - k));
    const auto errors = per_replica<double>(sim, config, g, [&](const SamplePath &path) {
      return scale * (plug_in_directed_info(path, k, i, j).di_hat - i_bar);
    });
    const SampleSummary s = summarize(errors);
    result.rows.push_back({n, "mean_scaled_error", s.mean});
    result.rows.push_back({n, "sd_scaled_error", s.sd});
    result.rows.push_back({n, "skewness_scaled_error", s.skewness});
    const double limit = config.tolerances.clt_se_multiplier * s.sd /
                         std::sqrt(static_cast<double>(config.replicas));
    result.checks.push_back(range_check("abs_mean_scaled_error_n" + std::to_string(n),
                                        std::abs(s.mean), 0.0, limit));
    sds.push_back(s.sd);
  }
  if (sds.size() >= 2) {
    const double ratio = sds[sds.size() - 2] / sds.back();
    result.rows.push_back({0, "sd_ratio", ratio});
    result.checks.push_back(range_check("sd_ratio", ratio, config.tolerances.sigma_ratio_low,
                                        config.tolerances.sigma_ratio_high));
  }
  result.passed = all_passed(result.checks);
  return result;
}

RateFit fit_rate(const std::vector<std::int64_t> &n_grid, int k,
                 const std::vector<double> &medians, double target, double tolerance,
                 const std::string &name) {
  require(n_grid.size() == medians.size(), ErrorKind::Domain,
          "grid and medians differ in length");
  require(n_grid.size() >= 4, ErrorKind::Configuration,
          "rate fits need at least four grid points");
  std::vector<std::pair<double, double>> points;
  for (std::size_t g = 0; g < n_grid.size(); ++g) {
    points.emplace_back(static_cast<double>(n_grid[g] - k), medians[g]);
  }
  RateFit fit;
  fit.slope = loglog_slope(points);
  fit.check = range_check(name, fit.slope, target - tolerance, target + tolerance);
  return fit;
}

ExperimentResult rate_dichotomy_suite(const ExperimentConfig &config) {
  const JointMarkovModel model = make_model(config.model);
  validate_edge(model, config.edge);
  validate_edge(model, config.null_edge);
  require(config.n_grid.size() >= 4, ErrorKind::Configuration,
          "rate suite needs at least four grid points");
  validate_grid(config, model.order());
  const double i_bar = exact_directed_info(model, config.edge.first, config.edge.second);
  const double null_bar =
      exact_directed_info(model, config.null_edge.first, config.null_edge.second);
  require(i_bar >= kDeltaFloor, ErrorKind::Configuration, "rate suite needs a true edge");
  require(null_bar <= kEdgePresenceCutoff, ErrorKind::Configuration,
          "rate suite needs a null edge");

  ExperimentResult result = start_result(config, "rate");
  const Simulator sim(model);
  const int k = model.order();
  std::vector<double> null_medians;
  std::vector<double> alt_medians;
  for (std::size_t g = 0; g < config.n_grid.size(); ++g) {
    const auto pairs = per_replica<std::pair<double, double>>(
        sim, config, g, [&](const SamplePath &path) {
          const auto dist = empirical_block_distribution(path, k);
          const double null_di =
              plug_in_directed_info(dist, config.null_edge.first, config.null_edge.second)
                  .di_hat;
          const double alt_di =
              plug_in_directed_info(dist, config.edge.first, config.edge.second).di_hat;
          return std::make_pair(std::abs(null_di), std::abs(alt_di - i_bar));
        });
    std::vector<double> nulls;
    std::vector<double> alts;
    for (const auto &[a, b] : pairs) {
      nulls.push_back(a);
      alts.push_back(b);
    }
    null_medians.push_back(median(nulls));
    alt_medians.push_back(median(alts));
    result.rows.push_back({config.n_grid[g], "median_abs_null", null_medians.back()});
    result.rows.push_back({config.n_grid[g], "median_abs_alt_error", alt_medians.back()});
  }
  const Tolerances &t = config.tolerances;
  const RateFit null_fit =
      fit_rate(config.n_grid, k, null_medians, t.null_slope, t.slope_tolerance, "null_slope");
  const RateFit alt_fit =
      fit_rate(config.n_grid, k, alt_medians, t.alt_slope, t.slope_tolerance, "alt_slope");
  result.rows.push_back({0, "null_slope", null_fit.slope});
  result.rows.push_back({0, "alt_slope", alt_fit.slope});
  result.checks.push_back(null_fit.check);
  result.checks.push_back(alt_fit.check);
  result.passed = all_passed(result.checks);
  return result;
}

ExperimentResult kl_decay_suite(const ExperimentConfig &config) {
  const JointMarkovModel model = make_model(config.model);
  validate_edge(model, config.edge);
  validate_grid(config, model.order());
  require(model.fits_exact_analysis(), ErrorKind::Configuration,
          "model exceeds the exact-analysis size guard");
  const double range = static_cast<double>(config.n_grid.back()) /
                       static_cast<double>(config.n_grid.front());
  require(range >= config.tolerances.kl_min_range, ErrorKind::Configuration,
          "kl-decay grid must span the declared range");

  const StationaryBlockDistribution exact = stationary_distribution(model);
  const DirectedInfoLayouts layouts =
      directed_info_layouts(exact.layout, config.edge.first, config.edge.second);
  const std::vector<std::pair<std::string, const BlockLayout *>> terms = {
      {"full", &exact.layout},
      {"without_source", &layouts.without_source},
      {"conditioning", &layouts.conditioning},
      {"without_target_now", &layouts.without_target_now}};
  std::vector<std::vector<double>> exact_marginals;
  std::vector<std::vector<std::size_t>> maps;
  for (const auto &[name, layout] : terms) {
    exact_marginals.push_back(marginal_values<double>(
        exact.layout, std::span<const double>(exact.probabilities), *layout));
    maps.push_back(projection_map(exact.layout, *layout));
  }

  ExperimentResult result = start_result(config, "kl-decay");
  const Simulator sim(model);
  const int k = model.order();
  std::vector<std::vector<double>> scaled(terms.size());
  for (std::size_t g = 0; g < config.n_grid.size(); ++g) {
    const std::int64_t n = config.n_grid[g];
    const double root = std::sqrt(static_cast<double>(n - k));
    const auto divs = per_replica<std::vector<double>>(
        sim, config, g, [&](const SamplePath &path) {
          const auto p_hat = empirical_block_distribution(path, k).probabilities();
          std::vector<double> out;
          for (std::size_t t = 0; t < terms.size(); ++t) {
            std::vector<double> marginal(exact_marginals[t].size(), 0.0);
            for (std::size_t c = 0; c < p_hat.size(); ++c) {
              marginal[maps[t][c]] += p_hat[c];
            }
            out.push_back(divergence(marginal, exact_marginals[t]));
          }
          return out;
        });
    for (std::size_t t = 0; t < terms.size(); ++t) {
      std::vector<double> values;
      for (const auto &d : divs) {
        values.push_back(d[t]);
      }
      const double med = median(values);
      result.rows.push_back({n, "median_kl_" + terms[t].first, med});
      result.rows.push_back({n, "median_scaled_kl_" + terms[t].first, root * med});
      scaled[t].push_back(root * med);
    }
  }
  for (std::size_t t = 0; t < terms.size(); ++t) {
    const double factor = scaled[t].front() / scaled[t].back();
    result.rows.push_back({0, "decay_factor_" + terms[t].first, factor});
    result.checks.push_back(range_check("decay_factor_" + terms[t].first, factor,
                                        config.tolerances.kl_decay_factor,
                                        std::numeric_limits<double>::infinity()));
  }
  result.passed = all_passed(result.checks);
  return result;
}

ExperimentResult single_edge_suite(const ExperimentConfig &config) {
  const JointMarkovModel model = make_model(config.model);
  validate_edge(model, config.edge);
  validate_edge(model, config.null_edge);
  validate_grid(config, model.order());
  require(exact_directed_info(model, config.edge.first, config.edge.second) >= kDeltaFloor,
          ErrorKind::Configuration, "single-edge suite needs a true edge");
  require(exact_directed_info(model, config.null_edge.first, config.null_edge.second) <=
              kEdgePresenceCutoff,
          ErrorKind::Configuration, "single-edge suite needs a null edge");
  const DimensionSpec dims = dimensions(model.nodes(), model.order(), model.alphabet());
  const Tolerances &t = config.tolerances;
  const double i_th = calibrate_threshold(dims, t.alpha, true);

  ExperimentResult result = start_result(config, "single-edge");
  result.rows.push_back({0, "threshold", i_th});
  const Simulator sim(model);
  const int k = model.order();
  const std::size_t last = config.n_grid.size() - 1;
  for (std::size_t g = 0; g < config.n_grid.size(); ++g) {
    const auto decisions = per_replica<std::pair<int, int>>(
        sim, config, g, [&](const SamplePath &path) {
          const auto dist = empirical_block_distribution(path, k);
          const auto null_stat =
              plug_in_directed_info(dist, config.null_edge.first, config.null_edge.second);
          const auto alt_stat =
              plug_in_directed_info(dist, config.edge.first, config.edge.second);
          return std::make_pair(edge_decision(null_stat, i_th) ? 1 : 0,
                                edge_decision(alt_stat, i_th) ? 1 : 0);
        });
    double false_alarms = 0.0;
    double detections = 0.0;
    for (const auto &[fa, det] : decisions) {
      false_alarms += fa;
      detections += det;
    }
    const double reps = static_cast<double>(config.replicas);
    const std::int64_t n = config.n_grid[g];
    result.rows.push_back({n, "null_rejection_rate", false_alarms / reps});
    result.rows.push_back({n, "detection_rate", detections / reps});
    if (g == last) {
      result.checks.push_back(range_check("null_rejection_rate", false_alarms / reps,
                                          t.alpha - t.rejection_tolerance,
                                          t.alpha + t.rejection_tolerance));
      result.checks.push_back(
          range_check("detection_rate", detections / reps, t.min_detection_rate, 1.0));
    }
  }
  result.passed = all_passed(result.checks);
  return result;
}

ExperimentResult run_suite(const ExperimentConfig &config) {
  if (config.suite == "null-chi2") {
    return null_chi2_suite(config);
  }
  if (config.suite == "alt-clt") {
    return alternative_clt_suite(config);
  }
  if (config.suite == "rate") {
    return rate_dichotomy_suite(config);
  }
  if (config.suite == "kl-decay") {
    return kl_decay_suite(config);
  }
  if (config.suite == "jacobian-rank") {
    return jacobian_rank_suite(config);
  }
  if (config.suite == "single-edge") {
    return single_edge_suite(config);
  }
  fail(ErrorKind::Configuration, "unknown suite '" + config.suite + "'");
}

Figure1Table figure1_curves(const DimensionSpec &dims, const std::vector<double> &i_th_grid,
                            const std::vector<int> &n0_list) {
  require(!i_th_grid.empty(), ErrorKind::Domain, "threshold grid is empty");
  Figure1Table table;
  table.n0_list = n0_list;
  for (double i_th : i_th_grid) {
    table.i_th.push_back(i_th);
    table.pf_upper.push_back(false_alarm_upper_bound(dims, i_th));
    std::vector<double> row;
    for (int n0 : n0_list) {
      row.push_back(detection_lower_bound(dims, i_th, n0));
    }
    table.pd_lower.push_back(std::move(row));
  }
  return table;
}

std::string figure1_csv(const Figure1Table &table) {
  std::string out = "i_th,pf_upper";
  for (int n0 : table.n0_list) {
    out += ",pd_lower_n0_" + std::to_string(n0);
  }
  out += "\n";
  for (std::size_t g = 0; g < table.i_th.size(); ++g) {
    out += format_number(table.i_th[g]) + "," + format_number(table.pf_upper[g]);
    for (double pd : table.pd_lower[g]) {
      out += "," + format_number(pd);
    }
    out += "\n";
  }
  return out;
}

std::string result_rows_csv(const ExperimentResult &result) {
  std::string out = "suite,n,statistic,value,config_hash\n";
  for (const ResultRow &row : result.rows) {
    out += result.suite + "," + std::to_string(row.n) + "," + row.statistic + "," +
           format_number(row.value) + "," + result.config_hash + "\n";
  }
  return out;
}

std::string result_summary_json(const ExperimentResult &result,
                                const ExperimentConfig &config) {
  Json doc;
  doc["suite"] = result.suite;
  doc["config_hash"] = result.config_hash;
  doc["passed"] = result.passed;
  auto checks = Json::array();
  for (const Check &c : result.checks) {
    Json entry;
    entry["name"] = c.name;
    entry["value"] = format_number(c.value);
    entry["lower"] = format_number(c.lower);
    entry["upper"] = format_number(c.upper);
    entry["passed"] = c.passed;
    checks.push_back(entry);
  }
  doc["checks"] = checks;
  doc["config"] = Json::parse(config_to_json(config));
  return doc.dump(2) + "\n";
}

std::vector<std::string> write_result(const ExperimentResult &result,
                                      const ExperimentConfig &config,
                                      const std::string &directory) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(directory, ec);
  require(!ec, ErrorKind::Io, "cannot create output directory '" + directory + "'");
  const fs::path dir(directory);
  std::vector<std::string> written;
  const std::string csv = (dir / (result.suite + ".csv")).string();
  write_text_file(csv, result_rows_csv(result));
  written.push_back(csv);
  const std::string summary = (dir / (result.suite + ".summary.json")).string();
  write_text_file(summary, result_summary_json(result, config));
  written.push_back(summary);
  if (result.suite == "rate") {
    std::string slopes = "edge,slope,target,passed,config_hash\n";
    for (const Check &c : result.checks) {
      const std::string edge = c.name == "null_slope" ? "null" : "alt";
      slopes += edge + "," + format_number(c.value) + "," +
                format_number(0.5 * (c.lower + c.upper)) + "," +
                (c.passed ? "true" : "false") + "," + result.config_hash + "\n";
    }
    const std::string path = (dir / (result.suite + ".slopes.csv")).string();
    write_text_file(path, slopes);
    written.push_back(path);
  }
  return written;
}

} // namespace dig
