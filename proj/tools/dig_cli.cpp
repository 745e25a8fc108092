// Command-line front end. Everything goes through the C interface in dig.h.

#include <algorithm>
#include <cctype>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "dig/dig.h"

namespace {

using Json = nlohmann::ordered_json;

enum ExitCode { kPass = 0, kReject = 1, kUsage = 2, kResource = 3 };

// Carries a failed library status out to main().
struct Failure {
  dig_status status;
  std::string message;
};

void check(dig_status status) {
  if (status != DIG_OK) {
    throw Failure{status, dig_last_error()};
  }
}

struct UsageError {
  std::string message;
};

std::string number(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::general, 9);
  return std::string(buf, res.ptr);
}

std::string hash_text(const std::string &text) {
  char buf[17];
  check(dig_hash_text(text.c_str(), buf, sizeof buf));
  return buf;
}

std::string read_file(const std::string &file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) {
    throw UsageError{"cannot read '" + file + "'"};
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Model {
  dig_model *ptr = nullptr;
  ~Model() { dig_model_free(ptr); }
};

struct Path {
  dig_path *ptr = nullptr;
  ~Path() { dig_path_free(ptr); }
};

struct Report {
  dig_report *ptr = nullptr;
  ~Report() { dig_report_free(ptr); }
};

// Records what a run read and wrote. Written next to the primary output.
class Manifest {
public:
  explicit Manifest(std::string subcommand)
      : subcommand_(std::move(subcommand)), start_(std::chrono::steady_clock::now()) {}

  void input(const std::string &name, const std::string &value) { inputs_[name] = value; }
  void output(const std::string &file) { outputs_.push_back(file); }
  void config_hash(const std::string &hash) { hash_ = hash; }

  // Hash of the canonical argument list, used when no experiment config exists.
  void hash_inputs() { hash_ = hash_text(subcommand_ + "\n" + inputs_.dump()); }

  void write(const std::string &file) const {
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    Json doc;
    doc["subcommand"] = subcommand_;
    doc["inputs"] = inputs_;
    doc["outputs"] = outputs_;
    doc["config_hash"] = hash_;
    doc["tool_version"] = dig_version();
    doc["wall_clock_seconds"] = number(seconds);
    std::ofstream out(file, std::ios::binary);
    if (!out) {
      throw Failure{DIG_ERR_IO, "cannot write manifest '" + file + "'"};
    }
    out << doc.dump(2) << "\n";
  }

private:
  std::string subcommand_;
  std::chrono::steady_clock::time_point start_;
  Json inputs_ = Json::object();
  Json outputs_ = Json::array();
  std::string hash_;
};

std::string manifest_path(const std::string &output) { return output + ".manifest.json"; }

std::vector<double> parse_grid(const std::string &text) {
  std::vector<double> grid;
  auto to_double = [&](const std::string &item) {
    double v = 0.0;
    const auto res = std::from_chars(item.data(), item.data() + item.size(), v);
    if (res.ec != std::errc() || res.ptr != item.data() + item.size() || !std::isfinite(v)) {
      throw UsageError{"bad number '" + item + "' in grid"};
    }
    return v;
  };
  const auto colon = text.find(':');
  if (colon != std::string::npos) {
    const auto second = text.find(':', colon + 1);
    if (second == std::string::npos) {
      throw UsageError{"grid range must be start:stop:count"};
    }
    const double start = to_double(text.substr(0, colon));
    const double stop = to_double(text.substr(colon + 1, second - colon - 1));
    const double count = to_double(text.substr(second + 1));
    if (count < 1 || count != std::floor(count) || stop < start) {
      throw UsageError{"grid range needs count >= 1 and stop >= start"};
    }
    const auto points = static_cast<std::size_t>(count);
    for (std::size_t g = 0; g < points; ++g) {
      grid.push_back(points == 1 ? start
                                 : start + (stop - start) * static_cast<double>(g) /
                                               static_cast<double>(points - 1));
    }
  } else {
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
      grid.push_back(to_double(item));
    }
  }
  if (grid.empty()) {
    throw UsageError{"grid is empty"};
  }
  for (double v : grid) {
    if (v <= 0.0) {
      throw UsageError{"grid thresholds must be positive"};
    }
  }
  return grid;
}

std::vector<int> parse_int_list(const std::string &text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    int v = 0;
    const auto res = std::from_chars(item.data(), item.data() + item.size(), v);
    if (res.ec != std::errc() || res.ptr != item.data() + item.size() || v < 0) {
      throw UsageError{"bad entry '" + item + "' in list"};
    }
    out.push_back(v);
  }
  return out;
}

struct GenModelArgs {
  int m = 3;
  int k = 1;
  int alphabet = 2;
  std::string edges = "none";
  std::optional<double> density;
  double epsilon = 0.02;
  std::uint64_t seed = 0;
  std::string out;
};

int cmd_gen_model(const GenModelArgs &a) {
  const std::string edges = a.density ? "density=" + number(*a.density) : a.edges;
  Manifest manifest("gen-model");
  manifest.input("m", std::to_string(a.m));
  manifest.input("k", std::to_string(a.k));
  manifest.input("alphabet", std::to_string(a.alphabet));
  manifest.input("edges", edges);
  manifest.input("epsilon", number(a.epsilon));
  manifest.input("seed", std::to_string(a.seed));

  Model model;
  check(dig_model_generate(a.m, a.k, a.alphabet, edges.c_str(), a.epsilon, a.seed, &model.ptr));
  check(dig_model_save(model.ptr, a.out.c_str()));
  manifest.output(a.out);

  dig_dimensions dims{};
  check(dig_dimensions_compute(a.m, a.k, a.alphabet, &dims));
  std::printf("r %lld\nd %lld\nd_prime %lld\ndof_null %lld\n", static_cast<long long>(dims.r),
              static_cast<long long>(dims.d), static_cast<long long>(dims.d_prime),
              static_cast<long long>(dims.dof_null));
  std::printf("source,target,edge,exact_di\n");
  for (int i = 0; i < a.m; ++i) {
    for (int j = 0; j < a.m; ++j) {
      if (i == j) {
        continue;
      }
      int present = 0;
      double di = 0.0;
      check(dig_model_edge(model.ptr, i, j, &present));
      check(dig_model_exact_di(model.ptr, i, j, &di));
      std::printf("%d,%d,%d,%.6f\n", i, j, present, di);
    }
  }
  manifest.hash_inputs();
  manifest.write(manifest_path(a.out));
  return kPass;
}

struct SimulateArgs {
  std::string model;
  std::int64_t n = 0;
  std::int64_t burn_in = -1;
  std::uint64_t seed = 0;
  std::string out;
};

int cmd_simulate(const SimulateArgs &a) {
  Manifest manifest("simulate");
  manifest.input("model", a.model);
  manifest.input("model_hash", hash_text(read_file(a.model)));
  manifest.input("n", std::to_string(a.n));
  manifest.input("burn_in", std::to_string(a.burn_in));
  manifest.input("seed", std::to_string(a.seed));
  Model model;
  check(dig_model_load(a.model.c_str(), &model.ptr));
  Path path;
  check(dig_simulate(model.ptr, a.n, a.burn_in, a.seed, &path.ptr));
  check(dig_path_save_csv(path.ptr, a.out.c_str()));
  manifest.output(a.out);
  manifest.hash_inputs();
  manifest.write(manifest_path(a.out));
  return kPass;
}

struct TestGraphArgs {
  std::string path;
  int k = 1;
  int alphabet = 0;
  std::optional<double> threshold;
  std::optional<double> alpha;
  bool single_edge = false;
  std::optional<std::string> hypothesis;
  std::string out;
};

int cmd_test_graph(const TestGraphArgs &a) {
  if (a.threshold.has_value() == a.alpha.has_value()) {
    throw UsageError{"give exactly one of --threshold and --alpha"};
  }
  Manifest manifest("test-graph");
  manifest.input("path", a.path);
  manifest.input("path_hash", hash_text(read_file(a.path)));
  manifest.input("k", std::to_string(a.k));
  manifest.input("alphabet", std::to_string(a.alphabet));

  Path path;
  check(dig_path_load_csv(a.path.c_str(), &path.ptr));
  int m = 0;
  int path_alphabet = 0;
  check(dig_path_info(path.ptr, &m, nullptr, &path_alphabet));
  const int alphabet = a.alphabet > 0 ? a.alphabet : path_alphabet;

  double i_th = 0.0;
  if (a.threshold) {
    i_th = *a.threshold;
    manifest.input("threshold", number(i_th));
  } else {
    check(dig_calibrate_threshold(m, a.k, alphabet, *a.alpha, a.single_edge ? 1 : 0, &i_th));
    manifest.input("alpha", number(*a.alpha));
    manifest.input("single_edge", a.single_edge ? "true" : "false");
    manifest.input("calibrated_threshold", number(i_th));
  }

  std::vector<int> hypothesis;
  if (a.hypothesis) {
    std::string spec = *a.hypothesis;
    if (std::filesystem::is_regular_file(spec)) {
      spec = read_file(spec);
      while (!spec.empty() && std::isspace(static_cast<unsigned char>(spec.back()))) {
        spec.pop_back();
      }
    }
    manifest.input("hypothesis", spec);
    hypothesis.assign(static_cast<std::size_t>(m) * static_cast<std::size_t>(m), 0);
    check(dig_adjacency_parse(spec.c_str(), m, 0, hypothesis.data()));
  }

  Report report;
  check(dig_test_graph(path.ptr, a.k, alphabet, i_th,
                       hypothesis.empty() ? nullptr : hypothesis.data(), &report.ptr));
  check(dig_report_save_json(report.ptr, a.out.c_str()));
  manifest.output(a.out);
  manifest.hash_inputs();
  manifest.write(manifest_path(a.out));

  int accepted = -1;
  check(dig_report_accepted(report.ptr, &accepted));
  std::printf("threshold %s\n", number(i_th).c_str());
  if (accepted >= 0) {
    std::printf("hypothesis %s\n", accepted == 1 ? "accepted" : "rejected");
  }
  return accepted == 0 ? kReject : kPass;
}

struct BoundsArgs {
  int m = 5;
  int k = 2;
  int alphabet = 2;
  std::string grid;
  std::string n0 = "4,8,12,16,20";
  std::string out;
};

int cmd_bounds(const BoundsArgs &a) {
  dig_dimensions dims{};
  check(dig_dimensions_compute(a.m, a.k, a.alphabet, &dims));
  std::string grid_text = a.grid;
  if (grid_text.empty()) {
    const double top = 2.0 * static_cast<double>(dims.r);
    grid_text = number(top / 2000.0) + ":" + number(top) + ":2000";
  }
  const std::vector<double> grid = parse_grid(grid_text);
  const std::vector<int> n0 = parse_int_list(a.n0);

  Manifest manifest("bounds");
  manifest.input("m", std::to_string(a.m));
  manifest.input("k", std::to_string(a.k));
  manifest.input("alphabet", std::to_string(a.alphabet));
  manifest.input("grid", grid_text);
  manifest.input("n0", a.n0);
  check(dig_bounds_csv(a.m, a.k, a.alphabet, grid.data(), grid.size(), n0.data(), n0.size(),
                       a.out.c_str()));
  manifest.output(a.out);
  manifest.hash_inputs();
  manifest.write(manifest_path(a.out));
  return kPass;
}

struct ExperimentArgs {
  std::string suite;
  std::string config;
  std::string out_dir = ".";
};

int cmd_experiment(const ExperimentArgs &a) {
  static const std::vector<std::string> suites = {"null-chi2", "alt-clt", "rate",
                                                  "kl-decay", "jacobian-rank", "single-edge"};
  if (std::find(suites.begin(), suites.end(), a.suite) == suites.end()) {
    throw UsageError{"unknown suite '" + a.suite + "'"};
  }
  const char *config = a.config.empty() ? nullptr : a.config.c_str();
  char hash[17];
  check(dig_experiment_config_hash(a.suite.c_str(), config, hash, sizeof hash));

  Manifest manifest("experiment");
  manifest.input("suite", a.suite);
  manifest.input("config", a.config);
  manifest.config_hash(hash);
  int passed = 0;
  check(dig_experiment_run(a.suite.c_str(), config, a.out_dir.c_str(), &passed));
  const std::filesystem::path dir(a.out_dir);
  manifest.output((dir / (a.suite + ".csv")).string());
  manifest.output((dir / (a.suite + ".summary.json")).string());
  if (a.suite == "rate") {
    manifest.output((dir / (a.suite + ".slopes.csv")).string());
  }
  manifest.write((dir / (a.suite + ".manifest.json")).string());
  std::printf("%s %s config_hash=%s\n", a.suite.c_str(), passed ? "pass" : "fail", hash);
  return passed ? kPass : kReject;
}

int exit_code_for(dig_status status) {
  return status == DIG_ERR_RESOURCE ? kResource : kUsage;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Directed information graph estimation and testing"};
  app.set_version_flag("--version", std::string(dig_version()));
  app.require_subcommand(1);

  GenModelArgs gen;
  auto *gen_cmd = app.add_subcommand("gen-model", "Draw a random model and save it as JSON");
  gen_cmd->add_option("--m", gen.m, "Number of nodes")->check(CLI::PositiveNumber);
  gen_cmd->add_option("--k", gen.k, "Markov order")->check(CLI::PositiveNumber);
  gen_cmd->add_option("--alphabet", gen.alphabet, "Alphabet size")->check(CLI::Range(2, 256));
  auto *edges_opt =
      gen_cmd->add_option("--edges", gen.edges, "Adjacency: none, all, 0>1,..., rows, density=p");
  gen_cmd->add_option("--density", gen.density, "Edge probability for a random adjacency")
      ->check(CLI::Range(0.0, 1.0))
      ->excludes(edges_opt);
  gen_cmd->add_option("--epsilon", gen.epsilon, "Lower bound on every transition probability");
  gen_cmd->add_option("--seed", gen.seed, "Random seed");
  gen_cmd->add_option("--out", gen.out, "Model file")->required();

  SimulateArgs sim;
  auto *sim_cmd = app.add_subcommand("simulate", "Simulate a path from a model file");
  sim_cmd->add_option("--model", sim.model, "Model file")->required();
  sim_cmd->add_option("--n", sim.n, "Path length")->required()->check(CLI::PositiveNumber);
  sim_cmd->add_option("--burn-in", sim.burn_in, "Burn-in steps (default 1000 k)");
  sim_cmd->add_option("--seed", sim.seed, "Random seed");
  sim_cmd->add_option("--out", sim.out, "Path CSV")->required();

  TestGraphArgs tg;
  auto *tg_cmd = app.add_subcommand("test-graph", "Estimate the graph of a path and test it");
  tg_cmd->add_option("--path", tg.path, "Path CSV")->required();
  tg_cmd->add_option("--k", tg.k, "Markov order")->check(CLI::PositiveNumber);
  tg_cmd->add_option("--alphabet", tg.alphabet, "Alphabet size (default: from the path)");
  tg_cmd->add_option("--threshold", tg.threshold, "Decision threshold on (n-k) * DI");
  tg_cmd->add_option("--alpha", tg.alpha, "Target false-alarm bound; calibrates the threshold");
  tg_cmd->add_flag("--single-edge", tg.single_edge,
                   "Calibrate --alpha against one edge instead of the whole graph");
  tg_cmd->add_option("--hypothesis", tg.hypothesis, "Hypothesis adjacency (spec or file)");
  tg_cmd->add_option("--out", tg.out, "Report JSON")->required();

  BoundsArgs bounds;
  auto *bounds_cmd = app.add_subcommand("bounds", "Asymptotic false-alarm and detection bounds");
  bounds_cmd->add_option("--m", bounds.m, "Number of nodes")->check(CLI::PositiveNumber);
  bounds_cmd->add_option("--k", bounds.k, "Markov order")->check(CLI::PositiveNumber);
  bounds_cmd->add_option("--alphabet", bounds.alphabet, "Alphabet size")->check(CLI::Range(2, 256));
  bounds_cmd->add_option("--grid", bounds.grid, "Thresholds: a,b,c or start:stop:count");
  bounds_cmd->add_option("--n0", bounds.n0, "Comma-separated absent-edge counts");
  bounds_cmd->add_option("--out", bounds.out, "Curves CSV")->required();

  ExperimentArgs exp;
  auto *exp_cmd = app.add_subcommand("experiment", "Run a Monte Carlo validation suite");
  exp_cmd->add_option("suite", exp.suite, "Suite name")->required();
  exp_cmd->add_option("--config", exp.config, "JSON config overriding the suite defaults");
  exp_cmd->add_option("--out-dir", exp.out_dir, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp &e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion &e) {
    return app.exit(e);
  } catch (const CLI::ParseError &e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*gen_cmd) {
      return cmd_gen_model(gen);
    }
    if (*sim_cmd) {
      return cmd_simulate(sim);
    }
    if (*tg_cmd) {
      return cmd_test_graph(tg);
    }
    if (*bounds_cmd) {
      return cmd_bounds(bounds);
    }
    if (*exp_cmd) {
      return cmd_experiment(exp);
    }
  } catch (const Failure &f) {
    std::fprintf(stderr, "error: %s: %s\n", dig_status_name(f.status), f.message.c_str());
    return exit_code_for(f.status);
  } catch (const UsageError &u) {
    std::fprintf(stderr, "error: %s\n", u.message.c_str());
    return kUsage;
  }
  return kUsage;
}
