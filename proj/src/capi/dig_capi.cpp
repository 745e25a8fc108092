#include "dig/dig.h"

#include <cstring>
#include <new>
#include <string>

#include "dig/error.hpp"
#include "dig/estimate.hpp"
#include "dig/experiments.hpp"
#include "dig/format.hpp"
#include "dig/graphtest.hpp"
#include "dig/model.hpp"
#include "dig/simulate.hpp"

struct dig_model {
  dig::JointMarkovModel model;
};

struct dig_path {
  dig::SamplePath path;
};

struct dig_report {
  dig::TestReport report;
};

namespace {

constexpr const char *kVersion = "0.1.0";

thread_local std::string last_error;

dig_status status_of(dig::ErrorKind kind) {
  switch (kind) {
  case dig::ErrorKind::Domain:
    return DIG_ERR_DOMAIN;
  case dig::ErrorKind::Configuration:
    return DIG_ERR_CONFIGURATION;
  case dig::ErrorKind::Construction:
    return DIG_ERR_CONSTRUCTION;
  case dig::ErrorKind::Resource:
    return DIG_ERR_RESOURCE;
  case dig::ErrorKind::Parse:
    return DIG_ERR_PARSE;
  case dig::ErrorKind::Io:
    return DIG_ERR_IO;
  }
  return DIG_ERR_INTERNAL;
}

template <typename Fn> dig_status checked(Fn &&fn) {
  try {
    fn();
    last_error.clear();
    return DIG_OK;
  } catch (const dig::Error &e) {
    last_error = e.what();
    return status_of(e.kind());
  } catch (const std::bad_alloc &) {
    last_error = "out of memory";
    return DIG_ERR_RESOURCE;
  } catch (const std::exception &e) {
    last_error = e.what();
    return DIG_ERR_INTERNAL;
  } catch (...) {
    last_error = "unknown failure";
    return DIG_ERR_INTERNAL;
  }
}

dig_status invalid(const char *message) {
  last_error = message;
  return DIG_ERR_INVALID_ARGUMENT;
}

dig::ExperimentConfig load_config(const char *suite, const char *config_file) {
  if (config_file == nullptr) {
    return dig::default_config(suite);
  }
  return dig::config_from_json(suite, dig::read_text_file(config_file));
}

} // namespace

extern "C" {

const char *dig_version(void) { return kVersion; }

const char *dig_last_error(void) { return last_error.c_str(); }

const char *dig_status_name(dig_status status) {
  switch (status) {
  case DIG_OK:
    return "ok";
  case DIG_ERR_DOMAIN:
    return "domain error";
  case DIG_ERR_CONFIGURATION:
    return "configuration error";
  case DIG_ERR_CONSTRUCTION:
    return "construction error";
  case DIG_ERR_RESOURCE:
    return "resource error";
  case DIG_ERR_PARSE:
    return "parse error";
  case DIG_ERR_IO:
    return "i/o error";
  case DIG_ERR_INVALID_ARGUMENT:
    return "invalid argument";
  case DIG_ERR_INTERNAL:
    return "internal error";
  }
  return "unknown status";
}

dig_status dig_dimensions_compute(int m, int k, int alphabet, dig_dimensions *out) {
  if (out == nullptr) {
    return invalid("out must not be NULL");
  }
  return checked([&] {
    const dig::DimensionSpec d = dig::dimensions(m, k, alphabet);
    *out = dig_dimensions{d.r, d.d, d.d_prime, d.dof_null};
  });
}

dig_status dig_adjacency_parse(const char *spec, int m, uint64_t seed, int *out) {
  if (spec == nullptr || out == nullptr) {
    return invalid("spec and out must not be NULL");
  }
  return checked([&] {
    const dig::Adjacency adj = dig::adjacency_from_spec(spec, m, seed);
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < m; ++j) {
        out[i * m + j] = adj(i, j) ? 1 : 0;
      }
    }
  });
}

dig_status dig_hash_text(const char *text, char *buffer, size_t buffer_size) {
  if (text == nullptr || buffer == nullptr) {
    return invalid("text and buffer must not be NULL");
  }
  if (buffer_size < 17) {
    return invalid("hash buffer needs 17 bytes");
  }
  const std::string hash = dig::fnv1a_hex(text);
  std::memcpy(buffer, hash.c_str(), hash.size() + 1);
  return DIG_OK;
}

dig_status dig_model_generate(int m, int k, int alphabet, const char *edges, double epsilon,
                              uint64_t seed, dig_model **out) {
  if (edges == nullptr || out == nullptr) {
    return invalid("edges and out must not be NULL");
  }
  return checked([&] {
    const dig::Adjacency adj = dig::adjacency_from_spec(edges, m, seed);
    *out = new dig_model{dig::build_random_model(m, k, alphabet, adj, epsilon, seed)};
  });
}

dig_status dig_model_binary_channel(double flip, dig_model **out) {
  if (out == nullptr) {
    return invalid("out must not be NULL");
  }
  return checked([&] { *out = new dig_model{dig::binary_channel_model(flip)}; });
}

dig_status dig_model_load(const char *file, dig_model **out) {
  if (file == nullptr || out == nullptr) {
    return invalid("file and out must not be NULL");
  }
  return checked([&] { *out = new dig_model{dig::load_model(file)}; });
}

dig_status dig_model_save(const dig_model *model, const char *file) {
  if (model == nullptr || file == nullptr) {
    return invalid("model and file must not be NULL");
  }
  return checked([&] { dig::save_model(model->model, file); });
}

void dig_model_free(dig_model *model) { delete model; }

dig_status dig_model_info(const dig_model *model, int *m, int *k, int *alphabet) {
  if (model == nullptr) {
    return invalid("model must not be NULL");
  }
  if (m != nullptr) {
    *m = model->model.nodes();
  }
  if (k != nullptr) {
    *k = model->model.order();
  }
  if (alphabet != nullptr) {
    *alphabet = model->model.alphabet();
  }
  return DIG_OK;
}

dig_status dig_model_edge(const dig_model *model, int i, int j, int *present) {
  if (model == nullptr || present == nullptr) {
    return invalid("model and present must not be NULL");
  }
  return checked([&] { *present = model->model.parents()(i, j) ? 1 : 0; });
}

dig_status dig_model_exact_di(const dig_model *model, int i, int j, double *out) {
  if (model == nullptr || out == nullptr) {
    return invalid("model and out must not be NULL");
  }
  return checked([&] { *out = dig::exact_directed_info(model->model, i, j); });
}

dig_status dig_model_stationary_residual(const dig_model *model, double *out) {
  if (model == nullptr || out == nullptr) {
    return invalid("model and out must not be NULL");
  }
  return checked([&] {
    const auto dist = dig::stationary_distribution(model->model);
    *out = dig::stationary_residual(model->model, dist);
  });
}

dig_status dig_simulate(const dig_model *model, int64_t n, int64_t burn_in, uint64_t seed,
                        dig_path **out) {
  if (model == nullptr || out == nullptr) {
    return invalid("model and out must not be NULL");
  }
  return checked([&] {
    const int64_t burn = burn_in < 0 ? dig::default_burn_in(model->model.order()) : burn_in;
    *out = new dig_path{dig::simulate(model->model, n, burn, seed)};
  });
}

dig_status dig_path_load_csv(const char *file, dig_path **out) {
  if (file == nullptr || out == nullptr) {
    return invalid("file and out must not be NULL");
  }
  return checked([&] { *out = new dig_path{dig::load_path_csv(file)}; });
}

dig_status dig_path_save_csv(const dig_path *path, const char *file) {
  if (path == nullptr || file == nullptr) {
    return invalid("path and file must not be NULL");
  }
  return checked([&] { dig::save_path_csv(path->path, file); });
}

void dig_path_free(dig_path *path) { delete path; }

dig_status dig_path_info(const dig_path *path, int *m, int64_t *n, int *alphabet) {
  if (path == nullptr) {
    return invalid("path must not be NULL");
  }
  if (m != nullptr) {
    *m = path->path.m;
  }
  if (n != nullptr) {
    *n = path->path.n;
  }
  if (alphabet != nullptr) {
    *alphabet = path->path.alphabet;
  }
  return DIG_OK;
}

dig_status dig_path_directed_info(const dig_path *path, int k, int i, int j, double *di_hat,
                                  double *lambda) {
  if (path == nullptr) {
    return invalid("path must not be NULL");
  }
  return checked([&] {
    const dig::EdgeStatistic s = dig::plug_in_directed_info(path->path, k, i, j);
    if (di_hat != nullptr) {
      *di_hat = s.di_hat;
    }
    if (lambda != nullptr) {
      *lambda = s.lambda;
    }
  });
}

dig_status dig_path_log_likelihood_ratio(const dig_path *path, int k, int i, int j,
                                         double *out) {
  if (path == nullptr || out == nullptr) {
    return invalid("path and out must not be NULL");
  }
  return checked([&] { *out = dig::log_likelihood_ratio(path->path, k, i, j); });
}

dig_status dig_calibrate_threshold(int m, int k, int alphabet, double alpha, int single_edge,
                                   double *out) {
  if (out == nullptr) {
    return invalid("out must not be NULL");
  }
  return checked([&] {
    *out = dig::calibrate_threshold(dig::dimensions(m, k, alphabet), alpha, single_edge != 0);
  });
}

dig_status dig_test_graph(const dig_path *path, int k, int alphabet, double i_th,
                          const int *hypothesis, dig_report **out) {
  if (path == nullptr || out == nullptr) {
    return invalid("path and out must not be NULL");
  }
  return checked([&] {
    const dig::SamplePath &p = path->path;
    dig::TestConfig config;
    config.i_th = i_th;
    config.k = k;
    config.dims = dig::dimensions(p.m, k, alphabet > 0 ? alphabet : p.alphabet);
    if (hypothesis == nullptr) {
      *out = new dig_report{dig::graph_estimate(p, config)};
      return;
    }
    dig::Adjacency v_star(p.m);
    for (int i = 0; i < p.m; ++i) {
      for (int j = 0; j < p.m; ++j) {
        const int cell = hypothesis[i * p.m + j];
        dig::require(cell == 0 || cell == 1, dig::ErrorKind::Parse,
                     "hypothesis entries must be 0 or 1");
        dig::require(i != j || cell == 0, dig::ErrorKind::Parse,
                     "hypothesis diagonal must be 0");
        v_star.set(i, j, cell == 1);
      }
    }
    *out = new dig_report{dig::hypothesis_test(p, config, v_star)};
  });
}

void dig_report_free(dig_report *report) { delete report; }

dig_status dig_report_accepted(const dig_report *report, int *accepted) {
  if (report == nullptr || accepted == nullptr) {
    return invalid("report and accepted must not be NULL");
  }
  *accepted = report->report.accepted ? (*report->report.accepted ? 1 : 0) : -1;
  return DIG_OK;
}

dig_status dig_report_edge(const dig_report *report, int i, int j, int *present) {
  if (report == nullptr || present == nullptr) {
    return invalid("report and present must not be NULL");
  }
  return checked([&] { *present = report->report.estimated(i, j) ? 1 : 0; });
}

dig_status dig_report_save_json(const dig_report *report, const char *file) {
  if (report == nullptr || file == nullptr) {
    return invalid("report and file must not be NULL");
  }
  return checked([&] { dig::write_text_file(file, dig::report_to_json(report->report)); });
}

dig_status dig_report_save_edges_csv(const dig_report *report, const char *file) {
  if (report == nullptr || file == nullptr) {
    return invalid("report and file must not be NULL");
  }
  return checked([&] {
    dig::write_text_file(file, dig::edge_statistics_csv(report->report.per_edge));
  });
}

dig_status dig_bounds_point(int m, int k, int alphabet, double i_th, int n0, double *pf_upper,
                            double *pd_lower) {
  return checked([&] {
    const auto dims = dig::dimensions(m, k, alphabet);
    if (pf_upper != nullptr) {
      *pf_upper = dig::false_alarm_upper_bound(dims, i_th);
    }
    if (pd_lower != nullptr) {
      *pd_lower = dig::detection_lower_bound(dims, i_th, n0);
    }
  });
}

dig_status dig_bounds_csv(int m, int k, int alphabet, const double *i_th_grid,
                          size_t grid_size, const int *n0_list, size_t n0_count,
                          const char *file) {
  if (i_th_grid == nullptr || file == nullptr || (n0_count > 0 && n0_list == nullptr)) {
    return invalid("grid, n0 list and file must not be NULL");
  }
  return checked([&] {
    const auto table = dig::figure1_curves(
        dig::dimensions(m, k, alphabet), std::vector<double>(i_th_grid, i_th_grid + grid_size),
        std::vector<int>(n0_list, n0_list + n0_count));
    dig::write_text_file(file, dig::figure1_csv(table));
  });
}

dig_status dig_experiment_config_hash(const char *suite, const char *config_file,
                                      char *buffer, size_t buffer_size) {
  if (suite == nullptr || buffer == nullptr) {
    return invalid("suite and buffer must not be NULL");
  }
  if (buffer_size < 17) {
    return invalid("hash buffer needs 17 bytes");
  }
  return checked([&] {
    const std::string hash = dig::config_hash(load_config(suite, config_file));
    std::memcpy(buffer, hash.c_str(), hash.size() + 1);
  });
}

dig_status dig_experiment_run(const char *suite, const char *config_file, const char *out_dir,
                              int *passed) {
  if (suite == nullptr || out_dir == nullptr || passed == nullptr) {
    return invalid("suite, out_dir and passed must not be NULL");
  }
  return checked([&] {
    const dig::ExperimentConfig config = load_config(suite, config_file);
    const dig::ExperimentResult result = dig::run_suite(config);
    dig::write_result(result, config, out_dir);
    *passed = result.passed ? 1 : 0;
  });
}

} // extern "C"
