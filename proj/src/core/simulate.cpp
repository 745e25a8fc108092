#include "dig/simulate.hpp"

#include <algorithm>
#include <charconv>
#include <string>
#include <string_view>

#include "dig/error.hpp"
#include "dig/format.hpp"
#include "dig/parallel.hpp"
#include "dig/rng.hpp"

namespace dig {

namespace {

int sample_row(const double *cdf, int alphabet, double u) {
  for (int s = 0; s + 1 < alphabet; ++s) {
    if (u < cdf[s]) {
      return s;
    }
  }
  return alphabet - 1;
}

} // namespace

Simulator::Simulator(const JointMarkovModel &model) : model_(&model) {
  const int a = model.alphabet();
  for (int j = 0; j < model.nodes(); ++j) {
    std::vector<double> cdf = model.conditional(j).table;
    for (std::size_t row = 0; row < cdf.size(); row += static_cast<std::size_t>(a)) {
      double acc = 0.0;
      for (int s = 0; s < a; ++s) {
        acc += cdf[row + s];
        cdf[row + s] = acc;
      }
    }
    cumulative_.push_back(std::move(cdf));
  }
  if (model.fits_exact_analysis()) {
    const auto dist = stationary_distribution(model);
    start_cdf_ = dist.state_probabilities;
    double acc = 0.0;
    for (auto &p : start_cdf_) {
      acc += p;
      p = acc;
    }
  }
}

SamplePath Simulator::run(std::int64_t n, std::int64_t burn_in,
                          std::uint64_t seed) const {
  const JointMarkovModel &model = *model_;
  const int m = model.nodes();
  const int k = model.order();
  const int a = model.alphabet();
  require(n > k, ErrorKind::Domain, "simulate: n must exceed the model order");
  require(burn_in >= 0, ErrorKind::Domain, "simulate: burn_in must be nonnegative");
  require(has_stationary_start() || burn_in > 0, ErrorKind::Configuration,
          "simulate: model exceeds the exact-analysis guard, a burn-in is required");

  const std::size_t ua = static_cast<std::size_t>(a);
  std::size_t window = 1;
  for (int t = 0; t < k; ++t) {
    window *= ua;
  }

  // Per-node k-step windows, oldest symbol most significant.
  std::vector<std::size_t> windows(static_cast<std::size_t>(m), 0);
  Rng rng(seed);
  if (has_stationary_start()) {
    const double u = rng.uniform();
    const auto it = std::upper_bound(start_cdf_.begin(), start_cdf_.end(), u);
    std::size_t state = std::min<std::size_t>(
        static_cast<std::size_t>(it - start_cdf_.begin()), start_cdf_.size() - 1);
    for (int j = m - 1; j >= 0; --j) {
      windows[static_cast<std::size_t>(j)] = state % window;
      state /= window;
    }
  } else {
    for (auto &w : windows) {
      for (int t = 0; t < k; ++t) {
        w = w * ua + static_cast<std::size_t>(rng() % ua);
      }
    }
  }

  std::vector<std::vector<std::size_t>> context_weights(static_cast<std::size_t>(m));
  for (int j = 0; j < m; ++j) {
    const auto &nodes = model.conditional(j).context_nodes;
    auto &weights = context_weights[static_cast<std::size_t>(j)];
    weights.assign(static_cast<std::size_t>(m), 0);
    std::size_t scale = ua; // next symbol is the least significant digit
    for (std::size_t p = nodes.size(); p-- > 0;) {
      weights[static_cast<std::size_t>(nodes[p])] = scale;
      scale *= window;
    }
  }

  std::vector<int> next(static_cast<std::size_t>(m));
  auto step = [&] {
    for (int j = 0; j < m; ++j) {
      const auto &weights = context_weights[static_cast<std::size_t>(j)];
      std::size_t offset = 0;
      for (int p = 0; p < m; ++p) {
        offset += weights[static_cast<std::size_t>(p)] * windows[static_cast<std::size_t>(p)];
      }
      next[static_cast<std::size_t>(j)] =
          sample_row(cumulative_[static_cast<std::size_t>(j)].data() + offset, a,
                     rng.uniform());
    }
    for (int j = 0; j < m; ++j) {
      auto &w = windows[static_cast<std::size_t>(j)];
      w = (w * ua + static_cast<std::size_t>(next[static_cast<std::size_t>(j)])) % window;
    }
  };

  for (std::int64_t t = 0; t < burn_in; ++t) {
    step();
  }

  SamplePath path;
  path.m = m;
  path.k = k;
  path.alphabet = a;
  path.n = n;
  path.seed = seed;
  path.burn_in = burn_in;
  path.symbols.resize(static_cast<std::size_t>(n) * static_cast<std::size_t>(m));

  // First k rows are the digits of the current windows.
  for (int j = 0; j < m; ++j) {
    std::size_t w = windows[static_cast<std::size_t>(j)];
    for (int t = k - 1; t >= 0; --t) {
      path.symbols[static_cast<std::size_t>(t) * m + j] =
          static_cast<std::uint8_t>(w % ua);
      w /= ua;
    }
  }
  for (std::int64_t t = k; t < n; ++t) {
    step();
    std::uint8_t *row = path.symbols.data() + static_cast<std::size_t>(t) * m;
    for (int j = 0; j < m; ++j) {
      row[j] = static_cast<std::uint8_t>(next[static_cast<std::size_t>(j)]);
    }
  }
  return path;
}

SamplePath simulate(const JointMarkovModel &model, std::int64_t n,
                    std::int64_t burn_in, std::uint64_t seed) {
  return Simulator(model).run(n, burn_in, seed);
}

std::vector<SamplePath> simulate_replicas(const JointMarkovModel &model,
                                          std::int64_t n, std::int64_t burn_in,
                                          std::uint64_t base_seed, std::size_t count,
                                          std::size_t workers) {
  require(count >= 1, ErrorKind::Domain, "simulate_replicas: count must be >= 1");
  const Simulator simulator(model);
  std::vector<SamplePath> paths(count);
  parallel_for(
      count,
      [&](std::size_t r) { paths[r] = simulator.run(n, burn_in, base_seed + r); },
      workers);
  return paths;
}

std::string path_to_csv(const SamplePath &path) {
  std::string out = "t";
  for (int j = 0; j < path.m; ++j) {
    out += ",node" + std::to_string(j);
  }
  out += '\n';
  out.reserve(out.size() + static_cast<std::size_t>(path.n) * (8 + 2 * path.m));
  for (std::int64_t t = 0; t < path.n; ++t) {
    out += std::to_string(t);
    for (int j = 0; j < path.m; ++j) {
      out += ',';
      out += std::to_string(path.at(t, j));
    }
    out += '\n';
  }
  return out;
}

SamplePath path_from_csv(const std::string &text) {
  std::string_view rest(text);
  auto next_line = [&]() -> std::string_view {
    const auto end = rest.find('\n');
    std::string_view line = rest.substr(0, end);
    rest = end == std::string_view::npos ? std::string_view{} : rest.substr(end + 1);
    if (!line.empty() && line.back() == '\r') {
      line.remove_suffix(1);
    }
    return line;
  };
  auto split = [](std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    for (;;) {
      const auto comma = line.find(',', start);
      fields.push_back(line.substr(start, comma - start));
      if (comma == std::string_view::npos) {
        break;
      }
      start = comma + 1;
    }
    return fields;
  };

  const auto header = split(next_line());
  require(header.size() >= 2 && header[0] == "t", ErrorKind::Parse,
          "path CSV: header must be t,node0,...");
  SamplePath path;
  path.m = static_cast<int>(header.size()) - 1;
  for (int j = 0; j < path.m; ++j) {
    require(header[static_cast<std::size_t>(j) + 1] == "node" + std::to_string(j),
            ErrorKind::Parse, "path CSV: unexpected column name");
  }
  int max_symbol = 0;
  std::int64_t line_no = 1;
  while (!rest.empty()) {
    const auto line = next_line();
    ++line_no;
    if (line.empty()) {
      continue;
    }
    const auto fields = split(line);
    require(fields.size() == header.size(), ErrorKind::Parse,
            "path CSV: wrong field count on line " + std::to_string(line_no));
    for (int j = 0; j < path.m; ++j) {
      const auto field = fields[static_cast<std::size_t>(j) + 1];
      int value = -1;
      const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
      require(ec == std::errc{} && ptr == field.data() + field.size() && value >= 0 &&
                  value <= 255,
              ErrorKind::Parse, "path CSV: bad symbol on line " + std::to_string(line_no));
      max_symbol = std::max(max_symbol, value);
      path.symbols.push_back(static_cast<std::uint8_t>(value));
    }
    ++path.n;
  }
  require(path.n >= 1, ErrorKind::Parse, "path CSV: no data rows");
  path.alphabet = std::max(2, max_symbol + 1);
  return path;
}

void save_path_csv(const SamplePath &path, const std::string &file) {
  write_text_file(file, path_to_csv(path));
}

SamplePath load_path_csv(const std::string &file) {
  return path_from_csv(read_text_file(file));
}

} // namespace dig
