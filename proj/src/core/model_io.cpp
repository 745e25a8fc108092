#include <json.hpp>

#include "dig/error.hpp"
#include "dig/format.hpp"
#include "dig/model.hpp"
#include "dig/rng.hpp"

namespace dig {

namespace {

constexpr const char *kContextOrdering =
    "node indices ascending, time ascending, next symbol least significant";

} // namespace

std::string model_to_json(const JointMarkovModel &model) {
  nlohmann::ordered_json doc;
  doc["m"] = model.nodes();
  doc["k"] = model.order();
  doc["alphabet_size"] = model.alphabet();
  doc["epsilon"] = model.epsilon();
  if (model.seed()) {
    doc["seed"] = *model.seed();
  } else {
    doc["seed"] = nullptr;
  }
  auto rows = nlohmann::ordered_json::array();
  for (int i = 0; i < model.nodes(); ++i) {
    auto row = nlohmann::ordered_json::array();
    for (int j = 0; j < model.nodes(); ++j) {
      row.push_back(model.parents()(i, j) ? 1 : 0);
    }
    rows.push_back(row);
  }
  doc["adjacency"] = rows;
  doc["context_ordering"] = kContextOrdering;
  auto conditionals = nlohmann::ordered_json::array();
  for (int j = 0; j < model.nodes(); ++j) {
    const auto &c = model.conditional(j);
    nlohmann::ordered_json entry;
    entry["node"] = j;
    entry["context_nodes"] = c.context_nodes;
    entry["table"] = c.table;
    conditionals.push_back(entry);
  }
  doc["conditionals"] = conditionals;
  return doc.dump(2) + "\n";
}

JointMarkovModel model_from_json(const std::string &text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception &e) {
    fail(ErrorKind::Parse, std::string("model JSON: ") + e.what());
  }
  try {
    const int m = doc.at("m").get<int>();
    const int k = doc.at("k").get<int>();
    const int alphabet = doc.at("alphabet_size").get<int>();
    const double epsilon = doc.at("epsilon").get<double>();
    std::optional<std::uint64_t> seed;
    if (doc.contains("seed") && !doc.at("seed").is_null()) {
      seed = doc.at("seed").get<std::uint64_t>();
    }
    const auto rows = doc.at("adjacency").get<std::vector<std::vector<int>>>();
    require(static_cast<int>(rows.size()) == m, ErrorKind::Parse,
            "model JSON: adjacency must be m x m");
    Adjacency adjacency = Adjacency::from_rows(rows);
    std::vector<NodeConditional> conditionals(static_cast<std::size_t>(m));
    const auto &list = doc.at("conditionals");
    require(list.is_array() && static_cast<int>(list.size()) == m, ErrorKind::Parse,
            "model JSON: need one conditional per node");
    for (const auto &entry : list) {
      const int node = entry.at("node").get<int>();
      require(node >= 0 && node < m, ErrorKind::Parse,
              "model JSON: conditional node out of range");
      auto &c = conditionals[static_cast<std::size_t>(node)];
      c.context_nodes = entry.at("context_nodes").get<std::vector<int>>();
      c.table = entry.at("table").get<std::vector<double>>();
    }
    return JointMarkovModel(m, k, alphabet, std::move(adjacency), epsilon,
                            std::move(conditionals), seed);
  } catch (const nlohmann::json::exception &e) {
    fail(ErrorKind::Parse, std::string("model JSON: ") + e.what());
  }
}

void save_model(const JointMarkovModel &model, const std::string &path) {
  write_text_file(path, model_to_json(model));
}

JointMarkovModel load_model(const std::string &path) {
  return model_from_json(read_text_file(path));
}

} // namespace dig

namespace dig {

Adjacency adjacency_from_spec(const std::string &spec, int m, std::uint64_t seed) {
  require(m >= 1, ErrorKind::Domain, "adjacency needs at least one node");
  Adjacency adj(m);
  if (spec == "none" || spec.empty()) {
    return adj;
  }
  if (spec == "all") {
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < m; ++j) {
        adj.set(i, j, true);
      }
    }
    return adj;
  }
  if (spec.rfind("density=", 0) == 0) {
    double p = -1.0;
    try {
      std::size_t used = 0;
      p = std::stod(spec.substr(8), &used);
      require(used == spec.size() - 8, ErrorKind::Parse, "bad density");
    } catch (const std::logic_error &) {
      fail(ErrorKind::Parse, "adjacency spec: bad density value");
    }
    require(p >= 0.0 && p <= 1.0, ErrorKind::Parse, "adjacency spec: density outside [0, 1]");
    Rng rng(seed ^ 0xa0761d6478bd642fULL);
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < m; ++j) {
        const double u = rng.uniform();
        if (i != j) {
          adj.set(i, j, u < p);
        }
      }
    }
    return adj;
  }
  if (spec.find('>') != std::string::npos) {
    std::size_t start = 0;
    while (start <= spec.size()) {
      const auto comma = spec.find(',', start);
      const std::string item = spec.substr(start, comma - start);
      const auto arrow = item.find('>');
      require(arrow != std::string::npos, ErrorKind::Parse,
              "adjacency spec: expected i>j, got '" + item + "'");
      int i = -1;
      int j = -1;
      try {
        std::size_t used_i = 0;
        std::size_t used_j = 0;
        i = std::stoi(item.substr(0, arrow), &used_i);
        j = std::stoi(item.substr(arrow + 1), &used_j);
        require(used_i == arrow && used_j == item.size() - arrow - 1, ErrorKind::Parse,
                "trailing characters");
      } catch (const std::logic_error &) {
        fail(ErrorKind::Parse, "adjacency spec: bad edge '" + item + "'");
      }
      require(i >= 0 && j >= 0 && i < m && j < m && i != j, ErrorKind::Parse,
              "adjacency spec: edge '" + item + "' out of range");
      adj.set(i, j, true);
      if (comma == std::string::npos) {
        break;
      }
      start = comma + 1;
    }
    return adj;
  }
  // Matrix rows separated by ';' or '/'.
  std::vector<std::vector<int>> rows(1);
  for (char c : spec) {
    if (c == ';' || c == '/') {
      rows.emplace_back();
    } else if (c == '0' || c == '1') {
      rows.back().push_back(c - '0');
    } else if (c != ' ' && c != ',') {
      fail(ErrorKind::Parse, "adjacency spec: unrecognized '" + spec + "'");
    }
  }
  require(static_cast<int>(rows.size()) == m, ErrorKind::Parse,
          "adjacency spec: matrix must have m rows");
  for (const auto &row : rows) {
    require(static_cast<int>(row.size()) == m, ErrorKind::Parse,
            "adjacency spec: matrix must be m x m");
  }
  return Adjacency::from_rows(rows);
}

} // namespace dig
