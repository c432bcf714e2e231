#include "spde/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace spde {

double DyadicRational::value() const {
  return static_cast<double>(num) / std::ldexp(1.0, log2_den);
}

std::string DyadicRational::str() const {
  if (log2_den == 0) return std::to_string(num);
  return std::to_string(num) + "/2^" + std::to_string(log2_den);
}

DyadicRational DyadicRational::parse(const std::string& text) {
  DyadicRational d;
  const auto slash = text.find('/');
  try {
    if (slash == std::string::npos) {
      std::size_t pos = 0;
      d.num = std::stoll(text, &pos);
      if (pos != text.size()) throw std::invalid_argument(text);
      return d;
    }
    const std::string num_part = text.substr(0, slash);
    const std::string den_part = text.substr(slash + 1);
    if (den_part.rfind("2^", 0) != 0) throw std::invalid_argument(text);
    std::size_t pos = 0;
    d.num = std::stoll(num_part, &pos);
    if (pos != num_part.size()) throw std::invalid_argument(text);
    const std::string exp_part = den_part.substr(2);
    d.log2_den = std::stoi(exp_part, &pos);
    if (pos != exp_part.size() || d.log2_den < 0 || d.log2_den > 62) {
      throw std::invalid_argument(text);
    }
  } catch (const std::exception&) {
    throw ConfigError("invalid dyadic rational '" + text + "' (expected \"p/2^q\")");
  }
  return d;
}

std::optional<long long> DyadicRational::exact_ratio(const DyadicRational& a,
                                                     const DyadicRational& b) {
  // a / b = (a.num * 2^{b.q}) / (b.num * 2^{a.q})
  if (b.num == 0) return std::nullopt;
  long long num = a.num;
  long long den = b.num;
  int shift = b.log2_den - a.log2_den;
  if (shift >= 0) {
    if (num > (1LL << 62) >> shift) return std::nullopt;
    num <<= shift;
  } else {
    if (den > (1LL << 62) >> (-shift)) return std::nullopt;
    den <<= -shift;
  }
  if (den == 0 || num % den != 0) return std::nullopt;
  return num / den;
}

ModelSpec ExperimentConfig::build_model() const {
  const std::size_t grid = grid_points == 0 ? 2 * n_modes : grid_points;
  SpectralVector y0(n_modes);
  if (!initial_condition.empty()) {
    if (initial_condition.size() > n_modes) {
      throw ConfigError("initial_condition has more entries than model.n_modes");
    }
    for (std::size_t k = 0; k < initial_condition.size(); ++k) y0[k] = initial_condition[k];
  }
  try {
    return ModelSpec(Spectrum::dirichlet_laplacian(n_modes),
                     make_nonlinearity(nonlinearity, nonlinearity_params), grid,
                     std::move(y0));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

TestFunctional ExperimentConfig::build_phi() const {
  try {
    return TestFunctional::from_name(phi_kind, phi_mode, phi_a);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

long ExperimentConfig::steps_for(const DyadicRational& tau) const {
  if (m_steps) return *m_steps;
  if (!horizon) throw ConfigError("config must set scheme.m or scheme.T");
  const auto ratio = DyadicRational::exact_ratio(*horizon, tau);
  if (!ratio || *ratio < 1) {
    throw ConfigError("scheme.T is not an exact multiple of tau = " + tau.str());
  }
  return static_cast<long>(*ratio);
}

namespace {

using nlohmann::json;

const std::set<std::string> kKnownKeys = {
    "model.n_modes",          "model.grid_points",
    "model.nonlinearity",     "model.nonlinearity_params",
    "model.initial_condition","scheme.tau",
    "scheme.tau_grid",        "scheme.T",
    "scheme.m",               "scheme.refinement_r",
    "estimator.n_samples",    "estimator.burn_in",
    "estimator.steps",        "estimator.batch_count",
    "estimator.checkpoints",  "phi.kind",
    "phi.mode",               "phi.a",
    "seed",                   "output",
};

void collect_keys(const json& node, const std::string& prefix,
                  std::vector<std::string>* out) {
  for (const auto& [key, value] : node.items()) {
    const std::string path = prefix.empty() ? key : prefix + "." + key;
    if (value.is_object()) {
      collect_keys(value, path, out);
    } else {
      out->push_back(path);
    }
  }
}

const json* find_path(const json& root, const std::string& path) {
  const json* node = &root;
  std::stringstream ss(path);
  std::string part;
  while (std::getline(ss, part, '.')) {
    if (!node->is_object() || !node->contains(part)) return nullptr;
    node = &(*node)[part];
  }
  return node;
}

}  // namespace

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  json root;
  try {
    in >> root;
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  if (!root.is_object()) throw ConfigError("config root must be an object");

  std::vector<std::string> keys;
  collect_keys(root, "", &keys);
  for (const auto& key : keys) {
    if (!kKnownKeys.count(key)) throw ConfigError("unknown config key '" + key + "'");
  }

  ExperimentConfig cfg;
  const auto get = [&](const std::string& key) { return find_path(root, key); };
  try {
    if (const json* v = get("model.n_modes")) cfg.n_modes = v->get<std::size_t>();
    if (const json* v = get("model.grid_points")) cfg.grid_points = v->get<std::size_t>();
    if (const json* v = get("model.nonlinearity")) cfg.nonlinearity = v->get<std::string>();
    if (const json* v = get("model.nonlinearity_params")) {
      cfg.nonlinearity_params = v->get<std::vector<double>>();
    }
    if (const json* v = get("model.initial_condition")) {
      cfg.initial_condition = v->get<std::vector<double>>();
    }
    if (const json* v = get("scheme.tau")) {
      cfg.tau_grid = {DyadicRational::parse(v->get<std::string>())};
    }
    if (const json* v = get("scheme.tau_grid")) {
      if (!cfg.tau_grid.empty()) throw ConfigError("set scheme.tau or scheme.tau_grid, not both");
      for (const auto& item : *v) {
        cfg.tau_grid.push_back(DyadicRational::parse(item.get<std::string>()));
      }
    }
    if (const json* v = get("scheme.T")) {
      cfg.horizon = DyadicRational::parse(v->get<std::string>());
    }
    if (const json* v = get("scheme.m")) cfg.m_steps = v->get<long>();
    if (const json* v = get("scheme.refinement_r")) cfg.refinement_r = v->get<int>();
    if (const json* v = get("estimator.n_samples")) cfg.n_samples = v->get<long>();
    if (const json* v = get("estimator.burn_in")) cfg.burn_in = v->get<long>();
    if (const json* v = get("estimator.steps")) cfg.window = v->get<long>();
    if (const json* v = get("estimator.batch_count")) cfg.batch_count = v->get<int>();
    if (const json* v = get("estimator.checkpoints")) {
      cfg.checkpoints = v->get<std::vector<long>>();
    }
    if (const json* v = get("phi.kind")) cfg.phi_kind = v->get<std::string>();
    if (const json* v = get("phi.mode")) cfg.phi_mode = v->get<std::size_t>();
    if (const json* v = get("phi.a")) cfg.phi_a = v->get<double>();
    if (const json* v = get("seed")) cfg.seed = v->get<std::uint64_t>();
    if (const json* v = get("output")) cfg.output = v->get<std::string>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config type error: ") + e.what());
  }

  if (cfg.n_modes == 0) throw ConfigError("model.n_modes must be positive");
  if (cfg.m_steps && cfg.horizon) throw ConfigError("set scheme.m or scheme.T, not both");
  for (const auto& tau : cfg.tau_grid) {
    if (tau.num <= 0) throw ConfigError("tau must be positive");
    if (tau.value() > 1.0) throw ConfigError("tau exceeds the ceiling tau_0 = 1");
  }

  cfg.canonical_text = root.dump();  // nlohmann sorts object keys
  return cfg;
}

CsvWriter::CsvWriter(std::vector<std::string> columns) : columns_(std::move(columns)) {}

void CsvWriter::add_metadata(const std::string& key, const std::string& value) {
  metadata_.emplace_back(key, value);
}

void CsvWriter::add_row(const std::vector<double>& values) {
  if (values.size() != columns_.size()) {
    throw std::invalid_argument("CsvWriter: column count mismatch");
  }
  std::vector<std::string> cells;
  cells.reserve(values.size());
  for (double v : values) cells.push_back(format_double(v));
  rows_.push_back(std::move(cells));
}

void CsvWriter::add_text_row(const std::vector<std::string>& cells) {
  if (cells.size() != columns_.size()) {
    throw std::invalid_argument("CsvWriter: column count mismatch");
  }
  rows_.push_back(cells);
}

void CsvWriter::add_summary(const std::string& line) { summary_.push_back(line); }

std::string CsvWriter::format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string CsvWriter::str() const {
  std::string out;
  for (const auto& [k, v] : metadata_) out += "# " + k + "=" + v + "\n";
  for (std::size_t i = 0; i < columns_.size(); ++i) {
    out += columns_[i];
    out += (i + 1 < columns_.size()) ? "," : "\n";
  }
  for (const auto& row : rows_) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      out += row[i];
      out += (i + 1 < row.size()) ? "," : "\n";
    }
  }
  for (const auto& line : summary_) out += "# " + line + "\n";
  return out;
}

void CsvWriter::write_file(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << str();
}

}  // namespace spde
