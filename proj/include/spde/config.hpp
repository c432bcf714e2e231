#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "spde/integrators.hpp"
#include "spde/oracles.hpp"

namespace spde {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Dyadic rational p / 2^q, written "p/2^q" (or a plain integer). Keeps tau
// grids exact so divisibility of T by tau never depends on float rounding.
struct DyadicRational {
  long long num = 0;
  int log2_den = 0;

  double value() const;
  std::string str() const;
  static DyadicRational parse(const std::string& text);

  // exact quotient a/b when it is an integer, nullopt otherwise
  static std::optional<long long> exact_ratio(const DyadicRational& a,
                                              const DyadicRational& b);
};

struct ExperimentConfig {
  // model
  std::size_t n_modes = 64;
  std::size_t grid_points = 0;  // 0 = 2 * n_modes
  std::string nonlinearity = "zero";
  std::vector<double> nonlinearity_params;
  std::vector<double> initial_condition;  // empty = zero

  // scheme
  std::vector<DyadicRational> tau_grid;   // single entry when scheme.tau given
  std::optional<DyadicRational> horizon;  // scheme.T
  std::optional<long> m_steps;            // scheme.m
  int refinement_r = 16;

  // estimator
  long n_samples = 0;
  long burn_in = -1;
  long window = -1;  // estimator.steps
  int batch_count = 32;
  std::vector<long> checkpoints;

  // phi
  std::string phi_kind = "cos_mode";
  std::size_t phi_mode = 0;
  double phi_a = 1.0;

  std::uint64_t seed = 0;
  std::string output;

  std::string canonical_text;  // serialized form used for the config hash

  ModelSpec build_model() const;
  TestFunctional build_phi() const;
  // m for a given tau, from scheme.m or scheme.T (exact dyadic division)
  long steps_for(const DyadicRational& tau) const;
};

// Parses and schema-validates a config file. Unknown keys are errors.
ExperimentConfig load_config(const std::string& path);

// CSV output with a fixed numeric format: '.' decimal separator,
// 17-significant-digit floats, '\n' line endings.
class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> columns);
  void add_metadata(const std::string& key, const std::string& value);
  void add_row(const std::vector<double>& values);
  void add_text_row(const std::vector<std::string>& cells);
  void add_summary(const std::string& line);  // appended after the table
  std::string str() const;
  void write_file(const std::string& path) const;

  static std::string format_double(double x);

 private:
  std::vector<std::string> columns_;
  std::vector<std::pair<std::string, std::string>> metadata_;
  std::vector<std::vector<std::string>> rows_;
  std::vector<std::string> summary_;
};

}  // namespace spde
