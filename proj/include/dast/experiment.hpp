#pragma once

// Experiment drivers: single identification runs, error-vs-n sweeps over
// frequency samples, and DAST against Ho-Kalman on input/output data.

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "dast/atoms.hpp"

namespace dast {

/// Flat key = value configuration. '#' starts a comment; blank lines are
/// skipped. Unknown keys are rejected when a runner validates the config.
class Config {
 public:
  Config() = default;
  static Config parse(std::istream& is);
  static Config load(const std::string& path);

  void set(const std::string& key, std::string value) { kv_[key] = std::move(value); }
  bool has(const std::string& key) const { return kv_.count(key) != 0; }
  const std::map<std::string, std::string>& values() const { return kv_; }

  std::string get(const std::string& key, const std::string& def) const;
  double get_double(const std::string& key, double def) const;
  std::size_t get_size(const std::string& key, std::size_t def) const;
  std::uint64_t get_u64(const std::string& key, std::uint64_t def) const;
  bool get_bool(const std::string& key, bool def) const;
  /// Comma-separated list; integer lists also accept ranges "a..b".
  std::vector<std::size_t> get_size_list(const std::string& key, std::vector<std::size_t> def) const;

  /// FNV-1a over the sorted key=value lines.
  std::uint64_t hash() const;
  void validate_keys() const;

 private:
  std::map<std::string, std::string> kv_;
};

/// Conjugate pair 0.7 e^{+-i pi/4} with coefficients 1 -+ i, flagged real.
/// A stand-in test system; overridable through true_model / true_model_file.
AtomicModel default_true_model(double rho = 0.95);

struct ExperimentRecord {
  std::string experiment;
  std::string config_hash;
  std::uint64_t seed = 0;
  std::string method;  // dast | ho_kalman | ho_kalman_order_plus2
  std::string true_model;
  double rho = 0.0;
  double sigma = 0.0;
  double delta = 0.0;
  std::size_t n = 0;
  std::size_t net_size = 0;
  double eps = 0.0;
  double mu = 0.0;
  std::size_t matrix_rank = 0;
  bool rank_deficient = false;
  std::string status;
  std::size_t iterations = 0;
  double dual_gap = 0.0;
  double h2_error = 0.0;
  double hinf_error = 0.0;
  double hinf_certified = 0.0;
  double empirical_mse = 0.0;
  std::size_t effective_degree = 0;
  double hankel_nuclear = 0.0;
  double theorem_bound = 0.0;
  double theorem_bound_proof = 0.0;
  bool bound_satisfied = false;
  std::size_t baseline_order = 0;
  std::size_t baseline_hankel_size = 0;
  std::size_t markov_horizon = 0;
  bool baseline_clipped = false;
  bool baseline_defective = false;
  int threads = 1;
  double wall_time = 0.0;

  /// Equality of every field except wall_time.
  bool same_result(const ExperimentRecord& o) const;
};

const std::vector<std::string>& record_field_names();

void write_records_csv(std::ostream& os, const std::vector<ExperimentRecord>& recs);
std::vector<ExperimentRecord> read_records_csv(std::istream& is);
nlohmann::json records_to_json(const std::vector<ExperimentRecord>& recs);
std::vector<ExperimentRecord> records_from_json(const nlohmann::json& j);

struct PlotRow {
  double x = 0.0;
  std::string series;
  double value = 0.0;
};

void write_plot_csv(std::ostream& os, const std::vector<PlotRow>& rows);

struct SweepResult {
  std::vector<ExperimentRecord> records;
  std::vector<PlotRow> plot;
  /// Report-only checks, e.g. "dast_superior_small_m".
  std::map<std::string, bool> flags;
};

ExperimentRecord run_identify(const Config& cfg);
SweepResult run_error_vs_n(const Config& cfg);
SweepResult run_dast_vs_subspace(const Config& cfg);

/// True if any DAST record did not converge.
bool any_not_converged(const std::vector<ExperimentRecord>& recs);

double median(std::vector<double> v);

}  // namespace dast
