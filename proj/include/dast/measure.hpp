#pragma once

// Linear measurement ensembles L_1..L_n on transfer functions:
//   - frequency-response samples G(e^{i theta_k}),
//   - impulse-response samples g_{i_k},
//   - convolutions sum_{j=1..K} g_j u_{t-j} with a known input u.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <variant>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "dast/atoms.hpp"
#include "dast/net.hpp"

namespace dast {

/// theta_k = 2 pi k / n for k = 0..n-1.
struct FrequencyUniform {
  std::size_t n = 0;
};

struct FrequencyList {
  std::vector<double> thetas;
};

/// 1-based impulse-response indices.
struct ImpulseSamples {
  std::vector<std::size_t> indices;
};

/// Outputs y_t = sum_{j=1..K} g_j u_{t-j} at the listed 0-based times t.
/// The input is zero before t = 0 (zero initial state).
struct Convolution {
  std::vector<double> input;
  std::vector<std::size_t> output_times;
  std::size_t truncation = 0;
};

enum class NoiseKind { Complex, Real };

class MeasurementPlan {
 public:
  using Kind = std::variant<FrequencyUniform, FrequencyList, ImpulseSamples, Convolution>;

  explicit MeasurementPlan(Kind kind);

  const Kind& kind() const { return kind_; }
  std::size_t size() const;
  bool is_frequency() const;

  /// Sample frequencies for frequency plans; throws otherwise.
  std::vector<double> thetas() const;
  NoiseKind noise_kind() const { return is_frequency() ? NoiseKind::Complex : NoiseKind::Real; }

 private:
  Kind kind_;
};

/// Convolution plan over t = 0..m-1 with exact truncation K = m.
MeasurementPlan convolution_plan(std::vector<double> input);

class MeasurementMatrix {
 public:
  MeasurementMatrix(Eigen::MatrixXcd entries, MeasurementPlan plan,
                    std::shared_ptr<const EpsilonNet> net);

  const Eigen::MatrixXcd& entries() const { return entries_; }
  const MeasurementPlan& plan() const { return plan_; }
  const EpsilonNet& net() const { return *net_; }
  std::shared_ptr<const EpsilonNet> net_ptr() const { return net_; }
  Eigen::Index rows() const { return entries_.rows(); }
  Eigen::Index cols() const { return entries_.cols(); }

 private:
  Eigen::MatrixXcd entries_;
  MeasurementPlan plan_;
  std::shared_ptr<const EpsilonNet> net_;
};

inline constexpr std::size_t kDefaultMatrixCap = 200'000'000;

Eigen::VectorXcd apply_plan(const MeasurementPlan& plan, const AtomicModel& m);

/// Column j is apply_plan on the single-atom model {(w_j, 1)}.
MeasurementMatrix build_matrix(const MeasurementPlan& plan, std::shared_ptr<const EpsilonNet> net,
                               std::size_t max_entries = kDefaultMatrixCap);

/// Complex noise has independent parts of variance sigma^2 / 2 (E|w|^2 = sigma^2);
/// real noise has variance sigma^2 and zero imaginary part.
Eigen::VectorXcd add_noise(const Eigen::VectorXcd& y, double sigma, std::uint64_t seed,
                           NoiseKind kind);

/// i.i.d. standard Gaussian input sequence.
std::vector<double> gaussian_input(std::size_t length, std::uint64_t seed);

nlohmann::json plan_to_json(const MeasurementPlan& plan);
MeasurementPlan plan_from_json(const nlohmann::json& j);

/// CSV with header "index,re,im".
void write_observations_csv(std::ostream& os, const Eigen::VectorXcd& y);
Eigen::VectorXcd read_observations_csv(std::istream& is);

}  // namespace dast
