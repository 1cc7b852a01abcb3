#pragma once

// Time-domain simulation of atomic models and a Ho-Kalman subspace
// comparator working from least-squares Markov parameters.

#include <cstddef>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "dast/atoms.hpp"

namespace dast {

/// x+ = diag(w) x + 1 u,  y = C x,  C_j = c_j (1 - |w_j|^2).
class DiagonalRealization {
 public:
  /// Checks the first 20 Markov parameters against the model; throws
  /// NumericalError on a mismatch above 1e-10 (relative to the model weight).
  explicit DiagonalRealization(const AtomicModel& m);

  const Eigen::VectorXcd& poles() const { return poles_; }
  const Eigen::RowVectorXcd& C() const { return C_; }
  Eigen::MatrixXcd A() const { return poles_.asDiagonal(); }
  Eigen::VectorXcd B() const { return Eigen::VectorXcd::Ones(poles_.size()); }
  double spectral_radius() const;

 private:
  Eigen::VectorXcd poles_;
  Eigen::RowVectorXcd C_;
};

/// y[t] = sum_{j=1..t} g_j u[t-j] from a zero initial state. The model must be
/// flagged real; the imaginary part of the simulated output is checked to be
/// negligible and dropped.
std::vector<double> simulate_io(const AtomicModel& m, const std::vector<double>& u);

/// Least squares for y[t] ~ sum_{j=1..K} g_j u[t-j], t = 0..T-1, with u = 0
/// before t = 0. Minimum-norm solution when the regression is rank deficient.
std::vector<double> estimate_markov(const std::vector<double>& u, const std::vector<double>& y, std::size_t K);

struct StateSpace {
  Eigen::MatrixXd A;
  Eigen::VectorXd B;
  Eigen::RowVectorXd C;
};

struct HoKalmanResult {
  /// Partial-fraction form; empty when A is numerically defective.
  std::optional<AtomicModel> model;
  StateSpace realization;
  std::size_t order = 0;
  std::size_t hankel_size = 0;
  /// Some pole had modulus above 1 - 1e-8 and was pulled back radially.
  bool clipped = false;
  bool defective = false;
};

inline constexpr double kPoleClip = 1.0 - 1e-8;

/// Rank-`order` balanced realization from the T x T Hankel matrix of g_1..g_{2T-1}.
HoKalmanResult ho_kalman(const std::vector<double>& g, std::size_t order, std::size_t T);

/// H2 norm of ss - truth from the discrete Lyapunov equation of the stacked
/// difference system. Infinite when ss is not stable.
double state_space_h2_error(const StateSpace& ss, const AtomicModel& truth);

/// h2_error on the partial-fraction model when available, the state-space
/// route otherwise.
double baseline_h2_error(const HoKalmanResult& r, const AtomicModel& truth);

/// floor((m + 1) / 2).
std::size_t default_baseline_hankel_size(std::size_t m);

/// min(T, ceil(log(1e-8) / log(rho))).
std::size_t default_markov_horizon(std::size_t T, double rho);

}  // namespace dast
