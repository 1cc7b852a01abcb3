#pragma once

// Discretized Atomic Soft Thresholding:
//
//   minimize_c  (1/2) ||M c - y||^2 + mu * sum_j |c_j|
//
// over complex coefficients on the net atoms. Solved by accelerated proximal
// gradient with function-value restart, run on a growing working set of atoms
// and certified by the duality gap of the full problem.

#include <cstddef>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dast/atoms.hpp"
#include "dast/measure.hpp"
#include "dast/net.hpp"

namespace dast {

struct SolverConfig {
  /// Relative gap tolerance; the absolute tolerance is gap_tol * (1 + ||y||^2).
  double gap_tol = 1e-6;
  std::size_t max_iter = 50'000;
  double support_tol = 1e-6;
  bool restart = true;
  /// Tie conjugate net atoms so the estimate is a real system.
  bool real_system = false;
  int threads = 1;
  std::size_t power_iterations = 30;
  double lipschitz_margin = 1.05;
  std::size_t gap_check_every = 10;
  std::size_t initial_working_set = 16;
};

/// Reads gap_tol, max_iter, support_tol, restart, real_system, threads.
/// Unknown keys are ignored; malformed values throw InvalidArgument.
SolverConfig solver_config_from(const std::map<std::string, std::string>& kv,
                                SolverConfig base = {});

class DastProblem {
 public:
  DastProblem(std::shared_ptr<const MeasurementMatrix> M, Eigen::VectorXcd y, double mu);

  const MeasurementMatrix& matrix() const { return *M_; }
  std::shared_ptr<const MeasurementMatrix> matrix_ptr() const { return M_; }
  const Eigen::VectorXcd& y() const { return y_; }
  double mu() const { return mu_; }

 private:
  std::shared_ptr<const MeasurementMatrix> M_;
  Eigen::VectorXcd y_;
  double mu_;
};

enum class SolveStatus { Converged, NotConverged };

const char* to_string(SolveStatus s);

struct DastSolution {
  Eigen::VectorXcd coeffs;
  double objective = 0.0;
  double dual_gap = 0.0;
  double gap_tolerance = 0.0;
  std::size_t iterations = 0;
  std::vector<std::size_t> support;
  SolveStatus status = SolveStatus::NotConverged;
  int threads = 1;
  std::size_t restarts = 0;
  std::size_t working_set_rounds = 0;
  std::size_t working_set_size = 0;
  /// Objective of every accepted iterate, in order.
  std::vector<double> objective_trace;
};

/// 2 sigma sqrt(n log(11 rho^2 / (delta (1 - rho)))).
double choose_mu(double sigma, std::size_t n, double rho, double delta);

DastSolution solve_dast(const DastProblem& p, const SolverConfig& cfg = {});

/// (1/2) ||M c - y||^2 + mu sum |c_j|.
double dast_objective(const DastProblem& p, const Eigen::VectorXcd& c);

/// max_j |<M_j, z>| with <u, v> = sum conj(u_i) v_i.
double dual_atomic_norm(const MeasurementMatrix& M, const Eigen::VectorXcd& z);

/// Primal objective minus the dual objective Re<theta, y> - ||theta||^2 / 2 at
/// theta = r min(1, mu / dual_atomic_norm(M, r)), r = y - M c.
double dual_gap(const DastProblem& p, const Eigen::VectorXcd& c);

/// Terms (w_j, c_j) with |c_j| > support_tol * max |c|.
AtomicModel reconstruct_model(const Eigen::VectorXcd& c, const EpsilonNet& net,
                              double support_tol = 1e-6);

/// Numerical rank of M (singular values above rel_tol * largest).
std::size_t measurement_rank(const MeasurementMatrix& M, double rel_tol = 1e-10);

}  // namespace dast
