#pragma once

// Error norms between atomic models and the error-bound evaluators.

#include <cstddef>

#include "dast/atoms.hpp"
#include "dast/measure.hpp"

namespace dast {

/// Unsquared H2 norm of m1 - m2, closed form through the atom Gram matrix.
double h2_error(const AtomicModel& m1, const AtomicModel& m2);

struct HinfError {
  double raw = 0.0;        // max |m1 - m2| over the grid
  double certified = 0.0;  // raw + ((1 + r) / (1 - r)) W pi / grid_size
};

/// Grid points are e^{2 pi i k / grid_size}, k = 0..grid_size-1. In the
/// Lipschitz correction r is the largest pole modulus of the difference and W
/// its decomposition weight.
HinfError hinf_error(const AtomicModel& m1, const AtomicModel& m2, std::size_t grid_size = 8192);

/// (1/n) ||apply_plan(m1) - apply_plan(m2)||^2.
double empirical_mse(const MeasurementPlan& plan, const AtomicModel& m1, const AtomicModel& m2);

/// Bound on the squared H2 error with the leading constant 186 and the log
/// evaluated at eps = eps_from_delta(delta, rho):
///   186 (1+rho)/(1-rho) ( sqrt(sigma^2 log(11 rho^2 / ((1-rho) eps))) sqrt(N^2 / (n (1-delta)^2))
///                         + 4 N^2 / (pi n (1-delta)^2) )
/// with N the Hankel nuclear norm of the true system.
double theorem_bound(double rho, double sigma, double delta, std::size_t n, double hankel_nuclear);

/// The tighter form with constant 59, log evaluated at delta, and the
/// nuclear norm standing in for the atomic norm:
///   59 (1+rho)/(1-rho) ( sqrt(4 sigma^2 log(11 rho^2 / ((1-rho) delta))) sqrt(N^2 / (n (1-delta)^2))
///                        + N^2 / (n (1-delta)^2) )
double theorem_bound_proof(double rho, double sigma, double delta, std::size_t n,
                           double hankel_nuclear);

/// Number of terms with |c| > rel_tol * max |c|.
std::size_t effective_degree(const AtomicModel& m, double rel_tol = 1e-3);

struct ErrorReport {
  double h2_error = 0.0;
  double hinf_error = 0.0;
  double hinf_certified = 0.0;
  double empirical_mse = 0.0;
  std::size_t effective_degree = 0;
  double theorem_bound = 0.0;
  double theorem_bound_proof = 0.0;
  /// h2_error^2 <= theorem_bound.
  bool bound_satisfied = false;
};

}  // namespace dast
