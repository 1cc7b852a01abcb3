#pragma once

// Finite T x T sections of Hankel operators, H_{jk} = g_{j+k+1}.

#include <cstddef>

#include <Eigen/Dense>

#include "dast/atoms.hpp"

namespace dast {

struct TruncatedHankel {
  Eigen::MatrixXcd entries;

  Eigen::Index order() const { return entries.rows(); }
};

/// Hankel section from an impulse response g_1, g_2, ... (needs 2T - 1 values).
TruncatedHankel hankel_from_sequence(const Eigen::VectorXcd& g, std::size_t T);
TruncatedHankel build_hankel(const AtomicModel& m, std::size_t T);

/// Singular values, descending.
Eigen::VectorXd hankel_singular_values(const TruncatedHankel& h);
double hankel_nuclear_norm(const TruncatedHankel& h);

/// Number of singular values above rel_tol * (largest).
std::size_t numerical_rank(const Eigen::VectorXd& singular_values, double rel_tol = 1e-10);

/// T = ceil(log(tol) / (2 log rho)), so that rho^(2T) <= tol.
std::size_t default_hankel_order(double rho, double tol = 1e-10);

/// rho^(2T) / (1 - rho^2): tail energy dropped by truncating at order T.
double hankel_truncation_tail(double rho, std::size_t T);

/// sqrt(1 - |a|^2) (1, a, a^2, ..., a^(T-1)); the atom's Hankel section is
/// zeta zeta^T.
Eigen::VectorXcd zeta_vector(const Pole& a, std::size_t T);

/// (2 rho / (1 - rho)) |a - b|, the claimed bound on the Hankel nuclear-norm
/// distance of two atoms in D_rho. The bound only holds once
/// rho(1 + rho) is comfortably above 1 (numerically rho >~ 0.72); for smaller
/// rho, 2|a - b| / (1 - rho^2) is the right scale and the claim fails.
double atom_pair_nuclear_bound(const Pole& a, const Pole& b, double rho);

}  // namespace dast
