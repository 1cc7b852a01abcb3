#include "dast/hankel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Householder>
#include <Eigen/SVD>

#include "dast/errors.hpp"

namespace dast {

TruncatedHankel hankel_from_sequence(const Eigen::VectorXcd& g, std::size_t T) {
  if (T == 0) throw InvalidArgument("Hankel order must be positive");
  const auto t = static_cast<Eigen::Index>(T);
  if (g.size() < 2 * t - 1) throw InvalidArgument("Hankel section needs 2T - 1 impulse-response values");
  TruncatedHankel h{Eigen::MatrixXcd(t, t)};
  for (Eigen::Index j = 0; j < t; ++j) {
    for (Eigen::Index k = 0; k < t; ++k) h.entries(j, k) = g[j + k];
  }
  return h;
}

TruncatedHankel build_hankel(const AtomicModel& m, std::size_t T) {
  if (T == 0) throw InvalidArgument("Hankel order must be positive");
  return hankel_from_sequence(model_impulse_response(m, 2 * T - 1), T);
}

// Hankel sections of atomic models have low numerical rank, so a full SVD of
// a T x T section mostly works on rounding noise. Column-pivoted Householder
// steps reduce H to [R11 R12; 0 E] and stop once ||E||_F <= eps ||H||_F; the
// singular values of [R11 R12] then differ from those of H by at most ||E||_2
// each, and the discarded ones are reported as zero.
Eigen::VectorXd hankel_singular_values(const TruncatedHankel& h) {
  Eigen::MatrixXcd A = h.entries;
  const Eigen::Index rows = A.rows(), cols = A.cols(), kmax = std::min(rows, cols);
  const double stop = std::numeric_limits<double>::epsilon() * A.norm();
  Eigen::VectorXcd work(cols);
  Eigen::Index k = 0;
  for (; k < kmax; ++k) {
    const Eigen::RowVectorXd norms = A.bottomRightCorner(rows - k, cols - k).colwise().squaredNorm();
    if (!(std::sqrt(norms.sum()) > stop)) break;
    Eigen::Index p = 0;
    norms.maxCoeff(&p);
    A.col(k).swap(A.col(k + p));
    Complex tau;
    double beta = 0.0;
    Eigen::VectorXcd essential(std::max<Eigen::Index>(rows - k - 1, 0));
    A.col(k).tail(rows - k).makeHouseholder(essential, tau, beta);
    A.bottomRightCorner(rows - k, cols - k - 1).applyHouseholderOnTheLeft(essential, tau, work.data());
    A(k, k) = beta;
    A.col(k).tail(rows - k - 1).setZero();
  }
  Eigen::VectorXd s = Eigen::VectorXd::Zero(kmax);
  if (k == 0) return s;
  Eigen::BDCSVD<Eigen::MatrixXcd> svd(A.topRows(k));
  if (svd.info() != Eigen::Success) throw NumericalError("Hankel SVD failed");
  s.head(k) = svd.singularValues();  // already descending
  return s;
}

double hankel_nuclear_norm(const TruncatedHankel& h) {
  return hankel_singular_values(h).sum();
}

std::size_t numerical_rank(const Eigen::VectorXd& singular_values, double rel_tol) {
  if (singular_values.size() == 0 || singular_values[0] == 0.0) return 0;
  const double cut = rel_tol * singular_values[0];
  return static_cast<std::size_t>((singular_values.array() > cut).count());
}

std::size_t default_hankel_order(double rho, double tol) {
  if (!(rho > 0.0 && rho < 1.0)) throw InvalidArgument("default_hankel_order: rho must lie in (0, 1)");
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(std::log(tol) / (2.0 * std::log(rho)))));
}

double hankel_truncation_tail(double rho, std::size_t T) {
  return std::pow(rho, 2.0 * static_cast<double>(T)) / (1.0 - rho * rho);
}

Eigen::VectorXcd zeta_vector(const Pole& a, std::size_t T) {
  if (T == 0) throw InvalidArgument("zeta_vector length must be positive");
  Eigen::VectorXcd z(static_cast<Eigen::Index>(T));
  const Complex w = a.value();
  Complex p = std::sqrt(1.0 - std::norm(w));
  for (Eigen::Index k = 0; k < z.size(); ++k) {
    z[k] = p;
    p *= w;
  }
  return z;
}

double atom_pair_nuclear_bound(const Pole& a, const Pole& b, double rho) {
  if (!(rho > 0.0 && rho < 1.0)) throw InvalidArgument("atom_pair_nuclear_bound: rho must lie in (0, 1)");
  if (a.modulus() > rho + 1e-12 || b.modulus() > rho + 1e-12) {
    throw InvalidArgument("atom_pair_nuclear_bound: poles must lie in D_rho");
  }
  return 2.0 * rho / (1.0 - rho) * std::abs(a.value() - b.value());
}

}  // namespace dast
