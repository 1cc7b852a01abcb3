#include "dast/baseline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>

#include "dast/errors.hpp"
#include "dast/metrics.hpp"

namespace dast {

DiagonalRealization::DiagonalRealization(const AtomicModel& m) {
  const auto d = static_cast<Eigen::Index>(m.size());
  poles_.resize(d);
  C_.resize(d);
  for (Eigen::Index j = 0; j < d; ++j) {
    const auto& t = m.terms()[static_cast<std::size_t>(j)];
    poles_[j] = t.pole.value();
    C_[j] = t.coeff * (1.0 - std::norm(t.pole.value()));
  }
  constexpr std::size_t K = 20;
  const Eigen::VectorXcd g = model_impulse_response(m, K);
  Eigen::VectorXcd x = B();
  const double scale = std::max(1.0, decomposition_weight(m));
  for (std::size_t k = 0; k < K; ++k) {
    const Complex gk = d ? Complex((C_ * x)(0)) : Complex(0.0);
    if (std::abs(gk - g[static_cast<Eigen::Index>(k)]) > 1e-10 * scale) {
      throw NumericalError("diagonal realization does not reproduce the impulse response");
    }
    x = poles_.cwiseProduct(x);
  }
}

double DiagonalRealization::spectral_radius() const {
  return poles_.size() ? poles_.cwiseAbs().maxCoeff() : 0.0;
}

std::vector<double> simulate_io(const AtomicModel& m, const std::vector<double>& u) {
  if (!m.real_system()) throw InvalidArgument("simulate_io needs a model flagged as a real system");
  if (u.empty()) throw InvalidArgument("simulate_io: empty input");
  const DiagonalRealization r(m);
  std::vector<double> y(u.size(), 0.0);
  if (m.empty()) return y;
  Eigen::VectorXcd x = Eigen::VectorXcd::Zero(r.poles().size());
  double peak = 0.0;
  double worst_imag = 0.0;
  for (std::size_t t = 0; t < u.size(); ++t) {
    const Complex yt = (r.C() * x)(0);
    y[t] = yt.real();
    peak = std::max(peak, std::abs(yt));
    worst_imag = std::max(worst_imag, std::abs(yt.imag()));
    x = r.poles().cwiseProduct(x) + Eigen::VectorXcd::Constant(x.size(), u[t]);
  }
  if (worst_imag > 1e-10 * std::max(1.0, peak)) {
    throw NumericalError("simulated output of a real system has a non-negligible imaginary part");
  }
  return y;
}

std::vector<double> estimate_markov(const std::vector<double>& u, const std::vector<double>& y, std::size_t K) {
  if (K == 0) throw InvalidArgument("estimate_markov: K must be >= 1");
  if (u.size() != y.size()) throw InvalidArgument("estimate_markov: input and output lengths differ");
  if (u.size() < K + 1) throw InvalidArgument("estimate_markov: need at least K + 1 samples");
  const auto T = static_cast<Eigen::Index>(u.size());
  const auto k = static_cast<Eigen::Index>(K);
  Eigen::MatrixXd Phi = Eigen::MatrixXd::Zero(T, k);
  Eigen::VectorXd Y(T);
  for (Eigen::Index t = 0; t < T; ++t) {
    Y[t] = y[static_cast<std::size_t>(t)];
    for (Eigen::Index j = 1; j <= k && j <= t; ++j) Phi(t, j - 1) = u[static_cast<std::size_t>(t - j)];
  }
  const Eigen::VectorXd g = Phi.completeOrthogonalDecomposition().solve(Y);
  return {g.data(), g.data() + g.size()};
}

HoKalmanResult ho_kalman(const std::vector<double>& g, std::size_t order, std::size_t T) {
  if (order == 0 || T == 0 || order > T) throw InvalidArgument("ho_kalman: need 1 <= order <= T");
  if (g.size() < 2 * T - 1) throw InvalidArgument("ho_kalman: need 2T - 1 Markov parameters");
  const auto t = static_cast<Eigen::Index>(T);
  const auto r = static_cast<Eigen::Index>(order);
  Eigen::MatrixXd H(t, t);
  for (Eigen::Index i = 0; i < t; ++i) {
    for (Eigen::Index j = 0; j < t; ++j) H(i, j) = g[static_cast<std::size_t>(i + j)];
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(H, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd s = svd.singularValues().head(r).cwiseSqrt();
  const Eigen::MatrixXd O = svd.matrixU().leftCols(r) * s.asDiagonal();                 // observability
  const Eigen::MatrixXd Ctrl = s.asDiagonal() * svd.matrixV().leftCols(r).transpose();  // controllability

  HoKalmanResult out;
  out.order = order;
  out.hankel_size = T;
  StateSpace& ss = out.realization;
  if (t > 1) {
    ss.A = O.topRows(t - 1).completeOrthogonalDecomposition().solve(O.bottomRows(t - 1));
  } else {
    ss.A = Eigen::MatrixXd::Zero(r, r);
  }
  ss.B = Ctrl.col(0);
  ss.C = O.row(0);

  Eigen::EigenSolver<Eigen::MatrixXd> es(ss.A);
  if (es.info() != Eigen::Success) {
    out.defective = true;
    return out;
  }
  const Eigen::MatrixXcd V = es.eigenvectors();
  Eigen::JacobiSVD<Eigen::MatrixXcd> vsvd(V);
  const Eigen::VectorXd vs = vsvd.singularValues();
  if (vs[vs.size() - 1] <= 1e-10 * vs[0]) {
    out.defective = true;
    return out;
  }
  const Eigen::MatrixXcd Vinv = V.inverse();
  const Eigen::RowVectorXcd CV = ss.C.cast<Complex>() * V;
  const Eigen::VectorXcd VB = Vinv * ss.B.cast<Complex>();
  std::vector<Term> terms;
  double rmax = 0.0;
  for (Eigen::Index i = 0; i < r; ++i) {
    Complex lam = es.eigenvalues()[i];
    if (std::abs(lam) > kPoleClip) {
      lam *= kPoleClip / std::abs(lam);
      out.clipped = true;
    }
    rmax = std::max(rmax, std::abs(lam));
    // residue / (1 - |lambda|^2) turns c / (z - lambda) into atom form
    terms.push_back({Pole(lam), CV[i] * VB[i] / (1.0 - std::norm(lam))});
  }
  out.model.emplace(std::max(rmax, 1e-6), std::move(terms));
  return out;
}

double state_space_h2_error(const StateSpace& ss, const AtomicModel& truth) {
  const DiagonalRealization tr(truth);
  const Eigen::Index n1 = ss.A.rows();
  const Eigen::Index n2 = tr.poles().size();
  const Eigen::Index n = n1 + n2;
  Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(n, n);
  Eigen::VectorXcd B(n);
  Eigen::RowVectorXcd C(n);
  A.topLeftCorner(n1, n1) = ss.A.cast<Complex>();
  if (n2) A.bottomRightCorner(n2, n2) = tr.A();
  B.head(n1) = ss.B.cast<Complex>();
  B.tail(n2) = tr.B();
  C.head(n1) = ss.C.cast<Complex>();
  C.tail(n2) = -tr.C();
  if (n == 0) return 0.0;

  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(A, false);
  if (es.info() != Eigen::Success) throw NumericalError("state_space_h2_error: eigensolver failed");
  if (es.eigenvalues().cwiseAbs().maxCoeff() >= 1.0) return std::numeric_limits<double>::infinity();

  // Smith doubling for P = A P A^H + B B^H.
  Eigen::MatrixXcd P = B * B.adjoint();
  Eigen::MatrixXcd Ak = A;
  for (int it = 0; it < 200; ++it) {
    P += Ak * P * Ak.adjoint();
    Ak = (Ak * Ak).eval();
    if (Ak.cwiseAbs().maxCoeff() < 1e-300 || Ak.norm() < 1e-18) break;
  }
  const double e2 = (C * P * C.adjoint())(0).real();
  return std::sqrt(std::max(e2, 0.0));
}

double baseline_h2_error(const HoKalmanResult& r, const AtomicModel& truth) {
  if (r.model) return h2_error(*r.model, truth);
  return state_space_h2_error(r.realization, truth);
}

std::size_t default_baseline_hankel_size(std::size_t m) { return (m + 1) / 2; }

std::size_t default_markov_horizon(std::size_t T, double rho) {
  if (!(rho > 0.0 && rho < 1.0)) throw InvalidArgument("default_markov_horizon: rho must lie in (0, 1)");
  const auto k = static_cast<std::size_t>(std::ceil(std::log(1e-8) / std::log(rho)));
  return std::max<std::size_t>(1, std::min(T, k));
}

}  // namespace dast
