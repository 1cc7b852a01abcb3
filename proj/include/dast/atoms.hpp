#pragma once

// Single-pole atoms phi_w(z) = (1 - |w|^2) / (z - w) and finite atomic models.
//
// An atom is normalized so that its Hankel operator has unit norm. Its
// impulse response is g_k = (1 - |w|^2) w^(k-1), k >= 1.

#include <complex>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

namespace dast {

using Complex = std::complex<double>;

/// A pole strictly inside the unit disk.
class Pole {
 public:
  explicit Pole(Complex w);
  Pole(double re, double im) : Pole(Complex(re, im)) {}

  Complex value() const { return w_; }
  double modulus() const { return std::abs(w_); }
  Pole conj() const { return Pole(std::conj(w_)); }

  friend bool operator==(const Pole&, const Pole&) = default;

 private:
  Complex w_;
};

struct Term {
  Pole pole;
  Complex coeff;
};

/// Finite linear combination sum_j c_j phi_{w_j}.
///
/// Construction canonicalizes: poles closer than kMergeDistance are merged by
/// summing coefficients (first occurrence keeps its pole) and terms whose
/// merged coefficient is exactly zero are dropped.
class AtomicModel {
 public:
  static constexpr double kMergeDistance = 1e-12;

  explicit AtomicModel(double rho, std::vector<Term> terms = {},
                       bool real_system = false);

  double rho() const { return rho_; }
  bool real_system() const { return real_system_; }
  const std::vector<Term>& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  bool empty() const { return terms_.empty(); }

  /// Largest pole modulus, 0 for the empty model.
  double max_pole_modulus() const;

  AtomicModel scaled(Complex alpha) const;

  /// Concatenation of terms (then canonicalized). The stability radius is the
  /// larger of the two; the real flag survives only if both are real.
  friend AtomicModel operator+(const AtomicModel& a, const AtomicModel& b);
  friend AtomicModel operator-(const AtomicModel& a, const AtomicModel& b);

 private:
  double rho_;
  std::vector<Term> terms_;
  bool real_system_;
};

Complex eval_atom(const Pole& a, Complex z);
Eigen::VectorXcd atom_impulse_response(const Pole& a, std::size_t length);

Complex eval_model(const AtomicModel& m, Complex z);
Eigen::VectorXcd model_impulse_response(const AtomicModel& m, std::size_t length);

/// H2 inner product <phi_a, phi_b> = (1-|a|^2)(1-|b|^2) / (1 - a conj(b)).
Complex h2_inner(const Pole& a, const Pole& b);

Eigen::MatrixXcd h2_gram(const AtomicModel& m);
double model_h2_norm(const AtomicModel& m);

/// sum_j |c_j|, an upper bound on the atomic norm of the represented system.
double decomposition_weight(const AtomicModel& m);

/// Smallest K with rho^K <= tol.
std::size_t impulse_truncation_length(double rho, double tol = 1e-9);

nlohmann::json model_to_json(const AtomicModel& m);
AtomicModel model_from_json(const nlohmann::json& j);

}  // namespace dast
