#include "dast/atoms.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dast/errors.hpp"

namespace dast {

namespace {

// Pole moduli may exceed rho by rounding when a pole is generated on the
// boundary circle |w| = rho.
constexpr double kRadiusSlack = 1e-12;

std::vector<Term> merge_terms(std::vector<Term> terms) {
  std::vector<Term> merged;
  merged.reserve(terms.size());
  for (const auto& t : terms) {
    auto it = std::find_if(merged.begin(), merged.end(), [&](const Term& m) {
      return std::abs(m.pole.value() - t.pole.value()) < AtomicModel::kMergeDistance;
    });
    if (it == merged.end()) {
      merged.push_back(t);
    } else {
      it->coeff += t.coeff;
    }
  }
  std::erase_if(merged, [](const Term& t) { return t.coeff == Complex(0.0, 0.0); });
  return merged;
}

void check_conjugate_closed(const std::vector<Term>& terms) {
  for (const auto& t : terms) {
    const Complex w = t.pole.value();
    if (w.imag() == 0.0) {
      if (std::abs(t.coeff.imag()) > 1e-12 * (1.0 + std::abs(t.coeff))) {
        throw InvalidArgument("real_system model has a complex coefficient on a real pole");
      }
      continue;
    }
    const bool found = std::any_of(terms.begin(), terms.end(), [&](const Term& o) {
      return std::abs(o.pole.value() - std::conj(w)) < AtomicModel::kMergeDistance &&
             std::abs(o.coeff - std::conj(t.coeff)) <= 1e-12 * (1.0 + std::abs(t.coeff));
    });
    if (!found) {
      throw InvalidArgument("real_system model is not closed under conjugation");
    }
  }
}

}  // namespace

Pole::Pole(Complex w) : w_(w) {
  if (!std::isfinite(w.real()) || !std::isfinite(w.imag()) || !(std::abs(w) < 1.0)) {
    throw InvalidArgument("pole must lie strictly inside the unit disk");
  }
}

AtomicModel::AtomicModel(double rho, std::vector<Term> terms, bool real_system)
    : rho_(rho), real_system_(real_system) {
  if (!(rho > 0.0 && rho < 1.0)) {
    throw InvalidArgument("stability radius must lie in (0, 1)");
  }
  for (const auto& t : terms) {
    if (t.pole.modulus() > rho + kRadiusSlack) {
      throw InvalidArgument("pole modulus exceeds the stability radius");
    }
    if (!std::isfinite(t.coeff.real()) || !std::isfinite(t.coeff.imag())) {
      throw InvalidArgument("non-finite coefficient");
    }
  }
  terms_ = merge_terms(std::move(terms));
  if (real_system_) check_conjugate_closed(terms_);
}

double AtomicModel::max_pole_modulus() const {
  double r = 0.0;
  for (const auto& t : terms_) r = std::max(r, t.pole.modulus());
  return r;
}

AtomicModel AtomicModel::scaled(Complex alpha) const {
  std::vector<Term> out = terms_;
  for (auto& t : out) t.coeff *= alpha;
  const bool stays_real = real_system_ && alpha.imag() == 0.0;
  return AtomicModel(rho_, std::move(out), stays_real);
}

AtomicModel operator+(const AtomicModel& a, const AtomicModel& b) {
  std::vector<Term> all = a.terms_;
  all.insert(all.end(), b.terms_.begin(), b.terms_.end());
  return AtomicModel(std::max(a.rho_, b.rho_), std::move(all),
                     a.real_system_ && b.real_system_);
}

AtomicModel operator-(const AtomicModel& a, const AtomicModel& b) {
  return a + b.scaled(-1.0);
}

Complex eval_atom(const Pole& a, Complex z) {
  if (std::abs(z) < 1.0 - 1e-12) {
    throw InvalidArgument("atoms are evaluated only on or outside the unit circle");
  }
  const Complex w = a.value();
  return (1.0 - std::norm(w)) / (z - w);
}

Eigen::VectorXcd atom_impulse_response(const Pole& a, std::size_t length) {
  if (length == 0) throw InvalidArgument("impulse response length must be positive");
  Eigen::VectorXcd g(static_cast<Eigen::Index>(length));
  const Complex w = a.value();
  Complex p = 1.0 - std::norm(w);
  for (Eigen::Index k = 0; k < g.size(); ++k) {
    g[k] = p;
    p *= w;
  }
  return g;
}

Complex eval_model(const AtomicModel& m, Complex z) {
  Complex s = 0.0;
  for (const auto& t : m.terms()) s += t.coeff * eval_atom(t.pole, z);
  return s;
}

Eigen::VectorXcd model_impulse_response(const AtomicModel& m, std::size_t length) {
  if (length == 0) throw InvalidArgument("impulse response length must be positive");
  Eigen::VectorXcd g = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(length));
  for (const auto& t : m.terms()) g += t.coeff * atom_impulse_response(t.pole, length);
  return g;
}

Complex h2_inner(const Pole& a, const Pole& b) {
  const Complex wa = a.value();
  const Complex wb = b.value();
  return (1.0 - std::norm(wa)) * (1.0 - std::norm(wb)) / (1.0 - wa * std::conj(wb));
}

Eigen::MatrixXcd h2_gram(const AtomicModel& m) {
  const auto n = static_cast<Eigen::Index>(m.size());
  Eigen::MatrixXcd g(n, n);
  const auto& terms = m.terms();
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index k = 0; k < n; ++k) {
      g(j, k) = h2_inner(terms[j].pole, terms[k].pole);
    }
  }
  return g;
}

double model_h2_norm(const AtomicModel& m) {
  if (m.empty()) return 0.0;
  Eigen::VectorXcd c(static_cast<Eigen::Index>(m.size()));
  for (std::size_t j = 0; j < m.size(); ++j) c[static_cast<Eigen::Index>(j)] = m.terms()[j].coeff;
  // ||sum c_j phi_j||^2 = sum_jk c_j conj(c_k) <phi_j, phi_k>
  const double q = (c.adjoint() * h2_gram(m).transpose() * c)(0, 0).real();
  const double w = decomposition_weight(m);
  if (q < -1e-10 * w * w) {
    throw NumericalError("H2 Gram form is indefinite (near-duplicate poles?)");
  }
  return std::sqrt(std::max(q, 0.0));
}

double decomposition_weight(const AtomicModel& m) {
  double s = 0.0;
  for (const auto& t : m.terms()) s += std::abs(t.coeff);
  return s;
}

std::size_t impulse_truncation_length(double rho, double tol) {
  if (!(rho > 0.0 && rho < 1.0) || !(tol > 0.0 && tol < 1.0)) {
    throw InvalidArgument("impulse_truncation_length: rho and tol must lie in (0, 1)");
  }
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(std::log(tol) / std::log(rho))));
}

nlohmann::json model_to_json(const AtomicModel& m) {
  nlohmann::json terms = nlohmann::json::array();
  for (const auto& t : m.terms()) {
    terms.push_back({{"re", t.pole.value().real()},
                     {"im", t.pole.value().imag()},
                     {"cre", t.coeff.real()},
                     {"cim", t.coeff.imag()}});
  }
  nlohmann::json j = {{"rho", m.rho()}, {"terms", terms}};
  if (m.real_system()) j["real_system"] = true;
  return j;
}

AtomicModel model_from_json(const nlohmann::json& j) {
  try {
    std::vector<Term> terms;
    for (const auto& t : j.at("terms")) {
      terms.push_back({Pole(t.at("re").get<double>(), t.at("im").get<double>()),
                       Complex(t.at("cre").get<double>(), t.at("cim").get<double>())});
    }
    return AtomicModel(j.at("rho").get<double>(), std::move(terms),
                       j.value("real_system", false));
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("malformed model JSON: ") + e.what());
  }
}

}  // namespace dast
