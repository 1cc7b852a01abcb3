#include "dast/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "dast/errors.hpp"
#include "dast/net.hpp"

namespace dast {

namespace {

void check_bound_args(double rho, double sigma, double delta, std::size_t n, double nuclear) {
  if (!(rho > 0.0 && rho < 1.0)) throw InvalidArgument("bound: rho must lie in (0, 1)");
  if (!(delta > 0.0 && delta < 1.0)) throw InvalidArgument("bound: delta must lie in (0, 1)");
  if (!(sigma >= 0.0)) throw InvalidArgument("bound: sigma must be >= 0");
  if (n == 0) throw InvalidArgument("bound: n must be >= 1");
  if (!(nuclear >= 0.0)) throw InvalidArgument("bound: nuclear norm must be >= 0");
}

}  // namespace

double h2_error(const AtomicModel& m1, const AtomicModel& m2) { return model_h2_norm(m1 - m2); }

HinfError hinf_error(const AtomicModel& m1, const AtomicModel& m2, std::size_t grid_size) {
  if (grid_size == 0) throw InvalidArgument("hinf_error: grid_size must be >= 1");
  const AtomicModel d = m1 - m2;
  HinfError out;
  if (d.empty()) return out;
  for (std::size_t k = 0; k < grid_size; ++k) {
    const double th = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(grid_size);
    out.raw = std::max(out.raw, std::abs(eval_model(d, std::polar(1.0, th))));
  }
  const double r = d.max_pole_modulus();
  out.certified = out.raw + (1.0 + r) / (1.0 - r) * decomposition_weight(d) * std::numbers::pi /
                                static_cast<double>(grid_size);
  return out;
}

double empirical_mse(const MeasurementPlan& plan, const AtomicModel& m1, const AtomicModel& m2) {
  return (apply_plan(plan, m1 - m2)).squaredNorm() / static_cast<double>(plan.size());
}

double theorem_bound(double rho, double sigma, double delta, std::size_t n, double hankel_nuclear) {
  check_bound_args(rho, sigma, delta, n, hankel_nuclear);
  const double eps = eps_from_delta(delta, rho);
  const double arg = 11.0 * rho * rho / ((1.0 - rho) * eps);
  if (!(arg > 1.0)) throw InvalidArgument("theorem_bound: log argument must exceed 1");
  const double q = hankel_nuclear * hankel_nuclear / (static_cast<double>(n) * (1.0 - delta) * (1.0 - delta));
  return 186.0 * (1.0 + rho) / (1.0 - rho) *
         (std::sqrt(sigma * sigma * std::log(arg)) * std::sqrt(q) + 4.0 * q / std::numbers::pi);
}

double theorem_bound_proof(double rho, double sigma, double delta, std::size_t n, double hankel_nuclear) {
  check_bound_args(rho, sigma, delta, n, hankel_nuclear);
  const double arg = 11.0 * rho * rho / ((1.0 - rho) * delta);
  if (!(arg > 1.0)) throw InvalidArgument("theorem_bound_proof: log argument must exceed 1");
  const double q = hankel_nuclear * hankel_nuclear / (static_cast<double>(n) * (1.0 - delta) * (1.0 - delta));
  return 59.0 * (1.0 + rho) / (1.0 - rho) * (std::sqrt(4.0 * sigma * sigma * std::log(arg)) * std::sqrt(q) + q);
}

std::size_t effective_degree(const AtomicModel& m, double rel_tol) {
  if (!(rel_tol > 0.0 && rel_tol < 1.0)) throw InvalidArgument("effective_degree: rel_tol must lie in (0, 1)");
  double cmax = 0.0;
  for (const auto& t : m.terms()) cmax = std::max(cmax, std::abs(t.coeff));
  if (cmax == 0.0) return 0;
  return static_cast<std::size_t>(std::count_if(m.terms().begin(), m.terms().end(),
                                                [&](const Term& t) { return std::abs(t.coeff) > rel_tol * cmax; }));
}

}  // namespace dast
