#pragma once

// epsilon-nets of the closed disk D_rho = { |w| <= rho } and the covering
// constants that relate the discretized atomic norm to the exact one.

#include <cstddef>
#include <cstdint>
#include <vector>

#include <json.hpp>

#include "dast/atoms.hpp"

namespace dast {

class EpsilonNet {
 public:
  EpsilonNet(double rho, double eps, std::vector<Pole> points, bool covering_certified);

  double rho() const { return rho_; }
  double eps() const { return eps_; }
  const std::vector<Pole>& points() const { return points_; }
  std::size_t size() const { return points_.size(); }
  bool covering_certified() const { return covering_certified_; }

 private:
  double rho_;
  double eps_;
  std::vector<Pole> points_;
  bool covering_certified_;
};

inline constexpr std::size_t kDefaultNetCap = 1'000'000;

/// Polar-ring net: rings at r_m = m * rho / R (m = 0..R, the last ring on
/// |w| = rho) with radial spacing and per-ring arc spacing both at most
/// eps / sqrt(2). Every point of D_rho is within eps of the net. Points are
/// exactly closed under conjugation.
EpsilonNet build_net(double rho, double eps, std::size_t max_points = kDefaultNetCap);

/// Certified net whose cardinality is as close as possible to `target`
/// (bisection on eps).
EpsilonNet build_net_with_cardinality(double rho, std::size_t target,
                                      std::size_t max_points = kDefaultNetCap);

/// eps = pi (1 - rho) delta / (16 rho).
double eps_from_delta(double delta, double rho);

/// max(0, 1 - 16 rho eps / (pi (1 - rho))).
double covering_constant(double rho, double eps);

/// Volume bound 1024 rho^4 / (pi^2 (1 - rho)^2 delta^2) on the cardinality of
/// a maximal packing at the resolution tied to delta. Diagnostic only.
double packing_cardinality_bound(double rho, double delta);

/// Largest distance from n_samples uniform disk points to their nearest net point.
double covering_radius_estimate(const EpsilonNet& net, std::size_t n_samples,
                                std::uint64_t seed);

nlohmann::json net_to_json(const EpsilonNet& net);
EpsilonNet net_from_json(const nlohmann::json& j);

}  // namespace dast
