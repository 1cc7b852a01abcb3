#include "dast/net.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <string>

#include "dast/errors.hpp"

namespace dast {

namespace {

struct RingLayout {
  std::size_t rings = 0;  // number of rings beyond the origin
  double spacing = 0.0;   // radial step rho / rings
  double max_step = 0.0;  // eps / sqrt(2)
};

RingLayout layout(double rho, double eps) {
  RingLayout l;
  l.max_step = eps / std::numbers::sqrt2;
  if (eps >= rho) return l;  // the origin alone covers D_rho
  l.rings = static_cast<std::size_t>(std::ceil(rho / l.max_step));
  l.spacing = rho / static_cast<double>(l.rings);
  return l;
}

double ring_radius(const RingLayout& l, double rho, std::size_t m) {
  return m == l.rings ? rho : static_cast<double>(m) * l.spacing;
}

std::size_t ring_count(const RingLayout& l, double r) {
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(2.0 * std::numbers::pi * r / l.max_step)));
}

double net_cardinality(double rho, double eps) {
  const RingLayout l = layout(rho, eps);
  double total = 1.0;
  for (std::size_t m = 1; m <= l.rings; ++m) total += static_cast<double>(ring_count(l, ring_radius(l, rho, m)));
  return total;
}

void check_rho_eps(double rho, double eps) {
  if (!(rho > 0.0 && rho < 1.0)) throw InvalidArgument("net: rho must lie in (0, 1)");
  if (!(eps > 0.0) || !std::isfinite(eps)) throw InvalidArgument("net: eps must be positive");
}

// Uniform bucket grid over [-rho, rho]^2 for nearest-point queries.
class BucketGrid {
 public:
  BucketGrid(const std::vector<Pole>& pts, double rho) : pts_(pts), rho_(rho) {
    const double area = 4.0 * rho * rho;
    const double target_cell = std::sqrt(area / static_cast<double>(std::max<std::size_t>(pts.size(), 1)));
    side_ = std::clamp(static_cast<long>(std::ceil(2.0 * rho / target_cell)), 1L, 2048L);
    cell_ = 2.0 * rho / static_cast<double>(side_);
    buckets_.resize(static_cast<std::size_t>(side_ * side_));
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const auto [cx, cy] = cell_of(pts[i].value());
      buckets_[static_cast<std::size_t>(cy * side_ + cx)].push_back(i);
    }
  }

  double nearest_distance(Complex w) const {
    const auto [cx, cy] = cell_of(w);
    double best = std::numeric_limits<double>::infinity();
    for (long layer = 0; layer <= side_; ++layer) {
      for (long y = cy - layer; y <= cy + layer; ++y) {
        for (long x = cx - layer; x <= cx + layer; ++x) {
          if (std::max(std::abs(x - cx), std::abs(y - cy)) != layer) continue;
          if (x < 0 || y < 0 || x >= side_ || y >= side_) continue;
          for (std::size_t i : buckets_[static_cast<std::size_t>(y * side_ + x)]) {
            best = std::min(best, std::abs(pts_[i].value() - w));
          }
        }
      }
      // Unvisited cells are at least layer * cell away.
      if (best <= static_cast<double>(layer) * cell_) break;
    }
    return best;
  }

 private:
  std::pair<long, long> cell_of(Complex w) const {
    auto idx = [&](double v) {
      return std::clamp(static_cast<long>(std::floor((v + rho_) / cell_)), 0L, side_ - 1);
    };
    return {idx(w.real()), idx(w.imag())};
  }

  const std::vector<Pole>& pts_;
  double rho_;
  long side_ = 1;
  double cell_ = 1.0;
  std::vector<std::vector<std::size_t>> buckets_;
};

}  // namespace

EpsilonNet::EpsilonNet(double rho, double eps, std::vector<Pole> points, bool covering_certified)
    : rho_(rho), eps_(eps), points_(std::move(points)), covering_certified_(covering_certified) {
  check_rho_eps(rho, eps);
  if (points_.empty()) throw InvalidArgument("net must contain at least one point");
  for (const auto& p : points_) {
    if (p.modulus() > rho + 1e-12) throw InvalidArgument("net point outside D_rho");
  }
}

EpsilonNet build_net(double rho, double eps, std::size_t max_points) {
  check_rho_eps(rho, eps);
  const double expected = net_cardinality(rho, eps);
  if (expected > static_cast<double>(max_points)) {
    throw SizeLimitError("net would have " + std::to_string(static_cast<long long>(expected)) +
                         " points, above the cap of " + std::to_string(max_points));
  }
  const RingLayout l = layout(rho, eps);
  std::vector<Pole> pts;
  pts.reserve(static_cast<std::size_t>(expected));
  pts.emplace_back(Complex(0.0, 0.0));
  for (std::size_t m = 1; m <= l.rings; ++m) {
    const double r = ring_radius(l, rho, m);
    const std::size_t na = ring_count(l, r);
    for (std::size_t k = 0; 2 * k <= na; ++k) {
      if (k == 0) {
        pts.emplace_back(Complex(r, 0.0));
      } else if (2 * k == na) {
        pts.emplace_back(Complex(-r, 0.0));
      } else {
        const Complex p = std::polar(r, 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(na));
        pts.emplace_back(p);
        pts.emplace_back(std::conj(p));
      }
    }
  }
  return EpsilonNet(rho, eps, std::move(pts), true);
}

EpsilonNet build_net_with_cardinality(double rho, std::size_t target, std::size_t max_points) {
  if (target == 0) throw InvalidArgument("target cardinality must be positive");
  if (!(rho > 0.0 && rho < 1.0)) throw InvalidArgument("net: rho must lie in (0, 1)");
  // Cardinality decreases (weakly) as eps grows.
  double lo = 1e-6;
  double hi = 2.0 * rho;
  for (int it = 0; it < 100; ++it) {
    const double mid = std::sqrt(lo * hi);
    if (net_cardinality(rho, mid) > static_cast<double>(target)) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double dlo = std::abs(net_cardinality(rho, lo) - static_cast<double>(target));
  const double dhi = std::abs(net_cardinality(rho, hi) - static_cast<double>(target));
  return build_net(rho, dlo < dhi ? lo : hi, max_points);
}

double eps_from_delta(double delta, double rho) {
  if (!(delta > 0.0 && delta <= 1.0) || !(rho > 0.0 && rho < 1.0)) {
    throw InvalidArgument("eps_from_delta: need 0 < delta <= 1 and 0 < rho < 1");
  }
  return std::numbers::pi * (1.0 - rho) * delta / (16.0 * rho);
}

double covering_constant(double rho, double eps) {
  if (!(rho > 0.0 && rho < 1.0) || eps < 0.0) {
    throw InvalidArgument("covering_constant: need 0 < rho < 1 and eps >= 0");
  }
  return std::max(0.0, 1.0 - 16.0 * rho * eps / (std::numbers::pi * (1.0 - rho)));
}

double packing_cardinality_bound(double rho, double delta) {
  const double pi2 = std::numbers::pi * std::numbers::pi;
  return 1024.0 * std::pow(rho, 4) / (pi2 * (1.0 - rho) * (1.0 - rho) * delta * delta);
}

double covering_radius_estimate(const EpsilonNet& net, std::size_t n_samples, std::uint64_t seed) {
  if (n_samples == 0) throw InvalidArgument("covering_radius_estimate: n_samples must be >= 1");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const BucketGrid grid(net.points(), net.rho());
  double worst = 0.0;
  for (std::size_t s = 0; s < n_samples; ++s) {
    const double r = net.rho() * std::sqrt(unit(rng));
    const double th = 2.0 * std::numbers::pi * unit(rng);
    worst = std::max(worst, grid.nearest_distance(std::polar(r, th)));
  }
  return worst;
}

nlohmann::json net_to_json(const EpsilonNet& net) {
  nlohmann::json pts = nlohmann::json::array();
  for (const auto& p : net.points()) pts.push_back({{"re", p.value().real()}, {"im", p.value().imag()}});
  return {{"rho", net.rho()}, {"eps", net.eps()}, {"covering_certified", net.covering_certified()},
          {"points", pts}};
}

EpsilonNet net_from_json(const nlohmann::json& j) {
  try {
    std::vector<Pole> pts;
    for (const auto& p : j.at("points")) pts.emplace_back(p.at("re").get<double>(), p.at("im").get<double>());
    return EpsilonNet(j.at("rho").get<double>(), j.at("eps").get<double>(), std::move(pts),
                      j.value("covering_certified", false));
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("malformed net JSON: ") + e.what());
  }
}

}  // namespace dast
