#include <doctest.h>

#include <set>

#include "dast/errors.hpp"
#include "dast/net.hpp"
#include "oracles.hpp"

using namespace dast;

namespace {

std::vector<Complex> values(const EpsilonNet& net) {
  std::vector<Complex> v;
  for (const auto& p : net.points()) v.push_back(p.value());
  return v;
}

}  // namespace

TEST_SUITE("net") {
  TEST_CASE("coarse nets collapse to the origin") {
    const EpsilonNet n = build_net(0.5, 2.0);
    REQUIRE(n.size() == 1);
    CHECK(n.points()[0].value() == Complex(0.0));
    CHECK(covering_radius_estimate(n, 1000, 1) <= 0.5);
  }

  TEST_CASE("eps_from_delta and covering constants") {
    CHECK(std::abs(eps_from_delta(1.0, 0.5) - std::numbers::pi / 16) < 1e-15);
    CHECK(std::abs(eps_from_delta(0.5, 0.9) - 0.010908) < 1e-6);
    CHECK(eps_from_delta(0.1, 0.9) < eps_from_delta(0.2, 0.9));
    CHECK(covering_constant(0.5, 0.0) == 1.0);
    CHECK(std::abs(covering_constant(0.5, std::numbers::pi / 16)) < 1e-15);
    CHECK(std::abs(covering_constant(0.5, std::numbers::pi / 32) - 0.5) < 1e-15);
    CHECK(covering_constant(0.5, 1.0) == 0.0);
  }

  TEST_CASE("certified covering against brute force") {
    for (double rho : {0.3, 0.7, 0.95}) {
      for (double eps : {0.2, 0.08, 0.03}) {
        const EpsilonNet n = build_net(rho, eps);
        CHECK(n.covering_certified());
        const auto samples = oracle::uniform_disk_samples(rho, 4000, 99);
        CHECK(oracle::brute_force_covering(values(n), samples) <= eps);
        CHECK(covering_radius_estimate(n, 20000, 5) <= eps);
        // boundary points are the hardest to cover
        std::vector<Complex> rim;
        for (int k = 0; k < 2000; ++k) rim.push_back(std::polar(rho, 2 * std::numbers::pi * k / 2000.0));
        CHECK(oracle::brute_force_covering(values(n), rim) <= eps);
      }
    }
  }

  TEST_CASE("nearest-neighbour estimate matches brute force") {
    const EpsilonNet n = build_net(0.9, 0.07);
    const auto samples = oracle::uniform_disk_samples(0.9, 3000, 12);
    const double brute = oracle::brute_force_covering(values(n), samples);
    CHECK(brute <= 0.07);
    CHECK(covering_radius_estimate(n, 100000, 3) <= 0.07);
  }

  TEST_CASE("points lie in the disk and are conjugate closed") {
    const EpsilonNet n = build_net(0.95, 0.05);
    std::set<std::pair<double, double>> s;
    bool boundary = false;
    for (const auto& p : n.points()) {
      CHECK(p.modulus() <= 0.95 + 1e-12);
      s.insert({p.value().real(), p.value().imag()});
      boundary = boundary || std::abs(p.modulus() - 0.95) < 1e-12;
    }
    CHECK(boundary);
    for (const auto& p : n.points()) CHECK(s.count({p.value().real(), -p.value().imag()}) == 1);
  }

  TEST_CASE("finer nets cover at least as well") {
    const EpsilonNet a = build_net(0.8, 0.1);
    const EpsilonNet b = build_net(0.8, 0.05);
    CHECK(b.size() > a.size());
    CHECK(covering_radius_estimate(b, 50000, 8) <= covering_radius_estimate(a, 50000, 8));
  }

  TEST_CASE("cardinality knob and size cap") {
    const EpsilonNet n = build_net_with_cardinality(0.95, 2000);
    CHECK(n.size() <= 2000);
    CHECK(n.size() >= 1900);
    CHECK(n.covering_certified());
    CHECK_THROWS_AS(build_net(0.95, 1e-5, 100000), SizeLimitError);
    CHECK_THROWS_AS(build_net(1.0, 0.1), InvalidArgument);
    CHECK_THROWS_AS(build_net(0.5, 0.0), InvalidArgument);
  }

  TEST_CASE("theorem-level resolution is far finer than the experimental grid") {
    const double eps = eps_from_delta(0.5, 0.95);
    CHECK(std::abs(eps - std::numbers::pi * 0.05 * 0.5 / (16 * 0.95)) < 1e-15);
    const EpsilonNet n = build_net(0.95, eps);
    MESSAGE("net at eps=" << eps << " has " << n.size() << " points; packing bound "
                          << packing_cardinality_bound(0.95, 0.5));
    CHECK(n.size() > 100000);
  }

  TEST_CASE("json round trip") {
    const EpsilonNet n = build_net(0.6, 0.2);
    const EpsilonNet b = net_from_json(nlohmann::json::parse(net_to_json(n).dump()));
    CHECK(b.size() == n.size());
    CHECK(b.eps() == n.eps());
    for (std::size_t i = 0; i < n.size(); ++i) CHECK(b.points()[i] == n.points()[i]);
  }
}
