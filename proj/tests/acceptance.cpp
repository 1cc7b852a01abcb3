// Acceptance suite: one PASS/FAIL line per criterion.
//
//   dast_acceptance                 run everything
//   dast_acceptance --criterion 4   run one criterion
//
// Criteria 6 and 7 share the error-vs-n sweep; criterion 6 saves its records
// (--records) and criterion 7 reuses them when the config hash matches.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <numbers>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <Eigen/QR>
#include <Eigen/SVD>

#include "dast/atoms.hpp"
#include "dast/baseline.hpp"
#include "dast/experiment.hpp"
#include "dast/hankel.hpp"
#include "dast/measure.hpp"
#include "dast/metrics.hpp"
#include "dast/net.hpp"
#include "dast/solver.hpp"
#include "oracles.hpp"

using namespace dast;

namespace {

struct Outcome {
  bool pass = true;
  std::string summary;
};

class Clock {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count();
  }

 private:
  std::chrono::steady_clock::time_point t0_ = std::chrono::steady_clock::now();
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

void note(const std::string& s) { std::cout << "    " << s << '\n'; }

Complex random_disk(std::mt19937_64& rng, double rho) { return oracle::random_in_disk(rng, rho); }

// ---- 1: atom normalization ------------------------------------------------

Outcome criterion1() {
  Clock clock;
  std::mt19937_64 rng(101);
  std::uniform_int_distribution<std::size_t> tdist(2, 300);
  double worst_finite = 0.0, worst_limit = 0.0;
  for (int i = 0; i < 100; ++i) {
    const Pole a(random_disk(rng, 0.95));
    const AtomicModel m(0.95, {{a, 1.0}});
    const std::size_t T = tdist(rng);
    const double nuc = hankel_nuclear_norm(build_hankel(m, T));
    worst_finite = std::max(worst_finite, std::abs(nuc - (1.0 - std::pow(a.modulus(), 2.0 * T))));
    worst_limit = std::max(worst_limit, std::abs(hankel_nuclear_norm(build_hankel(m, 600)) - 1.0));
  }
  const double t = clock.seconds();
  Outcome o;
  o.pass = worst_finite <= 1e-9 && worst_limit <= 1e-8 && t < 30.0;
  o.summary = "max |nuc - (1 - |a|^2T)| = " + fmt("%.2e", worst_finite) + ", max |nuc(T=600) - 1| = " +
              fmt("%.2e", worst_limit) + ", " + fmt("%.1f", t) + " s";
  return o;
}

// ---- 2: atom bounds -------------------------------------------------------

// Nuclear norm of zeta_a zeta_a^T - zeta_b zeta_b^T through its rank-two
// structure: with [zeta_a zeta_b] = Q R, the matrix is Q (R D R^T) Q^T.
double rank_two_nuclear(const Pole& a, const Pole& b, std::size_t T) {
  Eigen::MatrixXcd U(static_cast<Eigen::Index>(T), 2);
  U.col(0) = zeta_vector(a, T);
  U.col(1) = zeta_vector(b, T);
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(U);
  const Eigen::Matrix2cd R = qr.matrixQR().topRows(2).triangularView<Eigen::Upper>();
  Eigen::Matrix2cd D = Eigen::Matrix2cd::Zero();
  D(0, 0) = 1.0;
  D(1, 1) = -1.0;
  const Eigen::Matrix2cd X = R * D * R.transpose();
  return Eigen::JacobiSVD<Eigen::Matrix2cd>(X).singularValues().sum();
}

Outcome criterion2() {
  Clock clock;
  constexpr int kInstances = 10000;
  constexpr double kSlack = 1e-10;
  std::mt19937_64 rng(202);
  std::uniform_real_distribution<double> u(0.0, 1.0);

  int v1 = 0, v2 = 0, v3 = 0, vz = 0;
  // |phi_a(e^{it})| <= 2 for any a in the unit disk.
  for (int i = 0; i < kInstances; ++i) {
    const Pole a(random_disk(rng, 0.999999));
    if (std::abs(eval_atom(a, std::polar(1.0, 2 * std::numbers::pi * u(rng)))) > 2.0 + kSlack) ++v1;
  }
  // Frequency Lipschitz bound on D_rho.
  for (int i = 0; i < kInstances; ++i) {
    const double rho = 0.01 + 0.98 * u(rng);
    const Pole a(random_disk(rng, rho));
    const double t1 = 2 * std::numbers::pi * u(rng), t2 = 2 * std::numbers::pi * u(rng);
    const double lhs = std::abs(eval_atom(a, std::polar(1.0, t1)) - eval_atom(a, std::polar(1.0, t2)));
    if (lhs > (1 + rho) / (1 - rho) * std::abs(t1 - t2) + kSlack) ++v2;
  }
  // Atom-pair Hankel bound, over the full range of stability radii it is
  // claimed for.
  int v3_high = 0, n_high = 0;
  double worst_ratio = 0.0, worst_rho = 0.0;
  for (int i = 0; i < kInstances; ++i) {
    const double rho = 0.01 + 0.98 * u(rng);
    const Pole a(random_disk(rng, rho)), b(random_disk(rng, rho));
    const std::size_t T = default_hankel_order(rho, 1e-16);
    const double nuc = rank_two_nuclear(a, b, T);
    const double bound = atom_pair_nuclear_bound(a, b, rho);
    const bool bad = nuc > bound + kSlack;
    v3 += bad;
    if (rho >= 0.75) {
      ++n_high;
      v3_high += bad;
    }
    if (bound > 0 && nuc / bound > worst_ratio) {
      worst_ratio = nuc / bound;
      worst_rho = rho;
    }
  }
  // zeta inner-product identity.
  for (int i = 0; i < kInstances; ++i) {
    const Pole a(random_disk(rng, 0.99)), b(random_disk(rng, 0.99));
    const std::size_t T = static_cast<std::size_t>(std::ceil(std::log(1e-16) / std::log(std::max(1e-3, a.modulus() * b.modulus())))) + 1;
    const Complex lhs = zeta_vector(a, T).dot(zeta_vector(b, T));
    const Complex rhs = std::sqrt(1 - std::norm(a.value())) * std::sqrt(1 - std::norm(b.value())) /
                        (1.0 - std::conj(a.value()) * b.value());
    if (std::abs(lhs - rhs) > kSlack) ++vz;
  }
  // Cross-check of the rank-two reduction against full Hankel SVDs.
  double reduction_err = 0.0;
  for (int i = 0; i < 40; ++i) {
    const double rho = 0.3 + 0.6 * u(rng);
    const Pole a(random_disk(rng, rho)), b(random_disk(rng, rho));
    const std::size_t T = default_hankel_order(rho, 1e-16);
    const double full = hankel_nuclear_norm(build_hankel(AtomicModel(rho, {{a, 1.0}, {b, -1.0}}), T));
    reduction_err = std::max(reduction_err, std::abs(full - rank_two_nuclear(a, b, T)));
  }
  const double t = clock.seconds();

  note("modulus bound violations: " + std::to_string(v1) + " / " + std::to_string(kInstances));
  note("Lipschitz bound violations: " + std::to_string(v2) + " / " + std::to_string(kInstances));
  note("atom-pair bound violations: " + std::to_string(v3) + " / " + std::to_string(kInstances) + " (rho in [0.01, 0.99]); " +
       std::to_string(v3_high) + " / " + std::to_string(n_high) + " for rho >= 0.75; worst nuclear/bound = " +
       fmt("%.4f", worst_ratio) + " at rho = " + fmt("%.3f", worst_rho));
  note("zeta identity violations: " + std::to_string(vz) + " / " + std::to_string(kInstances));
  note("rank-two reduction vs full SVD: max diff " + fmt("%.2e", reduction_err));
  Outcome o;
  o.pass = v1 == 0 && v2 == 0 && v3 == 0 && vz == 0 && reduction_err < 1e-10 && t < 60.0;
  o.summary = "violations modulus/Lipschitz/pair/zeta = " + std::to_string(v1) + "/" + std::to_string(v2) + "/" + std::to_string(v3) +
              "/" + std::to_string(vz) + ", " + fmt("%.1f", t) + " s";
  if (v3 > 0) o.summary += " (the atom-pair bound fails for small rho; for rho >= 0.75: " + std::to_string(v3_high) + " violations)";
  return o;
}

// ---- 3: norm chain --------------------------------------------------------

Outcome criterion3() {
  Clock clock;
  std::mt19937_64 rng(303);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<int> nterms(1, 10);
  std::normal_distribution<double> nd;
  int violations = 0;
  double worst = -INFINITY;
  std::vector<int> hist(10, 0);
  double min_ratio = INFINITY;
  for (int i = 0; i < 200; ++i) {
    const double rho = 0.1 + 0.8 * u(rng);
    std::vector<Term> terms;
    const int k = nterms(rng);
    for (int j = 0; j < k; ++j) terms.push_back({Pole(random_disk(rng, rho)), Complex(nd(rng), nd(rng))});
    const AtomicModel m(rho, terms);
    const std::size_t T = default_hankel_order(rho, 1e-10);
    const double nuc = hankel_nuclear_norm(build_hankel(m, T));
    const double w = decomposition_weight(m);
    if (nuc > w + 1e-6) ++violations;
    worst = std::max(worst, nuc - w);
    const double r = nuc / w;
    min_ratio = std::min(min_ratio, r);
    hist[std::min(9, static_cast<int>(r * 10))]++;
  }
  std::string h;
  for (int b = 0; b < 10; ++b) h += (b ? " " : "") + std::to_string(hist[static_cast<std::size_t>(b)]);
  note("ratio nuclear/weight histogram over [0,1) in tenths: " + h);
  note("min ratio " + fmt("%.4f", min_ratio) + " (pi/8 = " + fmt("%.4f", std::numbers::pi / 8) +
       "; the weight only bounds the atomic norm from above, so this is not a test of the lower inequality)");
  Outcome o;
  o.pass = violations == 0;
  o.summary = "violations " + std::to_string(violations) + " / 200, max(nuclear - weight) = " + fmt("%.3e", worst) + ", " +
              fmt("%.1f", clock.seconds()) + " s";
  return o;
}

// ---- 4: solver correctness ------------------------------------------------

Outcome criterion4() {
  Clock clock;
  std::mt19937_64 rng(404);
  std::normal_distribution<double> nd;
  std::uniform_int_distribution<std::size_t> pick(0, 49);
  const double rho = 0.9, delta = 0.5, sigma = 0.1;
  int converged = 0, obj_fail = 0, gap_fail = 0, t3_runs = 0, t3_fail = 0;
  double worst_rel = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<Pole> pts;
    for (int j = 0; j < 50; ++j) pts.emplace_back(random_disk(rng, rho));
    auto net = std::make_shared<const EpsilonNet>(rho, 1.0, pts, false);
    auto M = std::make_shared<const MeasurementMatrix>(build_matrix(MeasurementPlan(FrequencyUniform{10}), net));
    Eigen::VectorXcd cstar = Eigen::VectorXcd::Zero(50);
    for (int s = 0; s < 3; ++s) cstar[static_cast<Eigen::Index>(pick(rng))] = Complex(nd(rng), nd(rng));
    Eigen::VectorXcd omega(10);
    for (auto& w : omega) w = Complex(nd(rng), nd(rng)) * (sigma / std::sqrt(2.0));
    const Eigen::VectorXcd y = M->entries() * cstar + omega;
    const double mu = choose_mu(sigma, 10, rho, delta);
    const DastProblem p(M, y, mu);
    const DastSolution sol = solve_dast(p);
    if (sol.status != SolveStatus::Converged) continue;
    ++converged;
    const auto cref = oracle::cd_lasso(M->entries(), y, mu);
    const double fref = oracle::lasso_objective(M->entries(), y, mu, cref);
    const double rel = std::abs(sol.objective - fref) / fref;
    worst_rel = std::max(worst_rel, rel);
    if (rel > 1e-6) ++obj_fail;
    const double tol = 1e-6 * (1.0 + y.squaredNorm());
    if (!(dual_gap(p, sol.coeffs) <= tol)) ++gap_fail;
    if (mu >= dual_atomic_norm(*M, omega)) {
      ++t3_runs;
      const Eigen::VectorXcd d = M->entries() * (sol.coeffs - cstar);
      const bool in1 = d.squaredNorm() <= 2 * mu * cstar.cwiseAbs().sum() + 10 * tol;
      // second inequality, multiplied through by mu
      const bool in2 = mu * sol.coeffs.cwiseAbs().sum() <= mu * cstar.cwiseAbs().sum() + omega.dot(d).real() + 10 * tol;
      if (!in1 || !in2) ++t3_fail;
    }
  }
  Outcome o;
  o.pass = converged == 50 && obj_fail == 0 && gap_fail == 0 && t3_fail == 0 && t3_runs > 0;
  o.summary = "converged " + std::to_string(converged) + "/50, max rel objective diff " + fmt("%.2e", worst_rel) +
              ", gap failures " + std::to_string(gap_fail) + ", optimality inequalities failed on " +
              std::to_string(t3_fail) + " of " + std::to_string(t3_runs) + " eligible runs, " +
              fmt("%.1f", clock.seconds()) + " s";
  return o;
}

// ---- 5: small-sample reproduction -----------------------------------------

Outcome criterion5() {
  Clock clock;
  Config cfg;
  cfg.set("rho", "0.95");
  cfg.set("delta", "0.5");
  cfg.set("sigma", "0.01");
  cfg.set("n", "80");
  cfg.set("net_size", "2000");
  std::vector<double> h2, hinf;
  std::vector<double> degree;
  int nonconv = 0;
  std::size_t net_size = 0;
  for (int seed = 1; seed <= 20; ++seed) {
    cfg.set("seed", std::to_string(seed));
    const ExperimentRecord r = run_identify(cfg);
    h2.push_back(r.h2_error);
    hinf.push_back(r.hinf_error);
    degree.push_back(static_cast<double>(r.effective_degree));
    nonconv += r.status != "converged";
    net_size = r.net_size;
  }
  const double med = median(h2);
  const double t = clock.seconds();
  note("net size " + std::to_string(net_size) + ", mu " + fmt("%.4f", choose_mu(0.01, 80, 0.95, 0.5)) +
       ", median H2 " + fmt("%.5f", med) + ", median Hinf " + fmt("%.5f", median(hinf)) + ", median effective degree " +
       fmt("%.1f", median(degree)) + ", not converged " + std::to_string(nonconv));
  Outcome o;
  o.pass = med <= 0.01 && t < 300.0 && nonconv == 0;
  o.summary = "median H2 error over 20 seeds = " + fmt("%.5f", med) + " (threshold 0.01), " + fmt("%.1f", t) + " s";
  return o;
}

// ---- 6 and 7: consistency trend and bound sanity --------------------------

Config sweep_config() {
  Config cfg;
  cfg.set("rho", "0.95");
  cfg.set("delta", "0.5");
  cfg.set("sigma", "0.01");
  cfg.set("net_size", "2000");
  cfg.set("n_list", "20,40,80,160,320");
  cfg.set("seeds", "1..20");
  return cfg;
}

std::string hash_hex(const Config& cfg) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(cfg.hash()));
  return buf;
}

std::vector<ExperimentRecord> sweep_records(const std::string& path, bool reuse, double* seconds) {
  const Config cfg = sweep_config();
  if (reuse && !path.empty()) {
    std::ifstream in(path);
    if (in) {
      try {
        auto recs = read_records_csv(in);
        if (recs.size() == 100 && std::all_of(recs.begin(), recs.end(), [&](const ExperimentRecord& r) {
              return r.config_hash == hash_hex(cfg);
            })) {
          note("reusing " + std::to_string(recs.size()) + " records from " + path);
          return recs;
        }
      } catch (const std::exception&) {
      }
    }
  }
  Clock clock;
  auto recs = run_error_vs_n(cfg).records;
  if (seconds) *seconds = clock.seconds();
  if (!path.empty()) {
    std::ofstream out(path);
    write_records_csv(out, recs);
  }
  return recs;
}

Outcome criterion6(const std::string& records_path) {
  double t = 0.0;
  const auto recs = sweep_records(records_path, false, &t);
  std::map<std::size_t, std::vector<double>> by_n;
  int nonconv = 0;
  for (const auto& r : recs) {
    by_n[r.n].push_back(r.h2_error);
    nonconv += r.status != "converged";
  }
  std::string curve;
  for (const auto& [n, v] : by_n) curve += " n=" + std::to_string(n) + ":" + fmt("%.5f", median(v));
  note("median H2 error by n:" + curve + "; not converged " + std::to_string(nonconv));
  const double m20 = median(by_n.at(20)), m320 = median(by_n.at(320));
  Outcome o;
  o.pass = m320 <= 0.6 * m20 && t < 900.0;
  o.summary = "median(n=320) / median(n=20) = " + fmt("%.3f", m320 / m20) + " (threshold 0.6), " + fmt("%.1f", t) + " s";
  return o;
}

Outcome criterion7(const std::string& records_path) {
  const auto recs = sweep_records(records_path, true, nullptr);
  int ok = 0;
  double tightest = INFINITY;
  for (const auto& r : recs) {
    const double rhs = theorem_bound(r.rho, r.sigma, r.delta, r.n, r.hankel_nuclear);
    const bool sat = r.h2_error * r.h2_error <= rhs;
    ok += sat;
    tightest = std::min(tightest, rhs / (r.h2_error * r.h2_error));
  }
  const double frac = static_cast<double>(ok) / static_cast<double>(recs.size());
  note("Hankel nuclear norm of the true system " + fmt("%.6f", recs.front().hankel_nuclear) +
       ", smallest bound / squared error = " + fmt("%.3g", tightest));
  Outcome o;
  o.pass = frac >= 0.95;
  o.summary = "bound holds in " + std::to_string(ok) + " / " + std::to_string(recs.size()) + " runs (" +
              fmt("%.1f", 100 * frac) + "%)";
  return o;
}

// ---- 8: baseline ----------------------------------------------------------

Outcome criterion8() {
  Clock clock;
  std::mt19937_64 rng(808);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::normal_distribution<double> nd;
  double worst = 0.0;
  for (int i = 0; i < 20; ++i) {
    const double rho = 0.9;
    const Complex w = std::polar(rho * (0.2 + 0.8 * u(rng)), 0.1 + 3.0 * u(rng));
    const Complex c(nd(rng), nd(rng));
    const AtomicModel m(rho, {{Pole(w), c}, {Pole(std::conj(w)), std::conj(c)}}, true);
    const std::size_t len = 400;
    const auto uin = gaussian_input(len, 9000 + static_cast<std::uint64_t>(i));
    const auto y = simulate_io(m, uin);
    const std::size_t T = default_baseline_hankel_size(len);
    const std::size_t K = default_markov_horizon(T, rho);
    const auto g = estimate_markov(uin, y, K);
    const auto r = ho_kalman(g, 2, (K + 1) / 2);
    worst = std::max(worst, baseline_h2_error(r, m));
  }
  note("noiseless pipeline (m = 400, T = 200): worst H2 error " + fmt("%.2e", worst));

  Config cfg;
  cfg.set("rho", "0.95");
  cfg.set("delta", "0.5");
  cfg.set("sigma", "0.01");
  cfg.set("net_size", "2000");
  cfg.set("m_list", "10,20,30,40,50,60,70,80,90,100,110,120");
  cfg.set("seeds", "1..20");
  const SweepResult sweep = run_dast_vs_subspace(cfg);
  std::map<std::string, int> per_method;
  for (const auto& r : sweep.records) per_method[r.method]++;
  for (const auto& row : sweep.plot) {
    note(row.series + " m=" + fmt("%.0f", row.x) + ": " + fmt("%.5f", row.value));
  }
  for (const auto& [k, v] : sweep.flags) note(k + ": " + (v ? "pass" : "fail") + " (report only)");
  const bool complete = sweep.records.size() == 12 * 20 * 3 && per_method["dast"] == 240 &&
                        per_method["ho_kalman"] == 240 && sweep.plot.size() == 36;
  Outcome o;
  o.pass = worst < 1e-5 && complete;
  o.summary = "noiseless worst H2 " + fmt("%.2e", worst) + ", sweep records " + std::to_string(sweep.records.size()) +
              " with paired curves " + (complete ? "complete" : "INCOMPLETE") + ", small-m superiority flag " +
              (sweep.flags.at("dast_superior_small_m") ? "pass" : "fail") + ", " + fmt("%.1f", clock.seconds()) + " s";
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria"};
  int only = 0;
  std::string records = "criterion6_records.csv";
  app.add_option("--criterion", only, "run a single criterion (1-8)")->check(CLI::Range(1, 8));
  app.add_option("--records", records, "where criterion 6 stores and criterion 7 reads sweep records");
  CLI11_PARSE(app, argc, argv);

  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"atom normalization", criterion1},
      {"atom bounds", criterion2},
      {"norm chain (upper direction)", criterion3},
      {"solver correctness", criterion4},
      {"80-sample reproduction", criterion5},
      {"consistency trend", [&] { return criterion6(records); }},
      {"error bound sanity", [&] { return criterion7(records); }},
      {"baseline pipeline", criterion8},
  };
  bool all = true;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    if (only && static_cast<int>(i + 1) != only) continue;
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.summary = std::string("exception: ") + e.what();
    }
    std::cout << (o.pass ? "PASS" : "FAIL") << "  criterion " << (i + 1) << " (" << criteria[i].first
              << "): " << o.summary << std::endl;
    all = all && o.pass;
  }
  return all ? 0 : 1;
}
