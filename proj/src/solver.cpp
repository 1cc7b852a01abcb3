#include "dast/solver.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <utility>

#include <Eigen/Eigenvalues>

#include "dast/errors.hpp"

namespace dast {

namespace {

// Real-linear reformulation shared by the complex and the conjugate-tied
// problems: x is split into groups of 1 or 2 real parameters, group g owns
// columns [start_g, start_g + size_g) of the realified design matrix
// A = [Re; Im] and carries penalty weight w_g * ||x_g||_2.
struct Group {
  Eigen::Index start = 0;
  int size = 0;
  double weight = 1.0;
  std::size_t atom = 0;       // net index of the atom (the upper-half-plane one when paired)
  std::size_t partner = 0;    // conjugate atom for tied pairs
  bool tied_pair = false;
};

struct GroupDesign {
  Eigen::MatrixXd A;
  Eigen::VectorXd y;
  std::vector<Group> groups;
};

Eigen::VectorXd realify(const Eigen::VectorXcd& v) {
  Eigen::VectorXd out(2 * v.size());
  out.head(v.size()) = v.real();
  out.tail(v.size()) = v.imag();
  return out;
}

GroupDesign complex_design(const MeasurementMatrix& M, const Eigen::VectorXcd& y) {
  const Eigen::Index n = M.rows();
  const Eigen::Index N = M.cols();
  GroupDesign d;
  d.y = realify(y);
  d.A.resize(2 * n, 2 * N);
  const auto& E = M.entries();
  d.groups.resize(static_cast<std::size_t>(N));
  for (Eigen::Index j = 0; j < N; ++j) {
    // columns M_j and i M_j
    d.A.col(2 * j).head(n) = E.col(j).real();
    d.A.col(2 * j).tail(n) = E.col(j).imag();
    d.A.col(2 * j + 1).head(n) = -E.col(j).imag();
    d.A.col(2 * j + 1).tail(n) = E.col(j).real();
    auto& g = d.groups[static_cast<std::size_t>(j)];
    g.start = 2 * j;
    g.size = 2;
    g.atom = static_cast<std::size_t>(j);
  }
  return d;
}

GroupDesign conjugate_tied_design(const MeasurementMatrix& M, const Eigen::VectorXcd& y) {
  const auto& pts = M.net().points();
  std::map<std::pair<double, double>, std::size_t> index;
  for (std::size_t j = 0; j < pts.size(); ++j) index[{pts[j].value().real(), pts[j].value().imag()}] = j;

  const auto& E = M.entries();
  const Eigen::Index n = M.rows();
  std::vector<Eigen::VectorXd> cols;
  GroupDesign d;
  d.y = realify(y);
  for (std::size_t j = 0; j < pts.size(); ++j) {
    const Complex w = pts[j].value();
    Group g;
    g.start = static_cast<Eigen::Index>(cols.size());
    g.atom = j;
    if (w.imag() == 0.0) {
      g.size = 1;
      cols.push_back(realify(E.col(static_cast<Eigen::Index>(j))));
    } else if (w.imag() > 0.0) {
      const auto it = index.find({w.real(), -w.imag()});
      if (it == index.end()) throw InvalidArgument("real_system solve needs a conjugate-closed net");
      const auto k = static_cast<Eigen::Index>(it->second);
      const auto jj = static_cast<Eigen::Index>(j);
      g.size = 2;
      g.weight = 2.0;
      g.partner = it->second;
      g.tied_pair = true;
      cols.push_back(realify(E.col(jj) + E.col(k)));
      cols.push_back(realify(Complex(0.0, 1.0) * (E.col(jj) - E.col(k))));
    } else {
      continue;  // owned by its upper-half-plane partner
    }
    d.groups.push_back(g);
  }
  d.A.resize(2 * n, static_cast<Eigen::Index>(cols.size()));
  for (std::size_t c = 0; c < cols.size(); ++c) d.A.col(static_cast<Eigen::Index>(c)) = cols[c];
  return d;
}

double penalty(const std::vector<Group>& groups, const Eigen::VectorXd& x) {
  double s = 0.0;
  for (const auto& g : groups) s += g.weight * x.segment(g.start, g.size).norm();
  return s;
}

double max_group_score(const std::vector<Group>& groups, const Eigen::VectorXd& corr) {
  double s = 0.0;
  for (const auto& g : groups) s = std::max(s, corr.segment(g.start, g.size).norm() / g.weight);
  return s;
}

// Gap of (1/2)||Ax - y||^2 + mu pen(x) given the residual r = y - Ax and the
// correlations A^T r on the same groups.
double group_gap(double primal, const Eigen::VectorXd& r, const Eigen::VectorXd& y, double dual_norm,
                 double mu) {
  const double scale = dual_norm > mu ? mu / dual_norm : 1.0;
  const double dual = scale * r.dot(y) - 0.5 * scale * scale * r.squaredNorm();
  return primal - dual;
}

double lipschitz_estimate(const Eigen::MatrixXd& A, const SolverConfig& cfg) {
  if (A.cols() == 0) return 1.0;
  Eigen::VectorXd v = Eigen::VectorXd::Constant(A.cols(), 1.0 / std::sqrt(static_cast<double>(A.cols())));
  Eigen::VectorXd w;
  for (std::size_t i = 0; i < cfg.power_iterations; ++i) {
    w.noalias() = A.transpose() * (A * v);
    const double nw = w.norm();
    if (nw == 0.0) return 1.0;
    v = w / nw;
  }
  const Eigen::VectorXd Av = A * v;
  const double rayleigh = Av.squaredNorm();
  const double certified = (A.transpose() * Av).norm();
  const double L = std::max(rayleigh, certified) * cfg.lipschitz_margin;
  return L > 0.0 ? L : 1.0;
}

struct RestrictedState {
  Eigen::VectorXd x;   // restricted coefficients
  Eigen::VectorXd Ax;  // A_W x
};

// Accelerated proximal gradient on the restricted problem; returns the number
// of iterations spent.
std::size_t run_apg(const Eigen::MatrixXd& A, const Eigen::VectorXd& y, const std::vector<Group>& groups,
                    double mu, double L, double inner_tol, std::size_t budget, const SolverConfig& cfg,
                    RestrictedState& st, DastSolution& sol) {
  auto objective = [&](const Eigen::VectorXd& x, const Eigen::VectorXd& Ax) {
    return 0.5 * (Ax - y).squaredNorm() + mu * penalty(groups, x);
  };
  Eigen::VectorXd z = st.x;
  Eigen::VectorXd Az = st.Ax;
  Eigen::VectorXd v(st.x.size());
  Eigen::VectorXd xn(st.x.size());
  Eigen::VectorXd Axn(y.size());
  double F = objective(st.x, st.Ax);
  double t = 1.0;
  bool at_restart = true;
  int rejected_in_row = 0;
  std::size_t it = 0;
  while (it < budget) {
    ++it;
    v.noalias() = z - (A.transpose() * (Az - y)) / L;
    for (const auto& g : groups) {
      const auto seg = v.segment(g.start, g.size);
      const double nrm = seg.norm();
      const double thr = mu * g.weight / L;
      xn.segment(g.start, g.size) = nrm > thr ? ((1.0 - thr / nrm) * seg).eval() : Eigen::VectorXd::Zero(g.size);
    }
    Axn.noalias() = A * xn;
    const double Fn = objective(xn, Axn);
    if (cfg.restart && Fn > F) {
      // A plain proximal step from an accepted point cannot increase the
      // objective when L is a true Lipschitz bound.
      if (at_restart) L *= 2.0;
      // Repeated rejections from the accepted point: rounding floor reached.
      if (++rejected_in_row >= 4) break;
      z = st.x;
      Az = st.Ax;
      t = 1.0;
      at_restart = true;
      ++sol.restarts;
      continue;
    }
    const double tn = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    const double beta = (t - 1.0) / tn;
    z = xn + beta * (xn - st.x);
    Az = Axn + beta * (Axn - st.Ax);
    st.x.swap(xn);
    st.Ax.swap(Axn);
    F = Fn;
    t = tn;
    at_restart = false;
    rejected_in_row = 0;
    sol.objective_trace.push_back(F);
    if (it % cfg.gap_check_every == 0) {
      const Eigen::VectorXd r = y - st.Ax;
      const Eigen::VectorXd corr = A.transpose() * r;
      if (group_gap(F, r, y, max_group_score(groups, corr), mu) <= inner_tol) break;
    }
  }
  return it;
}

}  // namespace

SolverConfig solver_config_from(const std::map<std::string, std::string>& kv, SolverConfig base) {
  auto get = [&](const char* key) -> const std::string* {
    auto it = kv.find(key);
    return it == kv.end() ? nullptr : &it->second;
  };
  auto to_bool = [](const std::string& s) {
    if (s == "on" || s == "true" || s == "1" || s == "yes") return true;
    if (s == "off" || s == "false" || s == "0" || s == "no") return false;
    throw InvalidArgument("expected a boolean, got '" + s + "'");
  };
  try {
    if (auto v = get("gap_tol")) base.gap_tol = std::stod(*v);
    if (auto v = get("max_iter")) base.max_iter = std::stoul(*v);
    if (auto v = get("support_tol")) base.support_tol = std::stod(*v);
    if (auto v = get("restart")) base.restart = to_bool(*v);
    if (auto v = get("real_system")) base.real_system = to_bool(*v);
    if (auto v = get("threads")) base.threads = std::stoi(*v);
  } catch (const std::logic_error& e) {
    if (dynamic_cast<const InvalidArgument*>(&e)) throw;
    throw InvalidArgument(std::string("malformed solver setting: ") + e.what());
  }
  if (!(base.gap_tol > 0.0) || base.max_iter == 0 || base.support_tol < 0.0 || base.threads < 1) {
    throw InvalidArgument("solver settings out of range");
  }
  return base;
}

DastProblem::DastProblem(std::shared_ptr<const MeasurementMatrix> M, Eigen::VectorXcd y, double mu)
    : M_(std::move(M)), y_(std::move(y)), mu_(mu) {
  if (!M_) throw InvalidArgument("DastProblem needs a measurement matrix");
  if (y_.size() != M_->rows()) throw InvalidArgument("observation length does not match the matrix");
  if (!(mu_ > 0.0) || !std::isfinite(mu_)) throw InvalidArgument("mu must be positive");
}

const char* to_string(SolveStatus s) {
  return s == SolveStatus::Converged ? "converged" : "not_converged";
}

double choose_mu(double sigma, std::size_t n, double rho, double delta) {
  if (!(sigma >= 0.0) || n == 0 || !(rho > 0.0 && rho < 1.0) || !(delta > 0.0 && delta < 1.0)) {
    throw InvalidArgument("choose_mu: parameters out of range");
  }
  const double arg = 11.0 * rho * rho / (delta * (1.0 - rho));
  if (!(arg > 1.0)) throw InvalidArgument("choose_mu: log argument 11 rho^2 / (delta (1 - rho)) must exceed 1");
  return 2.0 * sigma * std::sqrt(static_cast<double>(n) * std::log(arg));
}

double dast_objective(const DastProblem& p, const Eigen::VectorXcd& c) {
  if (c.size() != p.matrix().cols()) throw InvalidArgument("coefficient length does not match the net");
  return 0.5 * (p.matrix().entries() * c - p.y()).squaredNorm() + p.mu() * c.cwiseAbs().sum();
}

double dual_atomic_norm(const MeasurementMatrix& M, const Eigen::VectorXcd& z) {
  if (z.size() != M.rows()) throw InvalidArgument("dual_atomic_norm: dimension mismatch");
  if (M.cols() == 0) return 0.0;
  return (M.entries().adjoint() * z).cwiseAbs().maxCoeff();
}

double dual_gap(const DastProblem& p, const Eigen::VectorXcd& c) {
  const Eigen::VectorXcd r = p.y() - p.matrix().entries() * c;
  const double dn = dual_atomic_norm(p.matrix(), r);
  const double scale = dn > p.mu() ? p.mu() / dn : 1.0;
  const Eigen::VectorXcd theta = scale * r;
  const double dual = theta.dot(p.y()).real() - 0.5 * theta.squaredNorm();
  return dast_objective(p, c) - dual;
}

DastSolution solve_dast(const DastProblem& p, const SolverConfig& cfg) {
  const MeasurementMatrix& M = p.matrix();
  const GroupDesign d = cfg.real_system ? conjugate_tied_design(M, p.y()) : complex_design(M, p.y());
  const double mu = p.mu();
  const auto ng = d.groups.size();

  DastSolution sol;
  sol.threads = 1;
  sol.gap_tolerance = cfg.gap_tol * (1.0 + p.y().squaredNorm());

  Eigen::VectorXd x = Eigen::VectorXd::Zero(d.A.cols());
  Eigen::VectorXd r = d.y;
  Eigen::VectorXd corr = d.A.transpose() * r;
  std::vector<char> in_set(ng, 0);
  std::vector<std::size_t> working;
  double gap = 0.0;

  auto violators = [&]() {
    std::vector<std::pair<double, std::size_t>> v;
    for (std::size_t g = 0; g < ng; ++g) {
      if (in_set[g]) continue;
      const auto& grp = d.groups[g];
      const double s = corr.segment(grp.start, grp.size).norm() / grp.weight;
      if (s > mu) v.emplace_back(s, g);
    }
    std::sort(v.begin(), v.end(), [](const auto& a, const auto& b) {
      return a.first != b.first ? a.first > b.first : a.second < b.second;
    });
    return v;
  };

  double inner_tol = 0.5 * sol.gap_tolerance;
  for (;;) {
    const double primal = 0.5 * r.squaredNorm() + mu * penalty(d.groups, x);
    gap = group_gap(primal, r, d.y, max_group_score(d.groups, corr), mu);
    sol.objective = primal;
    if (gap <= sol.gap_tolerance) {
      sol.status = SolveStatus::Converged;
      break;
    }
    if (sol.iterations >= cfg.max_iter) break;

    const auto v = violators();
    double round_tol = inner_tol;
    if (v.empty()) {
      // The working set already supports an optimum; only accuracy is missing.
      inner_tol *= 0.1;
      round_tol = inner_tol;
    } else {
      round_tol = std::max(inner_tol, 0.1 * gap);
      const std::size_t add = std::max<std::size_t>(cfg.initial_working_set, working.size());
      for (std::size_t i = 0; i < std::min(add, v.size()); ++i) {
        in_set[v[i].second] = 1;
        working.push_back(v[i].second);
      }
      std::sort(working.begin(), working.end());
    }

    // Restricted problem on the working set, columns copied contiguously.
    std::vector<Group> wgroups;
    Eigen::Index cols = 0;
    for (std::size_t g : working) cols += d.groups[g].size;
    Eigen::MatrixXd Aw(d.A.rows(), cols);
    RestrictedState st{Eigen::VectorXd(cols), Eigen::VectorXd()};
    Eigen::Index at = 0;
    for (std::size_t g : working) {
      Group wg = d.groups[g];
      Aw.middleCols(at, wg.size) = d.A.middleCols(wg.start, wg.size);
      st.x.segment(at, wg.size) = x.segment(wg.start, wg.size);
      wg.start = at;
      at += wg.size;
      wgroups.push_back(wg);
    }
    st.Ax = Aw * st.x;
    const double L = lipschitz_estimate(Aw, cfg);
    const std::size_t accepted = sol.objective_trace.size();
    sol.iterations += run_apg(Aw, d.y, wgroups, mu, L, round_tol, cfg.max_iter - sol.iterations, cfg, st, sol);
    ++sol.working_set_rounds;

    at = 0;
    for (std::size_t g : working) {
      const auto sz = d.groups[g].size;
      x.segment(d.groups[g].start, sz) = st.x.segment(at, sz);
      at += sz;
    }
    r = d.y - st.Ax;
    corr.noalias() = d.A.transpose() * r;
    if (v.empty() && sol.objective_trace.size() == accepted) {
      // No progress possible in floating point; report the gap as is.
      const double p2 = 0.5 * r.squaredNorm() + mu * penalty(d.groups, x);
      gap = group_gap(p2, r, d.y, max_group_score(d.groups, corr), mu);
      sol.status = gap <= sol.gap_tolerance ? SolveStatus::Converged : SolveStatus::NotConverged;
      break;
    }
  }
  sol.working_set_size = working.size();
  sol.dual_gap = std::max(gap, 0.0);

  sol.coeffs = Eigen::VectorXcd::Zero(M.cols());
  for (const auto& g : d.groups) {
    const auto j = static_cast<Eigen::Index>(g.atom);
    if (g.size == 1) {
      sol.coeffs[j] = x[g.start];
    } else {
      const Complex c(x[g.start], x[g.start + 1]);
      sol.coeffs[j] = c;
      if (g.tied_pair) sol.coeffs[static_cast<Eigen::Index>(g.partner)] = std::conj(c);
    }
  }
  sol.objective = dast_objective(p, sol.coeffs);
  const double cmax = sol.coeffs.size() ? sol.coeffs.cwiseAbs().maxCoeff() : 0.0;
  for (Eigen::Index j = 0; j < sol.coeffs.size(); ++j) {
    if (cmax > 0.0 && std::abs(sol.coeffs[j]) > cfg.support_tol * cmax) sol.support.push_back(static_cast<std::size_t>(j));
  }
  return sol;
}

AtomicModel reconstruct_model(const Eigen::VectorXcd& c, const EpsilonNet& net, double support_tol) {
  if (c.size() != static_cast<Eigen::Index>(net.size())) {
    throw InvalidArgument("coefficient length does not match the net");
  }
  std::vector<Term> terms;
  const double cmax = c.size() ? c.cwiseAbs().maxCoeff() : 0.0;
  if (cmax > 0.0) {
    for (Eigen::Index j = 0; j < c.size(); ++j) {
      if (std::abs(c[j]) > support_tol * cmax) terms.push_back({net.points()[static_cast<std::size_t>(j)], c[j]});
    }
  }
  return AtomicModel(net.rho(), std::move(terms));
}

std::size_t measurement_rank(const MeasurementMatrix& M, double rel_tol) {
  const Eigen::MatrixXcd& E = M.entries();
  // Eigenvalues of the smaller Gram matrix are the squared singular values.
  const Eigen::MatrixXcd G = E.rows() <= E.cols() ? Eigen::MatrixXcd(E * E.adjoint()) : Eigen::MatrixXcd(E.adjoint() * E);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(G, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericalError("measurement_rank: eigensolver failed");
  const Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  const double top = ev.size() ? ev.maxCoeff() : 0.0;
  if (top == 0.0) return 0;
  return static_cast<std::size_t>((ev.array() > rel_tol * top).count());
}

}  // namespace dast
