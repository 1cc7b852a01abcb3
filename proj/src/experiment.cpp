#include "dast/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <functional>
#include <istream>
#include <limits>
#include <mutex>
#include <numbers>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>

#include "dast/baseline.hpp"
#include "dast/errors.hpp"
#include "dast/hankel.hpp"
#include "dast/measure.hpp"
#include "dast/metrics.hpp"
#include "dast/net.hpp"
#include "dast/solver.hpp"

namespace dast {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t noise_seed(std::uint64_t seed) { return splitmix64(seed); }
std::uint64_t input_seed(std::uint64_t seed) { return splitmix64(seed ^ 0x5eed1a7e5eed1a7eULL); }

const std::set<std::string>& known_keys() {
  static const std::set<std::string> k = {
      "experiment", "seed",       "seeds",      "num_seeds",       "rho",         "delta",
      "sigma",      "n",          "n_list",     "m_list",          "plan",        "net_size",
      "net_eps",    "mu",         "true_model", "true_model_file", "hinf_grid",   "hankel_order",
      "gap_tol",    "max_iter",   "support_tol", "restart",        "real_system", "threads",
      "out",        "format"};
  return k;
}

// Rethrows module errors with the failing stage prefixed.
template <class F>
auto stage(const char* name, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const InvalidArgument& e) {
    throw InvalidArgument(std::string(name) + ": " + e.what());
  } catch (const SizeLimitError& e) {
    throw SizeLimitError(std::string(name) + ": " + e.what());
  } catch (const NumericalError& e) {
    throw NumericalError(std::string(name) + ": " + e.what());
  }
}

// Runs body(i) for i in [0, count) on up to `threads` workers. Results are
// written by index, so output order never depends on scheduling.
void run_pool(std::size_t count, int threads, const std::function<void(std::size_t)>& body) {
  const auto workers = static_cast<std::size_t>(std::max(1, threads));
  if (workers == 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr first;
  std::mutex mu;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < std::min(workers, count); ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          body(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(mu);
          if (!first) first = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first) std::rethrow_exception(first);
}

std::string describe_model(const AtomicModel& m) {
  std::string s;
  for (const auto& t : m.terms()) {
    if (!s.empty()) s += ';';
    s += fmt17(t.pole.value().real()) + ' ' + fmt17(t.pole.value().imag()) + ' ' + fmt17(t.coeff.real()) + ' ' +
         fmt17(t.coeff.imag());
  }
  return s;
}

// Settings shared by every run of one experiment.
struct Common {
  std::string experiment;
  std::string hash;
  double rho = 0.95;
  double delta = 0.5;
  double sigma = 0.01;
  std::optional<double> mu;
  std::size_t net_size = 2000;
  std::optional<double> net_eps;
  std::size_t hinf_grid = 8192;
  SolverConfig solver;
  int threads = 1;
  AtomicModel truth{0.95};
  std::string truth_text;
  double nuclear = 0.0;
  std::shared_ptr<const EpsilonNet> net;
};

Common make_common(const Config& cfg, const std::string& experiment) {
  cfg.validate_keys();
  Common c;
  c.experiment = experiment;
  char hbuf[20];
  std::snprintf(hbuf, sizeof hbuf, "%016llx", static_cast<unsigned long long>(cfg.hash()));
  c.hash = hbuf;
  c.rho = cfg.get_double("rho", 0.95);
  c.delta = cfg.get_double("delta", 0.5);
  c.sigma = cfg.get_double("sigma", 0.01);
  if (!(c.rho > 0.0 && c.rho < 1.0)) throw InvalidArgument("config: rho must lie in (0, 1)");
  if (!(c.delta > 0.0 && c.delta < 1.0)) throw InvalidArgument("config: delta must lie in (0, 1)");
  if (!(c.sigma >= 0.0)) throw InvalidArgument("config: sigma must be >= 0");
  if (cfg.has("mu")) c.mu = cfg.get_double("mu", 0.0);
  c.net_size = cfg.get_size("net_size", 2000);
  if (cfg.has("net_eps")) c.net_eps = cfg.get_double("net_eps", 0.0);
  c.hinf_grid = cfg.get_size("hinf_grid", 8192);
  c.solver = stage("solver config", [&] { return solver_config_from(cfg.values()); });
  c.threads = c.solver.threads;

  c.truth = stage("true model", [&] {
    if (cfg.has("true_model_file")) {
      std::ifstream f(cfg.get("true_model_file", ""));
      if (!f) throw InvalidArgument("cannot open true_model_file");
      try {
        return model_from_json(nlohmann::json::parse(f));
      } catch (const nlohmann::json::exception& e) {
        throw InvalidArgument(e.what());
      }
    }
    if (cfg.has("true_model")) {
      try {
        return model_from_json(nlohmann::json::parse(cfg.get("true_model", "")));
      } catch (const nlohmann::json::exception& e) {
        throw InvalidArgument(e.what());
      }
    }
    return default_true_model(c.rho);
  });
  if (c.truth.max_pole_modulus() > c.rho + 1e-12) throw InvalidArgument("true model has a pole outside D_rho");
  c.truth_text = describe_model(c.truth);

  const std::size_t T = cfg.get_size("hankel_order", default_hankel_order(c.rho));
  c.nuclear = stage("hankel", [&] { return hankel_nuclear_norm(build_hankel(c.truth, T)); });
  c.net = stage("net", [&] {
    return std::make_shared<const EpsilonNet>(c.net_eps ? build_net(c.rho, *c.net_eps)
                                                        : build_net_with_cardinality(c.rho, c.net_size));
  });
  return c;
}

std::vector<std::uint64_t> seed_list(const Config& cfg, std::size_t default_count) {
  if (cfg.has("seeds")) {
    const auto s = cfg.get_size_list("seeds", {});
    if (s.empty()) throw InvalidArgument("config: seed list is empty");
    return {s.begin(), s.end()};
  }
  const auto base = cfg.get_u64("seed", 1);
  const auto count = cfg.get_size("num_seeds", default_count);
  if (count == 0) throw InvalidArgument("config: seed list is empty");
  std::vector<std::uint64_t> out(count);
  for (std::size_t i = 0; i < count; ++i) out[i] = base + i;
  return out;
}

ExperimentRecord base_record(const Common& c, std::uint64_t seed, std::size_t n) {
  ExperimentRecord r;
  r.experiment = c.experiment;
  r.config_hash = c.hash;
  r.seed = seed;
  r.true_model = c.truth_text;
  r.rho = c.rho;
  r.sigma = c.sigma;
  r.delta = c.delta;
  r.n = n;
  r.hankel_nuclear = c.nuclear;
  r.threads = c.threads;
  r.theorem_bound = theorem_bound(c.rho, c.sigma, c.delta, n, c.nuclear);
  r.theorem_bound_proof = theorem_bound_proof(c.rho, c.sigma, c.delta, n, c.nuclear);
  return r;
}

struct Measured {
  std::shared_ptr<const MeasurementMatrix> M;
  std::size_t rank = 0;
};

Measured measure(const MeasurementPlan& plan, const Common& c) {
  Measured m;
  m.M = stage("matrix", [&] { return std::make_shared<const MeasurementMatrix>(build_matrix(plan, c.net)); });
  m.rank = stage("rank", [&] { return measurement_rank(*m.M); });
  return m;
}

ExperimentRecord dast_run(const Common& c, const Measured& meas, std::uint64_t seed) {
  const auto t0 = std::chrono::steady_clock::now();
  const MeasurementPlan& plan = meas.M->plan();
  const std::size_t n = plan.size();
  ExperimentRecord r = stage("bound", [&] { return base_record(c, seed, n); });
  r.method = "dast";
  r.net_size = c.net->size();
  r.eps = c.net->eps();
  r.matrix_rank = meas.rank;
  r.rank_deficient = meas.rank < n;

  const Eigen::VectorXcd y = stage("measure", [&] {
    return add_noise(apply_plan(plan, c.truth), c.sigma, noise_seed(seed), plan.noise_kind());
  });
  r.mu = stage("mu", [&] { return c.mu ? *c.mu : choose_mu(c.sigma, n, c.rho, c.delta); });
  if (!(r.mu > 0.0)) throw InvalidArgument("mu: noiseless runs need an explicit positive mu");
  const DastSolution sol = stage("solve", [&] { return solve_dast(DastProblem(meas.M, y, r.mu), c.solver); });
  r.status = to_string(sol.status);
  r.iterations = sol.iterations;
  r.dual_gap = sol.dual_gap;

  const AtomicModel est = stage("reconstruct", [&] { return reconstruct_model(sol.coeffs, *c.net, c.solver.support_tol); });
  stage("metrics", [&] {
    r.h2_error = h2_error(est, c.truth);
    const HinfError h = hinf_error(est, c.truth, c.hinf_grid);
    r.hinf_error = h.raw;
    r.hinf_certified = h.certified;
    r.empirical_mse = empirical_mse(plan, est, c.truth);
    r.effective_degree = effective_degree(est);
    return 0;
  });
  r.bound_satisfied = r.h2_error * r.h2_error <= r.theorem_bound;
  r.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

ExperimentRecord baseline_run(const Common& c, const MeasurementPlan& plan, const std::vector<double>& u,
                              std::uint64_t seed, std::size_t order, const std::string& method) {
  const auto t0 = std::chrono::steady_clock::now();
  const std::size_t m = u.size();
  ExperimentRecord r = stage("bound", [&] { return base_record(c, seed, m); });
  r.method = method;
  r.status = "baseline";
  r.matrix_rank = 0;

  // Same noisy outputs as the paired DAST run.
  const Eigen::VectorXcd y =
      stage("measure", [&] { return add_noise(apply_plan(plan, c.truth), c.sigma, noise_seed(seed), NoiseKind::Real); });
  std::vector<double> yr(m);
  for (std::size_t t = 0; t < m; ++t) yr[t] = y[static_cast<Eigen::Index>(t)].real();

  const std::size_t T = default_baseline_hankel_size(m);
  const std::size_t K = default_markov_horizon(T, c.rho);
  const std::size_t hk = std::max<std::size_t>(1, (K + 1) / 2);
  r.markov_horizon = K;
  r.baseline_hankel_size = hk;
  r.baseline_order = std::min(order, hk);
  const auto g = stage("markov", [&] { return estimate_markov(u, yr, K); });
  const HoKalmanResult hk_res = stage("ho_kalman", [&] { return ho_kalman(g, r.baseline_order, hk); });
  r.baseline_clipped = hk_res.clipped;
  r.baseline_defective = hk_res.defective;
  stage("metrics", [&] {
    r.h2_error = baseline_h2_error(hk_res, c.truth);
    if (hk_res.model) {
      const HinfError h = hinf_error(*hk_res.model, c.truth, c.hinf_grid);
      r.hinf_error = h.raw;
      r.hinf_certified = h.certified;
      r.empirical_mse = empirical_mse(plan, *hk_res.model, c.truth);
      r.effective_degree = effective_degree(*hk_res.model);
    } else {
      r.hinf_error = r.hinf_certified = r.empirical_mse = std::numeric_limits<double>::quiet_NaN();
      r.effective_degree = hk_res.order;
    }
    return 0;
  });
  r.bound_satisfied = r.h2_error * r.h2_error <= r.theorem_bound;
  r.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

MeasurementPlan identify_plan(const Config& cfg, std::size_t n, std::uint64_t seed) {
  const std::string kind = cfg.get("plan", "frequency_uniform");
  if (n == 0) throw InvalidArgument("config: n must be >= 1");
  if (kind == "frequency_uniform") return MeasurementPlan(FrequencyUniform{n});
  if (kind == "impulse_samples") {
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i + 1;
    return MeasurementPlan(ImpulseSamples{std::move(idx)});
  }
  if (kind == "convolution") return convolution_plan(gaussian_input(n, input_seed(seed)));
  throw InvalidArgument("config: unknown plan '" + kind + "'");
}

// Shared per-field (de)serialization: the JSON object is the canonical form,
// CSV cells are rendered from it.
#define DAST_RECORD_FIELDS(X)                                                                                   \
  X(experiment) X(config_hash) X(seed) X(method) X(true_model) X(rho) X(sigma) X(delta) X(n) X(net_size) X(eps) \
  X(mu) X(matrix_rank) X(rank_deficient) X(status) X(iterations) X(dual_gap) X(h2_error) X(hinf_error)           \
  X(hinf_certified) X(empirical_mse) X(effective_degree) X(hankel_nuclear) X(theorem_bound)                       \
  X(theorem_bound_proof) X(bound_satisfied) X(baseline_order) X(baseline_hankel_size) X(markov_horizon)          \
  X(baseline_clipped) X(baseline_defective) X(threads) X(wall_time)

void put(nlohmann::json& j, const char* k, double v) {
  if (std::isfinite(v)) {
    j[k] = v;
  } else {
    j[k] = fmt17(v);  // "nan", "inf"
  }
}
template <class T>
void put(nlohmann::json& j, const char* k, const T& v) {
  j[k] = v;
}

void take(const nlohmann::json& j, const char* k, double& v) {
  const auto& e = j.at(k);
  v = e.is_string() ? std::strtod(e.get<std::string>().c_str(), nullptr) : e.get<double>();
}
template <class T>
void take(const nlohmann::json& j, const char* k, T& v) {
  v = j.at(k).get<T>();
}

nlohmann::json record_to_json(const ExperimentRecord& r) {
  nlohmann::json j = nlohmann::json::object();
#define X(f) put(j, #f, r.f);
  DAST_RECORD_FIELDS(X)
#undef X
  return j;
}

ExperimentRecord record_from_json(const nlohmann::json& j) {
  ExperimentRecord r;
#define X(f) take(j, #f, r.f);
  DAST_RECORD_FIELDS(X)
#undef X
  return r;
}

std::string cell(const nlohmann::json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_number_float()) return fmt17(v.get<double>());
  return v.dump();
}

nlohmann::json parse_cell(const std::string& s, const nlohmann::json& like) {
  try {
    if (like.is_string()) return s;
    if (like.is_boolean()) {
      if (s == "true") return true;
      if (s == "false") return false;
      throw InvalidArgument("bad boolean cell '" + s + "'");
    }
    if (like.is_number_unsigned()) return static_cast<std::uint64_t>(std::stoull(s));
    if (like.is_number_integer()) return static_cast<std::int64_t>(std::stoll(s));
    const double d = std::strtod(s.c_str(), nullptr);
    if (std::isfinite(d)) return d;
    return s;
  } catch (const std::logic_error& e) {
    if (dynamic_cast<const InvalidArgument*>(&e)) throw;
    throw InvalidArgument("bad record cell '" + s + "'");
  }
}

}  // namespace

// ---- Config ---------------------------------------------------------------

Config Config::parse(std::istream& is) {
  Config c;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (const auto h = line.find('#'); h != std::string::npos) line.erase(h);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw InvalidArgument("config line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw InvalidArgument("config line " + std::to_string(lineno) + ": empty key");
    c.kv_[key] = trim(line.substr(eq + 1));
  }
  return c;
}

Config Config::load(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw InvalidArgument("cannot open config file '" + path + "'");
  return parse(f);
}

std::string Config::get(const std::string& key, const std::string& def) const {
  auto it = kv_.find(key);
  return it == kv_.end() ? def : it->second;
}

double Config::get_double(const std::string& key, double def) const {
  auto it = kv_.find(key);
  if (it == kv_.end()) return def;
  std::size_t pos = 0;
  try {
    const double v = std::stod(it->second, &pos);
    if (pos == it->second.size()) return v;
  } catch (const std::logic_error&) {
  }
  throw InvalidArgument("config: '" + key + "' is not a number");
}

std::uint64_t Config::get_u64(const std::string& key, std::uint64_t def) const {
  auto it = kv_.find(key);
  if (it == kv_.end()) return def;
  std::size_t pos = 0;
  try {
    if (!it->second.empty() && it->second[0] != '-') {
      const auto v = std::stoull(it->second, &pos);
      if (pos == it->second.size()) return v;
    }
  } catch (const std::logic_error&) {
  }
  throw InvalidArgument("config: '" + key + "' is not a non-negative integer");
}

std::size_t Config::get_size(const std::string& key, std::size_t def) const {
  return static_cast<std::size_t>(get_u64(key, def));
}

bool Config::get_bool(const std::string& key, bool def) const {
  auto it = kv_.find(key);
  if (it == kv_.end()) return def;
  const auto& s = it->second;
  if (s == "on" || s == "true" || s == "1" || s == "yes") return true;
  if (s == "off" || s == "false" || s == "0" || s == "no") return false;
  throw InvalidArgument("config: '" + key + "' is not a boolean");
}

std::vector<std::size_t> Config::get_size_list(const std::string& key, std::vector<std::size_t> def) const {
  auto it = kv_.find(key);
  if (it == kv_.end()) return def;
  std::vector<std::size_t> out;
  std::istringstream ss(it->second);
  std::string item;
  auto num = [&](const std::string& s) {
    Config tmp;
    tmp.set(key, trim(s));
    return tmp.get_size(key, 0);
  };
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    if (const auto dots = item.find(".."); dots != std::string::npos) {
      const auto a = num(item.substr(0, dots));
      const auto b = num(item.substr(dots + 2));
      if (b < a) throw InvalidArgument("config: empty range in '" + key + "'");
      for (auto v = a; v <= b; ++v) out.push_back(v);
    } else {
      out.push_back(num(item));
    }
  }
  return out;
}

std::uint64_t Config::hash() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const auto& [k, v] : kv_) {
    if (k == "out" || k == "format") continue;  // output location does not affect results
    for (char ch : k + "=" + v + "\n") {
      h ^= static_cast<unsigned char>(ch);
      h *= 0x100000001b3ULL;
    }
  }
  return h;
}

void Config::validate_keys() const {
  for (const auto& [k, v] : kv_) {
    if (!known_keys().count(k)) throw InvalidArgument("config: unknown key '" + k + "'");
  }
}

// ---- records --------------------------------------------------------------

AtomicModel default_true_model(double rho) {
  const Complex w = std::polar(0.7, std::numbers::pi / 4.0);
  return AtomicModel(rho, {{Pole(w), Complex(1.0, -1.0)}, {Pole(std::conj(w)), Complex(1.0, 1.0)}}, true);
}

bool ExperimentRecord::same_result(const ExperimentRecord& o) const {
  nlohmann::json a = record_to_json(*this);
  nlohmann::json b = record_to_json(o);
  a.erase("wall_time");
  b.erase("wall_time");
  return a == b;
}

const std::vector<std::string>& record_field_names() {
  static const std::vector<std::string> names = {
#define X(f) #f,
      DAST_RECORD_FIELDS(X)
#undef X
  };
  return names;
}

void write_records_csv(std::ostream& os, const std::vector<ExperimentRecord>& recs) {
  const auto& names = record_field_names();
  for (std::size_t i = 0; i < names.size(); ++i) os << (i ? "," : "") << names[i];
  os << '\n';
  for (const auto& r : recs) {
    const nlohmann::json j = record_to_json(r);
    for (std::size_t i = 0; i < names.size(); ++i) os << (i ? "," : "") << cell(j.at(names[i]));
    os << '\n';
  }
}

std::vector<ExperimentRecord> read_records_csv(std::istream& is) {
  const auto& names = record_field_names();
  std::string line;
  if (!std::getline(is, line)) throw InvalidArgument("record CSV is empty");
  std::string expected;
  for (std::size_t i = 0; i < names.size(); ++i) expected += (i ? "," : "") + names[i];
  if (trim(line) != expected) throw InvalidArgument("record CSV header does not match the record fields");
  const nlohmann::json like = record_to_json(ExperimentRecord{});
  std::vector<ExperimentRecord> out;
  while (std::getline(is, line)) {
    if (trim(line).empty()) continue;
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string c;
    while (std::getline(ls, c, ',')) cells.push_back(c);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    if (cells.size() != names.size()) throw InvalidArgument("record CSV row has the wrong number of cells");
    nlohmann::json j = nlohmann::json::object();
    for (std::size_t i = 0; i < names.size(); ++i) j[names[i]] = parse_cell(trim(cells[i]), like.at(names[i]));
    out.push_back(record_from_json(j));
  }
  return out;
}

nlohmann::json records_to_json(const std::vector<ExperimentRecord>& recs) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : recs) arr.push_back(record_to_json(r));
  return arr;
}

std::vector<ExperimentRecord> records_from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw InvalidArgument("record JSON must be an array");
  std::vector<ExperimentRecord> out;
  try {
    for (const auto& e : j) out.push_back(record_from_json(e));
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("malformed record JSON: ") + e.what());
  }
  return out;
}

void write_plot_csv(std::ostream& os, const std::vector<PlotRow>& rows) {
  os << "x,series,value\n";
  for (const auto& r : rows) os << fmt17(r.x) << ',' << r.series << ',' << fmt17(r.value) << '\n';
}

double median(std::vector<double> v) {
  if (v.empty()) throw InvalidArgument("median of an empty set");
  std::sort(v.begin(), v.end());
  const auto h = v.size() / 2;
  return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

bool any_not_converged(const std::vector<ExperimentRecord>& recs) {
  return std::any_of(recs.begin(), recs.end(), [](const ExperimentRecord& r) {
    return r.method == "dast" && r.status != to_string(SolveStatus::Converged);
  });
}

// ---- runners --------------------------------------------------------------

ExperimentRecord run_identify(const Config& cfg) {
  const Common c = make_common(cfg, "identify");
  const std::uint64_t seed = cfg.get_u64("seed", 1);
  const MeasurementPlan plan = stage("plan", [&] { return identify_plan(cfg, cfg.get_size("n", 80), seed); });
  return dast_run(c, measure(plan, c), seed);
}

SweepResult run_error_vs_n(const Config& cfg) {
  const Common c = make_common(cfg, "fig2");
  const auto ns = cfg.get_size_list("n_list", {20, 40, 80, 160, 320});
  if (ns.size() < 2) throw InvalidArgument("config: n_list needs at least two values");
  const auto seeds = seed_list(cfg, 20);
  if (cfg.get("plan", "frequency_uniform") != "frequency_uniform") {
    throw InvalidArgument("config: the error-vs-n sweep uses frequency_uniform plans");
  }

  // The frequency matrix does not depend on the seed; build it once per n.
  std::vector<Measured> meas(ns.size());
  for (std::size_t i = 0; i < ns.size(); ++i) {
    meas[i] = measure(stage("plan", [&] { return identify_plan(cfg, ns[i], 0); }), c);
  }
  SweepResult out;
  out.records.resize(ns.size() * seeds.size());
  run_pool(out.records.size(), c.threads, [&](std::size_t k) {
    out.records[k] = dast_run(c, meas[k / seeds.size()], seeds[k % seeds.size()]);
  });
  for (std::size_t i = 0; i < ns.size(); ++i) {
    std::vector<double> e;
    for (std::size_t s = 0; s < seeds.size(); ++s) e.push_back(out.records[i * seeds.size() + s].h2_error);
    out.plot.push_back({static_cast<double>(ns[i]), "dast_median_h2", median(e)});
  }
  bool monotone = true;
  for (std::size_t i = 1; i < out.plot.size(); ++i) monotone = monotone && out.plot[i].value <= out.plot[i - 1].value;
  out.flags["median_nonincreasing"] = monotone;
  return out;
}

SweepResult run_dast_vs_subspace(const Config& cfg) {
  const Common c = make_common(cfg, "fig3");
  std::vector<std::size_t> def_m;
  for (std::size_t m = 10; m <= 120; m += 10) def_m.push_back(m);
  const auto ms = cfg.get_size_list("m_list", def_m);
  if (ms.empty()) throw InvalidArgument("config: m_list is empty");
  for (auto m : ms) {
    if (m < 2) throw InvalidArgument("config: m values must be >= 2");
  }
  const auto seeds = seed_list(cfg, 20);
  const std::size_t order = c.truth.size();
  const std::size_t mmax = *std::max_element(ms.begin(), ms.end());

  constexpr std::size_t kMethods = 3;
  SweepResult out;
  out.records.resize(ms.size() * seeds.size() * kMethods);
  run_pool(ms.size() * seeds.size(), c.threads, [&](std::size_t k) {
    const std::size_t m = ms[k / seeds.size()];
    const std::uint64_t seed = seeds[k % seeds.size()];
    // One input realization per seed; shorter experiments use its prefix.
    std::vector<double> u = gaussian_input(mmax, input_seed(seed));
    u.resize(m);
    const MeasurementPlan plan = stage("plan", [&] { return convolution_plan(u); });
    out.records[k * kMethods] = dast_run(c, measure(plan, c), seed);
    out.records[k * kMethods + 1] = baseline_run(c, plan, u, seed, order, "ho_kalman");
    out.records[k * kMethods + 2] = baseline_run(c, plan, u, seed, order + 2, "ho_kalman_order_plus2");
  });

  static const char* series[kMethods] = {"dast_median_h2", "ho_kalman_median_h2", "ho_kalman_order_plus2_median_h2"};
  bool superior = true;
  bool any_small = false;
  std::size_t degraded = 0;
  for (std::size_t i = 0; i < ms.size(); ++i) {
    double med[kMethods];
    for (std::size_t a = 0; a < kMethods; ++a) {
      std::vector<double> e;
      for (std::size_t s = 0; s < seeds.size(); ++s) e.push_back(out.records[(i * seeds.size() + s) * kMethods + a].h2_error);
      med[a] = median(e);
      out.plot.push_back({static_cast<double>(ms[i]), series[a], med[a]});
    }
    if (ms[i] >= 10 && ms[i] <= 50) {
      any_small = true;
      superior = superior && med[0] <= med[1];
    }
    if (med[2] > med[1]) ++degraded;
  }
  out.flags["dast_superior_small_m"] = any_small && superior;
  out.flags["order_plus2_degrades"] = 2 * degraded >= ms.size();
  return out;
}

}  // namespace dast
