#include "dast/measure.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>
#include <string>

#include "dast/errors.hpp"

namespace dast {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};

void validate(const MeasurementPlan::Kind& kind) {
  std::visit(Overloaded{
                 [](const FrequencyUniform& p) {
                   if (p.n == 0) throw InvalidArgument("FrequencyUniform needs n >= 1");
                 },
                 [](const FrequencyList& p) {
                   if (p.thetas.empty()) throw InvalidArgument("FrequencyList is empty");
                   for (double t : p.thetas) {
                     if (!std::isfinite(t)) throw InvalidArgument("non-finite frequency");
                   }
                 },
                 [](const ImpulseSamples& p) {
                   if (p.indices.empty()) throw InvalidArgument("ImpulseSamples is empty");
                   for (auto i : p.indices) {
                     if (i < 1) throw InvalidArgument("impulse indices are 1-based");
                   }
                 },
                 [](const Convolution& p) {
                   if (p.output_times.empty()) throw InvalidArgument("Convolution has no output times");
                   if (p.truncation == 0) throw InvalidArgument("Convolution truncation must be >= 1");
                   const auto tmax = *std::max_element(p.output_times.begin(), p.output_times.end());
                   if (p.truncation < tmax) {
                     throw InvalidArgument("Convolution truncation must be >= the largest output time");
                   }
                 },
             },
             kind);
}

// Row t of the convolution operator: U(r, j-1) = u_{t-j}, zero outside the input.
Eigen::MatrixXd convolution_operator(const Convolution& p) {
  const auto n = static_cast<Eigen::Index>(p.output_times.size());
  const auto K = static_cast<Eigen::Index>(p.truncation);
  const auto len = static_cast<long>(p.input.size());
  Eigen::MatrixXd U = Eigen::MatrixXd::Zero(n, K);
  for (Eigen::Index r = 0; r < n; ++r) {
    const auto t = static_cast<long>(p.output_times[static_cast<std::size_t>(r)]);
    for (Eigen::Index j = 1; j <= K; ++j) {
      const long s = t - static_cast<long>(j);
      if (s >= 0 && s < len) U(r, j - 1) = p.input[static_cast<std::size_t>(s)];
    }
  }
  return U;
}

}  // namespace

MeasurementPlan::MeasurementPlan(Kind kind) : kind_(std::move(kind)) { validate(kind_); }

std::size_t MeasurementPlan::size() const {
  return std::visit(Overloaded{
                        [](const FrequencyUniform& p) { return p.n; },
                        [](const FrequencyList& p) { return p.thetas.size(); },
                        [](const ImpulseSamples& p) { return p.indices.size(); },
                        [](const Convolution& p) { return p.output_times.size(); },
                    },
                    kind_);
}

bool MeasurementPlan::is_frequency() const {
  return std::holds_alternative<FrequencyUniform>(kind_) || std::holds_alternative<FrequencyList>(kind_);
}

std::vector<double> MeasurementPlan::thetas() const {
  if (const auto* u = std::get_if<FrequencyUniform>(&kind_)) {
    std::vector<double> th(u->n);
    for (std::size_t k = 0; k < u->n; ++k) {
      th[k] = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(u->n);
    }
    return th;
  }
  if (const auto* l = std::get_if<FrequencyList>(&kind_)) return l->thetas;
  throw InvalidArgument("thetas() is only defined for frequency plans");
}

MeasurementPlan convolution_plan(std::vector<double> input) {
  const std::size_t m = input.size();
  if (m == 0) throw InvalidArgument("convolution_plan: empty input");
  std::vector<std::size_t> times(m);
  for (std::size_t t = 0; t < m; ++t) times[t] = t;
  return MeasurementPlan(Convolution{std::move(input), std::move(times), m});
}

MeasurementMatrix::MeasurementMatrix(Eigen::MatrixXcd entries, MeasurementPlan plan,
                                     std::shared_ptr<const EpsilonNet> net)
    : entries_(std::move(entries)), plan_(std::move(plan)), net_(std::move(net)) {
  if (!net_) throw InvalidArgument("MeasurementMatrix needs a net");
  if (entries_.rows() != static_cast<Eigen::Index>(plan_.size()) ||
      entries_.cols() != static_cast<Eigen::Index>(net_->size())) {
    throw InvalidArgument("MeasurementMatrix dimensions do not match plan and net");
  }
}

Eigen::VectorXcd apply_plan(const MeasurementPlan& plan, const AtomicModel& m) {
  const auto n = static_cast<Eigen::Index>(plan.size());
  Eigen::VectorXcd y = Eigen::VectorXcd::Zero(n);
  if (plan.is_frequency()) {
    const auto th = plan.thetas();
    for (Eigen::Index i = 0; i < n; ++i) y[i] = eval_model(m, std::polar(1.0, th[static_cast<std::size_t>(i)]));
    return y;
  }
  if (const auto* p = std::get_if<ImpulseSamples>(&plan.kind())) {
    if (m.empty()) return y;
    const auto kmax = *std::max_element(p->indices.begin(), p->indices.end());
    const Eigen::VectorXcd g = model_impulse_response(m, kmax);
    for (Eigen::Index i = 0; i < n; ++i) y[i] = g[static_cast<Eigen::Index>(p->indices[static_cast<std::size_t>(i)] - 1)];
    return y;
  }
  const auto& conv = std::get<Convolution>(plan.kind());
  if (m.empty()) return y;
  const Eigen::VectorXcd g = model_impulse_response(m, conv.truncation);
  return convolution_operator(conv).cast<Complex>() * g;
}

MeasurementMatrix build_matrix(const MeasurementPlan& plan, std::shared_ptr<const EpsilonNet> net,
                               std::size_t max_entries) {
  if (!net) throw InvalidArgument("build_matrix needs a net");
  const auto n = static_cast<Eigen::Index>(plan.size());
  const auto N = static_cast<Eigen::Index>(net->size());
  if (static_cast<double>(n) * static_cast<double>(N) > static_cast<double>(max_entries)) {
    throw SizeLimitError("measurement matrix would have " + std::to_string(n) + " x " +
                         std::to_string(N) + " entries, above the cap");
  }
  const auto& pts = net->points();
  Eigen::MatrixXcd M(n, N);
  if (plan.is_frequency()) {
    const auto th = plan.thetas();
    for (Eigen::Index j = 0; j < N; ++j) {
      const Pole& w = pts[static_cast<std::size_t>(j)];
      for (Eigen::Index i = 0; i < n; ++i) M(i, j) = eval_atom(w, std::polar(1.0, th[static_cast<std::size_t>(i)]));
    }
  } else if (const auto* p = std::get_if<ImpulseSamples>(&plan.kind())) {
    const auto kmax = *std::max_element(p->indices.begin(), p->indices.end());
    for (Eigen::Index j = 0; j < N; ++j) {
      const Eigen::VectorXcd g = atom_impulse_response(pts[static_cast<std::size_t>(j)], kmax);
      for (Eigen::Index i = 0; i < n; ++i) M(i, j) = g[static_cast<Eigen::Index>(p->indices[static_cast<std::size_t>(i)] - 1)];
    }
  } else {
    const auto& conv = std::get<Convolution>(plan.kind());
    const auto K = static_cast<Eigen::Index>(conv.truncation);
    Eigen::MatrixXcd G(K, N);
    for (Eigen::Index j = 0; j < N; ++j) G.col(j) = atom_impulse_response(pts[static_cast<std::size_t>(j)], conv.truncation);
    M.noalias() = convolution_operator(conv).cast<Complex>() * G;
  }
  return MeasurementMatrix(std::move(M), plan, std::move(net));
}

Eigen::VectorXcd add_noise(const Eigen::VectorXcd& y, double sigma, std::uint64_t seed, NoiseKind kind) {
  if (!(sigma >= 0.0)) throw InvalidArgument("noise level must be >= 0");
  if (sigma == 0.0) return y;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXcd out = y;
  if (kind == NoiseKind::Complex) {
    const double s = sigma / std::numbers::sqrt2;
    for (Eigen::Index i = 0; i < out.size(); ++i) {
      const double re = normal(rng);
      const double im = normal(rng);
      out[i] += Complex(s * re, s * im);
    }
  } else {
    for (Eigen::Index i = 0; i < out.size(); ++i) out[i] += sigma * normal(rng);
  }
  return out;
}

std::vector<double> gaussian_input(std::size_t length, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> u(length);
  for (auto& v : u) v = normal(rng);
  return u;
}

nlohmann::json plan_to_json(const MeasurementPlan& plan) {
  return std::visit(Overloaded{
                        [](const FrequencyUniform& p) -> nlohmann::json {
                          return {{"kind", "frequency_uniform"}, {"n", p.n}};
                        },
                        [](const FrequencyList& p) -> nlohmann::json {
                          return {{"kind", "frequency_list"}, {"thetas", p.thetas}};
                        },
                        [](const ImpulseSamples& p) -> nlohmann::json {
                          return {{"kind", "impulse_samples"}, {"indices", p.indices}};
                        },
                        [](const Convolution& p) -> nlohmann::json {
                          return {{"kind", "convolution"},
                                  {"input", p.input},
                                  {"output_times", p.output_times},
                                  {"truncation", p.truncation}};
                        },
                    },
                    plan.kind());
}

MeasurementPlan plan_from_json(const nlohmann::json& j) {
  try {
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "frequency_uniform") return MeasurementPlan(FrequencyUniform{j.at("n").get<std::size_t>()});
    if (kind == "frequency_list") return MeasurementPlan(FrequencyList{j.at("thetas").get<std::vector<double>>()});
    if (kind == "impulse_samples") {
      return MeasurementPlan(ImpulseSamples{j.at("indices").get<std::vector<std::size_t>>()});
    }
    if (kind == "convolution") {
      return MeasurementPlan(Convolution{j.at("input").get<std::vector<double>>(),
                                         j.at("output_times").get<std::vector<std::size_t>>(),
                                         j.at("truncation").get<std::size_t>()});
    }
    throw InvalidArgument("unknown plan kind '" + kind + "'");
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("malformed plan JSON: ") + e.what());
  }
}

void write_observations_csv(std::ostream& os, const Eigen::VectorXcd& y) {
  os << "index,re,im\n";
  char buf[96];
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%ld,%.17g,%.17g\n", static_cast<long>(i), y[i].real(), y[i].imag());
    os << buf;
  }
}

Eigen::VectorXcd read_observations_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line.rfind("index,re,im", 0) != 0) {
    throw InvalidArgument("observation CSV must start with header index,re,im");
  }
  std::vector<Complex> vals;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string idx, re, im;
    if (!std::getline(ls, idx, ',') || !std::getline(ls, re, ',') || !std::getline(ls, im)) {
      throw InvalidArgument("malformed observation row: " + line);
    }
    if (std::stoul(idx) != vals.size()) throw InvalidArgument("observation indices must be 0..n-1 in order");
    vals.emplace_back(std::stod(re), std::stod(im));
  }
  return Eigen::Map<Eigen::VectorXcd>(vals.data(), static_cast<Eigen::Index>(vals.size()));
}

}  // namespace dast
