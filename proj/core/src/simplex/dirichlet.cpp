#include "folio/simplex/dirichlet.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/trigamma.hpp>

#include "folio/error.hpp"

namespace folio::simplex {
namespace {

void check_dims(const DirichletParams& params, std::span<const double> x) {
  require(x.size() == params.size(), ErrorKind::kShape,
          "dirichlet: point has " + std::to_string(x.size()) + " coordinates, expected " +
              std::to_string(params.size()));
}

}  // namespace

DirichletParams::DirichletParams(std::vector<double> alpha) : alpha_(std::move(alpha)) {
  require(!alpha_.empty(), ErrorKind::kParameter, "dirichlet: empty concentration vector");
  for (std::size_t k = 0; k < alpha_.size(); ++k) {
    require(std::isfinite(alpha_[k]) && alpha_[k] > 0.0, ErrorKind::kParameter,
            "dirichlet: alpha[" + std::to_string(k) + "] = " + std::to_string(alpha_[k]) +
                " is not a positive finite concentration");
  }
}

double DirichletParams::total() const {
  return std::accumulate(alpha_.begin(), alpha_.end(), 0.0);
}

double digamma(double x) { return boost::math::digamma(x); }
double trigamma(double x) { return boost::math::trigamma(x); }

double log_gamma_sample(double shape, Rng& rng) {
  if (shape < 1.0) {
    // Gamma(a) = Gamma(a + 1) * U^(1/a), kept in log space so tiny shapes
    // do not underflow.
    return log_gamma_sample(shape + 1.0, rng) + std::log(uniform01(rng)) / shape;
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  while (true) {
    const double x = standard_normal(rng);
    double v = 1.0 + c * x;
    if (v <= 0.0) continue;
    v = v * v * v;
    const double u = uniform01(rng);
    const double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2) return std::log(d * v);
    if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return std::log(d * v);
  }
}

std::vector<double> dirichlet_sample(const DirichletParams& params, Rng& rng) {
  std::vector<double> logs(params.size());
  for (std::size_t k = 0; k < params.size(); ++k) logs[k] = log_gamma_sample(params[k], rng);
  const double top = *std::max_element(logs.begin(), logs.end());
  std::vector<double> x(params.size());
  double sum = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    x[k] = std::max(std::exp(logs[k] - top), std::numeric_limits<double>::min());
    sum += x[k];
  }
  for (double& v : x) v /= sum;
  return x;
}

double dirichlet_log_pdf(const DirichletParams& params, std::span<const double> x) {
  check_dims(params, x);
  double out = std::lgamma(params.total());
  for (std::size_t k = 0; k < params.size(); ++k) {
    out -= std::lgamma(params[k]);
    out += (params[k] - 1.0) * std::log(std::max(x[k], kInteriorClamp));
  }
  return out;
}

std::vector<double> dirichlet_log_pdf_grad(const DirichletParams& params,
                                           std::span<const double> x) {
  check_dims(params, x);
  const double psi_total = digamma(params.total());
  std::vector<double> g(params.size());
  for (std::size_t k = 0; k < params.size(); ++k) {
    g[k] = psi_total - digamma(params[k]) + std::log(std::max(x[k], kInteriorClamp));
  }
  return g;
}

std::vector<double> dirichlet_mean(const DirichletParams& params) {
  const double total = params.total();
  std::vector<double> m(params.size());
  for (std::size_t k = 0; k < m.size(); ++k) m[k] = params[k] / total;
  return m;
}

double dirichlet_entropy(const DirichletParams& params) {
  const double total = params.total();
  const auto K = static_cast<double>(params.size());
  double log_beta = -std::lgamma(total);
  double tail = 0.0;
  for (std::size_t k = 0; k < params.size(); ++k) {
    log_beta += std::lgamma(params[k]);
    tail += (params[k] - 1.0) * digamma(params[k]);
  }
  return log_beta + (total - K) * digamma(total) - tail;
}

double dirichlet_kl(const DirichletParams& p, const DirichletParams& q) {
  require(p.size() == q.size(), ErrorKind::kShape, "dirichlet_kl: dimension mismatch");
  const double p0 = p.total();
  const double q0 = q.total();
  const double psi_p0 = digamma(p0);
  double out = std::lgamma(p0) - std::lgamma(q0);
  for (std::size_t k = 0; k < p.size(); ++k) {
    out += std::lgamma(q[k]) - std::lgamma(p[k]);
    out += (p[k] - q[k]) * (digamma(p[k]) - psi_p0);
  }
  return out;
}

}  // namespace folio::simplex
