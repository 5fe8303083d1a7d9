#include "folio/ad/dirichlet_ops.hpp"

#include <vector>

#include "folio/error.hpp"
#include "folio/simplex/dirichlet.hpp"

namespace folio::ad {
namespace {

simplex::DirichletParams params_of(const Tensor& alpha) {
  require(alpha.rows() == 1, ErrorKind::kShape, "dirichlet ops expect a 1 x K alpha");
  return simplex::DirichletParams(std::vector<double>(alpha.data().begin(), alpha.data().end()));
}

}  // namespace

Tensor dirichlet_log_prob(const Tensor& alpha, std::span<const double> x) {
  const auto params = params_of(alpha);
  const double value = simplex::dirichlet_log_pdf(params, x);
  auto grad = simplex::dirichlet_log_pdf_grad(params, x);
  return make_op("dirichlet_log_prob", 1, 1, {value}, {alpha.node()},
                 [grad = std::move(grad)](Node& self) {
                   Node& pa = *self.parents[0];
                   for (std::size_t k = 0; k < grad.size(); ++k) pa.grad[k] += self.grad[0] * grad[k];
                 });
}

Tensor dirichlet_entropy(const Tensor& alpha) {
  const auto params = params_of(alpha);
  const double value = simplex::dirichlet_entropy(params);
  const double total = params.total();
  const auto K = static_cast<double>(params.size());
  // dH/da_j = (a0 - K) psi'(a0) - (a_j - 1) psi'(a_j)
  std::vector<double> grad(params.size());
  const double common = (total - K) * simplex::trigamma(total);
  for (std::size_t k = 0; k < grad.size(); ++k) {
    grad[k] = common - (params[k] - 1.0) * simplex::trigamma(params[k]);
  }
  return make_op("dirichlet_entropy", 1, 1, {value}, {alpha.node()},
                 [grad = std::move(grad)](Node& self) {
                   Node& pa = *self.parents[0];
                   for (std::size_t k = 0; k < grad.size(); ++k) pa.grad[k] += self.grad[0] * grad[k];
                 });
}

Tensor dirichlet_kl(const Tensor& alpha, std::span<const double> reference) {
  const auto p = params_of(alpha);
  const simplex::DirichletParams q(std::vector<double>(reference.begin(), reference.end()));
  const double value = simplex::dirichlet_kl(p, q);
  // dKL/da_j = (a_j - b_j) psi'(a_j) - (a0 - b0) psi'(a0)
  const double common = (p.total() - q.total()) * simplex::trigamma(p.total());
  std::vector<double> grad(p.size());
  for (std::size_t k = 0; k < grad.size(); ++k) {
    grad[k] = (p[k] - q[k]) * simplex::trigamma(p[k]) - common;
  }
  return make_op("dirichlet_kl", 1, 1, {value}, {alpha.node()},
                 [grad = std::move(grad)](Node& self) {
                   Node& pa = *self.parents[0];
                   for (std::size_t k = 0; k < grad.size(); ++k) pa.grad[k] += self.grad[0] * grad[k];
                 });
}

}  // namespace folio::ad
