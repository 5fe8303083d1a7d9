#pragma once

#include <span>

#include "folio/ad/tensor.hpp"

namespace folio::ad {

/// log Dirichlet(x; alpha) as a differentiable function of alpha (1 x K).
/// The point x is data: the score-function route never differentiates through
/// the sampler.
Tensor dirichlet_log_prob(const Tensor& alpha, std::span<const double> x);

/// Differential entropy of Dirichlet(alpha).
Tensor dirichlet_entropy(const Tensor& alpha);

/// KL(Dir(alpha) || Dir(reference)) with the reference held fixed.
Tensor dirichlet_kl(const Tensor& alpha, std::span<const double> reference);

}  // namespace folio::ad
