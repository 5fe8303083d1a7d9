#pragma once

#include <span>
#include <vector>

#include "folio/rng.hpp"

namespace folio::simplex {

inline constexpr double kDefaultAlphaFloor = 1e-3;
/// Coordinates are clamped to at least this before taking logs.
inline constexpr double kInteriorClamp = 1e-12;

/// Dirichlet concentrations over [cash, asset_1, ..., asset_N]. Every entry is
/// finite and strictly positive.
class DirichletParams {
 public:
  explicit DirichletParams(std::vector<double> alpha);

  std::span<const double> alpha() const { return alpha_; }
  std::size_t size() const { return alpha_.size(); }
  double operator[](std::size_t k) const { return alpha_[k]; }
  double total() const;

 private:
  std::vector<double> alpha_;
};

double digamma(double x);
double trigamma(double x);

/// log of a Gamma(shape, 1) variate; Marsaglia-Tsang with the shape < 1 boost.
double log_gamma_sample(double shape, Rng& rng);

/// Normalised independent Gamma draws; strictly positive, sums to 1.
std::vector<double> dirichlet_sample(const DirichletParams& params, Rng& rng);

/// ln Gamma(sum a) - sum ln Gamma(a_i) + sum (a_i - 1) ln x_i, with x clamped
/// to the interior.
double dirichlet_log_pdf(const DirichletParams& params, std::span<const double> x);

/// Gradient of dirichlet_log_pdf with respect to the concentrations.
std::vector<double> dirichlet_log_pdf_grad(const DirichletParams& params,
                                           std::span<const double> x);

std::vector<double> dirichlet_mean(const DirichletParams& params);

/// Differential entropy.
double dirichlet_entropy(const DirichletParams& params);

/// KL(Dir(p) || Dir(q)).
double dirichlet_kl(const DirichletParams& p, const DirichletParams& q);

}  // namespace folio::simplex
