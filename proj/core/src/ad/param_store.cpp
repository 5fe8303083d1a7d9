#include "folio/ad/param_store.hpp"

#include <algorithm>
#include <cmath>

#include "folio/error.hpp"

namespace folio::ad {

Tensor ParamStore::add(const std::string& name, std::size_t rows, std::size_t cols,
                       std::vector<double> init) {
  require(!contains(name), ErrorKind::kConfig, "parameter '" + name + "' registered twice");
  Tensor param = Tensor::parameter(rows, cols, std::move(init));
  entries_.push_back(Entry{name, param, std::vector<double>(rows * cols, 0.0),
                           std::vector<double>(rows * cols, 0.0)});
  return param;
}

const Tensor& ParamStore::get(const std::string& name) const {
  for (const auto& e : entries_) {
    if (e.name == name) return e.param;
  }
  fail(ErrorKind::kConfig, "unknown parameter '" + name + "'");
}

bool ParamStore::contains(const std::string& name) const {
  return std::any_of(entries_.begin(), entries_.end(),
                     [&](const Entry& e) { return e.name == name; });
}

std::size_t ParamStore::num_scalars() const {
  std::size_t n = 0;
  for (const auto& e : entries_) n += e.param.size();
  return n;
}

void ParamStore::zero_grad() {
  for (auto& e : entries_) e.param.zero_grad();
}

double ParamStore::grad_norm() const {
  double ss = 0.0;
  for (const auto& e : entries_) {
    for (double g : e.param.grad()) ss += g * g;
  }
  return std::sqrt(ss);
}

void ParamStore::scale_grads(double factor) {
  for (auto& e : entries_) {
    for (double& g : e.param.mutable_grad()) g *= factor;
  }
}

double ParamStore::adam_step(double lr, double clip_norm, const AdamConfig& adam) {
  for (const auto& e : entries_) {
    for (double g : e.param.grad()) {
      require(std::isfinite(g), ErrorKind::kTraining,
              "non-finite gradient in parameter '" + e.name + "'");
    }
  }
  const double norm = grad_norm();
  const double factor = (clip_norm > 0.0 && norm > clip_norm) ? clip_norm / norm : 1.0;

  ++step_;
  const double t = static_cast<double>(step_);
  const double correction1 = 1.0 - std::pow(adam.beta1, t);
  const double correction2 = 1.0 - std::pow(adam.beta2, t);
  for (auto& e : entries_) {
    auto values = e.param.mutable_data();
    auto grads = e.param.mutable_grad();
    for (std::size_t k = 0; k < values.size(); ++k) {
      const double g = grads[k] * factor;
      grads[k] = g;
      e.m[k] = adam.beta1 * e.m[k] + (1.0 - adam.beta1) * g;
      e.v[k] = adam.beta2 * e.v[k] + (1.0 - adam.beta2) * g * g;
      const double m_hat = e.m[k] / correction1;
      const double v_hat = e.v[k] / correction2;
      values[k] -= lr * m_hat / (std::sqrt(v_hat) + adam.eps);
    }
  }
  return norm;
}

void ParamStore::copy_from(const ParamStore& other) {
  require(other.entries_.size() == entries_.size(), ErrorKind::kVersion,
          "parameter stores differ in layout");
  for (std::size_t k = 0; k < entries_.size(); ++k) {
    auto& dst = entries_[k];
    const auto& src = other.entries_[k];
    require(dst.name == src.name && dst.param.rows() == src.param.rows() &&
                dst.param.cols() == src.param.cols(),
            ErrorKind::kVersion, "parameter '" + src.name + "' does not match '" + dst.name + "'");
    std::copy(src.param.data().begin(), src.param.data().end(), dst.param.mutable_data().begin());
    dst.m = src.m;
    dst.v = src.v;
  }
  step_ = other.step_;
}

}  // namespace folio::ad
