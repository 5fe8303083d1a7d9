#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "folio/ad/tensor.hpp"

namespace folio::ad {

struct AdamConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// Named parameters plus Adam moment buffers. Insertion order is the
/// canonical order for checkpoints and gradient-norm accumulation.
class ParamStore {
 public:
  struct Entry {
    std::string name;
    Tensor param;
    std::vector<double> m;
    std::vector<double> v;
  };

  ParamStore() = default;
  ParamStore(const ParamStore&) = delete;
  ParamStore& operator=(const ParamStore&) = delete;
  ParamStore(ParamStore&&) = default;
  ParamStore& operator=(ParamStore&&) = default;

  Tensor add(const std::string& name, std::size_t rows, std::size_t cols,
             std::vector<double> init);
  const Tensor& get(const std::string& name) const;
  bool contains(const std::string& name) const;

  const std::vector<Entry>& entries() const { return entries_; }
  std::vector<Entry>& entries() { return entries_; }
  std::size_t num_scalars() const;
  std::uint64_t step() const { return step_; }
  void set_step(std::uint64_t step) { step_ = step; }

  void zero_grad();
  double grad_norm() const;
  /// Multiplies every gradient by `factor`.
  void scale_grads(double factor);

  /// Global-norm clip to `clip_norm` (disabled when <= 0), then one Adam step
  /// with bias correction. Returns the pre-clip gradient norm.
  double adam_step(double lr, double clip_norm, const AdamConfig& adam = {});

  /// Copies values and optimizer state from a store with identical layout.
  void copy_from(const ParamStore& other);

 private:
  std::vector<Entry> entries_;
  std::uint64_t step_ = 0;
};

}  // namespace folio::ad
