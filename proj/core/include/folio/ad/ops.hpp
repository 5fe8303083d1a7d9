#pragma once

#include <vector>

#include "folio/ad/tensor.hpp"

namespace folio::ad {

// Binary elementwise ops accept b with the same shape as a, a 1 x cols row
// broadcast over a's rows, or a 1 x 1 scalar.
Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor minimum(const Tensor& a, const Tensor& b);

Tensor matmul(const Tensor& a, const Tensor& b);
Tensor transpose(const Tensor& a);

Tensor scale(const Tensor& a, double s);
Tensor add_scalar(const Tensor& a, double s);
Tensor neg(const Tensor& a);
Tensor exp(const Tensor& a);
Tensor log(const Tensor& a);
Tensor tanh(const Tensor& a);
Tensor sigmoid(const Tensor& a);
Tensor softplus(const Tensor& a);
Tensor square(const Tensor& a);
/// Gradient is zero where the value was clipped.
Tensor clamp(const Tensor& a, double lo, double hi);

/// Row-wise softmax (over columns).
Tensor softmax_rows(const Tensor& a);
/// Row-wise (x - mean) / sqrt(var + eps), population variance, no affine.
Tensor layer_norm_rows(const Tensor& a, double eps = 1e-5);

Tensor concat_cols(const std::vector<Tensor>& parts);
Tensor concat_rows(const std::vector<Tensor>& parts);
Tensor slice_cols(const Tensor& a, std::size_t begin, std::size_t count);
Tensor slice_rows(const Tensor& a, std::size_t begin, std::size_t count);

Tensor sum(const Tensor& a);
Tensor mean(const Tensor& a);
/// Column means over rows: R x C -> 1 x C.
Tensor mean_rows(const Tensor& a);

inline Tensor operator+(const Tensor& a, const Tensor& b) { return add(a, b); }
inline Tensor operator-(const Tensor& a, const Tensor& b) { return sub(a, b); }
inline Tensor operator*(const Tensor& a, const Tensor& b) { return mul(a, b); }
inline Tensor operator*(const Tensor& a, double s) { return scale(a, s); }
inline Tensor operator*(double s, const Tensor& a) { return scale(a, s); }

}  // namespace folio::ad
