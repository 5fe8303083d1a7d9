#pragma once

#include <optional>
#include <string>
#include <vector>

#include "folio/ad/ops.hpp"
#include "folio/ad/param_store.hpp"
#include "folio/rng.hpp"

namespace folio::ad {

/// Additive value used for blocked attention logits.
inline constexpr double kMaskedLogit = -1e9;

/// uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) draws.
std::vector<double> uniform_init(std::size_t count, std::size_t fan_in, Rng& rng);

/// y = x W + b with W: in x out, b: 1 x out.
class Linear {
 public:
  Linear() = default;
  Linear(ParamStore& store, const std::string& name, std::size_t in, std::size_t out, Rng& rng,
         bool bias = true);

  Tensor forward(const Tensor& x) const;
  const Tensor& weight() const { return weight_; }
  const Tensor& bias() const { return bias_; }

 private:
  Tensor weight_;
  Tensor bias_;
};

/// Row-wise layer normalization with learned gain and shift.
class LayerNorm {
 public:
  LayerNorm() = default;
  LayerNorm(ParamStore& store, const std::string& name, std::size_t width);

  Tensor forward(const Tensor& x) const;

 private:
  Tensor gain_;
  Tensor shift_;
};

/// Batched LSTM cell: each row of x is an independent sequence element.
/// Gate columns are ordered [input | forget | candidate | output].
class LstmLayer {
 public:
  struct State {
    Tensor h;
    Tensor c;
  };

  LstmLayer() = default;
  LstmLayer(ParamStore& store, const std::string& name, std::size_t in, std::size_t hidden,
            Rng& rng);

  State cell(const Tensor& x, const State& prev) const;
  State zero_state(std::size_t rows) const;
  std::size_t hidden() const { return hidden_; }

 private:
  std::size_t hidden_ = 0;
  Tensor w_input_;
  Tensor w_hidden_;
  Tensor bias_;
};

/// Multi-head scaled dot-product self-attention with output projection.
class MultiHeadAttention {
 public:
  MultiHeadAttention() = default;
  MultiHeadAttention(ParamStore& store, const std::string& name, std::size_t width,
                     std::size_t heads, Rng& rng);

  /// `mask` is an optional M x M additive constant (0 or kMaskedLogit).
  /// When `weights` is given, per-head attention matrices are appended.
  Tensor forward(const Tensor& tokens, const Tensor* mask = nullptr,
                 std::vector<std::vector<double>>* weights = nullptr) const;

 private:
  std::size_t width_ = 0;
  std::size_t heads_ = 0;
  Tensor w_query_;
  Tensor w_key_;
  Tensor w_value_;
  Tensor w_out_;
};

/// Post-norm encoder block: T~ = LN(T + MHSA(T)); T' = LN(T~ + FFN(T~)) with
/// FFN(x) = tanh(x W1 + b1) W2 + b2 and hidden width 4d.
class EncoderLayer {
 public:
  EncoderLayer() = default;
  EncoderLayer(ParamStore& store, const std::string& name, std::size_t width, std::size_t heads,
               Rng& rng);

  Tensor forward(const Tensor& tokens, const Tensor* mask = nullptr,
                 std::vector<std::vector<double>>* weights = nullptr) const;

 private:
  MultiHeadAttention attention_;
  LayerNorm norm1_;
  Linear ffn_in_;
  Linear ffn_out_;
  LayerNorm norm2_;
};

/// Standard sinusoidal position table, rows = positions, cols = width.
std::vector<double> sinusoidal_positions(std::size_t positions, std::size_t width);

}  // namespace folio::ad
