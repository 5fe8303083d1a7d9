#include "folio/ad/nn.hpp"

#include <cmath>

#include "folio/error.hpp"

namespace folio::ad {

std::vector<double> uniform_init(std::size_t count, std::size_t fan_in, Rng& rng) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(std::max<std::size_t>(fan_in, 1)));
  std::vector<double> out(count);
  for (double& v : out) v = bound * (2.0 * uniform01(rng) - 1.0);
  return out;
}

Linear::Linear(ParamStore& store, const std::string& name, std::size_t in, std::size_t out,
               Rng& rng, bool bias) {
  weight_ = store.add(name + ".weight", in, out, uniform_init(in * out, in, rng));
  if (bias) bias_ = store.add(name + ".bias", 1, out, std::vector<double>(out, 0.0));
}

Tensor Linear::forward(const Tensor& x) const {
  Tensor y = matmul(x, weight_);
  return bias_.defined() ? add(y, bias_) : y;
}

LayerNorm::LayerNorm(ParamStore& store, const std::string& name, std::size_t width) {
  gain_ = store.add(name + ".gain", 1, width, std::vector<double>(width, 1.0));
  shift_ = store.add(name + ".shift", 1, width, std::vector<double>(width, 0.0));
}

Tensor LayerNorm::forward(const Tensor& x) const {
  return add(mul(layer_norm_rows(x), gain_), shift_);
}

LstmLayer::LstmLayer(ParamStore& store, const std::string& name, std::size_t in,
                     std::size_t hidden, Rng& rng)
    : hidden_(hidden) {
  const std::size_t fan_in = in + hidden;
  w_input_ = store.add(name + ".w_input", in, 4 * hidden, uniform_init(in * 4 * hidden, fan_in, rng));
  w_hidden_ = store.add(name + ".w_hidden", hidden, 4 * hidden,
                        uniform_init(hidden * 4 * hidden, fan_in, rng));
  std::vector<double> bias(4 * hidden, 0.0);
  for (std::size_t k = hidden; k < 2 * hidden; ++k) bias[k] = 1.0;
  bias_ = store.add(name + ".bias", 1, 4 * hidden, std::move(bias));
}

LstmLayer::State LstmLayer::cell(const Tensor& x, const State& prev) const {
  require(x.cols() == w_input_.rows() && prev.h.cols() == hidden_ && prev.c.cols() == hidden_ &&
              prev.h.rows() == x.rows(),
          ErrorKind::kShape, "lstm_cell: input or state shape does not match the layer");
  const Tensor gates = add(add(matmul(x, w_input_), matmul(prev.h, w_hidden_)), bias_);
  const Tensor in_gate = sigmoid(slice_cols(gates, 0, hidden_));
  const Tensor forget_gate = sigmoid(slice_cols(gates, hidden_, hidden_));
  const Tensor candidate = tanh(slice_cols(gates, 2 * hidden_, hidden_));
  const Tensor out_gate = sigmoid(slice_cols(gates, 3 * hidden_, hidden_));
  Tensor c = add(mul(forget_gate, prev.c), mul(in_gate, candidate));
  Tensor h = mul(out_gate, tanh(c));
  return {std::move(h), std::move(c)};
}

LstmLayer::State LstmLayer::zero_state(std::size_t rows) const {
  return {Tensor::zeros(rows, hidden_), Tensor::zeros(rows, hidden_)};
}

MultiHeadAttention::MultiHeadAttention(ParamStore& store, const std::string& name,
                                       std::size_t width, std::size_t heads, Rng& rng)
    : width_(width), heads_(heads) {
  require(heads > 0 && width % heads == 0, ErrorKind::kConfig,
          "mhsa: width " + std::to_string(width) + " is not divisible by " +
              std::to_string(heads) + " heads");
  w_query_ = store.add(name + ".w_query", width, width, uniform_init(width * width, width, rng));
  w_key_ = store.add(name + ".w_key", width, width, uniform_init(width * width, width, rng));
  w_value_ = store.add(name + ".w_value", width, width, uniform_init(width * width, width, rng));
  w_out_ = store.add(name + ".w_out", width, width, uniform_init(width * width, width, rng));
}

Tensor MultiHeadAttention::forward(const Tensor& tokens, const Tensor* mask,
                                   std::vector<std::vector<double>>* weights) const {
  require(tokens.cols() == width_, ErrorKind::kShape, "mhsa: token width mismatch");
  if (mask) {
    require(mask->rows() == tokens.rows() && mask->cols() == tokens.rows(), ErrorKind::kShape,
            "mhsa: mask must be M x M");
  }
  const std::size_t head_width = width_ / heads_;
  const double inv_sqrt = 1.0 / std::sqrt(static_cast<double>(head_width));
  const Tensor q = matmul(tokens, w_query_);
  const Tensor k = matmul(tokens, w_key_);
  const Tensor v = matmul(tokens, w_value_);

  std::vector<Tensor> heads;
  heads.reserve(heads_);
  for (std::size_t h = 0; h < heads_; ++h) {
    const Tensor qh = slice_cols(q, h * head_width, head_width);
    const Tensor kh = slice_cols(k, h * head_width, head_width);
    const Tensor vh = slice_cols(v, h * head_width, head_width);
    Tensor scores = scale(matmul(qh, transpose(kh)), inv_sqrt);
    if (mask) scores = add(scores, *mask);
    const Tensor attn = softmax_rows(scores);
    if (weights) weights->emplace_back(attn.data().begin(), attn.data().end());
    heads.push_back(matmul(attn, vh));
  }
  const Tensor merged = heads_ == 1 ? heads.front() : concat_cols(heads);
  return matmul(merged, w_out_);
}

EncoderLayer::EncoderLayer(ParamStore& store, const std::string& name, std::size_t width,
                           std::size_t heads, Rng& rng)
    : attention_(store, name + ".attn", width, heads, rng),
      norm1_(store, name + ".norm1", width),
      ffn_in_(store, name + ".ffn_in", width, 4 * width, rng),
      ffn_out_(store, name + ".ffn_out", 4 * width, width, rng),
      norm2_(store, name + ".norm2", width) {}

Tensor EncoderLayer::forward(const Tensor& tokens, const Tensor* mask,
                             std::vector<std::vector<double>>* weights) const {
  const Tensor mixed = norm1_.forward(add(tokens, attention_.forward(tokens, mask, weights)));
  const Tensor ffn = ffn_out_.forward(tanh(ffn_in_.forward(mixed)));
  return norm2_.forward(add(mixed, ffn));
}

std::vector<double> sinusoidal_positions(std::size_t positions, std::size_t width) {
  std::vector<double> table(positions * width);
  for (std::size_t pos = 0; pos < positions; ++pos) {
    for (std::size_t j = 0; j < width; ++j) {
      const double rate = std::pow(10000.0, -static_cast<double>(2 * (j / 2)) / static_cast<double>(width));
      const double angle = static_cast<double>(pos) * rate;
      table[pos * width + j] = (j % 2 == 0) ? std::sin(angle) : std::cos(angle);
    }
  }
  return table;
}

}  // namespace folio::ad
