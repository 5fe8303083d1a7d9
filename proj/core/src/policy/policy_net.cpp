#include "folio/policy/policy_net.hpp"

#include <cmath>

#include "folio/ad/checkpoint.hpp"
#include "folio/ad/ops.hpp"
#include "folio/error.hpp"
#include "folio/simplex/dirichlet.hpp"
#include "folio/simplex/projection.hpp"
#include "json.hpp"

namespace folio::policy {

using ad::Tensor;

void PolicyConfig::validate() const {
  require(width > 0, ErrorKind::kConfig, "policy: width must be positive");
  require(heads > 0 && width % heads == 0, ErrorKind::kConfig,
          "policy: width " + std::to_string(width) + " is not divisible by " +
              std::to_string(heads) + " heads");
  require(time_layers >= 1, ErrorKind::kConfig, "policy: need at least one temporal layer");
  require(epsilon_alpha > 0.0, ErrorKind::kConfig, "policy: epsilon_alpha must be positive");
  require(asset_chunk >= 1, ErrorKind::kConfig, "policy: asset_chunk must be positive");
}

std::string to_string(TemporalEncoder encoder) {
  return encoder == TemporalEncoder::kLstm ? "lstm" : "transformer";
}

std::string to_string(Pool pool) { return pool == Pool::kLast ? "last" : "mean"; }

TemporalEncoder parse_temporal_encoder(const std::string& text) {
  if (text == "lstm") return TemporalEncoder::kLstm;
  if (text == "transformer") return TemporalEncoder::kTransformer;
  fail(ErrorKind::kConfig, "unknown temporal encoder '" + text + "'");
}

Pool parse_pool(const std::string& text) {
  if (text == "last") return Pool::kLast;
  if (text == "mean") return Pool::kMean;
  fail(ErrorKind::kConfig, "unknown pooling '" + text + "'");
}

std::string to_json(const PolicyConfig& c) {
  nlohmann::json j{{"width", c.width},
                   {"encoder", to_string(c.encoder)},
                   {"time_layers", c.time_layers},
                   {"cross_layers", c.cross_layers},
                   {"heads", c.heads},
                   {"pool", to_string(c.pool)},
                   {"epsilon_alpha", c.epsilon_alpha},
                   {"market_dim", c.market_dim},
                   {"asset_chunk", c.asset_chunk}};
  return j.dump();
}

PolicyConfig policy_config_from_json(const std::string& json) {
  const auto j = nlohmann::json::parse(json);
  PolicyConfig c;
  c.width = j.at("width").get<std::size_t>();
  c.encoder = parse_temporal_encoder(j.at("encoder").get<std::string>());
  c.time_layers = j.at("time_layers").get<std::size_t>();
  c.cross_layers = j.at("cross_layers").get<std::size_t>();
  c.heads = j.at("heads").get<std::size_t>();
  c.pool = parse_pool(j.at("pool").get<std::string>());
  c.epsilon_alpha = j.at("epsilon_alpha").get<double>();
  c.market_dim = j.at("market_dim").get<std::size_t>();
  c.asset_chunk = j.value("asset_chunk", std::size_t{64});
  return c;
}

PolicyNet::PolicyNet(PolicyConfig config, std::size_t num_features, std::uint64_t init_seed)
    : config_(std::move(config)), num_features_(num_features) {
  config_.validate();
  require(num_features > 0, ErrorKind::kConfig, "policy: need at least one feature");
  Rng rng = make_stream(init_seed, "init");
  const std::size_t d = config_.width;

  input_projection_ = params_.add("temporal.input_projection", num_features, d,
                                  ad::uniform_init(num_features * d, num_features, rng));
  if (config_.encoder == TemporalEncoder::kLstm) {
    for (std::size_t l = 0; l < config_.time_layers; ++l) {
      lstm_.emplace_back(params_, "temporal.lstm" + std::to_string(l), d, d, rng);
    }
    lstm_out_ = ad::Linear(params_, "temporal.output", d, d, rng);
  } else {
    for (std::size_t l = 0; l < config_.time_layers; ++l) {
      time_layers_.emplace_back(params_, "temporal.encoder" + std::to_string(l), d, config_.heads,
                                rng);
    }
  }

  global_token_ = params_.add("cross.global_token", 1, d, ad::uniform_init(d, d, rng));
  for (std::size_t l = 0; l < config_.cross_layers; ++l) {
    cross_layers_.emplace_back(params_, "cross.encoder" + std::to_string(l), d, config_.heads, rng);
  }
  if (config_.market_dim > 0) {
    market_projection_ =
        params_.add("cross.market_projection", config_.market_dim, d,
                    ad::uniform_init(config_.market_dim * d, config_.market_dim, rng));
  }
  cash_head_ = ad::Linear(params_, "actor.cash", d, 1, rng);
  asset_head_ = ad::Linear(params_, "actor.asset", d, 1, rng);
  value_head_ = ad::Linear(params_, "critic.value", d, 1, rng);
}

Tensor PolicyNet::encode_lstm(const data::WindowView& window, std::size_t first,
                              std::size_t count) const {
  const std::size_t F = window.features;
  const std::size_t N = window.assets;
  std::vector<Tensor> inputs;
  inputs.reserve(window.window);
  for (std::size_t tau = 0; tau < window.window; ++tau) {
    const auto begin = window.values.begin() + static_cast<std::ptrdiff_t>((tau * N + first) * F);
    Tensor x = Tensor::constant(count, F, std::vector<double>(begin, begin + static_cast<std::ptrdiff_t>(count * F)));
    inputs.push_back(ad::matmul(x, input_projection_));
  }
  std::vector<Tensor> sequence = std::move(inputs);
  for (const auto& layer : lstm_) {
    auto state = layer.zero_state(count);
    std::vector<Tensor> outputs;
    outputs.reserve(sequence.size());
    for (const auto& x : sequence) {
      state = layer.cell(x, state);
      outputs.push_back(state.h);
    }
    sequence = std::move(outputs);
  }
  Tensor pooled = sequence.back();
  if (config_.pool == Pool::kMean) {
    pooled = sequence.front();
    for (std::size_t k = 1; k < sequence.size(); ++k) pooled = ad::add(pooled, sequence[k]);
    pooled = ad::scale(pooled, 1.0 / static_cast<double>(sequence.size()));
  }
  return lstm_out_.forward(pooled);
}

Tensor PolicyNet::encode_transformer(const data::WindowView& window, std::size_t asset) const {
  const std::size_t F = window.features;
  const std::size_t W = window.window;
  std::vector<double> rows(W * F);
  for (std::size_t tau = 0; tau < W; ++tau) {
    for (std::size_t f = 0; f < F; ++f) rows[tau * F + f] = window.at(tau, asset, f);
  }
  const Tensor positions =
      Tensor::constant(W, config_.width, ad::sinusoidal_positions(W, config_.width));
  Tensor tokens = ad::add(ad::matmul(Tensor::constant(W, F, std::move(rows)), input_projection_),
                          positions);
  for (const auto& layer : time_layers_) tokens = layer.forward(tokens);
  if (config_.pool == Pool::kMean) return ad::mean_rows(tokens);
  return ad::slice_rows(tokens, W - 1, 1);
}

Tensor PolicyNet::encode_temporal(const data::WindowView& window) const {
  require(window.features == num_features_, ErrorKind::kShape,
          "policy: window has " + std::to_string(window.features) + " features, model expects " +
              std::to_string(num_features_));
  require(window.assets > 0, ErrorKind::kShape, "policy: window has no assets");
  std::vector<Tensor> parts;
  if (config_.encoder == TemporalEncoder::kLstm) {
    for (std::size_t first = 0; first < window.assets; first += config_.asset_chunk) {
      const std::size_t count = std::min(config_.asset_chunk, window.assets - first);
      parts.push_back(encode_lstm(window, first, count));
    }
  } else {
    for (std::size_t i = 0; i < window.assets; ++i) parts.push_back(encode_transformer(window, i));
  }
  return parts.size() == 1 ? parts.front() : ad::concat_rows(parts);
}

CrossSection PolicyNet::mix_cross_section(const Tensor& embeddings,
                                          std::span<const std::uint8_t> mask,
                                          std::span<const double> market,
                                          std::vector<std::vector<double>>* attention) const {
  const std::size_t N = embeddings.rows();
  require(mask.size() == N, ErrorKind::kShape, "policy: mask length does not match embeddings");
  bool any = false;
  for (auto m : mask) any = any || m != 0;
  require(any, ErrorKind::kDegenerateMask, "policy: every asset is masked");

  CrossSection out;
  if (config_.cross_layers == 0) {
    out.global = global_token_;
    out.assets = embeddings;
  } else {
    const std::size_t M = N + 1;
    std::vector<double> additive(M * M, 0.0);
    for (std::size_t q = 0; q < M; ++q) {
      const bool q_masked = q > 0 && !mask[q - 1];
      for (std::size_t k = 0; k < M; ++k) {
        const bool k_masked = k > 0 && !mask[k - 1];
        // Masked tokens are invisible to everyone and only see themselves.
        if (k_masked ? k != q : q_masked) additive[q * M + k] = ad::kMaskedLogit;
      }
    }
    const Tensor mask_tensor = Tensor::constant(M, M, std::move(additive));
    Tensor tokens = ad::concat_rows({global_token_, embeddings});
    for (const auto& layer : cross_layers_) tokens = layer.forward(tokens, &mask_tensor, attention);
    out.global = ad::slice_rows(tokens, 0, 1);
    out.assets = ad::slice_rows(tokens, 1, N);
  }
  if (config_.market_dim > 0) {
    require(market.size() == config_.market_dim, ErrorKind::kShape,
            "policy: expected " + std::to_string(config_.market_dim) + " market covariates");
    const Tensor z =
        Tensor::constant(1, config_.market_dim, std::vector<double>(market.begin(), market.end()));
    out.global = ad::add(out.global, ad::matmul(z, market_projection_));
  }
  return out;
}

Tensor PolicyNet::actor_head(const CrossSection& mixed) const {
  const Tensor cash = cash_head_.forward(mixed.global);                      // 1 x 1
  const Tensor assets = ad::transpose(asset_head_.forward(mixed.assets));    // 1 x N
  const Tensor logits = ad::concat_cols({cash, assets});
  return ad::add_scalar(ad::softplus(logits), config_.epsilon_alpha);
}

Tensor PolicyNet::value_head(const Tensor& global) const { return value_head_.forward(global); }

PolicyOutput PolicyNet::forward(const data::WindowView& window, std::span<const std::uint8_t> mask,
                                std::span<const double> market, bool keep_attention) const {
  PolicyOutput out;
  const Tensor embeddings = encode_temporal(window);
  const CrossSection mixed =
      mix_cross_section(embeddings, mask, market, keep_attention ? &out.attention : nullptr);
  out.alpha = actor_head(mixed);
  out.value = value_head(mixed.global);
  return out;
}

ActResult PolicyNet::act(const env::EnvState& state, ActMode mode, Rng* rng,
                         const ActOptions& options) const {
  ad::NoGradGuard no_grad;
  const PolicyOutput out = forward(state.window, state.mask, state.market);
  ActResult result;
  result.alpha.assign(out.alpha.data().begin(), out.alpha.data().end());
  result.value = out.value.item();
  const simplex::DirichletParams params(result.alpha);
  if (mode == ActMode::kSample) {
    require(rng != nullptr, ErrorKind::kContract, "act: sampling needs a generator");
    result.pre_mask_point = simplex::dirichlet_sample(params, *rng);
  } else {
    result.pre_mask_point = simplex::dirichlet_mean(params);
  }
  result.log_prob = simplex::dirichlet_log_pdf(params, result.pre_mask_point);
  result.weights = simplex::mask_and_renormalize_assets(result.pre_mask_point, state.mask,
                                                        options.include_cash);
  if (options.caps) {
    result.weights =
        simplex::project_capped_simplex(result.weights, *options.caps, options.include_cash);
  }
  return result;
}

void PolicyNet::save(const std::filesystem::path& path, const std::string& extra_json) const {
  nlohmann::json meta{{"kind", "folio-policy"},
                      {"policy", nlohmann::json::parse(to_json(config_))},
                      {"num_features", num_features_},
                      {"extra", nlohmann::json::parse(extra_json.empty() ? "{}" : extra_json)}};
  ad::save_checkpoint(path, params_, meta.dump());
}

PolicyNet PolicyNet::load(const std::filesystem::path& path, std::string* extra_json) {
  const ad::Checkpoint ckpt = ad::read_checkpoint(path);
  nlohmann::json meta;
  try {
    meta = nlohmann::json::parse(ckpt.metadata);
  } catch (const nlohmann::json::exception&) {
    fail(ErrorKind::kVersion, path.string() + " carries unreadable metadata");
  }
  require(meta.value("kind", "") == "folio-policy", ErrorKind::kVersion,
          path.string() + " is not a policy checkpoint");
  PolicyNet net(policy_config_from_json(meta.at("policy").dump()),
                meta.at("num_features").get<std::size_t>(), 0);
  ad::restore(net.params_, ckpt);
  if (extra_json) *extra_json = meta.contains("extra") ? meta.at("extra").dump() : "{}";
  return net;
}

}  // namespace folio::policy
