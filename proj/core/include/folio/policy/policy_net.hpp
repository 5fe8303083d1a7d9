#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "folio/ad/nn.hpp"
#include "folio/ad/param_store.hpp"
#include "folio/data/panel.hpp"
#include "folio/env/portfolio_env.hpp"
#include "folio/rng.hpp"

namespace folio::policy {

enum class TemporalEncoder { kLstm, kTransformer };
enum class Pool { kLast, kMean };

struct PolicyConfig {
  std::size_t width = 64;
  TemporalEncoder encoder = TemporalEncoder::kLstm;
  std::size_t time_layers = 1;
  /// 0 disables the cross-sectional mixer (temporal-only ablation).
  std::size_t cross_layers = 1;
  std::size_t heads = 4;
  Pool pool = Pool::kLast;
  double epsilon_alpha = 1e-3;
  /// Dimension of optional market covariates injected into the global summary.
  std::size_t market_dim = 0;
  /// Assets per temporal-encoder batch; results do not depend on it.
  std::size_t asset_chunk = 64;

  void validate() const;
};

std::string to_json(const PolicyConfig& config);
PolicyConfig policy_config_from_json(const std::string& json);
std::string to_string(TemporalEncoder encoder);
std::string to_string(Pool pool);
TemporalEncoder parse_temporal_encoder(const std::string& text);
Pool parse_pool(const std::string& text);

struct CrossSection {
  ad::Tensor global;  // 1 x d
  ad::Tensor assets;  // N x d
};

struct PolicyOutput {
  ad::Tensor alpha;  // 1 x (N + 1), cash first
  ad::Tensor value;  // 1 x 1
  /// Cross-sectional attention matrices (per layer and head), when requested.
  std::vector<std::vector<double>> attention;
};

enum class ActMode { kSample, kMean };

struct ActResult {
  std::vector<double> weights;
  double log_prob = 0.0;
  double value = 0.0;
  std::vector<double> pre_mask_point;
  std::vector<double> alpha;
};

struct ActOptions {
  bool include_cash = true;
  /// Per-name caps (0 for masked names) applied after masking.
  std::optional<std::vector<double>> caps;
};

/// Shared-weight temporal encoder, cross-sectional attention mixer with a
/// learned global token, flat Dirichlet actor head and value head.
class PolicyNet {
 public:
  PolicyNet(PolicyConfig config, std::size_t num_features, std::uint64_t init_seed);

  PolicyNet(PolicyNet&&) = default;
  PolicyNet& operator=(PolicyNet&&) = default;

  /// W x N x F window -> N x d embeddings.
  ad::Tensor encode_temporal(const data::WindowView& window) const;

  /// Mixes [g0; H] with masked asset tokens excluded from attention in both
  /// directions. `market` must have market_dim entries (ignored when 0).
  CrossSection mix_cross_section(const ad::Tensor& embeddings, std::span<const std::uint8_t> mask,
                                 std::span<const double> market = {},
                                 std::vector<std::vector<double>>* attention = nullptr) const;

  /// alpha = softplus([a_cash . g + b_cash, a_asset . A_i + b_asset]) + eps.
  ad::Tensor actor_head(const CrossSection& mixed) const;
  ad::Tensor value_head(const ad::Tensor& global) const;

  PolicyOutput forward(const data::WindowView& window, std::span<const std::uint8_t> mask,
                       std::span<const double> market = {}, bool keep_attention = false) const;

  /// Full pipeline from an environment state to feasible weights. The log
  /// probability is evaluated at the pre-mask Dirichlet point. Mean mode does
  /// not touch `rng`.
  ActResult act(const env::EnvState& state, ActMode mode, Rng* rng,
                const ActOptions& options = {}) const;

  const PolicyConfig& config() const { return config_; }
  std::size_t num_features() const { return num_features_; }
  ad::ParamStore& params() { return params_; }
  const ad::ParamStore& params() const { return params_; }

  /// Checkpoint metadata records the config, feature count and `extra_json`.
  void save(const std::filesystem::path& path, const std::string& extra_json = "{}") const;
  static PolicyNet load(const std::filesystem::path& path, std::string* extra_json = nullptr);

 private:
  ad::Tensor encode_lstm(const data::WindowView& window, std::size_t first, std::size_t count) const;
  ad::Tensor encode_transformer(const data::WindowView& window, std::size_t asset) const;

  PolicyConfig config_;
  std::size_t num_features_ = 0;
  ad::ParamStore params_;

  ad::Tensor input_projection_;  // F x d
  std::vector<ad::LstmLayer> lstm_;
  ad::Linear lstm_out_;
  std::vector<ad::EncoderLayer> time_layers_;
  ad::Tensor global_token_;  // 1 x d
  std::vector<ad::EncoderLayer> cross_layers_;
  ad::Tensor market_projection_;  // K x d
  ad::Linear cash_head_;
  ad::Linear asset_head_;
  ad::Linear value_head_;
};

}  // namespace folio::policy
