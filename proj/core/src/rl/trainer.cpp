#include "folio/rl/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>

#include "folio/ad/dirichlet_ops.hpp"
#include "folio/ad/ops.hpp"
#include "folio/error.hpp"
#include "folio/rl/gae.hpp"

namespace folio::rl {

std::string to_string(Algo algo) {
  switch (algo) {
    case Algo::kPpo: return "ppo";
    case Algo::kA2c: return "a2c";
    case Algo::kReinforce: return "reinforce";
  }
  return "?";
}

Algo parse_algo(const std::string& text) {
  if (text == "ppo") return Algo::kPpo;
  if (text == "a2c") return Algo::kA2c;
  if (text == "reinforce") return Algo::kReinforce;
  fail(ErrorKind::kConfig, "unknown algorithm '" + text + "' (ppo|a2c|reinforce)");
}

void TrainConfig::validate() const {
  require(gamma > 0.0 && gamma <= 1.0, ErrorKind::kConfig, "gamma must lie in (0, 1]");
  require(gae_lambda >= 0.0 && gae_lambda <= 1.0, ErrorKind::kConfig,
          "gae_lambda must lie in [0, 1]");
  require(clip_eps > 0.0, ErrorKind::kConfig, "clip_eps must be positive");
  require(lr > 0.0 && std::isfinite(lr), ErrorKind::kConfig, "lr must be positive");
  require(kl_coef >= 0.0 && value_coef >= 0.0 && entropy_coef >= 0.0, ErrorKind::kConfig,
          "loss coefficients must be nonnegative");
  require(rollout_days > 0 && updates_per_epoch > 0 && epochs_per_update > 0, ErrorKind::kConfig,
          "rollout_days, updates_per_epoch and epochs_per_update must be positive");
  require(microbatch > 0 && minibatch > 0, ErrorKind::kConfig, "batch sizes must be positive");
  require(minibatch % microbatch == 0, ErrorKind::kConfig,
          "minibatch (" + std::to_string(minibatch) + ") is not divisible by microbatch (" +
              std::to_string(microbatch) + ")");
}

std::size_t TrainConfig::effective_minibatch(std::size_t samples) const {
  return std::max<std::size_t>(1, std::min(minibatch, samples));
}

void prepare_targets(Trajectory& batch, const TrainConfig& config) {
  const std::size_t n = batch.size();
  std::vector<double> rewards(n), values(n);
  std::vector<std::uint8_t> dones(n);
  for (std::size_t k = 0; k < n; ++k) {
    rewards[k] = batch.steps[k].reward;
    values[k] = batch.steps[k].value;
    dones[k] = batch.steps[k].done ? 1 : 0;
  }
  if (config.algo == Algo::kReinforce) {
    batch.returns.assign(n, 0.0);
    double acc = 0.0;
    for (std::size_t k = n; k-- > 0;) {
      acc = rewards[k] + (dones[k] ? 0.0 : config.gamma * acc);
      batch.returns[k] = acc;
    }
    batch.advantages.resize(n);
    for (std::size_t k = 0; k < n; ++k) batch.advantages[k] = batch.returns[k] - values[k];
    return;
  }
  AdvantageTargets t = compute_gae(rewards, values, batch.bootstrap_value, config.gamma,
                                   config.gae_lambda, dones);
  batch.advantages = std::move(t.advantages);
  batch.returns = std::move(t.returns);
}

namespace {

// Adds weight * loss_s for every sample to the parameter gradients.
UpdateStats accumulate(policy::PolicyNet& policy, const Trajectory& batch,
                       const TrainConfig& config, std::span<const std::size_t> indices,
                       std::span<const double> advantages, double weight) {
  require(indices.size() == advantages.size(), ErrorKind::kShape,
          "update: indices and advantages differ in length");
  UpdateStats st;
  if (indices.empty()) return st;
  std::vector<ad::Tensor> losses;
  losses.reserve(indices.size());
  for (std::size_t j = 0; j < indices.size(); ++j) {
    const std::size_t k = indices[j];
    const TrajectoryStep& step = batch.steps.at(k);
    const policy::PolicyOutput out = policy.forward(batch.observation(k), batch.mask(k));
    const ad::Tensor logp = ad::dirichlet_log_prob(out.alpha, step.pre_mask_action);
    const double adv = advantages[j];
    ad::Tensor pg;
    if (config.algo == Algo::kPpo) {
      const ad::Tensor ratio = ad::exp(ad::add_scalar(logp, -step.old_log_prob));
      const double rho = ratio.item();
      if (!std::isfinite(rho)) {
        st.skipped = 1;
        return st;
      }
      st.mean_ratio += rho;
      if (std::abs(rho - 1.0) > config.clip_eps) st.clip_fraction += 1.0;
      const ad::Tensor clipped = ad::clamp(ratio, 1.0 - config.clip_eps, 1.0 + config.clip_eps);
      pg = ad::neg(ad::minimum(ad::scale(ratio, adv), ad::scale(clipped, adv)));
    } else {
      pg = ad::scale(logp, -adv);
    }
    ad::Tensor loss = pg;
    st.policy_loss += pg.item();
    if (config.algo == Algo::kPpo && config.kl_coef > 0.0) {
      const ad::Tensor kl = ad::dirichlet_kl(out.alpha, step.old_alpha);
      st.kl += kl.item();
      loss = loss + ad::scale(kl, config.kl_coef);
    } else if (config.algo == Algo::kPpo) {
      ad::NoGradGuard no_grad;
      st.kl += ad::dirichlet_kl(out.alpha, step.old_alpha).item();
    }
    const ad::Tensor err = ad::add_scalar(out.value, -batch.returns.at(k));
    const ad::Tensor vloss = ad::scale(ad::square(err), 0.5);
    st.value_loss += vloss.item();
    loss = loss + ad::scale(vloss, config.value_coef);
    if (config.entropy_coef > 0.0) {
      const ad::Tensor ent = ad::dirichlet_entropy(out.alpha);
      st.entropy += ent.item();
      loss = loss - ad::scale(ent, config.entropy_coef);
    } else {
      ad::NoGradGuard no_grad;
      st.entropy += ad::dirichlet_entropy(out.alpha).item();
    }
    losses.push_back(loss);
  }
  ad::Tensor total = losses.size() == 1 ? losses.front() : ad::sum(ad::concat_rows(losses));
  ad::backward(ad::scale(total, weight));
  const double n = static_cast<double>(indices.size());
  st.policy_loss /= n;
  st.value_loss /= n;
  st.kl /= n;
  st.entropy /= n;
  st.mean_ratio /= n;
  st.clip_fraction /= n;
  return st;
}

UpdateStats optimize(policy::PolicyNet& policy, const Trajectory& batch,
                       const TrainConfig& config) {
  config.validate();
  const std::size_t n = batch.size();
  require(n > 0 && batch.advantages.size() == n && batch.returns.size() == n, ErrorKind::kTraining,
          "update: batch targets are missing; call prepare_targets first");
  for (double a : batch.advantages) {
    require(std::isfinite(a), ErrorKind::kTraining, "update: non-finite advantage");
  }
  const std::size_t mb = config.effective_minibatch(n);
  auto& params = policy.params();
  UpdateStats total;
  double samples = 0.0;
  for (std::size_t epoch = 0; epoch < config.epochs_per_update; ++epoch) {
    for (std::size_t begin = 0; begin < n; begin += mb) {
      const std::size_t end = std::min(n, begin + mb);
      std::vector<std::size_t> idx(end - begin);
      std::vector<double> adv(end - begin);
      for (std::size_t j = 0; j < idx.size(); ++j) {
        idx[j] = begin + j;
        adv[j] = batch.advantages[begin + j];
      }
      if (config.normalize_advantages) normalize_in_place(adv);
      params.zero_grad();
      const double weight = 1.0 / static_cast<double>(idx.size());
      UpdateStats mb_stats;
      bool skipped = false;
      for (std::size_t m = 0; m < idx.size(); m += config.microbatch) {
        const std::size_t len = std::min(config.microbatch, idx.size() - m);
        const UpdateStats s = accumulate(policy, batch, config, {idx.data() + m, len},
                                         {adv.data() + m, len}, weight);
        if (s.skipped) {
          skipped = true;
          break;
        }
        const double w = static_cast<double>(len);
        mb_stats.policy_loss += s.policy_loss * w;
        mb_stats.value_loss += s.value_loss * w;
        mb_stats.kl += s.kl * w;
        mb_stats.entropy += s.entropy * w;
        mb_stats.mean_ratio += s.mean_ratio * w;
        mb_stats.clip_fraction += s.clip_fraction * w;
      }
      if (skipped) {
        params.zero_grad();
        ++total.skipped;
        continue;
      }
      total.grad_norm += params.adam_step(config.lr, config.clip_norm);
      ++total.optimizer_steps;
      total.policy_loss += mb_stats.policy_loss;
      total.value_loss += mb_stats.value_loss;
      total.kl += mb_stats.kl;
      total.entropy += mb_stats.entropy;
      total.mean_ratio += mb_stats.mean_ratio;
      total.clip_fraction += mb_stats.clip_fraction;
      samples += static_cast<double>(idx.size());
    }
  }
  params.zero_grad();
  if (samples > 0.0) {
    total.policy_loss /= samples;
    total.value_loss /= samples;
    total.kl /= samples;
    total.entropy /= samples;
    total.mean_ratio /= samples;
    total.clip_fraction /= samples;
  }
  if (total.optimizer_steps > 0) total.grad_norm /= static_cast<double>(total.optimizer_steps);
  return total;
}

}  // namespace

UpdateStats accumulate_gradients(policy::PolicyNet& policy, const Trajectory& batch,
                                 const TrainConfig& config, std::span<const std::size_t> indices,
                                 std::span<const double> advantages) {
  return accumulate(policy, batch, config, indices, advantages,
                    1.0 / static_cast<double>(std::max<std::size_t>(1, indices.size())));
}

UpdateStats ppo_update(policy::PolicyNet& policy, const Trajectory& batch,
                       const TrainConfig& config) {
  TrainConfig c = config;
  c.algo = Algo::kPpo;
  return optimize(policy, batch, c);
}

UpdateStats a2c_update(policy::PolicyNet& policy, const Trajectory& batch,
                       const TrainConfig& config) {
  TrainConfig c = config;
  c.algo = Algo::kA2c;
  return optimize(policy, batch, c);
}

UpdateStats reinforce_update(policy::PolicyNet& policy, const Trajectory& batch,
                             const TrainConfig& config) {
  TrainConfig c = config;
  c.algo = Algo::kReinforce;
  return optimize(policy, batch, c);
}

void write_training_log_header(std::ostream& out) {
  out << "update,start_day,mean_reward,policy_loss,value_loss,kl,entropy,grad_norm,skipped,"
         "wall_time\n";
}

void write_training_log_row(std::ostream& out, const UpdateLog& row) {
  out << std::setprecision(17) << row.update << ',' << row.start_day << ',' << row.mean_reward
      << ',' << row.stats.policy_loss << ',' << row.stats.value_loss << ',' << row.stats.kl << ','
      << row.stats.entropy << ',' << row.stats.grad_norm << ',' << row.stats.skipped << ','
      << std::setprecision(6) << row.wall_seconds << '\n';
}

Trainer::Trainer(policy::PolicyNet& policy, const data::PanelTensor& panel,
                 env::EnvConfig env_config, TrainConfig config, data::DayRange train_range,
                 data::AccessLedger* ledger)
    : policy_(&policy),
      panel_(&panel),
      env_config_(std::move(env_config)),
      config_(config),
      range_(train_range),
      ledger_(ledger),
      rollout_rng_(make_stream(config.seed, "rollout")) {
  config_.validate();
  env_config_.validate();
  require(range_.last < panel.num_days() && range_.first <= range_.last, ErrorKind::kRange,
          "trainer: training range lies outside the panel");
  const std::size_t lo = std::max(range_.first, env_config_.min_start());
  require(range_.last >= lo + config_.rollout_days, ErrorKind::kConfig,
          "trainer: training range is too short for a " + std::to_string(config_.rollout_days) +
              "-day rollout after the " + std::to_string(env_config_.min_start()) +
              "-day warm-up");
}

UpdateLog Trainer::run_update() {
  const auto t0 = std::chrono::steady_clock::now();
  const std::size_t lo = std::max(range_.first, env_config_.min_start());
  const std::size_t hi = range_.last - config_.rollout_days;
  const std::size_t start = lo + static_cast<std::size_t>(rollout_rng_() % (hi - lo + 1));
  env::PortfolioEnv env(*panel_, env_config_, range_, ledger_);
  env.reset(start);
  Trajectory traj = collect_rollout(env, *policy_, config_.rollout_days, rollout_rng_, ledger_);
  prepare_targets(traj, config_);
  UpdateLog log;
  log.update = ++updates_done_;
  log.start_day = start;
  log.mean_reward = traj.mean_reward();
  log.stats = optimize(*policy_, traj, config_);
  log.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return log;
}

std::vector<UpdateLog> Trainer::train(std::size_t updates,
                                      const std::function<void(const UpdateLog&)>& on_update) {
  std::vector<UpdateLog> logs;
  logs.reserve(updates);
  for (std::size_t u = 0; u < updates; ++u) {
    logs.push_back(run_update());
    if (on_update) on_update(logs.back());
  }
  return logs;
}

}  // namespace folio::rl
