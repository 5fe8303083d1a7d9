#include "folio/rl/rollout.hpp"

#include <cmath>

#include "folio/error.hpp"

namespace folio::rl {

double Trajectory::mean_reward() const {
  if (steps.empty()) return 0.0;
  double s = 0.0;
  for (const auto& st : steps) s += st.reward;
  return s / static_cast<double>(steps.size());
}

data::WindowView Trajectory::observation(std::size_t k) const {
  const std::size_t day = steps.at(k).day;
  if (ledger) ledger->record(day + 1 - window, day);
  return data::window_view(*panel, day, window);
}

std::span<const std::uint8_t> Trajectory::mask(std::size_t k) const {
  return panel->mask_row(steps.at(k).day);
}

Trajectory collect_rollout(env::PortfolioEnv& env, const policy::PolicyNet& policy,
                           std::size_t days, Rng& rng, data::AccessLedger* ledger) {
  require(days > 0, ErrorKind::kRollout, "rollout: zero-length segment requested");
  require(env.steps_remaining() >= days, ErrorKind::kRollout,
          "rollout: environment has " + std::to_string(env.steps_remaining()) +
              " steps left, " + std::to_string(days) + " requested");
  Trajectory traj;
  traj.panel = &env.panel();
  traj.ledger = ledger;
  traj.window = env.config().window;
  traj.steps.reserve(days);
  policy::ActOptions options;
  options.include_cash = env.config().include_cash;
  for (std::size_t k = 0; k < days; ++k) {
    options.caps = env.caps();
    const auto& state = env.state();
    const policy::ActResult act = policy.act(state, policy::ActMode::kSample, &rng, options);
    TrajectoryStep step;
    step.day = state.t;
    step.pre_mask_action = act.pre_mask_point;
    step.old_alpha = act.alpha;
    step.old_log_prob = act.log_prob;
    step.value = act.value;
    const env::StepResult res = env.step(act.weights);
    require(std::isfinite(res.reward), ErrorKind::kRollout,
            "rollout: non-finite reward on day " + std::to_string(step.day));
    step.reward = res.reward;
    step.done = res.terminal;
    traj.steps.push_back(std::move(step));
  }
  if (!env.done()) {
    ad::NoGradGuard no_grad;
    const auto& state = env.state();
    traj.bootstrap_value = policy.forward(state.window, state.mask, state.market).value.item();
  }
  return traj;
}

}  // namespace folio::rl
