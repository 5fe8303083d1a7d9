#include <cmath>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "fixtures.hpp"
#include "gradcheck.hpp"
#include "folio/ad/dirichlet_ops.hpp"
#include "folio/error.hpp"
#include "folio/rl/gae.hpp"
#include "folio/rl/grid_search.hpp"
#include "folio/rl/rollout.hpp"
#include "folio/rl/trainer.hpp"
#include "folio/simplex/dirichlet.hpp"

using namespace folio;
using namespace folio::rl;

namespace {

policy::PolicyConfig tiny() {
  policy::PolicyConfig c;
  c.width = 8;
  c.heads = 2;
  return c;
}

env::EnvConfig small_env() {
  env::EnvConfig e;
  e.window = 4;
  e.cov_window = 4;
  return e;
}

// Brute-force GAE: A_t = sum_k (gamma*lam)^k delta_{t+k}.
std::vector<double> gae_oracle(const std::vector<double>& r, const std::vector<double>& v,
                               double boot, double g, double l) {
  const std::size_t n = r.size();
  std::vector<double> delta(n), out(n, 0.0);
  for (std::size_t t = 0; t < n; ++t) {
    const double next = t + 1 < n ? v[t + 1] : boot;
    delta[t] = r[t] + g * next - v[t];
  }
  for (std::size_t t = 0; t < n; ++t) {
    for (std::size_t k = t; k < n; ++k) out[t] += std::pow(g * l, static_cast<double>(k - t)) * delta[k];
  }
  return out;
}

struct Fixture {
  data::PanelTensor panel = testing::random_panel(80, 3, 2, 5, 0.1);
  policy::PolicyNet net{tiny(), 2, 11};
  Trajectory traj;

  explicit Fixture(std::size_t days = 12) {
    env::PortfolioEnv env(panel, small_env(), {3, 79});
    env.reset(10);
    Rng rng(2);
    traj = collect_rollout(env, net, days, rng);
  }
};

std::vector<double> grads(const policy::PolicyNet& net, const std::string& prefix = "") {
  std::vector<double> g;
  for (const auto& e : net.params().entries()) {
    if (e.name.rfind(prefix, 0) != 0) continue;
    const auto v = e.param.grad();
    g.insert(g.end(), v.begin(), v.end());
  }
  return g;
}

double cosine(const std::vector<double>& a, const std::vector<double>& b) {
  double ab = 0, aa = 0, bb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ab += a[i] * b[i];
    aa += a[i] * a[i];
    bb += b[i] * b[i];
  }
  return ab / std::sqrt(aa * bb);
}

std::vector<double> flat_params(const policy::PolicyNet& net) {
  std::vector<double> out;
  for (const auto& e : net.params().entries()) {
    out.insert(out.end(), e.param.data().begin(), e.param.data().end());
  }
  return out;
}

}  // namespace

TEST_SUITE("rl_train") {
  TEST_CASE("config validation") {
    TrainConfig c;
    CHECK_NOTHROW(c.validate());
    CHECK(c.total_updates() == 60);
    CHECK(c.effective_minibatch(128) == 128);
    c.minibatch = 100;
    CHECK_THROWS_AS(c.validate(), Error);
    c = {};
    c.gamma = 0.0;
    CHECK_THROWS_AS(c.validate(), Error);
    c = {};
    c.gae_lambda = 1.5;
    CHECK_THROWS_AS(c.validate(), Error);
    c = {};
    c.clip_eps = 0.0;
    CHECK_THROWS_AS(c.validate(), Error);
    CHECK(parse_algo("a2c") == Algo::kA2c);
    CHECK_THROWS_AS(parse_algo("dqn"), Error);
  }

  TEST_CASE("gae small cases") {
    const std::vector<double> r{1.0}, v{0.0};
    const auto one = compute_gae(r, v, 0.0, 1.0, 1.0);
    CHECK(one.advantages[0] == 1.0);
    CHECK(one.returns[0] == 1.0);

    const std::vector<double> r3{0.5, -0.2, 0.3}, v3{0.1, 0.4, -0.3};
    const auto td = compute_gae(r3, v3, 0.7, 0.9, 0.0);
    CHECK(td.advantages[0] == doctest::Approx(0.5 + 0.9 * 0.4 - 0.1).epsilon(1e-15));
    CHECK(td.advantages[1] == doctest::Approx(-0.2 + 0.9 * -0.3 - 0.4).epsilon(1e-15));
    CHECK(td.advantages[2] == doctest::Approx(0.3 + 0.9 * 0.7 + 0.3).epsilon(1e-15));
    for (std::size_t t = 0; t < 3; ++t) CHECK(td.returns[t] == td.advantages[t] + v3[t]);

    // A done flag cuts both the bootstrap and the recursion.
    const std::vector<std::uint8_t> dones{0, 1, 0};
    const auto cut = compute_gae(r3, v3, 0.7, 0.9, 0.95, dones);
    CHECK(cut.advantages[1] == doctest::Approx(-0.2 - 0.4).epsilon(1e-15));
    const double d0 = 0.5 + 0.9 * 0.4 - 0.1;
    CHECK(cut.advantages[0] == doctest::Approx(d0 + 0.9 * 0.95 * cut.advantages[1]).epsilon(1e-15));
  }

  TEST_CASE("gae matches the direct sum") {
    Rng rng(99);
    std::uniform_real_distribution<double> u(-1, 1), p(0.5, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
      const std::size_t n = 1 + rng() % 64;
      std::vector<double> r(n), v(n);
      for (auto& x : r) x = u(rng);
      for (auto& x : v) x = u(rng);
      const double boot = u(rng), g = p(rng), l = p(rng);
      const auto got = compute_gae(r, v, boot, g, l);
      const auto want = gae_oracle(r, v, boot, g, l);
      for (std::size_t t = 0; t < n; ++t) {
        CHECK(std::abs(got.advantages[t] - want[t]) < 1e-10);
        CHECK(got.returns[t] == got.advantages[t] + v[t]);
      }
    }
  }

  TEST_CASE("monte carlo returns") {
    const std::vector<double> ones{1, 1, 1};
    CHECK(discounted_returns(ones, 1.0) == std::vector<double>{3, 2, 1});
    const std::vector<double> r{0.3, -1.2, 0.8};
    const auto g = discounted_returns(r, 0.99);
    CHECK(std::abs(g[0] - (0.3 - 0.99 * 1.2 + 0.99 * 0.99 * 0.8)) < 1e-12);
    CHECK(std::abs(g[1] - (-1.2 + 0.99 * 0.8)) < 1e-12);
    CHECK(g[2] == 0.8);

    Fixture f(6);
    TrainConfig c;
    c.algo = Algo::kReinforce;
    c.gamma = 1.0;
    for (auto& s : f.traj.steps) s.reward = 1.0;
    prepare_targets(f.traj, c);
    CHECK(f.traj.returns == std::vector<double>{6, 5, 4, 3, 2, 1});
    for (std::size_t k = 0; k < 6; ++k) {
      CHECK(f.traj.advantages[k] == f.traj.returns[k] - f.traj.steps[k].value);
    }
  }

  TEST_CASE("normalization") {
    std::vector<double> a{1, 2, 3, 4};
    normalize_in_place(a);
    double m = 0, s = 0;
    for (double x : a) m += x;
    for (double x : a) s += x * x;
    CHECK(std::abs(m) < 1e-15);
    CHECK(std::abs(s / 4 - 1) < 1e-12);
    std::vector<double> c{2, 2, 2};
    normalize_in_place(c);
    CHECK(c == std::vector<double>{0, 0, 0});
  }

  TEST_CASE("rollout collection") {
    Fixture f(16);
    CHECK(f.traj.size() == 16);
    for (const auto& s : f.traj.steps) {
      CHECK(std::isfinite(s.reward));
      CHECK(std::abs(s.old_log_prob - simplex::dirichlet_log_pdf(simplex::DirichletParams(s.old_alpha),
                                                                 s.pre_mask_action)) < 1e-12);
    }
    Fixture g(16);
    for (std::size_t k = 0; k < 16; ++k) {
      CHECK(f.traj.steps[k].pre_mask_action == g.traj.steps[k].pre_mask_action);
      CHECK(f.traj.steps[k].reward == g.traj.steps[k].reward);
    }
    CHECK(f.traj.bootstrap_value == g.traj.bootstrap_value);

    env::PortfolioEnv env(f.panel, small_env(), {3, 79});
    env.reset(70);
    Rng rng(1);
    try {
      collect_rollout(env, f.net, 20, rng);
      FAIL("expected exhaustion");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::kRollout);
    }
  }

  TEST_CASE("ppo first pass has unit ratios") {
    Fixture f(24);
    TrainConfig c;
    c.minibatch = 32;
    c.microbatch = 8;
    prepare_targets(f.traj, c);
    const auto st = ppo_update(f.net, f.traj, c);
    CHECK(st.optimizer_steps == 1);
    CHECK(std::abs(st.mean_ratio - 1.0) < 1e-9);
    CHECK(st.clip_fraction == 0.0);
    CHECK(std::abs(st.kl) < 1e-12);
    // mean normalized advantage is zero, so the surrogate is zero too
    CHECK(std::abs(st.policy_loss) < 1e-9);
  }

  TEST_CASE("ppo clipping by quadrant") {
    // Single sample, actor gradient only. Unclipped side: ratio times the
    // A2C gradient. Clipped side: zero.
    struct Case {
      double ratio, adv;
      bool clipped;
    };
    const Case cases[] = {{1.5, 1.0, true}, {0.5, 1.0, false}, {1.5, -1.0, false}, {0.5, -1.0, true},
                          {1.1, 1.0, false}, {0.9, -1.0, false}};
    for (const auto& cs : cases) {
      Fixture f(4);
      TrainConfig c;
      c.value_coef = 0.0;
      c.normalize_advantages = false;
      c.minibatch = 1;
      c.microbatch = 1;
      Trajectory one = f.traj;
      one.steps.resize(1);
      one.returns = {0.0};
      const std::vector<std::size_t> idx{0};
      const std::vector<double> adv{cs.adv};

      c.algo = Algo::kA2c;
      f.net.params().zero_grad();
      accumulate_gradients(f.net, one, c, idx, adv);
      const auto base = grads(f.net, "actor.");

      c.algo = Algo::kPpo;
      one.steps[0].old_log_prob -= std::log(cs.ratio);
      f.net.params().zero_grad();
      const auto st = accumulate_gradients(f.net, one, c, idx, adv);
      const auto got = grads(f.net, "actor.");
      CHECK(std::abs(st.mean_ratio - cs.ratio) < 1e-9);
      CHECK(std::abs(st.policy_loss - (-std::min(cs.ratio * cs.adv,
                                                 std::clamp(cs.ratio, 0.8, 1.2) * cs.adv))) < 1e-9);
      for (std::size_t i = 0; i < got.size(); ++i) {
        if (cs.clipped) {
          CHECK(got[i] == 0.0);
        } else {
          CHECK(std::abs(got[i] - cs.ratio * base[i]) <= 1e-9 * (1 + std::abs(base[i])));
        }
      }
    }
  }

  TEST_CASE("a2c and ppo agree at unit ratio") {
    Fixture f(16);
    TrainConfig c;
    c.minibatch = 16;
    c.microbatch = 16;
    prepare_targets(f.traj, c);
    std::vector<std::size_t> idx(16);
    for (std::size_t k = 0; k < 16; ++k) idx[k] = k;
    std::vector<double> adv = f.traj.advantages;
    normalize_in_place(adv);
    c.algo = Algo::kPpo;
    f.net.params().zero_grad();
    accumulate_gradients(f.net, f.traj, c, idx, adv);
    const auto ppo = grads(f.net);
    c.algo = Algo::kA2c;
    f.net.params().zero_grad();
    accumulate_gradients(f.net, f.traj, c, idx, adv);
    const auto a2c = grads(f.net);
    CHECK(cosine(ppo, a2c) > 0.999);
  }

  TEST_CASE("a2c single-sample gradient matches finite differences") {
    Fixture f(3);
    TrainConfig c;
    c.algo = Algo::kA2c;
    c.value_coef = 0.0;
    c.normalize_advantages = false;
    Trajectory one = f.traj;
    one.steps.resize(1);
    one.returns = {0.0};
    const std::vector<std::size_t> idx{0};
    const std::vector<double> adv{0.7};
    f.net.params().zero_grad();
    accumulate_gradients(f.net, one, c, idx, adv);
    const auto analytic = grads(f.net);
    std::size_t pos = 0;
    double worst = 0.0;
    for (auto& e : f.net.params().entries()) {
      auto vals = e.param.mutable_data();
      for (std::size_t i = 0; i < vals.size(); ++i, ++pos) {
        const double fd = testing::central_diff(
            [&] {
              ad::NoGradGuard guard;
              const auto out = f.net.forward(one.observation(0), one.mask(0));
              return -0.7 * ad::dirichlet_log_prob(out.alpha, one.steps[0].pre_mask_action).item();
            },
            vals[i]);
        worst = std::max(worst, testing::rel_err(analytic[pos], fd));
      }
    }
    CHECK(worst < 1e-4);

    // zero advantages leave the actor untouched
    c.value_coef = 0.5;
    f.net.params().zero_grad();
    const std::vector<double> zero{0.0};
    accumulate_gradients(f.net, one, c, idx, zero);
    for (double g : grads(f.net, "actor.")) CHECK(g == 0.0);
  }

  TEST_CASE("a2c ignores clip_eps") {
    std::vector<double> ref;
    for (double eps : {0.05, 0.2, 0.9}) {
      Fixture f(20);
      TrainConfig c;
      c.algo = Algo::kA2c;
      c.clip_eps = eps;
      c.minibatch = 8;
      c.microbatch = 4;
      c.epochs_per_update = 2;
      prepare_targets(f.traj, c);
      a2c_update(f.net, f.traj, c);
      const auto p = flat_params(f.net);
      if (ref.empty()) ref = p;
      CHECK(p == ref);
    }
  }

  TEST_CASE("reinforce with a perfect baseline has no policy gradient") {
    Fixture f(5);
    TrainConfig c;
    c.algo = Algo::kReinforce;
    c.normalize_advantages = false;
    prepare_targets(f.traj, c);
    for (std::size_t k = 0; k < 5; ++k) f.traj.steps[k].value = f.traj.returns[k];
    prepare_targets(f.traj, c);
    for (double a : f.traj.advantages) CHECK(std::abs(a) < 1e-15);
    std::vector<std::size_t> idx{0, 1, 2, 3, 4};
    f.net.params().zero_grad();
    accumulate_gradients(f.net, f.traj, c, idx, f.traj.advantages);
    for (double g : grads(f.net, "actor.")) CHECK(std::abs(g) < 1e-15);
  }

  TEST_CASE("microbatching does not change the step") {
    std::vector<double> ref;
    for (std::size_t micro : {1, 2, 4, 8}) {
      Fixture f(8);
      TrainConfig c;
      c.minibatch = 8;
      c.microbatch = micro;
      prepare_targets(f.traj, c);
      ppo_update(f.net, f.traj, c);
      const auto p = flat_params(f.net);
      if (ref.empty()) ref = p;
      for (std::size_t i = 0; i < p.size(); ++i) CHECK(std::abs(p[i] - ref[i]) < 1e-12);
    }
  }

  TEST_CASE("non-finite ratio skips the minibatch") {
    Fixture f(4);
    TrainConfig c;
    c.minibatch = 4;
    c.microbatch = 4;
    prepare_targets(f.traj, c);
    f.traj.steps[2].old_log_prob = -1e6;
    const auto before = flat_params(f.net);
    const auto st = ppo_update(f.net, f.traj, c);
    CHECK(st.skipped == 1);
    CHECK(st.optimizer_steps == 0);
    CHECK(flat_params(f.net) == before);
  }

  TEST_CASE("trainer is deterministic") {
    const auto panel = testing::random_panel(120, 4, 2, 8, 0.05);
    auto run = [&] {
      policy::PolicyNet net(tiny(), 2, 42);
      TrainConfig c;
      c.rollout_days = 16;
      c.minibatch = 8;
      c.microbatch = 4;
      Trainer tr(net, panel, small_env(), c, {0, 99});
      std::ostringstream log;
      for (const auto& row : tr.train(4)) {
        auto r = row;
        r.wall_seconds = 0;
        write_training_log_row(log, r);
      }
      return std::make_pair(log.str(), flat_params(net));
    };
    const auto a = run();
    const auto b = run();
    CHECK(a.first == b.first);
    CHECK(a.second == b.second);
  }

  TEST_CASE("ranking breaks ties by grid order") {
    CHECK(rank_descending({0.1, 0.5, 0.5, 0.2}) == std::vector<std::size_t>{1, 2, 3, 0});
    CHECK(rank_descending({1, 1, 1}) == std::vector<std::size_t>{0, 1, 2});
    metrics::MetricsReport r;
    r.mdd = -0.3;
    CHECK(metric_value(r, EvalMetric::kMdd) == -0.3);
    CHECK(parse_eval_metric("cagr") == EvalMetric::kCagr);
    CHECK_THROWS_AS(parse_eval_metric("sortino?"), Error);
  }

  TEST_CASE("grid search runs every cell and keeps the best") {
    const auto dir = testing::scratch_dir("grid");
    const auto panel = testing::random_panel(160, 3, 2, 6, 0.0);
    policy::PolicyNet net(tiny(), 2, 3);
    net.save(dir / "base.ckpt");
    FinetuneGrid grid;
    grid.learning_rates = {1e-3, 5e-4};
    grid.epochs = {1, 2};
    grid.minibatches = {4, 8};
    grid.microbatch = 4;
    grid.extra_updates = 1;
    FinetuneSetup setup;
    setup.panel = &panel;
    setup.env = small_env();
    setup.base.rollout_days = 8;
    setup.train_range = {0, 99};
    setup.eval_range = {100, 159};
    const auto res = grid_search_finetune(dir / "base.ckpt", grid, setup, dir / "out");
    REQUIRE(res.ranked.size() == 8);
    for (std::size_t k = 0; k + 1 < 8; ++k) {
      CHECK(res.ranked[k].metrics.sharpe >= res.ranked[k + 1].metrics.sharpe);
    }
    for (const auto& t : res.ranked) CHECK(std::filesystem::exists(t.checkpoint));
    CHECK(std::filesystem::exists(res.best_checkpoint));
    const auto best = policy::PolicyNet::load(res.best_checkpoint);
    const auto top = policy::PolicyNet::load(res.ranked.front().checkpoint);
    CHECK(flat_params(best) == flat_params(top));
    CHECK(to_json(res.ranked).find("\"lr\"") != std::string::npos);

    policy::PolicyNet wrong(tiny(), 3, 3);
    wrong.save(dir / "wrong.ckpt");
    try {
      grid_search_finetune(dir / "wrong.ckpt", grid, setup, dir / "out2");
      FAIL("expected a version error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::kVersion);
    }
  }
}
