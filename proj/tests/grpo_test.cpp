#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "ladder/grpo.hpp"
#include "ladder/policy.hpp"
#include "ladder/rng.hpp"

using namespace ladder;

namespace {

GrpoConfig base_cfg() {
    GrpoConfig cfg;
    cfg.group_size = 4;
    cfg.clip_epsilon = 0.2;
    cfg.kl_coefficient = 0.04;
    cfg.std_epsilon = 1e-8;
    return cfg;
}

// Synthetic group: responses are dummy tokens, only lengths matter to the
// loss. old/ref logprobs aligned with the given new logprob shapes.
ResponseGroup make_group(const std::vector<double>& rewards,
                         const std::vector<std::vector<double>>& old_lp,
                         const std::vector<std::vector<double>>& ref_lp) {
    ResponseGroup g;
    g.prompt_id = "p";
    g.prompt = {0};
    g.rewards = rewards;
    g.old_logprobs = old_lp;
    g.ref_logprobs = ref_lp;
    for (const auto& lp : old_lp) g.responses.push_back(TokenSequence(lp.size(), 1));
    return g;
}

AdvantageVector plain(std::vector<double> a) {
    AdvantageVector adv;
    adv.a = std::move(a);
    return adv;
}

double loss_of(const ResponseGroup& g, const AdvantageVector& adv,
               const std::vector<std::vector<double>>& new_lp, const GrpoConfig& cfg) {
    return grpo_loss(g, adv, new_lp, cfg).loss;
}

}  // namespace

TEST_CASE("advantages are group-normalized rewards") {
    auto adv = normalize_advantages({1.0, 0.0, 1.0, 0.0}, 1e-8);
    REQUIRE(!adv.degenerate);
    const std::vector<double> expect{1.0, -1.0, 1.0, -1.0};
    for (int i = 0; i < 4; ++i) CHECK(adv.a[i] == doctest::Approx(expect[i]).epsilon(1e-12));

    adv = normalize_advantages({2.0, 0.0}, 1e-8);
    REQUIRE(!adv.degenerate);
    CHECK(adv.a[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(adv.a[1] == doctest::Approx(-1.0).epsilon(1e-12));
}

TEST_CASE("zero-variance groups are degenerate with all-zero advantages") {
    for (double c : {0.0, 1.5, -2.0}) {
        const auto adv = normalize_advantages({c, c, c, c}, 1e-8);
        CHECK(adv.degenerate);
        for (double a : adv.a) CHECK(a == 0.0);
    }
    // variance below epsilon also counts
    const auto adv = normalize_advantages({1.0, 1.0 + 1e-12}, 1e-8);
    CHECK(adv.degenerate);
}

TEST_CASE("advantage normalization properties over random groups") {
    auto rng = make_rng(1, "test-adv-props");
    std::uniform_real_distribution<double> reward(-3.0, 3.0);
    std::uniform_int_distribution<int> size(2, 12);
    for (int trial = 0; trial < 2000; ++trial) {
        std::vector<double> r(size(rng));
        for (double& x : r) x = reward(rng);
        const auto adv = normalize_advantages(r, 1e-8);
        if (adv.degenerate) continue;
        double mean = 0.0, var = 0.0;
        for (double a : adv.a) mean += a;
        mean /= adv.a.size();
        for (double a : adv.a) var += (a - mean) * (a - mean);
        var /= adv.a.size();
        CHECK(std::fabs(mean) < 1e-9);
        CHECK(std::fabs(std::sqrt(var) - 1.0) < 1e-9);

        // shift invariance
        std::vector<double> shifted = r;
        for (double& x : shifted) x += 7.5;
        const auto adv2 = normalize_advantages(shifted, 1e-8);
        for (std::size_t i = 0; i < r.size(); ++i)
            CHECK(adv2.a[i] == doctest::Approx(adv.a[i]).epsilon(1e-9));

        // positive scale invariance
        std::vector<double> scaled = r;
        for (double& x : scaled) x *= 3.25;
        const auto adv3 = normalize_advantages(scaled, 1e-8);
        for (std::size_t i = 0; i < r.size(); ++i)
            CHECK(adv3.a[i] == doctest::Approx(adv.a[i]).epsilon(1e-9));
    }
}

TEST_CASE("groups of fewer than two rewards cannot be normalized") {
    CHECK_THROWS_AS(normalize_advantages({}, 1e-8), std::invalid_argument);
    CHECK_THROWS_AS(normalize_advantages({1.0}, 1e-8), std::invalid_argument);
}

TEST_CASE("at ratio one the surrogate reduces to minus the advantage mean plus KL") {
    const GrpoConfig cfg = base_cfg();
    const std::vector<double> rewards{1.0, 0.0, 1.0, 0.0};
    // new == old: every ratio is exactly 1; new == ref: KL is exactly 0
    const std::vector<std::vector<double>> lp{
        {-1.0, -2.0}, {-0.5}, {-3.0, -0.1, -0.2}, {-1.5}};
    const ResponseGroup g = make_group(rewards, lp, lp);
    const auto res = grpo_loss(g, normalize_advantages(rewards, cfg.std_epsilon), lp, cfg);
    // advantages have zero mean, so the policy term vanishes
    CHECK(res.loss == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(res.mean_kl == 0.0);
    CHECK(res.clip_fraction == 0.0);
    CHECK(res.token_count == 7);
}

TEST_CASE("kl estimator is nonnegative and zero only at equality") {
    GrpoConfig cfg = base_cfg();
    cfg.group_size = 2;
    auto rng = make_rng(2, "test-kl");
    std::uniform_real_distribution<double> lp_dist(-4.0, -0.05);
    for (int trial = 0; trial < 200; ++trial) {
        const std::vector<double> rewards{1.0, 0.0};
        std::vector<std::vector<double>> new_lp{{lp_dist(rng), lp_dist(rng)}, {lp_dist(rng)}};
        std::vector<std::vector<double>> ref_lp{{lp_dist(rng), lp_dist(rng)}, {lp_dist(rng)}};
        const ResponseGroup g = make_group(rewards, new_lp, ref_lp);
        const auto adv = normalize_advantages(rewards, cfg.std_epsilon);
        const auto res = grpo_loss(g, adv, new_lp, cfg);
        CHECK(res.mean_kl >= 0.0);
        const ResponseGroup geq = make_group(rewards, new_lp, new_lp);
        CHECK(grpo_loss(geq, adv, new_lp, cfg).mean_kl == 0.0);
    }
}

TEST_CASE("clipping binds exactly when the ratio leaves the trust region") {
    GrpoConfig cfg = base_cfg();
    cfg.kl_coefficient = 0.0;
    cfg.group_size = 2;

    // one-token responses; rewards give advantages +1 and -1
    const std::vector<double> rewards{1.0, 0.0};
    const std::vector<std::vector<double>> old_lp{{-1.0}, {-1.0}};
    const ResponseGroup g = make_group(rewards, old_lp, old_lp);
    const auto adv = normalize_advantages(rewards, cfg.std_epsilon);

    // positive advantage, ratio above 1+eps: objective pins at (1+eps)*A
    std::vector<std::vector<double>> new_lp{{-1.0 + std::log(1.5)}, {-1.0}};
    auto res = grpo_loss(g, adv, new_lp, cfg);
    // contributions: min(1.5*1, 1.2*1) = 1.2 and min(1*-1, 1*-1) = -1
    CHECK(res.loss == doctest::Approx(-(1.2 - 1.0) / 2.0).epsilon(1e-12));
    CHECK(res.clip_fraction == doctest::Approx(0.5).epsilon(1e-12));
    // the clipped token contributes zero gradient
    CHECK(res.dloss_dnew[0][0] == 0.0);
    CHECK(res.dloss_dnew[1][0] != 0.0);

    // negative advantage, ratio below 1-eps: pins at (1-eps)*A
    new_lp = {{-1.0}, {-1.0 + std::log(0.5)}};
    res = grpo_loss(g, adv, new_lp, cfg);
    // min(0.5*-1, 0.8*-1) = -0.8: the clip branch wins
    CHECK(res.loss == doctest::Approx(-(1.0 - 0.8) / 2.0).epsilon(1e-12));
    CHECK(res.clip_fraction == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(res.dloss_dnew[1][0] == 0.0);

    // inside the trust region nothing clips
    new_lp = {{-1.0 + std::log(1.1)}, {-1.0 + std::log(0.95)}};
    res = grpo_loss(g, adv, new_lp, cfg);
    CHECK(res.clip_fraction == 0.0);
}

TEST_CASE("degenerate groups contribute only the KL term") {
    GrpoConfig cfg = base_cfg();
    cfg.group_size = 3;
    const std::vector<double> rewards{1.0, 1.0, 1.0};
    const std::vector<std::vector<double>> old_lp{{-1.0}, {-2.0}, {-0.5}};
    const std::vector<std::vector<double>> new_lp{{-1.2}, {-1.8}, {-0.6}};
    const ResponseGroup g = make_group(rewards, old_lp, old_lp);
    const auto adv = normalize_advantages(rewards, cfg.std_epsilon);
    REQUIRE(adv.degenerate);
    const auto res = grpo_loss(g, adv, new_lp, cfg);
    CHECK(res.mean_kl > 0.0);
    CHECK(res.loss == doctest::Approx(cfg.kl_coefficient * res.mean_kl).epsilon(1e-12));
}

TEST_CASE("with beta zero and huge clip the loss is vanilla policy gradient") {
    GrpoConfig cfg = base_cfg();
    cfg.kl_coefficient = 0.0;
    cfg.clip_epsilon = 1e9;
    cfg.group_size = 1;  // single response; grpo_loss applies any given advantage

    const std::vector<std::vector<double>> old_lp{{-1.0}};
    const std::vector<std::vector<double>> new_lp{{-0.7}};
    const ResponseGroup g = make_group({2.0}, old_lp, old_lp);
    const auto res = grpo_loss(g, plain({2.0}), new_lp, cfg);
    const double ratio = std::exp(-0.7 + 1.0);
    CHECK(res.loss == doctest::Approx(-ratio * 2.0).epsilon(1e-12));
    // d/dlp of -exp(lp - old)*A is -ratio*A
    CHECK(res.dloss_dnew[0][0] == doctest::Approx(-ratio * 2.0).epsilon(1e-12));
}

TEST_CASE("analytic token gradient matches finite differences") {
    auto rng = make_rng(3, "test-grpo-fd");
    std::uniform_real_distribution<double> lp_dist(-3.0, -0.1);
    std::uniform_real_distribution<double> reward(-1.0, 2.0);
    std::uniform_int_distribution<int> len(1, 4);

    for (int trial = 0; trial < 40; ++trial) {
        GrpoConfig cfg = base_cfg();
        cfg.clip_epsilon = trial % 2 == 0 ? 0.2 : 0.05;
        cfg.kl_coefficient = trial % 3 == 0 ? 0.0 : 0.04;
        const int n = cfg.group_size;

        std::vector<double> rewards(n);
        std::vector<std::vector<double>> new_lp(n), old_lp(n), ref_lp(n);
        for (int i = 0; i < n; ++i) {
            rewards[i] = reward(rng);
            const int t = len(rng);
            for (int k = 0; k < t; ++k) {
                new_lp[i].push_back(lp_dist(rng));
                old_lp[i].push_back(lp_dist(rng));
                ref_lp[i].push_back(lp_dist(rng));
            }
        }
        const ResponseGroup g = make_group(rewards, old_lp, ref_lp);
        const auto adv = normalize_advantages(rewards, cfg.std_epsilon);
        const auto res = grpo_loss(g, adv, new_lp, cfg);

        const double h = 1e-7;
        for (int i = 0; i < n; ++i) {
            for (std::size_t k = 0; k < new_lp[i].size(); ++k) {
                auto up = new_lp;
                auto down = new_lp;
                up[i][k] += h;
                down[i][k] -= h;
                const double fd =
                    (loss_of(g, adv, up, cfg) - loss_of(g, adv, down, cfg)) / (2 * h);
                // skip stencils that straddle the clip kink
                const double r = std::exp(new_lp[i][k] - old_lp[i][k]);
                if (std::fabs(r - (1 + cfg.clip_epsilon)) < 1e-5 ||
                    std::fabs(r - (1 - cfg.clip_epsilon)) < 1e-5) {
                    continue;
                }
                CHECK(res.dloss_dnew[i][k] == doctest::Approx(fd).epsilon(5e-5).scale(1.0));
            }
        }
    }
}

TEST_CASE("update_policy moves a toy policy toward higher-reward responses") {
    PolicyConfig pc;
    pc.vocab_size = 4;
    pc.embed_dim = 2;
    pc.hidden_dim = 3;
    pc.context_k = 1;
    pc.max_len = 2;
    pc.stop_token = 3;
    pc.validate();

    auto rng = make_rng(4, "test-update");
    PolicyParams params = PolicyParams::random_init(pc, 0.2, rng);
    const PolicyParams ref = params;
    const TokenSequence prompt{0};

    GrpoConfig cfg = base_cfg();
    cfg.group_size = 2;
    cfg.learning_rate = 0.3;
    cfg.kl_coefficient = 0.0;

    // reward token 1, punish token 2, fixed synthetic rollouts
    const TokenSequence good{1, 3};
    const TokenSequence bad{2, 3};
    const double before_good = policy_forward(params, prompt, {})[1];
    for (int step = 0; step < 25; ++step) {
        ResponseGroup g;
        g.prompt_id = "p";
        g.prompt = prompt;
        g.responses = {good, bad};
        g.rewards = {1.0, 0.0};
        g.old_logprobs = {logprob_of_sequence(params, prompt, good),
                          logprob_of_sequence(params, prompt, bad)};
        g.ref_logprobs = {logprob_of_sequence(ref, prompt, good),
                          logprob_of_sequence(ref, prompt, bad)};
        const auto stats = update_policy(params, {g}, cfg);
        CHECK(std::isfinite(stats.loss));
        CHECK(stats.mean_reward == 0.5);
    }
    const double after_good = policy_forward(params, prompt, {})[1];
    CHECK(after_good > before_good);
    CHECK(after_good > 0.5);
}

TEST_CASE("update_policy counts degenerate groups and leaves them out of the gradient") {
    PolicyConfig pc;
    pc.vocab_size = 3;
    pc.embed_dim = 2;
    pc.hidden_dim = 2;
    pc.context_k = 1;
    pc.max_len = 1;
    pc.stop_token = 2;
    pc.validate();
    auto rng = make_rng(5, "test-degenerate-update");
    PolicyParams params = PolicyParams::random_init(pc, 0.2, rng);
    const std::vector<double> before = params.theta;

    GrpoConfig cfg = base_cfg();
    cfg.group_size = 2;
    cfg.kl_coefficient = 0.0;  // isolate the policy term

    ResponseGroup g;
    g.prompt_id = "p";
    g.prompt = {0};
    g.responses = {{2}, {2}};
    g.rewards = {1.0, 1.0};  // identical: degenerate
    g.old_logprobs = {logprob_of_sequence(params, g.prompt, {2}),
                      logprob_of_sequence(params, g.prompt, {2})};
    g.ref_logprobs = g.old_logprobs;
    const auto stats = update_policy(params, {g}, cfg);
    CHECK(stats.degenerate_groups == 1);
    for (std::size_t i = 0; i < before.size(); ++i) CHECK(params.theta[i] == before[i]);
}

TEST_CASE("response group validation rejects inconsistent shapes") {
    ResponseGroup g;
    g.prompt_id = "p";
    g.prompt = {0};
    g.responses = {{1}, {2}};
    g.rewards = {1.0};  // wrong length
    g.old_logprobs = {{-1.0}, {-1.0}};
    g.ref_logprobs = {{-1.0}, {-1.0}};
    CHECK_THROWS_AS(g.validate(), std::invalid_argument);

    g.rewards = {1.0, 0.0};
    g.old_logprobs = {{-1.0}, {-1.0, -2.0}};  // length mismatch with response
    CHECK_THROWS_AS(g.validate(), std::invalid_argument);

    g.old_logprobs = {{-1.0}, {-1.0}};
    CHECK_NOTHROW(g.validate());

    g.responses = {{1}};
    g.rewards = {1.0};
    g.old_logprobs = {{-1.0}};
    g.ref_logprobs = {{-1.0}};
    CHECK_THROWS_AS(g.validate(), std::invalid_argument);  // fewer than two responses
}
