#include "ladder/grpo.hpp"

#include <cmath>
#include <stdexcept>

#include "ladder/kernels.hpp"

namespace ladder {

void GrpoConfig::validate() const {
    if (group_size < 2) throw std::invalid_argument("GrpoConfig: group_size < 2");
    if (!(clip_epsilon > 0.0)) throw std::invalid_argument("GrpoConfig: clip_epsilon <= 0");
    if (kl_coefficient < 0.0) throw std::invalid_argument("GrpoConfig: kl_coefficient < 0");
    if (!(std_epsilon > 0.0)) throw std::invalid_argument("GrpoConfig: std_epsilon <= 0");
}

void ResponseGroup::validate() const {
    const std::size_t n = responses.size();
    if (n < 2) throw std::invalid_argument("ResponseGroup: fewer than two responses");
    if (rewards.size() != n || old_logprobs.size() != n || ref_logprobs.size() != n) {
        throw std::invalid_argument("ResponseGroup: misaligned arrays");
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (responses[i].empty()) throw std::invalid_argument("ResponseGroup: empty response");
        if (old_logprobs[i].size() != responses[i].size() ||
            ref_logprobs[i].size() != responses[i].size()) {
            throw std::invalid_argument("ResponseGroup: logprobs misaligned with tokens");
        }
    }
    if (!(temperature > 0.0)) throw std::invalid_argument("ResponseGroup: temperature <= 0");
}

AdvantageVector normalize_advantages(const std::vector<double>& rewards, double std_epsilon) {
    if (rewards.size() < 2) {
        throw std::invalid_argument("normalize_advantages: need at least two rewards");
    }
    if (!(std_epsilon > 0.0)) {
        throw std::invalid_argument("normalize_advantages: std_epsilon <= 0");
    }
    const double n = static_cast<double>(rewards.size());
    double mean = 0.0;
    for (double r : rewards) mean += r;
    mean /= n;
    double var = 0.0;
    for (double r : rewards) var += (r - mean) * (r - mean);
    var /= n;
    const double std = std::sqrt(var);

    AdvantageVector out;
    out.a.resize(rewards.size());
    if (std < std_epsilon) {
        out.degenerate = true;  // entries stay 0
        return out;
    }
    for (std::size_t i = 0; i < rewards.size(); ++i) out.a[i] = (rewards[i] - mean) / std;
    return out;
}

GrpoLossResult grpo_loss(const ResponseGroup& group, const AdvantageVector& advantages,
                         const std::vector<std::vector<double>>& new_logprobs,
                         const GrpoConfig& cfg) {
    const std::size_t n = group.responses.size();
    if (n == 0) throw std::invalid_argument("grpo_loss: empty group");
    if (advantages.a.size() != n || new_logprobs.size() != n ||
        group.old_logprobs.size() != n || group.ref_logprobs.size() != n) {
        throw std::invalid_argument("grpo_loss: misaligned arrays");
    }

    GrpoLossResult result;
    result.dloss_dnew.resize(n);
    const double eps = cfg.clip_epsilon;
    const double beta = cfg.kl_coefficient;
    const double inv_n = 1.0 / static_cast<double>(n);
    std::size_t clipped = 0;

    double surrogate_sum = 0.0;  // mean over tokens, summed over responses
    double kl_sum = 0.0;

    for (std::size_t i = 0; i < n; ++i) {
        const auto& old_lp = group.old_logprobs[i];
        const auto& ref_lp = group.ref_logprobs[i];
        const auto& new_lp = new_logprobs[i];
        const std::size_t len = old_lp.size();
        if (len == 0 || new_lp.size() != len || ref_lp.size() != len) {
            throw std::invalid_argument("grpo_loss: logprob lengths disagree");
        }

        const double a = advantages.a[i];
        const double inv_len = 1.0 / static_cast<double>(len);
        result.dloss_dnew[i].resize(len);
        double surr = 0.0, kl = 0.0;

        for (std::size_t t = 0; t < len; ++t) {
            if (!std::isfinite(new_lp[t]) || !std::isfinite(old_lp[t]) ||
                !std::isfinite(ref_lp[t])) {
                throw std::runtime_error("grpo_loss: non-finite logprob");
            }
            const double ratio = std::exp(new_lp[t] - old_lp[t]);
            const bool binds = (a > 0.0 && ratio > 1.0 + eps) || (a < 0.0 && ratio < 1.0 - eps);
            const double clipped_ratio = std::min(std::max(ratio, 1.0 - eps), 1.0 + eps);
            surr += std::min(ratio * a, clipped_ratio * a);
            if (binds) ++clipped;

            const double diff = ref_lp[t] - new_lp[t];
            kl += std::exp(diff) - diff - 1.0;

            // d/dnew of the token's loss share: the surrogate contributes
            // -ratio*a unless the clip bound is active, the KL estimator
            // contributes 1 - exp(ref - new).
            const double dsurr = binds ? 0.0 : ratio * a;
            result.dloss_dnew[i][t] =
                inv_n * inv_len * (-dsurr + beta * (1.0 - std::exp(diff)));
        }
        surrogate_sum += surr * inv_len;
        kl_sum += kl * inv_len;
        result.token_count += len;
    }

    result.mean_kl = kl_sum * inv_n;
    result.loss = -surrogate_sum * inv_n + beta * result.mean_kl;
    result.clip_fraction =
        result.token_count ? static_cast<double>(clipped) / static_cast<double>(result.token_count)
                           : 0.0;
    return result;
}

PolicyUpdateStats update_policy(PolicyParams& params, const std::vector<ResponseGroup>& groups,
                                const GrpoConfig& cfg) {
    cfg.validate();
    if (groups.empty()) throw std::invalid_argument("update_policy: no groups");

    PolicyUpdateStats stats;
    std::vector<double> grad(params.cfg.param_count(), 0.0);
    const double inv_b = 1.0 / static_cast<double>(groups.size());
    std::size_t response_count = 0;
    std::size_t token_total = 0;
    double clipped_total = 0.0;

    for (const ResponseGroup& group : groups) {
        group.validate();
        AdvantageVector adv = normalize_advantages(group.rewards, cfg.std_epsilon);
        if (adv.degenerate) ++stats.degenerate_groups;

        std::vector<std::vector<double>> new_lps(group.responses.size());
        for (std::size_t i = 0; i < group.responses.size(); ++i) {
            new_lps[i] = logprob_of_sequence(params, group.prompt, group.responses[i],
                                             group.temperature);
        }
        GrpoLossResult lr = grpo_loss(group, adv, new_lps, cfg);

        for (std::size_t i = 0; i < group.responses.size(); ++i) {
            for (double& c : lr.dloss_dnew[i]) c *= inv_b;
            accumulate_sequence_grad(params, group.prompt, group.responses[i],
                                     lr.dloss_dnew[i], group.temperature, grad);
        }

        stats.loss += lr.loss * inv_b;
        stats.mean_kl += lr.mean_kl * inv_b;
        clipped_total += lr.clip_fraction * static_cast<double>(lr.token_count);
        token_total += lr.token_count;
        for (std::size_t i = 0; i < group.rewards.size(); ++i) {
            stats.mean_reward += group.rewards[i];
            stats.mean_abs_advantage += std::abs(adv.a[i]);
            ++response_count;
        }
    }

    for (double v : grad) {
        if (!std::isfinite(v)) throw std::runtime_error("update_policy: non-finite gradient");
    }
    kernels::active().axpy(-cfg.learning_rate, grad.data(), params.theta.data(),
                           params.theta.size());

    stats.mean_reward /= static_cast<double>(response_count);
    stats.mean_abs_advantage /= static_cast<double>(response_count);
    stats.clip_fraction =
        token_total ? clipped_total / static_cast<double>(token_total) : 0.0;
    return stats;
}

}  // namespace ladder
