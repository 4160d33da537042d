#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "ladder/policy.hpp"

namespace ladder {

struct GrpoConfig {
    int group_size = 8;
    double clip_epsilon = 0.2;
    double kl_coefficient = 0.04;
    double learning_rate = 0.15;
    double std_epsilon = 1e-8;

    void validate() const;
};

// One prompt's sampled responses with the rewards and logprobs needed for a
// policy update. old = sampling policy, ref = frozen reference policy.
struct ResponseGroup {
    std::string prompt_id;
    TokenSequence prompt;
    double temperature = 1.0;  // sampling temperature the logprobs were taken at
    std::vector<TokenSequence> responses;
    std::vector<double> rewards;
    std::vector<std::vector<double>> old_logprobs;
    std::vector<std::vector<double>> ref_logprobs;

    void validate() const;  // >= 2 non-empty responses, aligned arrays
};

// Invariants: when not degenerate, mean 0 and population std 1 within 1e-9;
// when degenerate (zero-variance group), all entries 0.
struct AdvantageVector {
    std::vector<double> a;
    bool degenerate = false;
};

// Group z-scores with population std; groups whose std falls below
// std_epsilon are flagged degenerate and contribute zero advantage.
AdvantageVector normalize_advantages(const std::vector<double>& rewards, double std_epsilon);

struct GrpoLossResult {
    double loss = 0.0;           // clipped surrogate + kl_coefficient * KL
    double mean_kl = 0.0;        // per-response token-mean KL estimator, averaged
    double clip_fraction = 0.0;  // fraction of tokens where the clip bound binds
    std::size_t token_count = 0;
    std::vector<std::vector<double>> dloss_dnew;  // aligned with new_logprobs
};

// Clipped group-relative surrogate with a per-token probability ratio
// exp(new - old), advantages broadcast across each response's tokens, plus
// the KL estimator exp(ref - new) - (ref - new) - 1 against the reference.
// Token terms are averaged within each response, then across responses.
// Accepts any group size >= 1 so reductions can be tested in isolation.
GrpoLossResult grpo_loss(const ResponseGroup& group, const AdvantageVector& advantages,
                         const std::vector<std::vector<double>>& new_logprobs,
                         const GrpoConfig& cfg);

struct PolicyUpdateStats {
    double loss = 0.0;
    double mean_reward = 0.0;
    double mean_abs_advantage = 0.0;
    double mean_kl = 0.0;
    double clip_fraction = 0.0;
    int degenerate_groups = 0;
};

// One gradient-descent step on the mean grpo_loss over the batch; groups are
// processed in the given order for deterministic reduction.
PolicyUpdateStats update_policy(PolicyParams& params, const std::vector<ResponseGroup>& groups,
                                const GrpoConfig& cfg);

}  // namespace ladder
