#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "ladder/judge.hpp"
#include "ladder/policy.hpp"
#include "ladder/task.hpp"

namespace ladder {

enum class DomainTag : int { math_text = 0, science = 1, multimodal_math = 2, general = 3 };

std::string_view domain_tag_name(DomainTag tag);
DomainTag domain_tag_from_name(std::string_view name);

// math over a text-only scene -> math_text; math over objects ->
// multimodal_math; everything else -> general. (science is reserved for
// external datasets.)
DomainTag domain_for_task(const TaskInstance& task);

struct CuratedSample {
    CandidateSample candidate;  // judge_score always present here
    DomainTag domain = DomainTag::general;
};

struct CuratedDataset {
    std::vector<CuratedSample> samples;
    std::string judge_name;
    double threshold = 85.0;
    std::uint64_t seed = 0;
};

// k rollouts per task at the given temperature, ids "<task-id>#k<i>".
// Candidates come out in task order, then sample order.
std::vector<CandidateSample> sample_candidates(const PolicyParams& params,
                                               const std::vector<TaskInstance>& tasks, int k,
                                               double temperature, std::mt19937_64& rng);

// Fills judge_score for every candidate, in order.
void judge_candidates(std::vector<CandidateSample>& candidates,
                      const std::vector<TaskInstance>& tasks, const Judge& judge);

// Keeps judged candidates with score >= threshold and deduplicates identical
// (prompt, response) pairs, keeping the first occurrence.
CuratedDataset filter_accepted(const std::vector<CandidateSample>& candidates,
                               const std::vector<TaskInstance>& tasks, double threshold,
                               const std::string& judge_name, std::uint64_t seed);

nlohmann::json curated_sample_to_json(const CuratedSample& sample);
CuratedSample curated_sample_from_json(const nlohmann::json& j);
nlohmann::json provenance_json(const CuratedDataset& dataset);

struct SftExample {
    TokenSequence prompt;
    TokenSequence target;
};

// Mean over examples of the summed token cross-entropy of the target given
// the prompt, with its exact gradient.
struct SftLossResult {
    double loss = 0.0;
    std::vector<double> grad;
};
SftLossResult sft_loss(const PolicyParams& params, const std::vector<SftExample>& examples);

// One gradient-descent step; returns the pre-step loss.
double sft_step(PolicyParams& params, const std::vector<SftExample>& examples, double lr);

struct SelfImproveConfig {
    int candidates_per_task = 4;
    double temperature = 1.0;
    double judge_threshold = 85.0;
    int sft_steps = 50;
    double learning_rate = 2e-7;
    double tau = 0.5;
};

struct SelfImproveReport {
    std::size_t candidate_count = 0;
    std::size_t accepted_count = 0;
    double acceptance_rate = 0.0;
    std::vector<double> loss_curve;  // pre-step loss per SFT step
    bool no_accepted = false;        // nothing passed the judge; params untouched
};

// sample -> judge -> filter -> SFT on the accepted responses. With an empty
// curated set the update is a warning-flagged no-op.
SelfImproveReport self_improve(PolicyParams& params, const std::vector<TaskInstance>& tasks,
                               const SelfImproveConfig& cfg, const Judge& judge,
                               std::mt19937_64& rng, CuratedDataset* out_dataset = nullptr);

}  // namespace ladder
