#include "ladder/self_improve.hpp"

#include <map>
#include <set>
#include <stdexcept>

#include "ladder/kernels.hpp"

namespace ladder {

std::string_view domain_tag_name(DomainTag tag) {
    switch (tag) {
        case DomainTag::math_text: return "math-text";
        case DomainTag::science: return "science";
        case DomainTag::multimodal_math: return "multimodal-math";
        case DomainTag::general: return "general";
    }
    throw std::invalid_argument("domain_tag_name: bad tag");
}

DomainTag domain_tag_from_name(std::string_view name) {
    if (name == "math-text") return DomainTag::math_text;
    if (name == "science") return DomainTag::science;
    if (name == "multimodal-math") return DomainTag::multimodal_math;
    if (name == "general") return DomainTag::general;
    throw std::invalid_argument("domain_tag_from_name: unknown tag '" + std::string(name) + "'");
}

DomainTag domain_for_task(const TaskInstance& task) {
    if (task.kind == TaskKind::math) {
        return task.scene.text_only() ? DomainTag::math_text : DomainTag::multimodal_math;
    }
    return DomainTag::general;
}

namespace {

std::map<std::string, const TaskInstance*> index_tasks(const std::vector<TaskInstance>& tasks) {
    std::map<std::string, const TaskInstance*> byid;
    for (const TaskInstance& t : tasks) {
        if (!byid.emplace(t.id, &t).second) {
            throw std::invalid_argument("duplicate task id '" + t.id + "'");
        }
    }
    return byid;
}

const TaskInstance& task_for(const std::map<std::string, const TaskInstance*>& byid,
                             const std::string& task_id) {
    auto it = byid.find(task_id);
    if (it == byid.end()) {
        throw std::invalid_argument("candidate references unknown task '" + task_id + "'");
    }
    return *it->second;
}

}  // namespace

std::vector<CandidateSample> sample_candidates(const PolicyParams& params,
                                               const std::vector<TaskInstance>& tasks, int k,
                                               double temperature, std::mt19937_64& rng) {
    if (k < 1) throw std::invalid_argument("sample_candidates: k < 1");
    std::vector<CandidateSample> out;
    out.reserve(tasks.size() * static_cast<std::size_t>(k));
    for (const TaskInstance& task : tasks) {
        auto rollouts = sample_responses(params, task.prompt_tokens, k, temperature, rng);
        for (int i = 0; i < k; ++i) {
            CandidateSample cand;
            cand.candidate_id = task.id + "#k" + std::to_string(i);
            cand.task_id = task.id;
            cand.prompt = task.prompt_tokens;
            cand.response = std::move(rollouts[static_cast<std::size_t>(i)].tokens);
            out.push_back(std::move(cand));
        }
    }
    return out;
}

void judge_candidates(std::vector<CandidateSample>& candidates,
                      const std::vector<TaskInstance>& tasks, const Judge& judge) {
    const auto byid = index_tasks(tasks);
    for (CandidateSample& cand : candidates) {
        const double s = judge.score(cand, task_for(byid, cand.task_id));
        if (!(s >= 0.0 && s <= 100.0)) {
            throw std::runtime_error("judge '" + judge.name() + "' returned a score outside [0,100]");
        }
        cand.judge_score = s;
    }
}

CuratedDataset filter_accepted(const std::vector<CandidateSample>& candidates,
                               const std::vector<TaskInstance>& tasks, double threshold,
                               const std::string& judge_name, std::uint64_t seed) {
    const auto byid = index_tasks(tasks);
    CuratedDataset dataset;
    dataset.judge_name = judge_name;
    dataset.threshold = threshold;
    dataset.seed = seed;

    std::set<std::pair<TokenSequence, TokenSequence>> seen;
    for (const CandidateSample& cand : candidates) {
        if (!cand.judge_score) {
            throw std::invalid_argument("filter_accepted: unjudged candidate '" +
                                        cand.candidate_id + "'");
        }
        if (*cand.judge_score < threshold) continue;
        if (!seen.insert({cand.prompt, cand.response}).second) continue;
        CuratedSample sample;
        sample.candidate = cand;
        sample.domain = domain_for_task(task_for(byid, cand.task_id));
        dataset.samples.push_back(std::move(sample));
    }
    return dataset;
}

nlohmann::json curated_sample_to_json(const CuratedSample& sample) {
    return {{"candidate_id", sample.candidate.candidate_id},
            {"task_id", sample.candidate.task_id},
            {"prompt_tokens", sample.candidate.prompt},
            {"response_tokens", sample.candidate.response},
            {"response_text", vocab().detokenize(sample.candidate.response)},
            {"judge_score", *sample.candidate.judge_score},
            {"domain", std::string(domain_tag_name(sample.domain))}};
}

CuratedSample curated_sample_from_json(const nlohmann::json& j) {
    CuratedSample sample;
    sample.candidate.candidate_id = j.at("candidate_id").get<std::string>();
    sample.candidate.task_id = j.at("task_id").get<std::string>();
    sample.candidate.prompt = j.at("prompt_tokens").get<TokenSequence>();
    sample.candidate.response = j.at("response_tokens").get<TokenSequence>();
    sample.candidate.judge_score = j.at("judge_score").get<double>();
    sample.domain = domain_tag_from_name(j.at("domain").get<std::string>());
    return sample;
}

nlohmann::json provenance_json(const CuratedDataset& dataset) {
    std::map<std::string, std::size_t> by_domain;
    for (const CuratedSample& s : dataset.samples) {
        ++by_domain[std::string(domain_tag_name(s.domain))];
    }
    return {{"judge", dataset.judge_name},
            {"threshold", dataset.threshold},
            {"seed", dataset.seed},
            {"sample_count", dataset.samples.size()},
            {"samples_by_domain", by_domain}};
}

SftLossResult sft_loss(const PolicyParams& params, const std::vector<SftExample>& examples) {
    if (examples.empty()) throw std::invalid_argument("sft_loss: empty dataset");
    SftLossResult result;
    result.grad.assign(params.cfg.param_count(), 0.0);
    const double inv_n = 1.0 / static_cast<double>(examples.size());

    for (const SftExample& ex : examples) {
        if (ex.target.empty()) throw std::invalid_argument("sft_loss: empty target");
        const auto lps = logprob_of_sequence(params, ex.prompt, ex.target, 1.0);
        double total = 0.0;
        for (double lp : lps) total += lp;
        result.loss += -total * inv_n;
        // d loss / d logprob_t = -1/N for every target token.
        const std::vector<double> coeff(ex.target.size(), -inv_n);
        accumulate_sequence_grad(params, ex.prompt, ex.target, coeff, 1.0, result.grad);
    }
    return result;
}

double sft_step(PolicyParams& params, const std::vector<SftExample>& examples, double lr) {
    SftLossResult res = sft_loss(params, examples);
    kernels::active().axpy(-lr, res.grad.data(), params.theta.data(), params.theta.size());
    return res.loss;
}

SelfImproveReport self_improve(PolicyParams& params, const std::vector<TaskInstance>& tasks,
                               const SelfImproveConfig& cfg, const Judge& judge,
                               std::mt19937_64& rng, CuratedDataset* out_dataset) {
    if (tasks.empty()) throw std::invalid_argument("self_improve: no tasks");

    auto candidates =
        sample_candidates(params, tasks, cfg.candidates_per_task, cfg.temperature, rng);
    judge_candidates(candidates, tasks, judge);
    CuratedDataset dataset =
        filter_accepted(candidates, tasks, cfg.judge_threshold, judge.name(), 0);

    SelfImproveReport report;
    report.candidate_count = candidates.size();
    report.accepted_count = dataset.samples.size();
    report.acceptance_rate =
        candidates.empty() ? 0.0
                           : static_cast<double>(report.accepted_count) /
                                 static_cast<double>(report.candidate_count);

    if (dataset.samples.empty()) {
        report.no_accepted = true;
        if (out_dataset) *out_dataset = std::move(dataset);
        return report;  // no-op update
    }

    std::vector<SftExample> examples;
    examples.reserve(dataset.samples.size());
    for (const CuratedSample& s : dataset.samples) {
        examples.push_back(SftExample{s.candidate.prompt, s.candidate.response});
    }
    for (int step = 0; step < cfg.sft_steps; ++step) {
        report.loss_curve.push_back(sft_step(params, examples, cfg.learning_rate));
    }

    if (out_dataset) *out_dataset = std::move(dataset);
    return report;
}

}  // namespace ladder
