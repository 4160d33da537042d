#include "ladder/trainer.hpp"

#include <algorithm>
#include <cstdio>
#include <random>
#include <stdexcept>
#include <string>

#include "ladder/curriculum.hpp"
#include "ladder/grpo.hpp"
#include "ladder/parse.hpp"
#include "ladder/rewards.hpp"
#include "ladder/rng.hpp"
#include "ladder/scene.hpp"
#include "ladder/self_improve.hpp"
#include "ladder/vocab.hpp"

namespace ladder {

namespace {

std::string padded_index(std::int64_t i) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%06lld", static_cast<long long>(i));
    return buf;
}

std::vector<TaskInstance> merged_pool(const DatasetBundle& data) {
    std::vector<TaskInstance> merged;
    std::size_t total = 0;
    for (const auto& pool : data.train_by_stage) total += pool.size();
    merged.reserve(total);
    for (const auto& pool : data.train_by_stage)
        merged.insert(merged.end(), pool.begin(), pool.end());
    if (merged.empty()) throw std::invalid_argument("merged_pool: no training tasks");
    return merged;
}

// Grammar-valid answer with content drawn independently of the task, so the
// warm start teaches format without leaking ground truth.
AnswerValue random_content_answer(StageId stage, TaskKind kind, std::mt19937_64& rng) {
    const Vocabulary& v = vocab();
    if (stage == StageId::binary_decision) {
        return BinaryAnswer{std::uniform_int_distribution<int>(0, 1)(rng) == 1};
    }
    if (stage == StageId::multiple_choice) {
        if (kind == TaskKind::classification) {
            int mask = std::uniform_int_distribution<int>(1, 15)(rng);
            MultiChoiceAnswer a;
            for (int bit = 0; bit < 4; ++bit)
                if (mask & (1 << bit)) a.options.insert(static_cast<char>('A' + bit));
            return a;
        }
        return SingleChoiceAnswer{
            static_cast<char>('A' + std::uniform_int_distribution<int>(0, 3)(rng))};
    }
    switch (kind) {
        case TaskKind::detection: {
            BoxListAnswer a;
            const int n = std::uniform_int_distribution<int>(1, 3)(rng);
            const int hi = v.max_number() - 1;
            for (int i = 0; i < n; ++i) {
                BoundingBox box;
                box.x_min = std::uniform_int_distribution<int>(0, hi)(rng);
                box.y_min = std::uniform_int_distribution<int>(0, hi)(rng);
                box.x_max = box.x_min + 1;
                box.y_max = box.y_min + 1;
                a.boxes.push_back(box);
            }
            return a;
        }
        case TaskKind::classification: {
            const auto& shapes = v.shapes();
            const auto& colors = v.colors();
            CategorySetAnswer a;
            const int n = std::uniform_int_distribution<int>(1, 3)(rng);
            while (static_cast<int>(a.labels.size()) < n) {
                std::size_t si =
                    std::uniform_int_distribution<std::size_t>(0, shapes.size() - 1)(rng);
                std::size_t ci =
                    std::uniform_int_distribution<std::size_t>(0, colors.size() - 1)(rng);
                a.labels.insert(colors[ci] + " " + shapes[si]);
            }
            return a;
        }
        case TaskKind::math:
            return NumericAnswer{Rational(std::uniform_int_distribution<int>(0, v.max_number())(rng))};
    }
    throw std::logic_error("random_content_answer: unknown kind");
}

struct ProbeState {
    const std::vector<TaskInstance>* eval_in;
    const std::vector<TaskInstance>* eval_held;
    std::int64_t probe_n;
    double tau;
    double acc_in = 0.0;
    double acc_held = 0.0;

    static std::vector<TaskInstance> prefix(const std::vector<TaskInstance>& tasks,
                                            std::int64_t n) {
        const std::size_t take = std::min<std::size_t>(tasks.size(), static_cast<std::size_t>(n));
        return {tasks.begin(), tasks.begin() + static_cast<std::ptrdiff_t>(take)};
    }

    void refresh(const PolicyParams& params) {
        acc_in = evaluate(params, prefix(*eval_in, probe_n), tau).overall;
        acc_held = evaluate(params, prefix(*eval_held, probe_n), tau).overall;
    }
};

}  // namespace

DatasetBundle generate_datasets(const RunConfig& cfg) {
    cfg.validate();
    DatasetBundle out;
    const GeneratorConfig in_world = cfg.world_config(false);
    const GeneratorConfig held_world = cfg.world_config(true);

    for (StageId stage : kAllStages) {
        auto& pool = out.train_by_stage[static_cast<std::size_t>(stage)];
        pool.reserve(static_cast<std::size_t>(cfg.data.train_per_cell) * kAllKinds.size());
        for (TaskKind kind : kAllKinds) {
            auto rng = make_rng(cfg.seed, "data-train",
                                static_cast<std::uint64_t>(stage) * 3 +
                                    static_cast<std::uint64_t>(kind));
            for (std::int64_t i = 0; i < cfg.data.train_per_cell; ++i) {
                TaskInstance t = make_task(stage, kind, in_world, rng);
                t.id = "train-" + std::string(stage_name(stage)) + "-" +
                       std::string(kind_name(kind)) + "-" + padded_index(i);
                pool.push_back(std::move(t));
            }
        }
    }

    // Eval tasks are all visual, including math (object counting): the
    // held-out shift lives in the scenes, and text arithmetic would transfer
    // identically across splits and wash the comparison out.
    const auto fill_eval = [&](std::vector<TaskInstance>& dst, const GeneratorConfig& world,
                               const char* purpose, const char* split) {
        dst.reserve(static_cast<std::size_t>(cfg.data.eval_per_kind) * kAllKinds.size());
        for (TaskKind kind : kAllKinds) {
            auto rng = make_rng(cfg.seed, purpose, static_cast<std::uint64_t>(kind));
            for (std::int64_t i = 0; i < cfg.data.eval_per_kind; ++i) {
                const SceneSpec scene = generate_scene(world, rng);
                TaskInstance t = render_task(scene, StageId::open_ended, kind, rng);
                t.id = std::string(split) + "-" + std::string(kind_name(kind)) + "-" +
                       padded_index(i);
                dst.push_back(std::move(t));
            }
        }
    };
    fill_eval(out.eval_in, in_world, "data-eval-in", "eval-in");
    fill_eval(out.eval_held, held_world, "data-eval-held", "eval-held");
    return out;
}

EvalReport evaluate(const PolicyParams& params, const std::vector<TaskInstance>& tasks,
                    double tau) {
    EvalReport report;
    std::map<std::string, int> correct_by_kind;
    for (const TaskInstance& task : tasks) {
        const TokenSequence decoded = greedy_decode(params, task.prompt_tokens);
        const RewardBreakdown b = score(vocab().detokenize(decoded), task, tau);
        const bool correct = b.accuracy == 1.0;
        const std::string kind{kind_name(task.kind)};
        report.per_kind_count[kind] += 1;
        if (correct) correct_by_kind[kind] += 1;
        report.n += 1;
        if (correct) report.overall += 1.0;
    }
    if (report.n > 0) report.overall /= report.n;
    for (const auto& [kind, count] : report.per_kind_count)
        report.per_kind[kind] = static_cast<double>(correct_by_kind[kind]) / count;
    return report;
}

PolicyParams bootstrap_policy(const RunConfig& cfg, const DatasetBundle& data) {
    auto init_rng = make_rng(cfg.seed, "init");
    PolicyParams params =
        PolicyParams::random_init(cfg.policy_config(), cfg.policy.init_scale, init_rng);
    const std::vector<TaskInstance> pool = merged_pool(data);
    auto rng = make_rng(cfg.seed, "bootstrap");
    std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
    for (std::int64_t step = 0; step < cfg.bootstrap.steps; ++step) {
        std::vector<SftExample> batch;
        batch.reserve(static_cast<std::size_t>(cfg.bootstrap.batch_size));
        for (std::int64_t b = 0; b < cfg.bootstrap.batch_size; ++b) {
            const TaskInstance& task = pool[pick(rng)];
            SftExample ex;
            ex.prompt = task.prompt_tokens;
            ex.target = render_answer_tokens(random_content_answer(task.stage, task.kind, rng));
            batch.push_back(std::move(ex));
        }
        sft_step(params, batch, cfg.bootstrap.learning_rate);
    }
    return params;
}

TrainResult train_rl(const RunConfig& cfg, RlMode mode, const DatasetBundle& data) {
    cfg.validate();
    const CurriculumSchedule schedule{cfg.stage_budgets};
    schedule.validate();

    std::array<std::vector<TaskInstance>, 3> pools;
    if (mode == RlMode::curriculum) {
        pools = data.train_by_stage;
    } else {
        const std::vector<TaskInstance> merged = merged_pool(data);
        pools = {merged, merged, merged};
    }
    for (const auto& pool : pools)
        if (pool.empty()) throw std::invalid_argument("train_rl: empty task pool");

    TrainResult result{bootstrap_policy(cfg, data), {}, {}, {}};
    PolicyParams& params = result.params;
    const PolicyParams ref = params;  // frozen reference for the KL term

    ProbeState probe{&data.eval_in, &data.eval_held, cfg.eval_probe_tasks, cfg.tau};
    probe.refresh(params);

    WindowedStd reward_w(100);
    WindowedStd open_w(100);
    const std::int64_t total = schedule.total_steps();
    result.metrics.reserve(static_cast<std::size_t>(total));

    for (std::int64_t step = 0; step < total; ++step) {
        auto batch_rng = make_rng(cfg.seed, "rl-batch", static_cast<std::uint64_t>(step));
        const std::vector<TaskInstance> batch = next_batch(
            schedule, step, pools, static_cast<std::size_t>(cfg.batch_size), batch_rng);

        std::vector<ResponseGroup> groups;
        groups.reserve(batch.size());
        double open_reward_sum = 0.0;
        std::int64_t open_reward_count = 0;
        for (std::size_t b = 0; b < batch.size(); ++b) {
            const TaskInstance& task = batch[b];
            auto roll_rng = make_rng(cfg.seed, "rollout",
                                     static_cast<std::uint64_t>(step) * 65536 + b);
            auto samples = sample_responses(params, task.prompt_tokens, cfg.grpo.group_size,
                                            cfg.temperature, roll_rng);
            ResponseGroup group;
            group.prompt_id = task.id + "#s" + std::to_string(step) + "b" + std::to_string(b);
            group.prompt = task.prompt_tokens;
            group.temperature = cfg.temperature;
            for (auto& sample : samples) {
                const RewardBreakdown rb =
                    score(vocab().detokenize(sample.tokens), task, cfg.tau);
                if (task.stage == StageId::open_ended) {
                    open_reward_sum += rb.total;
                    open_reward_count += 1;
                }
                group.rewards.push_back(rb.total);
                group.ref_logprobs.push_back(logprob_of_sequence(
                    ref, task.prompt_tokens, sample.tokens, cfg.temperature));
                group.old_logprobs.push_back(std::move(sample.logprobs));
                group.responses.push_back(std::move(sample.tokens));
            }
            groups.push_back(std::move(group));
        }

        const PolicyUpdateStats stats = update_policy(params, groups, cfg.grpo);

        if ((step + 1) % cfg.eval_every == 0) probe.refresh(params);

        reward_w.push(step, stats.mean_reward);
        if (open_reward_count > 0)
            open_w.push(step, open_reward_sum / static_cast<double>(open_reward_count));

        MetricsRow row;
        row.step = step;
        row.stage = mode == RlMode::flat ? "mixed" : std::string(stage_name(stage_for_step(schedule, step)));
        row.mean_reward = stats.mean_reward;
        row.reward_std_w = reward_w.value(step);
        row.reward_std_open_w = open_w.value(step);
        row.loss = stats.loss;
        row.kl = stats.mean_kl;
        row.clip_fraction = stats.clip_fraction;
        row.eval_acc_in = probe.acc_in;
        row.eval_acc_held = probe.acc_held;
        result.metrics.push_back(std::move(row));
    }

    result.final_eval_in = evaluate(params, data.eval_in, cfg.tau);
    result.final_eval_held = evaluate(params, data.eval_held, cfg.tau);
    return result;
}

TrainResult train_sft_baseline(const RunConfig& cfg, const DatasetBundle& data) {
    cfg.validate();
    const std::vector<TaskInstance> pool = merged_pool(data);

    TrainResult result{bootstrap_policy(cfg, data), {}, {}, {}};
    PolicyParams& params = result.params;

    ProbeState probe{&data.eval_in, &data.eval_held, cfg.eval_probe_tasks, cfg.tau};
    probe.refresh(params);

    result.metrics.reserve(static_cast<std::size_t>(cfg.sft.steps));
    for (std::int64_t step = 0; step < cfg.sft.steps; ++step) {
        auto rng = make_rng(cfg.seed, "sft-batch", static_cast<std::uint64_t>(step));
        std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
        std::vector<SftExample> batch;
        batch.reserve(static_cast<std::size_t>(cfg.sft.batch_size));
        for (std::int64_t b = 0; b < cfg.sft.batch_size; ++b) {
            const TaskInstance& task = pool[pick(rng)];
            batch.push_back({task.prompt_tokens, render_answer_tokens(task.answer.value)});
        }
        const double loss = sft_step(params, batch, cfg.sft.learning_rate);

        if ((step + 1) % cfg.eval_every == 0) probe.refresh(params);

        MetricsRow row;
        row.step = step;
        row.stage = "sft";
        row.loss = loss;
        row.eval_acc_in = probe.acc_in;
        row.eval_acc_held = probe.acc_held;
        result.metrics.push_back(std::move(row));
    }

    result.final_eval_in = evaluate(params, data.eval_in, cfg.tau);
    result.final_eval_held = evaluate(params, data.eval_held, cfg.tau);
    return result;
}

}  // namespace ladder
