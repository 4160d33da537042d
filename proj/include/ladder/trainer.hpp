#pragma once

#include <array>
#include <map>
#include <string>
#include <vector>

#include "ladder/config.hpp"
#include "ladder/metrics.hpp"
#include "ladder/policy.hpp"
#include "ladder/task.hpp"

namespace ladder {

struct DatasetBundle {
    std::array<std::vector<TaskInstance>, 3> train_by_stage;  // kinds mixed within a stage
    std::vector<TaskInstance> eval_in;    // open-ended, training distribution
    std::vector<TaskInstance> eval_held;  // open-ended, reserved pairs + larger grid
};

// Deterministic in (seed, sizes); task ids encode split, stage, kind, index.
DatasetBundle generate_datasets(const RunConfig& cfg);

struct EvalReport {
    double overall = 0.0;
    std::map<std::string, double> per_kind;
    std::map<std::string, int> per_kind_count;
    int n = 0;
};

// Greedy decoding; a prediction counts as correct iff its accuracy component
// is exactly 1.
EvalReport evaluate(const PolicyParams& params, const std::vector<TaskInstance>& tasks,
                    double tau);

// Grammar warm start: small random init (zero is a saddle), then supervised
// steps toward well-formed but content-random targets, standing in for a
// pretrained base model. Shared by every pipeline so comparisons start from
// the same point.
PolicyParams bootstrap_policy(const RunConfig& cfg, const DatasetBundle& data);

enum class RlMode { curriculum, flat };

struct TrainResult {
    PolicyParams params;
    std::vector<MetricsRow> metrics;
    EvalReport final_eval_in;
    EvalReport final_eval_held;
};

// GRPO training against a frozen reference policy. curriculum walks the
// stage schedule over per-stage pools; flat draws every batch from the
// merged pool at matched step counts.
TrainResult train_rl(const RunConfig& cfg, RlMode mode, const DatasetBundle& data);

// Token cross-entropy on ground-truth renderings over the merged pool.
TrainResult train_sft_baseline(const RunConfig& cfg, const DatasetBundle& data);

}  // namespace ladder
