#pragma once

#include <array>
#include <cstdint>
#include <string>

#include <json.hpp>

#include "ladder/grpo.hpp"
#include "ladder/scene.hpp"
#include "ladder/self_improve.hpp"

namespace ladder {

struct SftSettings {
    std::int64_t steps = 2500;
    double learning_rate = 0.1;
    std::int64_t batch_size = 8;
};

// Warm-start phase: supervised steps on grammar-valid but content-random
// targets, standing in for a pretrained base model. Identical across the
// RL and SFT pipelines for a given seed, so comparisons start equal.
struct BootstrapSettings {
    std::int64_t steps = 2000;
    double learning_rate = 0.3;
    std::int64_t batch_size = 8;
};

struct PolicySettings {
    int embed_dim = 8;
    int hidden_dim = 24;
    int context_k = 4;
    int max_len = 48;
    // Parameter init scale for the warm start. Zero parameters are a saddle
    // (h = 0 blocks every gradient except the output bias), so training
    // starts from small random values.
    double init_scale = 0.3;
};

struct WorldSettings {
    int grid = 8;
    int held_out_grid = 12;
    int min_objects = 2;
    int max_objects = 5;
    int max_distinct_categories = 3;
};

struct DataSettings {
    std::int64_t train_per_cell = 1000;  // per (stage, kind) training pool size
    std::int64_t eval_per_kind = 1000;   // open-ended eval tasks per kind and split
};

struct SelfImproveSettings {
    int candidates_per_task = 4;
    std::int64_t task_count = 200;  // tasks drawn from the train pool for sampling
    int sft_steps = 50;
    double learning_rate = 2e-7;
    double temperature = 1.0;
};

struct RunConfig {
    std::uint64_t seed = 1;
    std::array<std::int64_t, 3> stage_budgets{834, 833, 833};
    GrpoConfig grpo;
    std::int64_t batch_size = 4;  // prompts per RL step
    double temperature = 1.0;     // rollout temperature
    double tau = 0.5;             // detection matching threshold
    double judge_threshold = 85.0;
    BootstrapSettings bootstrap;
    SftSettings sft;
    SelfImproveSettings self_improve;
    PolicySettings policy;
    WorldSettings world;
    DataSettings data;
    std::int64_t eval_every = 50;       // metrics eval-probe cadence
    std::int64_t eval_probe_tasks = 60; // probe subset size per split
    std::string output_dir = "out";

    void validate() const;
    PolicyConfig policy_config() const;
    GeneratorConfig world_config(bool held_out) const;
};

nlohmann::json config_to_json(const RunConfig& cfg);
// Rejects unknown keys at every level; missing keys keep their defaults.
RunConfig config_from_json(const nlohmann::json& j);

RunConfig load_config_file(const std::string& path);

// FNV-1a over the canonical JSON dump; stable across runs of one build.
std::string config_hash(const RunConfig& cfg);

}  // namespace ladder
