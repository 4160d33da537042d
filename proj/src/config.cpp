#include "ladder/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "ladder/rng.hpp"

namespace ladder {
namespace {

void check_keys(const nlohmann::json& j, const char* where,
                std::initializer_list<const char*> allowed) {
    if (!j.is_object()) {
        throw std::invalid_argument(std::string("config: ") + where + " must be an object");
    }
    for (const auto& [key, value] : j.items()) {
        (void)value;
        bool ok = false;
        for (const char* a : allowed) ok = ok || key == a;
        if (!ok) {
            throw std::invalid_argument(std::string("config: unknown key '") + key + "' in " +
                                        where);
        }
    }
}

template <class T>
void read(const nlohmann::json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

void RunConfig::validate() const {
    for (std::int64_t b : stage_budgets) {
        if (b <= 0) throw std::invalid_argument("config: stage budgets must be positive");
    }
    grpo.validate();
    if (batch_size < 1) throw std::invalid_argument("config: batch_size < 1");
    if (!(temperature > 0.0)) throw std::invalid_argument("config: temperature <= 0");
    if (!(tau >= 0.0 && tau < 1.0)) throw std::invalid_argument("config: tau outside [0,1)");
    if (!(judge_threshold >= 0.0 && judge_threshold <= 100.0)) {
        throw std::invalid_argument("config: judge_threshold outside [0,100]");
    }
    if (bootstrap.steps < 0 || sft.steps < 0) {
        throw std::invalid_argument("config: negative step counts");
    }
    if (bootstrap.batch_size < 1 || sft.batch_size < 1) {
        throw std::invalid_argument("config: supervised batch sizes must be positive");
    }
    if (self_improve.candidates_per_task < 1 || self_improve.task_count < 1 ||
        self_improve.sft_steps < 0 || !(self_improve.temperature > 0.0)) {
        throw std::invalid_argument("config: bad self_improve settings");
    }
    if (data.train_per_cell < 1 || data.eval_per_kind < 1) {
        throw std::invalid_argument("config: dataset sizes must be positive");
    }
    if (eval_every < 1 || eval_probe_tasks < 1) {
        throw std::invalid_argument("config: eval cadence must be positive");
    }
    if (output_dir.empty()) throw std::invalid_argument("config: empty output_dir");
    if (!(policy.init_scale > 0.0)) throw std::invalid_argument("config: init_scale <= 0");
    policy_config().validate();
    world_config(false).validate();
    world_config(true).validate();
}

PolicyConfig RunConfig::policy_config() const {
    PolicyConfig cfg = PolicyConfig::for_vocab();
    cfg.embed_dim = policy.embed_dim;
    cfg.hidden_dim = policy.hidden_dim;
    cfg.context_k = policy.context_k;
    cfg.max_len = policy.max_len;
    return cfg;
}

GeneratorConfig RunConfig::world_config(bool held_out) const {
    GeneratorConfig cfg;
    const int grid = held_out ? world.held_out_grid : world.grid;
    cfg.grid_width = cfg.grid_height = grid;
    // Held-out scenes keep the training object density, so the larger grid
    // carries proportionally more objects and the count distribution shifts
    // along with the attribute combinations. validate() caps the scaled
    // counts against the number vocabulary.
    const double scale =
        static_cast<double>(grid) * grid / (static_cast<double>(world.grid) * world.grid);
    cfg.min_objects = static_cast<int>(std::lround(world.min_objects * scale));
    cfg.max_objects = static_cast<int>(std::lround(world.max_objects * scale));
    cfg.max_distinct_categories = world.max_distinct_categories;
    cfg.held_out = held_out;
    return cfg;
}

nlohmann::json config_to_json(const RunConfig& cfg) {
    return {
        {"seed", cfg.seed},
        {"stage_budgets", cfg.stage_budgets},
        {"grpo",
         {{"group_size", cfg.grpo.group_size},
          {"clip_epsilon", cfg.grpo.clip_epsilon},
          {"kl_coefficient", cfg.grpo.kl_coefficient},
          {"learning_rate", cfg.grpo.learning_rate},
          {"std_epsilon", cfg.grpo.std_epsilon}}},
        {"batch_size", cfg.batch_size},
        {"temperature", cfg.temperature},
        {"tau", cfg.tau},
        {"judge_threshold", cfg.judge_threshold},
        {"bootstrap",
         {{"steps", cfg.bootstrap.steps},
          {"learning_rate", cfg.bootstrap.learning_rate},
          {"batch_size", cfg.bootstrap.batch_size}}},
        {"sft",
         {{"steps", cfg.sft.steps},
          {"learning_rate", cfg.sft.learning_rate},
          {"batch_size", cfg.sft.batch_size}}},
        {"self_improve",
         {{"candidates_per_task", cfg.self_improve.candidates_per_task},
          {"task_count", cfg.self_improve.task_count},
          {"sft_steps", cfg.self_improve.sft_steps},
          {"learning_rate", cfg.self_improve.learning_rate},
          {"temperature", cfg.self_improve.temperature}}},
        {"policy",
         {{"embed_dim", cfg.policy.embed_dim},
          {"hidden_dim", cfg.policy.hidden_dim},
          {"context_k", cfg.policy.context_k},
          {"max_len", cfg.policy.max_len},
          {"init_scale", cfg.policy.init_scale}}},
        {"world",
         {{"grid", cfg.world.grid},
          {"held_out_grid", cfg.world.held_out_grid},
          {"min_objects", cfg.world.min_objects},
          {"max_objects", cfg.world.max_objects},
          {"max_distinct_categories", cfg.world.max_distinct_categories}}},
        {"data",
         {{"train_per_cell", cfg.data.train_per_cell},
          {"eval_per_kind", cfg.data.eval_per_kind}}},
        {"eval_every", cfg.eval_every},
        {"eval_probe_tasks", cfg.eval_probe_tasks},
        {"output_dir", cfg.output_dir},
    };
}

RunConfig config_from_json(const nlohmann::json& j) {
    check_keys(j, "root",
               {"seed", "stage_budgets", "grpo", "batch_size", "temperature", "tau",
                "judge_threshold", "bootstrap", "sft", "self_improve", "policy", "world",
                "data", "eval_every", "eval_probe_tasks", "output_dir"});
    RunConfig cfg;
    read(j, "seed", cfg.seed);
    read(j, "stage_budgets", cfg.stage_budgets);
    if (j.contains("grpo")) {
        const auto& g = j.at("grpo");
        check_keys(g, "grpo",
                   {"group_size", "clip_epsilon", "kl_coefficient", "learning_rate",
                    "std_epsilon"});
        read(g, "group_size", cfg.grpo.group_size);
        read(g, "clip_epsilon", cfg.grpo.clip_epsilon);
        read(g, "kl_coefficient", cfg.grpo.kl_coefficient);
        read(g, "learning_rate", cfg.grpo.learning_rate);
        read(g, "std_epsilon", cfg.grpo.std_epsilon);
    }
    read(j, "batch_size", cfg.batch_size);
    read(j, "temperature", cfg.temperature);
    read(j, "tau", cfg.tau);
    read(j, "judge_threshold", cfg.judge_threshold);
    if (j.contains("bootstrap")) {
        const auto& b = j.at("bootstrap");
        check_keys(b, "bootstrap", {"steps", "learning_rate", "batch_size"});
        read(b, "steps", cfg.bootstrap.steps);
        read(b, "learning_rate", cfg.bootstrap.learning_rate);
        read(b, "batch_size", cfg.bootstrap.batch_size);
    }
    if (j.contains("sft")) {
        const auto& s = j.at("sft");
        check_keys(s, "sft", {"steps", "learning_rate", "batch_size"});
        read(s, "steps", cfg.sft.steps);
        read(s, "learning_rate", cfg.sft.learning_rate);
        read(s, "batch_size", cfg.sft.batch_size);
    }
    if (j.contains("self_improve")) {
        const auto& s = j.at("self_improve");
        check_keys(s, "self_improve",
                   {"candidates_per_task", "task_count", "sft_steps", "learning_rate",
                    "temperature"});
        read(s, "candidates_per_task", cfg.self_improve.candidates_per_task);
        read(s, "task_count", cfg.self_improve.task_count);
        read(s, "sft_steps", cfg.self_improve.sft_steps);
        read(s, "learning_rate", cfg.self_improve.learning_rate);
        read(s, "temperature", cfg.self_improve.temperature);
    }
    if (j.contains("policy")) {
        const auto& p = j.at("policy");
        check_keys(p, "policy", {"embed_dim", "hidden_dim", "context_k", "max_len", "init_scale"});
        read(p, "embed_dim", cfg.policy.embed_dim);
        read(p, "hidden_dim", cfg.policy.hidden_dim);
        read(p, "context_k", cfg.policy.context_k);
        read(p, "max_len", cfg.policy.max_len);
        read(p, "init_scale", cfg.policy.init_scale);
    }
    if (j.contains("world")) {
        const auto& w = j.at("world");
        check_keys(w, "world",
                   {"grid", "held_out_grid", "min_objects", "max_objects",
                    "max_distinct_categories"});
        read(w, "grid", cfg.world.grid);
        read(w, "held_out_grid", cfg.world.held_out_grid);
        read(w, "min_objects", cfg.world.min_objects);
        read(w, "max_objects", cfg.world.max_objects);
        read(w, "max_distinct_categories", cfg.world.max_distinct_categories);
    }
    if (j.contains("data")) {
        const auto& d = j.at("data");
        check_keys(d, "data", {"train_per_cell", "eval_per_kind"});
        read(d, "train_per_cell", cfg.data.train_per_cell);
        read(d, "eval_per_kind", cfg.data.eval_per_kind);
    }
    read(j, "eval_every", cfg.eval_every);
    read(j, "eval_probe_tasks", cfg.eval_probe_tasks);
    read(j, "output_dir", cfg.output_dir);
    cfg.validate();
    return cfg;
}

RunConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("config: cannot open " + path);
    nlohmann::json j;
    in >> j;
    return config_from_json(j);
}

std::string config_hash(const RunConfig& cfg) {
    const std::string dump = config_to_json(cfg).dump();
    const std::uint64_t h = fnv1a64(dump);
    std::ostringstream out;
    out << std::hex << h;
    return out.str();
}

}  // namespace ladder
