// Command-line harness: dataset generation, the three training pipelines,
// rejected-sampling self-improvement, checkpoint evaluation, and a reward
// inspector. All file outputs are written atomically; failures produce a
// machine-readable JSON object on stderr and a nonzero exit code.

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <iterator>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ladder/checkpoint.hpp"
#include "ladder/config.hpp"
#include "ladder/jsonl.hpp"
#include "ladder/judge.hpp"
#include "ladder/metrics.hpp"
#include "ladder/rewards.hpp"
#include "ladder/rng.hpp"
#include "ladder/self_improve.hpp"
#include "ladder/task.hpp"
#include "ladder/trainer.hpp"
#include "ladder/vocab.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct GlobalOpts {
    std::string config_path;
    std::string out_override;
    bool force = false;  // accept checkpoints whose config hash differs
};

ladder::RunConfig load_cfg(const GlobalOpts& g) {
    if (!g.config_path.empty()) return ladder::load_config_file(g.config_path);
    ladder::RunConfig cfg;
    cfg.validate();
    return cfg;
}

// Precedence: --out flag, then LADDER_OUT_DIR, then the config value.
fs::path resolve_out(const GlobalOpts& g, const ladder::RunConfig& cfg) {
    if (!g.out_override.empty()) return g.out_override;
    if (const char* env = std::getenv("LADDER_OUT_DIR"); env != nullptr && *env != '\0')
        return env;
    return cfg.output_dir;
}

json eval_to_json(const ladder::EvalReport& r) {
    json per_kind = json::object();
    for (const auto& [kind, acc] : r.per_kind) per_kind[kind] = acc;
    json counts = json::object();
    for (const auto& [kind, n] : r.per_kind_count) counts[kind] = n;
    return json{{"overall", r.overall},
                {"n", r.n},
                {"per_kind", per_kind},
                {"per_kind_count", counts}};
}

void write_json_atomic(const fs::path& path, const json& j) {
    ladder::write_text_atomic(path, j.dump(2) + "\n");
}

void emit(const json& j) { std::cout << j.dump() << "\n"; }

int cmd_gen_data(const GlobalOpts& g) {
    const ladder::RunConfig cfg = load_cfg(g);
    const fs::path out = resolve_out(g, cfg) / "data";
    const ladder::DatasetBundle bundle = ladder::generate_datasets(cfg);

    json counts = json::object();
    for (ladder::StageId stage : ladder::kAllStages) {
        const auto& pool = bundle.train_by_stage[static_cast<std::size_t>(stage)];
        const std::string name{ladder::stage_name(stage)};
        ladder::save_tasks_jsonl(out / ("train-" + name + ".jsonl"), pool);
        counts["train-" + name] = pool.size();
    }
    ladder::save_tasks_jsonl(out / "eval-in.jsonl", bundle.eval_in);
    ladder::save_tasks_jsonl(out / "eval-held.jsonl", bundle.eval_held);
    counts["eval-in"] = bundle.eval_in.size();
    counts["eval-held"] = bundle.eval_held.size();
    write_json_atomic(out / "config.json", ladder::config_to_json(cfg));

    emit(json{{"command", "gen-data"}, {"output_dir", out.string()}, {"counts", counts}});
    return 0;
}

enum class Pipeline { curriculum_rl, flat_rl, sft };

int cmd_train(const GlobalOpts& g, Pipeline pipeline) {
    const ladder::RunConfig cfg = load_cfg(g);
    const char* run_name = pipeline == Pipeline::curriculum_rl ? "curr-rl"
                           : pipeline == Pipeline::flat_rl     ? "flat-rl"
                                                               : "sft";
    const fs::path out = resolve_out(g, cfg) / run_name;
    const ladder::DatasetBundle bundle = ladder::generate_datasets(cfg);

    ladder::TrainResult result;
    switch (pipeline) {
        case Pipeline::curriculum_rl:
            result = ladder::train_rl(cfg, ladder::RlMode::curriculum, bundle);
            break;
        case Pipeline::flat_rl:
            result = ladder::train_rl(cfg, ladder::RlMode::flat, bundle);
            break;
        case Pipeline::sft:
            result = ladder::train_sft_baseline(cfg, bundle);
            break;
    }

    ladder::write_text_atomic(out / "metrics.csv", ladder::metrics_to_csv(result.metrics));
    ladder::save_checkpoint(out / "checkpoint.json", result.params, ladder::config_hash(cfg));
    write_json_atomic(out / "config.json", ladder::config_to_json(cfg));
    write_json_atomic(out / "eval.json", json{{"in", eval_to_json(result.final_eval_in)},
                                              {"held", eval_to_json(result.final_eval_held)}});

    emit(json{{"command", std::string("train-") + run_name},
              {"output_dir", out.string()},
              {"steps", result.metrics.size()},
              {"final_eval_in", result.final_eval_in.overall},
              {"final_eval_held", result.final_eval_held.overall}});
    return 0;
}

int cmd_self_improve(const GlobalOpts& g, std::string checkpoint_path,
                     const std::string& judge_file) {
    const ladder::RunConfig cfg = load_cfg(g);
    const fs::path out_root = resolve_out(g, cfg);
    const fs::path out = out_root / "self-improve";
    if (checkpoint_path.empty())
        checkpoint_path = (out_root / "curr-rl" / "checkpoint.json").string();

    ladder::PolicyParams params =
        ladder::load_checkpoint(checkpoint_path, ladder::config_hash(cfg), g.force);

    const ladder::DatasetBundle bundle = ladder::generate_datasets(cfg);
    std::vector<ladder::TaskInstance> pool;
    for (const auto& stage_pool : bundle.train_by_stage)
        pool.insert(pool.end(), stage_pool.begin(), stage_pool.end());

    auto task_rng = ladder::make_rng(cfg.seed, "self-improve-tasks");
    std::vector<ladder::TaskInstance> tasks;
    std::sample(pool.begin(), pool.end(), std::back_inserter(tasks),
                static_cast<std::size_t>(cfg.self_improve.task_count), task_rng);

    ladder::SelfImproveConfig si;
    si.candidates_per_task = cfg.self_improve.candidates_per_task;
    si.temperature = cfg.self_improve.temperature;
    si.judge_threshold = cfg.judge_threshold;
    si.sft_steps = cfg.self_improve.sft_steps;
    si.learning_rate = cfg.self_improve.learning_rate;
    si.tau = cfg.tau;

    std::unique_ptr<ladder::Judge> judge;
    if (!judge_file.empty())
        judge = std::make_unique<ladder::FileJudge>(judge_file);
    else
        judge = std::make_unique<ladder::OracleJudge>(cfg.tau);

    auto rng = ladder::make_rng(cfg.seed, "self-improve");
    ladder::CuratedDataset dataset;
    const ladder::SelfImproveReport report =
        ladder::self_improve(params, tasks, si, *judge, rng, &dataset);
    dataset.seed = cfg.seed;

    std::vector<std::string> lines;
    lines.reserve(dataset.samples.size());
    for (const auto& sample : dataset.samples)
        lines.push_back(ladder::curated_sample_to_json(sample).dump());
    ladder::write_lines_atomic(out / "curated.jsonl", lines);
    write_json_atomic(out / "provenance.json", ladder::provenance_json(dataset));
    ladder::save_checkpoint(out / "checkpoint.json", params, ladder::config_hash(cfg));
    write_json_atomic(out / "report.json",
                      json{{"candidate_count", report.candidate_count},
                           {"accepted_count", report.accepted_count},
                           {"acceptance_rate", report.acceptance_rate},
                           {"no_accepted", report.no_accepted},
                           {"loss_curve", report.loss_curve}});

    if (report.no_accepted)
        std::cerr << json{{"warning",
                           "no candidate passed the judge threshold; parameters unchanged"}}
                         .dump()
                  << "\n";

    emit(json{{"command", "self-improve"},
              {"output_dir", out.string()},
              {"candidates", report.candidate_count},
              {"accepted", report.accepted_count},
              {"no_accepted", report.no_accepted}});
    return 0;
}

int cmd_eval(const GlobalOpts& g, const std::string& checkpoint_path, const std::string& split) {
    const ladder::RunConfig cfg = load_cfg(g);
    const fs::path out = resolve_out(g, cfg);
    const ladder::PolicyParams params =
        ladder::load_checkpoint(checkpoint_path, ladder::config_hash(cfg), g.force);
    const ladder::DatasetBundle bundle = ladder::generate_datasets(cfg);

    json result{{"command", "eval"}, {"checkpoint", checkpoint_path}};
    if (split == "in" || split == "both")
        result["in"] = eval_to_json(ladder::evaluate(params, bundle.eval_in, cfg.tau));
    if (split == "held" || split == "both")
        result["held"] = eval_to_json(ladder::evaluate(params, bundle.eval_held, cfg.tau));

    write_json_atomic(out / "eval-report.json", result);
    emit(result);
    return 0;
}

int cmd_reward_check(const GlobalOpts& g, const std::string& tasks_path,
                     const std::string& responses_path) {
    const ladder::RunConfig cfg = load_cfg(g);
    const std::vector<ladder::TaskInstance> tasks = ladder::load_tasks_jsonl(tasks_path);
    std::map<std::string, const ladder::TaskInstance*> by_id;
    for (const auto& task : tasks) {
        if (!by_id.emplace(task.id, &task).second)
            throw std::invalid_argument("reward-check: duplicate task id '" + task.id + "'");
    }

    // Responses: one JSON object per line, {"task_id": ..., "response": ...}.
    for (const std::string& line : ladder::read_lines(responses_path)) {
        const json j = json::parse(line);
        const std::string task_id = j.at("task_id").get<std::string>();
        const std::string response = j.at("response").get<std::string>();
        const auto it = by_id.find(task_id);
        if (it == by_id.end())
            throw std::invalid_argument("reward-check: unknown task id '" + task_id + "'");
        const ladder::TaskInstance& task = *it->second;
        const ladder::RewardBreakdown b = ladder::score(response, task, cfg.tau);
        emit(json{{"task_id", task_id},
                  {"stage", std::string(ladder::stage_name(task.stage))},
                  {"kind", std::string(ladder::kind_name(task.kind))},
                  {"accuracy", b.accuracy},
                  {"format", b.format},
                  {"total", b.total}});
    }
    return 0;
}

const char* error_type(const std::exception& e) {
    if (dynamic_cast<const std::invalid_argument*>(&e)) return "invalid_argument";
    if (dynamic_cast<const json::exception*>(&e)) return "json";
    if (dynamic_cast<const std::runtime_error*>(&e)) return "runtime";
    return "error";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"curriculum RL toy-world harness"};
    app.require_subcommand(1);
    app.fallthrough();

    GlobalOpts g;
    app.add_option("--config", g.config_path, "JSON run config (defaults apply when omitted)");
    app.add_option("--out", g.out_override,
                   "output directory (overrides LADDER_OUT_DIR and the config)");
    app.add_flag("--force", g.force, "accept checkpoints with a mismatched config hash");

    auto* gen = app.add_subcommand("gen-data", "write task datasets as JSONL");
    auto* curr = app.add_subcommand("train-curr-rl", "GRPO over the three-stage curriculum");
    auto* flat = app.add_subcommand("train-rl-flat", "GRPO over the merged task pool");
    auto* sft = app.add_subcommand("train-sft", "supervised baseline on ground-truth answers");

    auto* selfi = app.add_subcommand("self-improve",
                                     "rejected-sampling fine-tune from a checkpoint");
    std::string si_checkpoint;
    std::string si_judge_file;
    selfi->add_option("--checkpoint", si_checkpoint,
                      "starting checkpoint (default: <out>/curr-rl/checkpoint.json)");
    selfi->add_option("--judge-file", si_judge_file,
                      "external judge scores, lines of '<candidate-id> <score>'");

    auto* eval = app.add_subcommand("eval", "evaluate a checkpoint on the eval splits");
    std::string eval_checkpoint;
    std::string eval_split = "both";
    eval->add_option("--checkpoint", eval_checkpoint, "checkpoint to evaluate")->required();
    eval->add_option("--split", eval_split, "in, held, or both")
        ->check(CLI::IsMember({"in", "held", "both"}));

    auto* rcheck = app.add_subcommand("reward-check", "score responses against a task file");
    std::string rc_tasks;
    std::string rc_responses;
    rcheck->add_option("--tasks", rc_tasks, "task JSONL file")->required();
    rcheck
        ->add_option("--responses", rc_responses,
                     "JSONL with {\"task_id\",\"response\"} per line")
        ->required();

    try {
        app.parse(argc, argv);
        if (gen->parsed()) return cmd_gen_data(g);
        if (curr->parsed()) return cmd_train(g, Pipeline::curriculum_rl);
        if (flat->parsed()) return cmd_train(g, Pipeline::flat_rl);
        if (sft->parsed()) return cmd_train(g, Pipeline::sft);
        if (selfi->parsed()) return cmd_self_improve(g, si_checkpoint, si_judge_file);
        if (eval->parsed()) return cmd_eval(g, eval_checkpoint, eval_split);
        if (rcheck->parsed()) return cmd_reward_check(g, rc_tasks, rc_responses);
        throw std::logic_error("no subcommand dispatched");
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << json{{"error", {{"type", "usage"}, {"message", e.what()}}}}.dump() << "\n";
        return e.get_exit_code() == 0 ? 1 : e.get_exit_code();
    } catch (const std::exception& e) {
        std::cerr << json{{"error", {{"type", error_type(e)}, {"message", e.what()}}}}.dump()
                  << "\n";
        return 1;
    }
}
