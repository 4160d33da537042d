#pragma once

#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "ladder/answer.hpp"
#include "ladder/curriculum.hpp"
#include "ladder/scene.hpp"
#include "ladder/task_kind.hpp"
#include "ladder/vocab.hpp"

namespace ladder {

struct TaskInstance {
    std::string id;
    StageId stage = StageId::binary_decision;
    TaskKind kind = TaskKind::detection;
    TokenSequence prompt_tokens;
    std::vector<std::string> option_texts;  // rendered option bodies; letter = 'A' + index
    AnswerSpec answer;
    SceneSpec scene;  // empty object list for text-only tasks

    // Answer variant consistent with (stage, kind); options present iff
    // the stage is multiple choice.
    void validate() const;
};

// Builds a task of the requested (stage, kind) over the given scene.
// A math task over a text-only scene becomes pure arithmetic; over a
// populated scene it becomes object counting. Ground truth is computed
// exactly from the scene.
TaskInstance render_task(const SceneSpec& scene, StageId stage, TaskKind kind,
                         std::mt19937_64& rng);

// Generates a scene per cfg (text-math tasks get an empty scene with
// probability 1/2) and renders a task over it.
TaskInstance make_task(StageId stage, TaskKind kind, const GeneratorConfig& cfg,
                       std::mt19937_64& rng);

nlohmann::json answer_to_json(const AnswerSpec& answer);
AnswerSpec answer_from_json(const nlohmann::json& j);

nlohmann::json task_to_json(const TaskInstance& task);
TaskInstance task_from_json(const nlohmann::json& j);

}  // namespace ladder
