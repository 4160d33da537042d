#pragma once

#include <array>
#include <stdexcept>
#include <string>
#include <string_view>

namespace ladder {

// Task families. "math" covers both visual counting and pure-text arithmetic.
enum class TaskKind : int { detection = 0, classification = 1, math = 2 };

constexpr std::array<TaskKind, 3> kAllKinds{TaskKind::detection, TaskKind::classification,
                                            TaskKind::math};

constexpr std::string_view kind_name(TaskKind k) {
    switch (k) {
        case TaskKind::detection: return "detection";
        case TaskKind::classification: return "classification";
        case TaskKind::math: return "math";
    }
    throw std::invalid_argument("kind_name: bad TaskKind");
}

inline TaskKind kind_from_name(std::string_view name) {
    if (name == "detection") return TaskKind::detection;
    if (name == "classification") return TaskKind::classification;
    if (name == "math") return TaskKind::math;
    throw std::invalid_argument("kind_from_name: unknown kind '" + std::string(name) + "'");
}

}  // namespace ladder
