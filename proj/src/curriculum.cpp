#include "ladder/curriculum.hpp"

namespace ladder {

std::string_view stage_name(StageId s) {
    switch (s) {
        case StageId::binary_decision: return "binary";
        case StageId::multiple_choice: return "choice";
        case StageId::open_ended: return "open";
    }
    throw std::invalid_argument("stage_name: bad StageId");
}

StageId stage_from_name(std::string_view name) {
    if (name == "binary") return StageId::binary_decision;
    if (name == "choice") return StageId::multiple_choice;
    if (name == "open") return StageId::open_ended;
    throw std::invalid_argument("stage_from_name: unknown stage '" + std::string(name) + "'");
}

void CurriculumSchedule::validate() const {
    for (auto b : budgets)
        if (b <= 0) throw std::invalid_argument("CurriculumSchedule: budgets must be positive");
}

StageId stage_for_step(const CurriculumSchedule& schedule, std::int64_t step) {
    schedule.validate();
    if (step < 0 || step >= schedule.total_steps())
        throw std::out_of_range("stage_for_step: step out of range");
    if (step < schedule.budgets[0]) return StageId::binary_decision;
    if (step < schedule.budgets[0] + schedule.budgets[1]) return StageId::multiple_choice;
    return StageId::open_ended;
}

}  // namespace ladder
