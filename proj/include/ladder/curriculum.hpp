#pragma once
// Three-stage curriculum: binary decision -> multiple choice -> open-ended.
// The schedule maps a global training step to the stage whose task pool and
// reward route are active; batches are drawn uniformly with replacement from
// that stage's pool.

#include <array>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string_view>
#include <vector>

namespace ladder {

enum class StageId : int { binary_decision = 0, multiple_choice = 1, open_ended = 2 };

constexpr std::array<StageId, 3> kAllStages{StageId::binary_decision, StageId::multiple_choice,
                                            StageId::open_ended};

std::string_view stage_name(StageId s);
StageId stage_from_name(std::string_view name);

struct CurriculumSchedule {
    std::array<std::int64_t, 3> budgets;  // steps per stage, all positive

    std::int64_t total_steps() const { return budgets[0] + budgets[1] + budgets[2]; }
    void validate() const;
};

// Stage whose cumulative budget interval contains `step`. Monotone
// non-decreasing in step; throws on out-of-range steps.
StageId stage_for_step(const CurriculumSchedule& schedule, std::int64_t step);

// Uniform with-replacement draw of `batch_size` tasks from the active stage's
// pool. Deterministic given the rng state; the flat baseline passes a single
// merged pool per stage slot instead.
template <class Task>
std::vector<Task> next_batch(const CurriculumSchedule& schedule, std::int64_t step,
                             const std::array<std::vector<Task>, 3>& pools,
                             std::size_t batch_size, std::mt19937_64& rng) {
    const StageId stage = stage_for_step(schedule, step);
    const auto& pool = pools[static_cast<std::size_t>(stage)];
    if (pool.empty()) throw std::invalid_argument("next_batch: empty pool for active stage");
    std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
    std::vector<Task> batch;
    batch.reserve(batch_size);
    for (std::size_t i = 0; i < batch_size; ++i) batch.push_back(pool[pick(rng)]);
    return batch;
}

}  // namespace ladder
