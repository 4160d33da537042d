#include <doctest.h>

#include <array>
#include <cstdint>
#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "ladder/curriculum.hpp"
#include "ladder/rng.hpp"

using namespace ladder;

TEST_CASE("stage names round-trip and reject unknowns") {
    for (StageId s : kAllStages) CHECK(stage_from_name(stage_name(s)) == s);
    CHECK(stage_name(StageId::binary_decision) == "binary");
    CHECK(stage_name(StageId::multiple_choice) == "choice");
    CHECK(stage_name(StageId::open_ended) == "open");
    CHECK_THROWS_AS(stage_from_name("binaries"), std::invalid_argument);
    CHECK_THROWS_AS(stage_from_name(""), std::invalid_argument);
    CHECK_THROWS_AS(stage_from_name("Binary"), std::invalid_argument);
}

TEST_CASE("schedule validation rejects non-positive budgets") {
    const CurriculumSchedule ok{{1, 1, 1}};
    const CurriculumSchedule zero_first{{0, 1, 1}};
    const CurriculumSchedule negative{{1, -3, 1}};
    const CurriculumSchedule zero_last{{1, 1, 0}};
    const CurriculumSchedule defaults{{834, 833, 833}};
    CHECK_NOTHROW(ok.validate());
    CHECK_THROWS_AS(zero_first.validate(), std::invalid_argument);
    CHECK_THROWS_AS(negative.validate(), std::invalid_argument);
    CHECK_THROWS_AS(zero_last.validate(), std::invalid_argument);
    CHECK(defaults.total_steps() == 2500);
}

TEST_CASE("stage_for_step hits exact boundaries of the default budgets") {
    const CurriculumSchedule sched{{834, 833, 833}};
    CHECK(stage_for_step(sched, 0) == StageId::binary_decision);
    CHECK(stage_for_step(sched, 833) == StageId::binary_decision);
    CHECK(stage_for_step(sched, 834) == StageId::multiple_choice);
    CHECK(stage_for_step(sched, 1666) == StageId::multiple_choice);
    CHECK(stage_for_step(sched, 1667) == StageId::open_ended);
    CHECK(stage_for_step(sched, 2499) == StageId::open_ended);
    CHECK_THROWS_AS(stage_for_step(sched, -1), std::out_of_range);
    CHECK_THROWS_AS(stage_for_step(sched, 2500), std::out_of_range);
}

TEST_CASE("stage_for_step is monotone and covers every stage") {
    const CurriculumSchedule sched{{3, 5, 2}};
    std::set<StageId> seen;
    StageId prev = stage_for_step(sched, 0);
    seen.insert(prev);
    for (std::int64_t step = 1; step < sched.total_steps(); ++step) {
        const StageId cur = stage_for_step(sched, step);
        CHECK(static_cast<int>(cur) >= static_cast<int>(prev));
        seen.insert(cur);
        prev = cur;
    }
    CHECK(seen.size() == 3);
    // Occupancy matches the budgets exactly.
    std::array<std::int64_t, 3> counts{0, 0, 0};
    for (std::int64_t step = 0; step < sched.total_steps(); ++step)
        ++counts[static_cast<std::size_t>(stage_for_step(sched, step))];
    CHECK(counts == sched.budgets);
}

TEST_CASE("next_batch draws only from the active stage's pool") {
    const CurriculumSchedule sched{{2, 2, 2}};
    std::array<std::vector<std::string>, 3> pools{
        std::vector<std::string>{"b0", "b1"},
        std::vector<std::string>{"c0"},
        std::vector<std::string>{"o0", "o1", "o2"},
    };
    auto rng = make_rng(7, "curriculum-test", 0);
    for (std::int64_t step = 0; step < sched.total_steps(); ++step) {
        const StageId stage = stage_for_step(sched, step);
        const auto batch = next_batch(sched, step, pools, 16, rng);
        CHECK(batch.size() == 16);
        const char prefix = stage == StageId::binary_decision   ? 'b'
                            : stage == StageId::multiple_choice ? 'c'
                                                                : 'o';
        for (const auto& t : batch) CHECK(t[0] == prefix);
    }
}

TEST_CASE("next_batch samples with replacement and reaches the whole pool") {
    const CurriculumSchedule sched{{1, 1, 1}};
    std::array<std::vector<int>, 3> pools{
        std::vector<int>{10, 11, 12, 13},
        std::vector<int>{20},
        std::vector<int>{30},
    };
    auto rng = make_rng(3, "curriculum-test", 1);
    // Batch far larger than the pool forces repeats; over many draws every
    // element should appear.
    const auto batch = next_batch(sched, 0, pools, 400, rng);
    std::set<int> seen(batch.begin(), batch.end());
    CHECK(seen == std::set<int>{10, 11, 12, 13});
    // Pool of one: every draw is that element.
    const auto ones = next_batch(sched, 1, pools, 5, rng);
    for (int v : ones) CHECK(v == 20);
}

TEST_CASE("next_batch rejects an empty active pool") {
    const CurriculumSchedule sched{{1, 1, 1}};
    std::array<std::vector<int>, 3> pools{
        std::vector<int>{1},
        std::vector<int>{},
        std::vector<int>{2},
    };
    auto rng = make_rng(1, "curriculum-test", 2);
    CHECK_NOTHROW(next_batch(sched, 0, pools, 2, rng));
    CHECK_THROWS_AS(next_batch(sched, 1, pools, 2, rng), std::invalid_argument);
}

TEST_CASE("identical rng state yields identical batches") {
    const CurriculumSchedule sched{{4, 4, 4}};
    std::array<std::vector<int>, 3> pools{
        std::vector<int>{1, 2, 3, 4, 5},
        std::vector<int>{6, 7, 8},
        std::vector<int>{9, 10},
    };
    auto a = make_rng(42, "curriculum-test", 3);
    auto b = make_rng(42, "curriculum-test", 3);
    for (std::int64_t step = 0; step < sched.total_steps(); ++step)
        CHECK(next_batch(sched, step, pools, 8, a) == next_batch(sched, step, pools, 8, b));
}
