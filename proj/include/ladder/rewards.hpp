#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "ladder/answer.hpp"
#include "ladder/curriculum.hpp"
#include "ladder/parse.hpp"
#include "ladder/task.hpp"

namespace ladder {

// Invariants: total = accuracy + format; accuracy = 0 for malformed input.
struct RewardBreakdown {
    double accuracy = 0.0;
    double format = 0.0;
    double total = 0.0;
    StageId stage = StageId::open_ended;  // reward route that produced this
};

// 1 iff the response satisfied its stage grammar.
double format_reward(const ParsedResponse& resp);

// Exact-match rewards. Ground truth variant mismatches throw; response
// payload mismatches (including Malformed) score accuracy 0.
RewardBreakdown binary_reward(const ParsedResponse& resp, const AnswerSpec& gt);
RewardBreakdown single_choice_reward(const ParsedResponse& resp, const AnswerSpec& gt);

// 1 on set equality, 0.2 on a non-empty proper subset of gt, else 0.
RewardBreakdown multi_choice_reward(const ParsedResponse& resp, const AnswerSpec& gt);

// |P ∩ G| / |P ∪ G| over normalized labels.
RewardBreakdown category_overlap_reward(const ParsedResponse& resp, const AnswerSpec& gt);

RewardBreakdown numeric_reward(const ParsedResponse& resp, const AnswerSpec& gt);

// Intersection area over union area; 0 for disjoint boxes.
double box_iou(const BoundingBox& a, const BoundingBox& b);

struct BoxMatch {
    std::size_t pred_index = 0;
    std::size_t gt_index = 0;
    double iou = 0.0;
};

// Greedy one-to-one matching: repeatedly take the globally highest-IoU
// unmatched pair, ties broken by lowest pred index then lowest gt index.
// Pairs with iou < tau are discarded. Requires tau in [0,1).
std::vector<BoxMatch> match_boxes(const std::vector<BoundingBox>& pred,
                                  const std::vector<BoundingBox>& gt, double tau);

// Mean iou over the match set; 0 when empty.
double detection_iou_reward(const std::vector<BoxMatch>& matches);

// 1 if r_iou > 0.5 (strict), else 0. Requires r_iou in [0,1].
double detection_accuracy_reward(double r_iou);

RewardBreakdown detection_reward(const ParsedResponse& resp, const AnswerSpec& gt,
                                 double tau);

// Parses resp_raw under the task's (stage, kind) grammar and routes to the
// reward for the task's ground-truth variant. Tags the result with the
// task's stage.
RewardBreakdown score(const std::string& resp_raw, const TaskInstance& task, double tau);

}  // namespace ladder
