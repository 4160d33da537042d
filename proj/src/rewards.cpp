#include "ladder/rewards.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace ladder {
namespace {

RewardBreakdown with_format(double accuracy, const ParsedResponse& resp) {
    RewardBreakdown out;
    out.accuracy = accuracy;
    out.format = format_reward(resp);
    out.total = out.accuracy + out.format;
    return out;
}

[[noreturn]] void variant_mismatch(const char* op) {
    throw std::invalid_argument(std::string(op) + ": ground truth has wrong variant");
}

}  // namespace

double format_reward(const ParsedResponse& resp) {
    return resp.format_ok ? 1.0 : 0.0;
}

RewardBreakdown binary_reward(const ParsedResponse& resp, const AnswerSpec& gt) {
    const auto* truth = std::get_if<BinaryAnswer>(&gt.value);
    if (!truth) variant_mismatch("binary_reward");
    const auto* got = std::get_if<BinaryAnswer>(&resp.payload);
    double acc = (got && got->yes == truth->yes) ? 1.0 : 0.0;
    return with_format(acc, resp);
}

RewardBreakdown single_choice_reward(const ParsedResponse& resp, const AnswerSpec& gt) {
    const auto* truth = std::get_if<SingleChoiceAnswer>(&gt.value);
    if (!truth) variant_mismatch("single_choice_reward");
    const auto* got = std::get_if<SingleChoiceAnswer>(&resp.payload);
    double acc = (got && got->option == truth->option) ? 1.0 : 0.0;
    return with_format(acc, resp);
}

RewardBreakdown multi_choice_reward(const ParsedResponse& resp, const AnswerSpec& gt) {
    const auto* truth = std::get_if<MultiChoiceAnswer>(&gt.value);
    if (!truth || truth->options.empty()) variant_mismatch("multi_choice_reward");

    std::set<char> selected;
    if (const auto* multi = std::get_if<MultiChoiceAnswer>(&resp.payload)) {
        selected = multi->options;
    } else if (const auto* single = std::get_if<SingleChoiceAnswer>(&resp.payload)) {
        selected = {single->option};
    } else {
        return with_format(0.0, resp);
    }

    double acc = 0.0;
    if (selected == truth->options) {
        acc = 1.0;
    } else if (!selected.empty() &&
               std::includes(truth->options.begin(), truth->options.end(),
                             selected.begin(), selected.end())) {
        acc = 0.2;  // non-empty proper subset
    }
    return with_format(acc, resp);
}

RewardBreakdown category_overlap_reward(const ParsedResponse& resp, const AnswerSpec& gt) {
    const auto* truth = std::get_if<CategorySetAnswer>(&gt.value);
    if (!truth || truth->labels.empty()) variant_mismatch("category_overlap_reward");

    std::set<std::string> g;
    for (const std::string& label : truth->labels) g.insert(normalize_category(label));

    double acc = 0.0;
    if (const auto* got = std::get_if<CategorySetAnswer>(&resp.payload)) {
        std::set<std::string> p;
        for (const std::string& label : got->labels) p.insert(normalize_category(label));
        if (!p.empty()) {
            std::size_t inter = 0;
            for (const std::string& label : p) inter += g.count(label);
            std::size_t uni = p.size() + g.size() - inter;
            acc = static_cast<double>(inter) / static_cast<double>(uni);
        }
    }
    return with_format(acc, resp);
}

RewardBreakdown numeric_reward(const ParsedResponse& resp, const AnswerSpec& gt) {
    const auto* truth = std::get_if<NumericAnswer>(&gt.value);
    if (!truth) variant_mismatch("numeric_reward");
    const auto* got = std::get_if<NumericAnswer>(&resp.payload);
    double acc = (got && got->value == truth->value) ? 1.0 : 0.0;
    return with_format(acc, resp);
}

double box_iou(const BoundingBox& a, const BoundingBox& b) {
    double ix = std::min(a.x_max, b.x_max) - std::max(a.x_min, b.x_min);
    double iy = std::min(a.y_max, b.y_max) - std::max(a.y_min, b.y_min);
    if (ix <= 0.0 || iy <= 0.0) return 0.0;
    double inter = ix * iy;
    double uni = a.area() + b.area() - inter;
    return inter / uni;
}

std::vector<BoxMatch> match_boxes(const std::vector<BoundingBox>& pred,
                                  const std::vector<BoundingBox>& gt, double tau) {
    if (!(tau >= 0.0 && tau < 1.0)) {
        throw std::invalid_argument("match_boxes: tau must lie in [0,1)");
    }
    std::vector<std::vector<double>> iou(pred.size(), std::vector<double>(gt.size()));
    for (std::size_t i = 0; i < pred.size(); ++i) {
        for (std::size_t j = 0; j < gt.size(); ++j) iou[i][j] = box_iou(pred[i], gt[j]);
    }

    std::vector<bool> pred_used(pred.size(), false), gt_used(gt.size(), false);
    std::vector<BoxMatch> matches;
    while (true) {
        double best = -1.0;
        std::size_t bi = 0, bj = 0;
        // Scanning in index order keeps ties at the lowest (pred, gt) pair.
        for (std::size_t i = 0; i < pred.size(); ++i) {
            if (pred_used[i]) continue;
            for (std::size_t j = 0; j < gt.size(); ++j) {
                if (gt_used[j]) continue;
                if (iou[i][j] > best) {
                    best = iou[i][j];
                    bi = i;
                    bj = j;
                }
            }
        }
        if (best < tau) break;
        pred_used[bi] = true;
        gt_used[bj] = true;
        matches.push_back(BoxMatch{bi, bj, best});
    }
    return matches;
}

double detection_iou_reward(const std::vector<BoxMatch>& matches) {
    if (matches.empty()) return 0.0;
    double total = 0.0;
    for (const BoxMatch& m : matches) total += m.iou;
    return total / static_cast<double>(matches.size());
}

double detection_accuracy_reward(double r_iou) {
    if (!(r_iou >= 0.0 && r_iou <= 1.0)) {
        throw std::invalid_argument("detection_accuracy_reward: r_iou out of [0,1]");
    }
    return r_iou > 0.5 ? 1.0 : 0.0;
}

RewardBreakdown detection_reward(const ParsedResponse& resp, const AnswerSpec& gt,
                                 double tau) {
    const auto* truth = std::get_if<BoxListAnswer>(&gt.value);
    if (!truth || truth->boxes.empty()) variant_mismatch("detection_reward");

    double acc = 0.0;
    if (const auto* got = std::get_if<BoxListAnswer>(&resp.payload)) {
        auto matches = match_boxes(got->boxes, truth->boxes, tau);
        acc = detection_accuracy_reward(detection_iou_reward(matches));
    }
    return with_format(acc, resp);
}

RewardBreakdown score(const std::string& resp_raw, const TaskInstance& task, double tau) {
    ParsedResponse resp = parse_response(resp_raw, task.stage, task.kind);
    RewardBreakdown out;
    if (std::holds_alternative<BinaryAnswer>(task.answer.value)) {
        out = binary_reward(resp, task.answer);
    } else if (std::holds_alternative<SingleChoiceAnswer>(task.answer.value)) {
        out = single_choice_reward(resp, task.answer);
    } else if (std::holds_alternative<MultiChoiceAnswer>(task.answer.value)) {
        out = multi_choice_reward(resp, task.answer);
    } else if (std::holds_alternative<CategorySetAnswer>(task.answer.value)) {
        out = category_overlap_reward(resp, task.answer);
    } else if (std::holds_alternative<BoxListAnswer>(task.answer.value)) {
        out = detection_reward(resp, task.answer, tau);
    } else {
        out = numeric_reward(resp, task.answer);
    }
    out.stage = task.stage;
    return out;
}

}  // namespace ladder
