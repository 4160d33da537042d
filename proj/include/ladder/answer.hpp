#pragma once
// Ground-truth answer variants and bounding boxes shared by the task
// generator, the response parser and the reward functions.

#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "ladder/rational.hpp"

namespace ladder {

struct BoundingBox {
    double x_min = 0, y_min = 0, x_max = 0, y_max = 0;
    std::optional<double> confidence;  // stored when given, never used in scoring

    bool valid() const {
        const bool conf_ok = !confidence || (*confidence >= 0.0 && *confidence <= 1.0);
        return x_min < x_max && y_min < y_max && x_min >= 0 && y_min >= 0 && conf_ok;
    }
    double area() const { return (x_max - x_min) * (y_max - y_min); }
    bool same_extent(const BoundingBox& o) const {
        return x_min == o.x_min && y_min == o.y_min && x_max == o.x_max && y_max == o.y_max;
    }
};

struct BinaryAnswer {
    bool yes = false;
    bool operator==(const BinaryAnswer&) const = default;
};

struct SingleChoiceAnswer {
    char option = 'A';
    bool operator==(const SingleChoiceAnswer&) const = default;
};

struct MultiChoiceAnswer {
    std::set<char> options;  // non-empty for ground truth
    bool operator==(const MultiChoiceAnswer&) const = default;
};

struct CategorySetAnswer {
    std::set<std::string> labels;  // normalized, non-empty for ground truth
    bool operator==(const CategorySetAnswer&) const = default;
};

struct BoxListAnswer {
    std::vector<BoundingBox> boxes;  // non-empty for ground truth
};

struct NumericAnswer {
    Rational value;
    bool operator==(const NumericAnswer&) const = default;
};

using AnswerValue = std::variant<BinaryAnswer, SingleChoiceAnswer, MultiChoiceAnswer,
                                 CategorySetAnswer, BoxListAnswer, NumericAnswer>;

struct AnswerSpec {
    AnswerValue value;

    template <class T>
    bool is() const {
        return std::holds_alternative<T>(value);
    }
    template <class T>
    const T& as() const {
        return std::get<T>(value);
    }

    // Enforces the ground-truth invariants (non-empty sets, valid boxes).
    void validate() const;
};

// Case-fold, trim, and collapse internal whitespace runs to single spaces.
std::string normalize_category(std::string_view raw);

}  // namespace ladder
