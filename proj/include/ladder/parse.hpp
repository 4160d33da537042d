#pragma once

#include <string>
#include <variant>

#include "ladder/answer.hpp"
#include "ladder/curriculum.hpp"
#include "ladder/task_kind.hpp"
#include "ladder/vocab.hpp"

namespace ladder {

// Marker for responses that violate the output grammar.
struct Malformed {
    std::string raw;
};

using ResponsePayload = std::variant<Malformed, BinaryAnswer, SingleChoiceAnswer,
                                     MultiChoiceAnswer, CategorySetAnswer, BoxListAnswer,
                                     NumericAnswer>;

// Invariant: format_ok is true iff payload does not hold Malformed.
struct ParsedResponse {
    std::string reasoning_text;  // inside <think>...</think>, possibly empty
    ResponsePayload payload;
    bool format_ok = false;

    bool malformed() const { return std::holds_alternative<Malformed>(payload); }
};

// Parses a raw response against the grammar for (stage, kind).
//   response := ws [<think> text </think>] ws <answer> body </answer> ws
// The body grammar depends on the stage:
//   binary stage: yes | no
//   choice stage: one option letter (detection, math) or a comma-separated
//                 letter list (classification)
//   open stage:   box list (detection), category list (classification),
//                 or a single numeric literal (math)
// Never throws; any violation yields a Malformed payload.
ParsedResponse parse_response(const std::string& raw, StageId stage, TaskKind kind);

// Canonical token rendering of a ground-truth answer, wrapped in answer tags.
// Used for supervised targets; parse_response inverts it exactly.
// Requires every coordinate and numeric value to be an integer representable
// in the vocabulary's number range.
TokenSequence render_answer_tokens(const AnswerValue& value);

// Canonical text rendering: detokenized render_answer_tokens.
std::string render_answer_text(const AnswerValue& value);

}  // namespace ladder
