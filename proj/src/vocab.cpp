#include "ladder/vocab.hpp"

#include <stdexcept>

namespace ladder {

Vocabulary::Vocabulary() {
    const char* specials[] = {"<think>", "</think>", "<answer>", "</answer>"};
    const char* words[] = {
        "yes",    "no",      "A",       "B",        "C",      "D",
    };
    const char* punct[] = {",", "[", "]", ";", ":", "?", ".", "-", "+", "="};
    shapes_ = {"circle", "square", "triangle", "diamond"};
    colors_ = {"red", "green", "blue", "yellow"};
    const char* prompt_words[] = {
        "scene", "grid",   "question", "options", "answer",     "with",   "is",  "there",
        "a",     "at",     "the",      "number",  "of",         "objects", "exactly",
        "which", "box",    "bounds",   "object",  "categories", "appear", "how", "many",
        "what",  "list",   "boxes",    "all",     "correct",    "one",    "or"};

    for (const char* t : specials) tokens_.emplace_back(t);
    for (const char* t : words) tokens_.emplace_back(t);
    max_number_ = 15;
    first_number_ = static_cast<TokenId>(tokens_.size());
    for (int n = 0; n <= max_number_; ++n) tokens_.push_back(std::to_string(n));
    for (const char* t : punct) tokens_.emplace_back(t);
    for (const auto& t : shapes_) tokens_.push_back(t);
    for (const auto& t : colors_) tokens_.push_back(t);
    for (const char* t : prompt_words) tokens_.emplace_back(t);

    for (TokenId i = 0; i < static_cast<TokenId>(tokens_.size()); ++i) {
        if (!index_.emplace(tokens_[static_cast<std::size_t>(i)], i).second)
            throw std::logic_error("Vocabulary: duplicate token " +
                                   tokens_[static_cast<std::size_t>(i)]);
    }

    think_open_ = id("<think>");
    think_close_ = id("</think>");
    answer_open_ = id("<answer>");
    answer_close_ = id("</answer>");
    letters_ = {'A', 'B', 'C', 'D'};
}

std::string_view Vocabulary::text(TokenId tid) const {
    if (tid < 0 || tid >= size()) throw std::out_of_range("Vocabulary::text: bad token id");
    return tokens_[static_cast<std::size_t>(tid)];
}

TokenId Vocabulary::id(std::string_view token) const {
    const auto it = index_.find(token);
    if (it == index_.end())
        throw std::invalid_argument("Vocabulary::id: unknown token '" + std::string(token) + "'");
    return it->second;
}

TokenId Vocabulary::number(int value) const {
    if (value < 0 || value > max_number_)
        throw std::out_of_range("Vocabulary::number: value outside token range");
    return first_number_ + value;
}

std::string Vocabulary::detokenize(const TokenSequence& seq) const {
    std::string out;
    for (std::size_t i = 0; i < seq.size(); ++i) {
        if (i) out.push_back(' ');
        out += text(seq[i]);
    }
    return out;
}

const Vocabulary& vocab() {
    static const Vocabulary v;
    return v;
}

}  // namespace ladder
