#include "ladder/parse.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <stdexcept>

namespace ladder {
namespace {

bool is_ws(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; }
bool is_alpha(char c) { return std::isalpha(static_cast<unsigned char>(c)) != 0; }

struct Scanner {
    std::string_view s;
    size_t i = 0;

    void skip_ws() {
        while (i < s.size() && is_ws(s[i])) ++i;
    }
    bool done() const { return i >= s.size(); }
    char peek() const { return s[i]; }
    bool eat(char c) {
        if (i < s.size() && s[i] == c) {
            ++i;
            return true;
        }
        return false;
    }
    // Maximal run of alphabetic characters, lower-cased. Empty if none.
    std::string word() {
        size_t start = i;
        while (i < s.size() && is_alpha(s[i])) ++i;
        std::string w(s.substr(start, i - start));
        for (char& c : w) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        return w;
    }
    // Decimal literal with optional sign and fraction part.
    bool number(double& out) {
        size_t start = i;
        if (i < s.size() && (s[i] == '-' || s[i] == '+')) ++i;
        size_t digits_from = i;
        while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
        if (i == digits_from) {
            i = start;
            return false;
        }
        if (i < s.size() && s[i] == '.') {
            ++i;
            size_t frac_from = i;
            while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
            if (i == frac_from) {
                i = start;
                return false;
            }
        }
        auto res = std::from_chars(s.data() + start, s.data() + i, out);
        if (res.ec != std::errc{}) {
            i = start;
            return false;
        }
        return true;
    }
};

// Splits the raw text into (reasoning, answer body). Returns false on any
// structural violation: missing tags, text outside tags, unterminated blocks.
bool split_blocks(std::string_view raw, std::string& reasoning, std::string& body) {
    constexpr std::string_view kThinkOpen = "<think>";
    constexpr std::string_view kThinkClose = "</think>";
    constexpr std::string_view kAnswerOpen = "<answer>";
    constexpr std::string_view kAnswerClose = "</answer>";

    size_t i = 0;
    while (i < raw.size() && is_ws(raw[i])) ++i;
    if (raw.compare(i, kThinkOpen.size(), kThinkOpen) == 0) {
        i += kThinkOpen.size();
        size_t close = raw.find(kThinkClose, i);
        if (close == std::string_view::npos) return false;
        std::string_view inner = raw.substr(i, close - i);
        while (!inner.empty() && is_ws(inner.front())) inner.remove_prefix(1);
        while (!inner.empty() && is_ws(inner.back())) inner.remove_suffix(1);
        reasoning.assign(inner);
        i = close + kThinkClose.size();
        while (i < raw.size() && is_ws(raw[i])) ++i;
    }
    if (raw.compare(i, kAnswerOpen.size(), kAnswerOpen) != 0) return false;
    i += kAnswerOpen.size();
    size_t close = raw.find(kAnswerClose, i);
    if (close == std::string_view::npos) return false;
    body.assign(raw.substr(i, close - i));
    i = close + kAnswerClose.size();
    while (i < raw.size() && is_ws(raw[i])) ++i;
    return i == raw.size();
}

bool parse_binary(std::string_view body, BinaryAnswer& out) {
    Scanner sc{body};
    sc.skip_ws();
    std::string w = sc.word();
    sc.skip_ws();
    if (!sc.done()) return false;
    if (w == "yes") {
        out.yes = true;
        return true;
    }
    if (w == "no") {
        out.yes = false;
        return true;
    }
    return false;
}

// Comma-separated option letters; exactly the four fixed options are legal.
bool parse_letters(std::string_view body, std::vector<char>& out) {
    Scanner sc{body};
    out.clear();
    while (true) {
        sc.skip_ws();
        std::string w = sc.word();
        if (w.size() != 1) return false;
        char c = static_cast<char>(std::toupper(static_cast<unsigned char>(w[0])));
        if (c < 'A' || c > 'D') return false;
        out.push_back(c);
        sc.skip_ws();
        if (sc.done()) return true;
        if (!sc.eat(',')) return false;
    }
}

bool parse_categories(std::string_view body, CategorySetAnswer& out) {
    Scanner sc{body};
    out.labels.clear();
    while (true) {
        sc.skip_ws();
        std::string label;
        while (true) {
            std::string w = sc.word();
            if (w.empty()) break;
            if (!label.empty()) label += ' ';
            label += w;
            sc.skip_ws();
        }
        if (label.empty()) return false;
        out.labels.insert(normalize_category(label));
        if (sc.done()) return true;
        if (!sc.eat(',')) return false;
    }
}

bool parse_boxes(std::string_view body, BoxListAnswer& out) {
    Scanner sc{body};
    out.boxes.clear();
    sc.skip_ws();
    while (true) {
        if (!sc.eat('[')) return false;
        double v[5];
        int count = 0;
        while (true) {
            sc.skip_ws();
            if (count >= 5) return false;
            if (!sc.number(v[count])) return false;
            ++count;
            sc.skip_ws();
            if (sc.eat(']')) break;
            if (!sc.eat(',')) return false;
        }
        if (count < 4) return false;
        BoundingBox box{v[0], v[1], v[2], v[3], std::nullopt};
        if (count == 5) box.confidence = v[4];
        if (!box.valid()) return false;
        out.boxes.push_back(box);
        sc.skip_ws();
        if (sc.done()) return true;
        // Separator between boxes is optional.
        if (sc.eat(',') || sc.eat(';')) sc.skip_ws();
        if (sc.done() || sc.peek() != '[') return false;
    }
}

bool parse_numeric(std::string_view body, NumericAnswer& out) {
    size_t from = 0, to = body.size();
    while (from < to && is_ws(body[from])) ++from;
    while (to > from && is_ws(body[to - 1])) --to;
    auto r = Rational::parse(body.substr(from, to - from));
    if (!r) return false;
    out.value = *r;
    return true;
}

}  // namespace

ParsedResponse parse_response(const std::string& raw, StageId stage, TaskKind kind) {
    ParsedResponse result;
    std::string body;
    if (!split_blocks(raw, result.reasoning_text, body)) {
        result.payload = Malformed{raw};
        result.format_ok = false;
        return result;
    }

    bool ok = false;
    switch (stage) {
        case StageId::binary_decision: {
            BinaryAnswer a;
            ok = parse_binary(body, a);
            if (ok) result.payload = a;
            break;
        }
        case StageId::multiple_choice: {
            std::vector<char> letters;
            ok = parse_letters(body, letters);
            if (ok) {
                if (kind == TaskKind::classification) {
                    MultiChoiceAnswer a;
                    a.options.insert(letters.begin(), letters.end());
                    result.payload = a;
                } else if (letters.size() == 1) {
                    result.payload = SingleChoiceAnswer{letters[0]};
                } else {
                    ok = false;  // single-select task, list given
                }
            }
            break;
        }
        case StageId::open_ended: {
            switch (kind) {
                case TaskKind::detection: {
                    BoxListAnswer a;
                    ok = parse_boxes(body, a);
                    if (ok) result.payload = a;
                    break;
                }
                case TaskKind::classification: {
                    CategorySetAnswer a;
                    ok = parse_categories(body, a);
                    if (ok) result.payload = a;
                    break;
                }
                case TaskKind::math: {
                    NumericAnswer a;
                    ok = parse_numeric(body, a);
                    if (ok) result.payload = a;
                    break;
                }
            }
            break;
        }
    }

    if (!ok) {
        result.payload = Malformed{raw};
        result.reasoning_text.clear();
    }
    result.format_ok = ok;
    return result;
}

namespace {

TokenId number_token(double v) {
    double rounded = std::nearbyint(v);
    if (std::abs(v - rounded) > 0.0 || rounded < 0 ||
        rounded > static_cast<double>(vocab().max_number())) {
        throw std::invalid_argument("render_answer_tokens: value not representable: " +
                                    std::to_string(v));
    }
    return vocab().number(static_cast<int>(rounded));
}

void append_words(TokenSequence& out, const std::string& label) {
    size_t i = 0;
    while (i < label.size()) {
        size_t j = label.find(' ', i);
        if (j == std::string::npos) j = label.size();
        out.push_back(vocab().id(label.substr(i, j - i)));
        i = j + 1;
    }
}

}  // namespace

TokenSequence render_answer_tokens(const AnswerValue& value) {
    const Vocabulary& v = vocab();
    TokenSequence out;
    out.push_back(v.answer_open());
    const TokenId comma = v.id(",");

    if (const auto* b = std::get_if<BinaryAnswer>(&value)) {
        out.push_back(v.id(b->yes ? "yes" : "no"));
    } else if (const auto* s = std::get_if<SingleChoiceAnswer>(&value)) {
        out.push_back(v.id(std::string(1, s->option)));
    } else if (const auto* m = std::get_if<MultiChoiceAnswer>(&value)) {
        bool first = true;
        for (char c : m->options) {
            if (!first) out.push_back(comma);
            out.push_back(v.id(std::string(1, c)));
            first = false;
        }
    } else if (const auto* cats = std::get_if<CategorySetAnswer>(&value)) {
        bool first = true;
        for (const std::string& label : cats->labels) {
            if (!first) out.push_back(comma);
            append_words(out, label);
            first = false;
        }
    } else if (const auto* boxes = std::get_if<BoxListAnswer>(&value)) {
        for (const BoundingBox& box : boxes->boxes) {
            out.push_back(v.id("["));
            out.push_back(number_token(box.x_min));
            out.push_back(comma);
            out.push_back(number_token(box.y_min));
            out.push_back(comma);
            out.push_back(number_token(box.x_max));
            out.push_back(comma);
            out.push_back(number_token(box.y_max));
            out.push_back(v.id("]"));
        }
    } else if (const auto* n = std::get_if<NumericAnswer>(&value)) {
        if (n->value.den() != 1) {
            throw std::invalid_argument("render_answer_tokens: non-integer numeric value");
        }
        out.push_back(number_token(static_cast<double>(n->value.num())));
    } else {
        throw std::invalid_argument("render_answer_tokens: empty answer value");
    }

    out.push_back(v.answer_close());
    return out;
}

std::string render_answer_text(const AnswerValue& value) {
    return vocab().detokenize(render_answer_tokens(value));
}

}  // namespace ladder
