#include "ladder/answer.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <stdexcept>

namespace ladder {

std::optional<Rational> Rational::parse(std::string_view text) {
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front())))
        text.remove_prefix(1);
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back())))
        text.remove_suffix(1);
    if (text.empty()) return std::nullopt;

    const auto parse_int = [](std::string_view s, std::int64_t& out) {
        const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
        return ec == std::errc{} && ptr == s.data() + s.size();
    };

    if (const auto slash = text.find('/'); slash != std::string_view::npos) {
        std::int64_t n = 0, d = 0;
        if (!parse_int(text.substr(0, slash), n) || !parse_int(text.substr(slash + 1), d) ||
            d == 0)
            return std::nullopt;
        return Rational(n, d);
    }

    if (const auto dot = text.find('.'); dot != std::string_view::npos) {
        std::string_view whole = text.substr(0, dot);
        std::string_view frac = text.substr(dot + 1);
        if (frac.empty() || frac.size() > 15) return std::nullopt;
        for (char c : frac)
            if (!std::isdigit(static_cast<unsigned char>(c))) return std::nullopt;
        bool negative = false;
        if (!whole.empty() && (whole.front() == '-' || whole.front() == '+')) {
            negative = whole.front() == '-';
            whole.remove_prefix(1);
        }
        std::int64_t w = 0;
        if (!whole.empty() && !parse_int(whole, w)) return std::nullopt;
        std::int64_t f = 0;
        if (!parse_int(frac, f)) return std::nullopt;
        std::int64_t den = 1;
        for (std::size_t i = 0; i < frac.size(); ++i) den *= 10;
        const std::int64_t num = w * den + f;
        return Rational(negative ? -num : num, den);
    }

    std::int64_t n = 0;
    if (!parse_int(text, n)) return std::nullopt;
    return Rational(n);
}

std::string normalize_category(std::string_view raw) {
    std::string out;
    out.reserve(raw.size());
    bool pending_space = false;
    for (char c : raw) {
        if (std::isspace(static_cast<unsigned char>(c))) {
            if (!out.empty()) pending_space = true;
            continue;
        }
        if (pending_space) {
            out.push_back(' ');
            pending_space = false;
        }
        out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
    return out;
}

void AnswerSpec::validate() const {
    if (is<MultiChoiceAnswer>() && as<MultiChoiceAnswer>().options.empty())
        throw std::invalid_argument("AnswerSpec: multi-choice correct set is empty");
    if (is<CategorySetAnswer>() && as<CategorySetAnswer>().labels.empty())
        throw std::invalid_argument("AnswerSpec: category set is empty");
    if (is<BoxListAnswer>()) {
        const auto& boxes = as<BoxListAnswer>().boxes;
        if (boxes.empty()) throw std::invalid_argument("AnswerSpec: box list is empty");
        for (const auto& b : boxes)
            if (!b.valid()) throw std::invalid_argument("AnswerSpec: invalid bounding box");
    }
}

}  // namespace ladder
