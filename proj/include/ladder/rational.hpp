#pragma once
// Exact rational with int64 parts, normalized (gcd 1, positive denominator).
// Used for numeric ground truth so "7", "7.0" and "14/2" compare equal.

#include <cstdint>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace ladder {

class Rational {
  public:
    Rational() = default;
    Rational(std::int64_t numerator, std::int64_t denominator = 1) {
        if (denominator == 0) throw std::invalid_argument("Rational: zero denominator");
        if (denominator < 0) {
            numerator = -numerator;
            denominator = -denominator;
        }
        const std::int64_t g = std::gcd(numerator < 0 ? -numerator : numerator, denominator);
        num_ = g ? numerator / g : 0;
        den_ = g ? denominator / g : 1;
    }

    std::int64_t num() const { return num_; }
    std::int64_t den() const { return den_; }

    bool operator==(const Rational& o) const { return num_ == o.num_ && den_ == o.den_; }
    bool operator!=(const Rational& o) const { return !(*this == o); }

    double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }

    std::string to_string() const {
        if (den_ == 1) return std::to_string(num_);
        return std::to_string(num_) + "/" + std::to_string(den_);
    }

    // Accepts "7", "-3", "7.25", "14/2". Empty optional on anything else.
    static std::optional<Rational> parse(std::string_view text);

  private:
    std::int64_t num_ = 0;
    std::int64_t den_ = 1;
};

}  // namespace ladder
