#pragma once
// Fixed token vocabulary shared by prompts and responses. Detokenization is
// a plain space join; the response parser is whitespace-tolerant, so parsing
// a rendered sequence recovers the payload exactly.

#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace ladder {

using TokenId = int;
using TokenSequence = std::vector<TokenId>;

class Vocabulary {
  public:
    Vocabulary();

    int size() const { return static_cast<int>(tokens_.size()); }
    std::string_view text(TokenId id) const;
    TokenId id(std::string_view token) const;  // throws on unknown token

    TokenId think_open() const { return think_open_; }
    TokenId think_close() const { return think_close_; }
    TokenId answer_open() const { return answer_open_; }
    TokenId answer_close() const { return answer_close_; }

    // Token for a small integer literal; supported range is [0, max_number].
    TokenId number(int value) const;
    int max_number() const { return max_number_; }

    const std::vector<std::string>& shapes() const { return shapes_; }
    const std::vector<std::string>& colors() const { return colors_; }
    const std::vector<char>& option_letters() const { return letters_; }

    std::string detokenize(const TokenSequence& seq) const;

  private:
    std::vector<std::string> tokens_;
    std::unordered_map<std::string_view, TokenId> index_;
    std::vector<std::string> shapes_;
    std::vector<std::string> colors_;
    std::vector<char> letters_;
    TokenId think_open_ = 0, think_close_ = 0, answer_open_ = 0, answer_close_ = 0;
    TokenId first_number_ = 0;
    int max_number_ = 0;
};

const Vocabulary& vocab();

}  // namespace ladder
