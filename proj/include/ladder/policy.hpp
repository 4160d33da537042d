#pragma once

#include <cstddef>
#include <random>
#include <vector>

#include "ladder/vocab.hpp"

namespace ladder {

// Autoregressive softmax policy: mean-pooled prompt embeddings concatenated
// with the embeddings of the last context_k generated tokens (zero-padded),
// one tanh hidden layer, softmax over the vocabulary.
struct PolicyConfig {
    int vocab_size = 0;
    int embed_dim = 8;
    int hidden_dim = 24;
    int context_k = 4;
    int max_len = 48;    // response length cap, counting the stop token
    int stop_token = 0;  // generation ends after emitting this token

    // Sized for the global vocabulary; stop token is the answer close tag.
    static PolicyConfig for_vocab();

    int input_dim() const { return embed_dim * (context_k + 1); }

    // Flat layout: [embeddings | W1 (hidden x input) | b1 | W2 (vocab x hidden) | b2]
    std::size_t embed_offset() const { return 0; }
    std::size_t w1_offset() const;
    std::size_t b1_offset() const;
    std::size_t w2_offset() const;
    std::size_t b2_offset() const;
    std::size_t param_count() const;

    void validate() const;
    bool operator==(const PolicyConfig&) const = default;
};

struct PolicyParams {
    PolicyConfig cfg;
    std::vector<double> theta;

    // All-zero parameters give the uniform distribution over the vocabulary.
    static PolicyParams zeros(const PolicyConfig& cfg);
    static PolicyParams random_init(const PolicyConfig& cfg, double scale,
                                    std::mt19937_64& rng);
};

// Next-token distribution at temperature 1. Strictly positive, sums to 1
// within 1e-9. Throws on non-finite logits.
std::vector<double> policy_forward(const PolicyParams& params, const TokenSequence& prompt,
                                   const TokenSequence& generated);

struct SampledResponse {
    TokenSequence tokens;
    std::vector<double> logprobs;  // of each realized token, tempered distribution
    bool truncated = false;        // hit max_len without emitting stop_token
};

// n independent rollouts. Temperature applies to the logits before sampling;
// recorded logprobs are of the realized token under that tempered
// distribution and match logprob_of_sequence exactly.
std::vector<SampledResponse> sample_responses(const PolicyParams& params,
                                              const TokenSequence& prompt, int n,
                                              double temperature, std::mt19937_64& rng);

// Argmax decoding (ties to the lowest token id), same stopping rule.
TokenSequence greedy_decode(const PolicyParams& params, const TokenSequence& prompt);

// Teacher-forced per-token logprobs of response given prompt.
std::vector<double> logprob_of_sequence(const PolicyParams& params,
                                        const TokenSequence& prompt,
                                        const TokenSequence& response,
                                        double temperature = 1.0);

// Exact reverse-mode gradient: adds d(sum_t coeff[t] * logprob_t)/dtheta to
// grad, which must have param_count entries.
void accumulate_sequence_grad(const PolicyParams& params, const TokenSequence& prompt,
                              const TokenSequence& response,
                              const std::vector<double>& coeff, double temperature,
                              std::vector<double>& grad);

}  // namespace ladder
