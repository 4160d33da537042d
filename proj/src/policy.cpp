#include "ladder/policy.hpp"

#include <cmath>
#include <cstring>
#include <stdexcept>

#include "ladder/kernels.hpp"

namespace ladder {

namespace k = kernels;

PolicyConfig PolicyConfig::for_vocab() {
    PolicyConfig cfg;
    cfg.vocab_size = vocab().size();
    cfg.stop_token = vocab().answer_close();
    return cfg;
}

std::size_t PolicyConfig::w1_offset() const {
    return static_cast<std::size_t>(vocab_size) * embed_dim;
}
std::size_t PolicyConfig::b1_offset() const {
    return w1_offset() + static_cast<std::size_t>(hidden_dim) * input_dim();
}
std::size_t PolicyConfig::b2_offset() const {
    return w2_offset() + static_cast<std::size_t>(vocab_size) * hidden_dim;
}
std::size_t PolicyConfig::w2_offset() const {
    return b1_offset() + static_cast<std::size_t>(hidden_dim);
}
std::size_t PolicyConfig::param_count() const {
    return b2_offset() + static_cast<std::size_t>(vocab_size);
}

void PolicyConfig::validate() const {
    if (vocab_size < 2) throw std::invalid_argument("PolicyConfig: vocab_size < 2");
    if (embed_dim < 1 || hidden_dim < 1) {
        throw std::invalid_argument("PolicyConfig: dimensions must be positive");
    }
    if (context_k < 0) throw std::invalid_argument("PolicyConfig: negative context_k");
    if (max_len < 1) throw std::invalid_argument("PolicyConfig: max_len < 1");
    if (stop_token < 0 || stop_token >= vocab_size) {
        throw std::invalid_argument("PolicyConfig: stop_token outside vocabulary");
    }
}

PolicyParams PolicyParams::zeros(const PolicyConfig& cfg) {
    cfg.validate();
    return PolicyParams{cfg, std::vector<double>(cfg.param_count(), 0.0)};
}

PolicyParams PolicyParams::random_init(const PolicyConfig& cfg, double scale,
                                       std::mt19937_64& rng) {
    cfg.validate();
    PolicyParams p{cfg, std::vector<double>(cfg.param_count())};
    std::normal_distribution<double> dist(0.0, scale);
    for (double& v : p.theta) v = dist(rng);
    return p;
}

namespace {

struct Slices {
    const double* embed;
    const double* w1;
    const double* b1;
    const double* w2;
    const double* b2;

    explicit Slices(const PolicyParams& p)
        : embed(p.theta.data() + p.cfg.embed_offset()),
          w1(p.theta.data() + p.cfg.w1_offset()),
          b1(p.theta.data() + p.cfg.b1_offset()),
          w2(p.theta.data() + p.cfg.w2_offset()),
          b2(p.theta.data() + p.cfg.b2_offset()) {}
};

struct MutableSlices {
    double* embed;
    double* w1;
    double* b1;
    double* w2;
    double* b2;

    MutableSlices(std::vector<double>& theta, const PolicyConfig& cfg)
        : embed(theta.data() + cfg.embed_offset()),
          w1(theta.data() + cfg.w1_offset()),
          b1(theta.data() + cfg.b1_offset()),
          w2(theta.data() + cfg.w2_offset()),
          b2(theta.data() + cfg.b2_offset()) {}
};

void check_tokens(const TokenSequence& seq, int vocab_size, const char* what) {
    for (TokenId t : seq) {
        if (t < 0 || t >= vocab_size) {
            throw std::invalid_argument(std::string(what) + ": token id outside vocabulary");
        }
    }
}

// Scratch buffers for one forward/backward step.
struct Workspace {
    std::vector<double> x, a1, h, z;

    explicit Workspace(const PolicyConfig& cfg)
        : x(static_cast<std::size_t>(cfg.input_dim())),
          a1(static_cast<std::size_t>(cfg.hidden_dim)),
          h(static_cast<std::size_t>(cfg.hidden_dim)),
          z(static_cast<std::size_t>(cfg.vocab_size)) {}
};

// Input features for generation position t: mean-pooled prompt embeddings,
// then the last context_k generated tokens, most recent first, zero-padded.
void build_features(const PolicyParams& p, const Slices& s, const TokenSequence& prompt,
                    const TokenSequence& generated, std::size_t t, Workspace& ws) {
    const auto& ops = k::active();
    const int e = p.cfg.embed_dim;
    std::fill(ws.x.begin(), ws.x.end(), 0.0);
    if (!prompt.empty()) {
        for (TokenId tok : prompt) {
            ops.axpy(1.0, s.embed + static_cast<std::size_t>(tok) * e, ws.x.data(),
                     static_cast<std::size_t>(e));
        }
        ops.scale(ws.x.data(), 1.0 / static_cast<double>(prompt.size()),
                  static_cast<std::size_t>(e));
    }
    for (int j = 1; j <= p.cfg.context_k; ++j) {
        const std::ptrdiff_t idx = static_cast<std::ptrdiff_t>(t) - j;
        if (idx < 0) break;
        const TokenId tok = generated[static_cast<std::size_t>(idx)];
        std::memcpy(ws.x.data() + static_cast<std::size_t>(j) * e,
                    s.embed + static_cast<std::size_t>(tok) * e,
                    sizeof(double) * static_cast<std::size_t>(e));
    }
}

// Fills a1, h and z from the features in ws.x.
void forward_logits(const PolicyParams& p, const Slices& s, Workspace& ws) {
    const auto& ops = k::active();
    const auto hd = static_cast<std::size_t>(p.cfg.hidden_dim);
    const auto in = static_cast<std::size_t>(p.cfg.input_dim());
    const auto vs = static_cast<std::size_t>(p.cfg.vocab_size);

    ops.matvec(s.w1, ws.x.data(), ws.a1.data(), hd, in);
    ops.axpy(1.0, s.b1, ws.a1.data(), hd);
    for (std::size_t i = 0; i < hd; ++i) ws.h[i] = std::tanh(ws.a1[i]);
    ops.matvec(s.w2, ws.h.data(), ws.z.data(), vs, hd);
    ops.axpy(1.0, s.b2, ws.z.data(), vs);
    for (std::size_t i = 0; i < vs; ++i) {
        if (!std::isfinite(ws.z[i])) {
            throw std::runtime_error("policy forward: non-finite logit");
        }
    }
}

std::size_t sample_from(const std::vector<double>& probs, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double u = unit(rng);
    double cum = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        cum += probs[i];
        if (u < cum) return i;
    }
    return probs.size() - 1;  // rounding slack
}

}  // namespace

std::vector<double> policy_forward(const PolicyParams& params, const TokenSequence& prompt,
                                   const TokenSequence& generated) {
    params.cfg.validate();
    check_tokens(prompt, params.cfg.vocab_size, "policy_forward prompt");
    check_tokens(generated, params.cfg.vocab_size, "policy_forward generated");
    Slices s(params);
    Workspace ws(params.cfg);
    build_features(params, s, prompt, generated, generated.size(), ws);
    forward_logits(params, s, ws);
    k::softmax_inplace(ws.z.data(), ws.z.size(), 1.0);
    return ws.z;
}

std::vector<SampledResponse> sample_responses(const PolicyParams& params,
                                              const TokenSequence& prompt, int n,
                                              double temperature, std::mt19937_64& rng) {
    params.cfg.validate();
    if (n < 1) throw std::invalid_argument("sample_responses: n < 1");
    if (!(temperature > 0.0)) throw std::invalid_argument("sample_responses: temperature <= 0");
    check_tokens(prompt, params.cfg.vocab_size, "sample_responses prompt");

    Slices s(params);
    Workspace ws(params.cfg);
    std::vector<double> probs(static_cast<std::size_t>(params.cfg.vocab_size));
    std::vector<SampledResponse> out;
    out.reserve(static_cast<std::size_t>(n));

    for (int i = 0; i < n; ++i) {
        SampledResponse resp;
        while (static_cast<int>(resp.tokens.size()) < params.cfg.max_len) {
            build_features(params, s, prompt, resp.tokens, resp.tokens.size(), ws);
            forward_logits(params, s, ws);
            probs = ws.z;
            k::softmax_inplace(probs.data(), probs.size(), temperature);
            const std::size_t tok = sample_from(probs, rng);
            const double lp =
                k::softmax_inplace_with_logprob(ws.z.data(), ws.z.size(), tok, temperature);
            resp.tokens.push_back(static_cast<TokenId>(tok));
            resp.logprobs.push_back(lp);
            if (static_cast<int>(tok) == params.cfg.stop_token) break;
        }
        resp.truncated =
            resp.tokens.empty() || resp.tokens.back() != params.cfg.stop_token;
        out.push_back(std::move(resp));
    }
    return out;
}

TokenSequence greedy_decode(const PolicyParams& params, const TokenSequence& prompt) {
    params.cfg.validate();
    check_tokens(prompt, params.cfg.vocab_size, "greedy_decode prompt");
    Slices s(params);
    Workspace ws(params.cfg);
    TokenSequence tokens;
    while (static_cast<int>(tokens.size()) < params.cfg.max_len) {
        build_features(params, s, prompt, tokens, tokens.size(), ws);
        forward_logits(params, s, ws);
        std::size_t best = 0;
        for (std::size_t i = 1; i < ws.z.size(); ++i) {
            if (ws.z[i] > ws.z[best]) best = i;
        }
        tokens.push_back(static_cast<TokenId>(best));
        if (static_cast<int>(best) == params.cfg.stop_token) break;
    }
    return tokens;
}

std::vector<double> logprob_of_sequence(const PolicyParams& params,
                                        const TokenSequence& prompt,
                                        const TokenSequence& response, double temperature) {
    params.cfg.validate();
    if (!(temperature > 0.0)) {
        throw std::invalid_argument("logprob_of_sequence: temperature <= 0");
    }
    check_tokens(prompt, params.cfg.vocab_size, "logprob_of_sequence prompt");
    check_tokens(response, params.cfg.vocab_size, "logprob_of_sequence response");

    Slices s(params);
    Workspace ws(params.cfg);
    std::vector<double> lps(response.size());
    for (std::size_t t = 0; t < response.size(); ++t) {
        build_features(params, s, prompt, response, t, ws);
        forward_logits(params, s, ws);
        lps[t] = k::softmax_inplace_with_logprob(
            ws.z.data(), ws.z.size(), static_cast<std::size_t>(response[t]), temperature);
    }
    return lps;
}

void accumulate_sequence_grad(const PolicyParams& params, const TokenSequence& prompt,
                              const TokenSequence& response,
                              const std::vector<double>& coeff, double temperature,
                              std::vector<double>& grad) {
    params.cfg.validate();
    if (coeff.size() != response.size()) {
        throw std::invalid_argument("accumulate_sequence_grad: coeff/response mismatch");
    }
    if (grad.size() != params.cfg.param_count()) {
        throw std::invalid_argument("accumulate_sequence_grad: grad size mismatch");
    }
    if (!(temperature > 0.0)) {
        throw std::invalid_argument("accumulate_sequence_grad: temperature <= 0");
    }
    check_tokens(prompt, params.cfg.vocab_size, "accumulate_sequence_grad prompt");
    check_tokens(response, params.cfg.vocab_size, "accumulate_sequence_grad response");

    const auto& ops = k::active();
    Slices s(params);
    MutableSlices g(grad, params.cfg);
    Workspace ws(params.cfg);

    const auto e = static_cast<std::size_t>(params.cfg.embed_dim);
    const auto hd = static_cast<std::size_t>(params.cfg.hidden_dim);
    const auto in = static_cast<std::size_t>(params.cfg.input_dim());
    const auto vs = static_cast<std::size_t>(params.cfg.vocab_size);

    std::vector<double> dz(vs), dh(hd), da1(hd), dx(in);

    for (std::size_t t = 0; t < response.size(); ++t) {
        const double c = coeff[t];
        if (c == 0.0) continue;

        build_features(params, s, prompt, response, t, ws);
        forward_logits(params, s, ws);
        k::softmax_inplace(ws.z.data(), vs, temperature);  // ws.z now holds probs

        // d logp_y / dz = (1/T) (one_hot(y) - p)
        const double scale = c / temperature;
        for (std::size_t i = 0; i < vs; ++i) dz[i] = -scale * ws.z[i];
        dz[static_cast<std::size_t>(response[t])] += scale;

        ops.axpy(1.0, dz.data(), g.b2, vs);
        ops.outer_accum(g.w2, dz.data(), ws.h.data(), vs, hd);

        std::fill(dh.begin(), dh.end(), 0.0);
        ops.matvec_t_accum(s.w2, dz.data(), dh.data(), vs, hd);
        for (std::size_t i = 0; i < hd; ++i) da1[i] = dh[i] * (1.0 - ws.h[i] * ws.h[i]);

        ops.axpy(1.0, da1.data(), g.b1, hd);
        ops.outer_accum(g.w1, da1.data(), ws.x.data(), hd, in);

        std::fill(dx.begin(), dx.end(), 0.0);
        ops.matvec_t_accum(s.w1, da1.data(), dx.data(), hd, in);

        if (!prompt.empty()) {
            const double inv_p = 1.0 / static_cast<double>(prompt.size());
            for (TokenId tok : prompt) {
                ops.axpy(inv_p, dx.data(), g.embed + static_cast<std::size_t>(tok) * e, e);
            }
        }
        for (int j = 1; j <= params.cfg.context_k; ++j) {
            const std::ptrdiff_t idx = static_cast<std::ptrdiff_t>(t) - j;
            if (idx < 0) break;
            const TokenId tok = response[static_cast<std::size_t>(idx)];
            ops.axpy(1.0, dx.data() + static_cast<std::size_t>(j) * e,
                     g.embed + static_cast<std::size_t>(tok) * e, e);
        }
    }
}

}  // namespace ladder
