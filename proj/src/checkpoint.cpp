#include "ladder/checkpoint.hpp"

#include <fstream>
#include <iostream>
#include <stdexcept>

#include <json.hpp>

#include "ladder/jsonl.hpp"

namespace ladder {

void save_checkpoint(const std::filesystem::path& path, const PolicyParams& params,
                     const std::string& config_hash) {
    nlohmann::json j = {{"config_hash", config_hash},
                        {"policy",
                         {{"vocab_size", params.cfg.vocab_size},
                          {"embed_dim", params.cfg.embed_dim},
                          {"hidden_dim", params.cfg.hidden_dim},
                          {"context_k", params.cfg.context_k},
                          {"max_len", params.cfg.max_len},
                          {"stop_token", params.cfg.stop_token}}},
                        {"theta", params.theta}};
    write_text_atomic(path, j.dump());
}

PolicyParams load_checkpoint(const std::filesystem::path& path,
                             const std::string& expected_hash, bool force) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("checkpoint: cannot open " + path.string());
    nlohmann::json j;
    in >> j;

    const std::string stored = j.at("config_hash").get<std::string>();
    if (stored != expected_hash) {
        if (!force) {
            throw std::runtime_error("checkpoint: config hash mismatch (stored " + stored +
                                     ", expected " + expected_hash + "); use force to load");
        }
        std::cerr << "warning: loading checkpoint with mismatched config hash (stored "
                  << stored << ", expected " << expected_hash << ")\n";
    }

    const auto& p = j.at("policy");
    PolicyConfig cfg;
    cfg.vocab_size = p.at("vocab_size").get<int>();
    cfg.embed_dim = p.at("embed_dim").get<int>();
    cfg.hidden_dim = p.at("hidden_dim").get<int>();
    cfg.context_k = p.at("context_k").get<int>();
    cfg.max_len = p.at("max_len").get<int>();
    cfg.stop_token = p.at("stop_token").get<int>();
    cfg.validate();

    PolicyParams params{cfg, j.at("theta").get<std::vector<double>>()};
    if (params.theta.size() != cfg.param_count()) {
        throw std::runtime_error("checkpoint: parameter count mismatch");
    }
    return params;
}

}  // namespace ladder
