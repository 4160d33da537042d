#include "ladder/judge.hpp"

#include <cctype>
#include <fstream>
#include <stdexcept>

#include "ladder/parse.hpp"
#include "ladder/rewards.hpp"

namespace ladder {

double OracleJudge::score(const CandidateSample& candidate, const TaskInstance& task) const {
    const std::string raw = vocab().detokenize(candidate.response);
    const RewardBreakdown breakdown = ladder::score(raw, task, tau_);
    const ParsedResponse parsed = parse_response(raw, task.stage, task.kind);

    bool reasoned = false;
    if (parsed.format_ok) {
        for (char c : parsed.reasoning_text) {
            if (!std::isspace(static_cast<unsigned char>(c))) {
                reasoned = true;
                break;
            }
        }
    }
    return 70.0 * breakdown.accuracy + 20.0 * breakdown.format + (reasoned ? 10.0 : 0.0);
}

FileJudge::FileJudge(const std::filesystem::path& path) : path_(path.string()) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("FileJudge: cannot open " + path_);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        // Trim trailing carriage return and surrounding whitespace.
        std::size_t from = 0, to = line.size();
        while (from < to && std::isspace(static_cast<unsigned char>(line[from]))) ++from;
        while (to > from && std::isspace(static_cast<unsigned char>(line[to - 1]))) --to;
        if (from == to) continue;

        const std::string entry = line.substr(from, to - from);
        const std::size_t split = entry.find_last_of(" \t");
        if (split == std::string::npos) {
            throw std::runtime_error("FileJudge: line " + std::to_string(line_no) +
                                     " has no score field");
        }
        std::string id = entry.substr(0, split);
        while (!id.empty() && std::isspace(static_cast<unsigned char>(id.back()))) id.pop_back();
        double value = 0.0;
        try {
            value = std::stod(entry.substr(split + 1));
        } catch (const std::exception&) {
            throw std::runtime_error("FileJudge: line " + std::to_string(line_no) +
                                     " has a malformed score");
        }
        if (!(value >= 0.0 && value <= 100.0)) {
            throw std::runtime_error("FileJudge: line " + std::to_string(line_no) +
                                     " score outside [0,100]");
        }
        if (!scores_.emplace(id, value).second) {
            throw std::runtime_error("FileJudge: duplicate candidate id '" + id + "'");
        }
    }
}

double FileJudge::score(const CandidateSample& candidate, const TaskInstance&) const {
    auto it = scores_.find(candidate.candidate_id);
    if (it == scores_.end()) {
        throw std::runtime_error("FileJudge: no score for candidate '" +
                                 candidate.candidate_id + "'");
    }
    return it->second;
}

}  // namespace ladder
