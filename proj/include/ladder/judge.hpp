#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>

#include "ladder/task.hpp"
#include "ladder/vocab.hpp"

namespace ladder {

struct CandidateSample {
    std::string candidate_id;  // "<task-id>#k<index>", unique within a sampling pass
    std::string task_id;
    TokenSequence prompt;
    TokenSequence response;
    std::optional<double> judge_score;  // 0-100 once judged
};

// Scores a candidate response against its task on a 0-100 scale.
class Judge {
  public:
    virtual ~Judge() = default;
    virtual std::string name() const = 0;
    virtual double score(const CandidateSample& candidate, const TaskInstance& task) const = 0;
};

// Deterministic reward-derived judge:
//   70 * accuracy + 20 * format + 10 * (well-formed with non-empty reasoning).
class OracleJudge : public Judge {
  public:
    explicit OracleJudge(double tau = 0.5) : tau_(tau) {}
    std::string name() const override { return "oracle"; }
    double score(const CandidateSample& candidate, const TaskInstance& task) const override;

  private:
    double tau_;
};

// Offline judge adapter: scores come from a line-delimited file, one
// "<candidate-id> <score>" pair per line. Lookup by candidate id; a missing
// or malformed entry is an error.
class FileJudge : public Judge {
  public:
    explicit FileJudge(const std::filesystem::path& path);
    std::string name() const override { return "file:" + path_; }
    double score(const CandidateSample& candidate, const TaskInstance& task) const override;
    std::size_t entry_count() const { return scores_.size(); }

  private:
    std::string path_;
    std::map<std::string, double> scores_;
};

}  // namespace ladder
