#pragma once

#include <cstdint>
#include <deque>
#include <string>
#include <vector>

namespace ladder {

// One row per training step; eval columns carry the latest probe forward
// between probes so every row is complete.
struct MetricsRow {
    std::int64_t step = 0;
    std::string stage;
    double mean_reward = 0.0;
    double reward_std_w = 0.0;       // std of per-step mean reward, last-W window
    double reward_std_open_w = 0.0;  // same, restricted to open-ended-task rewards
    double loss = 0.0;
    double kl = 0.0;
    double clip_fraction = 0.0;
    double eval_acc_in = 0.0;
    double eval_acc_held = 0.0;
};

std::string metrics_csv_header();
std::string metrics_row_csv(const MetricsRow& row);
std::string metrics_to_csv(const std::vector<MetricsRow>& rows);
std::vector<MetricsRow> metrics_from_csv(const std::string& content);

// Population std of values observed within the trailing `window` steps.
// Steps without an observation simply contribute nothing.
class WindowedStd {
  public:
    explicit WindowedStd(std::int64_t window) : window_(window) {}

    void push(std::int64_t step, double value);
    // Std over retained values at `step`; 0 with fewer than two values.
    double value(std::int64_t step);

  private:
    void drop_before(std::int64_t step);
    std::int64_t window_;
    std::deque<std::pair<std::int64_t, double>> entries_;
};

}  // namespace ladder
