#include "ladder/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace ladder {
namespace {

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, ',')) fields.push_back(field);
    return fields;
}

}  // namespace

std::string metrics_csv_header() {
    return "step,stage,mean_reward,reward_std_w,reward_std_open_w,loss,kl,clip_fraction,"
           "eval_acc_in,eval_acc_held";
}

std::string metrics_row_csv(const MetricsRow& row) {
    std::string out = std::to_string(row.step);
    out += ',';
    out += row.stage;
    for (double v : {row.mean_reward, row.reward_std_w, row.reward_std_open_w, row.loss,
                     row.kl, row.clip_fraction, row.eval_acc_in, row.eval_acc_held}) {
        out += ',';
        out += fmt(v);
    }
    return out;
}

std::string metrics_to_csv(const std::vector<MetricsRow>& rows) {
    std::string out = metrics_csv_header();
    out += '\n';
    for (const MetricsRow& row : rows) {
        out += metrics_row_csv(row);
        out += '\n';
    }
    return out;
}

std::vector<MetricsRow> metrics_from_csv(const std::string& content) {
    std::istringstream in(content);
    std::string line;
    if (!std::getline(in, line) || line != metrics_csv_header()) {
        throw std::runtime_error("metrics: bad or missing CSV header");
    }
    std::vector<MetricsRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto fields = split_csv(line);
        if (fields.size() != 10) throw std::runtime_error("metrics: bad CSV row");
        MetricsRow row;
        row.step = std::stoll(fields[0]);
        row.stage = fields[1];
        row.mean_reward = std::stod(fields[2]);
        row.reward_std_w = std::stod(fields[3]);
        row.reward_std_open_w = std::stod(fields[4]);
        row.loss = std::stod(fields[5]);
        row.kl = std::stod(fields[6]);
        row.clip_fraction = std::stod(fields[7]);
        row.eval_acc_in = std::stod(fields[8]);
        row.eval_acc_held = std::stod(fields[9]);
        rows.push_back(std::move(row));
    }
    return rows;
}

void WindowedStd::push(std::int64_t step, double value) {
    drop_before(step);
    entries_.emplace_back(step, value);
}

double WindowedStd::value(std::int64_t step) {
    drop_before(step);
    if (entries_.size() < 2) return 0.0;
    double mean = 0.0;
    for (const auto& [s, v] : entries_) mean += v;
    mean /= static_cast<double>(entries_.size());
    double var = 0.0;
    for (const auto& [s, v] : entries_) var += (v - mean) * (v - mean);
    var /= static_cast<double>(entries_.size());
    return std::sqrt(var);
}

void WindowedStd::drop_before(std::int64_t step) {
    while (!entries_.empty() && entries_.front().first <= step - window_) {
        entries_.pop_front();
    }
}

}  // namespace ladder
