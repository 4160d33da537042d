#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "ladder/task.hpp"

namespace ladder {

// All writers go through a temp file in the target directory followed by a
// rename, so readers never observe partial output.
void write_text_atomic(const std::filesystem::path& path, const std::string& content);
void write_lines_atomic(const std::filesystem::path& path,
                        const std::vector<std::string>& lines);

std::vector<std::string> read_lines(const std::filesystem::path& path);

void save_tasks_jsonl(const std::filesystem::path& path,
                      const std::vector<TaskInstance>& tasks);
std::vector<TaskInstance> load_tasks_jsonl(const std::filesystem::path& path);

}  // namespace ladder
