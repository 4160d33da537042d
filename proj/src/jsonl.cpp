#include "ladder/jsonl.hpp"

#include <fstream>
#include <stdexcept>

namespace ladder {

void write_text_atomic(const std::filesystem::path& path, const std::string& content) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out << content;
        out.flush();
        if (!out) throw std::runtime_error("short write to " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

void write_lines_atomic(const std::filesystem::path& path,
                        const std::vector<std::string>& lines) {
    std::string content;
    std::size_t total = 0;
    for (const std::string& line : lines) total += line.size() + 1;
    content.reserve(total);
    for (const std::string& line : lines) {
        content += line;
        content += '\n';
    }
    write_text_atomic(path, content);
}

std::vector<std::string> read_lines(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.empty()) lines.push_back(line);
    }
    return lines;
}

void save_tasks_jsonl(const std::filesystem::path& path,
                      const std::vector<TaskInstance>& tasks) {
    std::vector<std::string> lines;
    lines.reserve(tasks.size());
    for (const TaskInstance& t : tasks) lines.push_back(task_to_json(t).dump());
    write_lines_atomic(path, lines);
}

std::vector<TaskInstance> load_tasks_jsonl(const std::filesystem::path& path) {
    std::vector<TaskInstance> tasks;
    for (const std::string& line : read_lines(path)) {
        tasks.push_back(task_from_json(nlohmann::json::parse(line)));
    }
    return tasks;
}

}  // namespace ladder
