#include "ladder/task.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>

#include "ladder/parse.hpp"

namespace ladder {
namespace {

struct PromptBuilder {
    TokenSequence toks;

    void word(std::string_view w) { toks.push_back(vocab().id(w)); }
    void num(int v) { toks.push_back(vocab().number(v)); }
    void letter(char c) { toks.push_back(vocab().id(std::string(1, c))); }
    void box(const BoundingBox& b) {
        word("[");
        num(static_cast<int>(b.x_min));
        word(",");
        num(static_cast<int>(b.y_min));
        word(",");
        num(static_cast<int>(b.x_max));
        word(",");
        num(static_cast<int>(b.y_max));
        word("]");
    }
    void category(const std::string& color, const std::string& shape) {
        word(color);
        word(shape);
    }
    void append(const TokenSequence& other) {
        toks.insert(toks.end(), other.begin(), other.end());
    }
};

std::string box_text(const BoundingBox& b) {
    PromptBuilder pb;
    pb.box(b);
    return vocab().detokenize(pb.toks);
}

int uniform_int(std::mt19937_64& rng, int lo, int hi) {
    std::uniform_int_distribution<int> d(lo, hi);
    return d(rng);
}

bool coin(std::mt19937_64& rng) { return uniform_int(rng, 0, 1) == 1; }

template <class T>
const T& pick(const std::vector<T>& v, std::mt19937_64& rng) {
    return v[static_cast<std::size_t>(uniform_int(rng, 0, static_cast<int>(v.size()) - 1))];
}

// Distinct categories present in the scene, with their object indices,
// ordered by first appearance.
std::vector<std::pair<std::string, std::vector<std::size_t>>> present_categories(
    const SceneSpec& scene) {
    std::vector<std::pair<std::string, std::vector<std::size_t>>> out;
    for (std::size_t i = 0; i < scene.objects.size(); ++i) {
        const std::string cat = scene.objects[i].category();
        auto it = std::find_if(out.begin(), out.end(),
                               [&](const auto& e) { return e.first == cat; });
        if (it == out.end()) {
            out.push_back({cat, {i}});
        } else {
            it->second.push_back(i);
        }
    }
    return out;
}

// The (color, shape) question universe matching the scene's split. Scenes
// never mix in-distribution and held-out pairs, so the first object decides.
std::vector<std::pair<std::string, std::string>> category_pool_for(const SceneSpec& scene) {
    const auto& shapes = vocab().shapes();
    const auto& colors = vocab().colors();
    bool held_out = false;
    if (!scene.objects.empty()) {
        const SceneObject& o = scene.objects.front();
        const int si = static_cast<int>(
            std::find(shapes.begin(), shapes.end(), o.shape) - shapes.begin());
        const int ci = static_cast<int>(
            std::find(colors.begin(), colors.end(), o.color) - colors.begin());
        held_out = pair_held_out(si, ci);
    }
    std::vector<std::pair<std::string, std::string>> pool;
    for (std::size_t si = 0; si < shapes.size(); ++si) {
        for (std::size_t ci = 0; ci < colors.size(); ++ci) {
            if (pair_held_out(static_cast<int>(si), static_cast<int>(ci)) == held_out) {
                pool.emplace_back(colors[ci], shapes[si]);  // (color, shape)
            }
        }
    }
    return pool;
}

void emit_scene(PromptBuilder& pb, const SceneSpec& scene) {
    if (scene.text_only()) return;
    pb.word("scene");
    pb.word(":");
    pb.word("grid");
    pb.num(scene.grid_width);
    pb.num(scene.grid_height);
    pb.word(";");
    for (const SceneObject& o : scene.objects) {
        pb.category(o.color, o.shape);
        pb.word("at");
        pb.box(o.box);
        pb.word(";");
    }
}

void emit_options(PromptBuilder& pb, const std::vector<std::string>& texts) {
    pb.word("options");
    pb.word(":");
    for (std::size_t i = 0; i < texts.size(); ++i) {
        pb.letter(static_cast<char>('A' + i));
        pb.word(":");
        // Option bodies are themselves token renderings.
        PromptBuilder body;
        for (std::size_t from = 0; from < texts[i].size();) {
            std::size_t to = texts[i].find(' ', from);
            if (to == std::string::npos) to = texts[i].size();
            body.word(std::string_view(texts[i]).substr(from, to - from));
            from = to + 1;
        }
        pb.append(body.toks);
        pb.word(";");
    }
}

// A value near `truth` but distinct from it, kept within [0, limit].
int nearby_wrong_value(int truth, int limit, std::mt19937_64& rng) {
    const int lo = std::max(0, truth - 3);
    const int hi = std::min(limit, truth + 3);
    int v = truth;
    while (v == truth) v = uniform_int(rng, lo, hi);
    return v;
}

struct Arithmetic {
    int a = 0, b = 0, result = 0;
    std::string op;  // "+" or "-"
};

Arithmetic make_arithmetic(std::mt19937_64& rng) {
    Arithmetic ar;
    const int limit = vocab().max_number();
    if (coin(rng)) {
        ar.op = "+";
        ar.a = uniform_int(rng, 0, limit);
        ar.b = uniform_int(rng, 0, limit - ar.a);
        ar.result = ar.a + ar.b;
    } else {
        ar.op = "-";
        ar.a = uniform_int(rng, 0, limit);
        ar.b = uniform_int(rng, 0, ar.a);
        ar.result = ar.a - ar.b;
    }
    return ar;
}

// Shuffles option bodies into place and reports where the correct ones went.
std::vector<std::size_t> shuffle_options(std::vector<std::string>& texts,
                                         const std::set<std::size_t>& correct,
                                         std::mt19937_64& rng) {
    std::vector<std::size_t> order(texts.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<std::string> shuffled(texts.size());
    std::vector<std::size_t> correct_positions;
    for (std::size_t pos = 0; pos < order.size(); ++pos) {
        shuffled[pos] = texts[order[pos]];
        if (correct.count(order[pos])) correct_positions.push_back(pos);
    }
    texts = std::move(shuffled);
    std::sort(correct_positions.begin(), correct_positions.end());
    return correct_positions;
}

}  // namespace

void TaskInstance::validate() const {
    scene.validate();
    if (prompt_tokens.empty()) throw std::invalid_argument("TaskInstance: empty prompt");
    for (TokenId t : prompt_tokens) {
        if (t < 0 || t >= vocab().size()) {
            throw std::invalid_argument("TaskInstance: prompt token out of range");
        }
    }
    if (kind != TaskKind::math && scene.text_only()) {
        throw std::invalid_argument("TaskInstance: visual kind requires objects");
    }

    const bool choice = stage == StageId::multiple_choice;
    if (choice != !option_texts.empty()) {
        throw std::invalid_argument("TaskInstance: options present iff choice stage");
    }
    if (choice && option_texts.size() != 4) {
        throw std::invalid_argument("TaskInstance: choice tasks carry four options");
    }

    bool variant_ok = false;
    switch (stage) {
        case StageId::binary_decision:
            variant_ok = answer.is<BinaryAnswer>();
            break;
        case StageId::multiple_choice:
            variant_ok = (kind == TaskKind::classification) ? answer.is<MultiChoiceAnswer>()
                                                            : answer.is<SingleChoiceAnswer>();
            break;
        case StageId::open_ended:
            switch (kind) {
                case TaskKind::detection: variant_ok = answer.is<BoxListAnswer>(); break;
                case TaskKind::classification:
                    variant_ok = answer.is<CategorySetAnswer>();
                    break;
                case TaskKind::math: variant_ok = answer.is<NumericAnswer>(); break;
            }
            break;
    }
    if (!variant_ok) {
        throw std::invalid_argument("TaskInstance: answer variant inconsistent with stage/kind");
    }
    answer.validate();
}

TaskInstance render_task(const SceneSpec& scene, StageId stage, TaskKind kind,
                         std::mt19937_64& rng) {
    scene.validate();
    if (kind != TaskKind::math && scene.text_only()) {
        throw std::invalid_argument("render_task: visual kind requires a populated scene");
    }

    TaskInstance task;
    task.stage = stage;
    task.kind = kind;
    task.scene = scene;

    PromptBuilder pb;
    emit_scene(pb, scene);
    pb.word("question");
    pb.word(":");

    const auto present = present_categories(scene);
    const auto pool = category_pool_for(scene);
    const int count = static_cast<int>(scene.objects.size());
    const bool text_math = kind == TaskKind::math && scene.text_only();
    Arithmetic ar;
    if (text_math) ar = make_arithmetic(rng);

    switch (stage) {
        case StageId::binary_decision: {
            const bool truth = coin(rng);
            switch (kind) {
                case TaskKind::detection: {
                    // "is there a <category> at <box>?"
                    std::string color, shape;
                    BoundingBox where;
                    if (truth) {
                        const SceneObject& o = scene.objects[static_cast<std::size_t>(
                            uniform_int(rng, 0, count - 1))];
                        color = o.color;
                        shape = o.shape;
                        where = o.box;
                    } else {
                        bool found = false;
                        for (int tries = 0; tries < 64 && !found; ++tries) {
                            const auto& [c, s] = pick(pool, rng);
                            const int cx = uniform_int(rng, 0, scene.grid_width - 1);
                            const int cy = uniform_int(rng, 0, scene.grid_height - 1);
                            BoundingBox cand{static_cast<double>(cx), static_cast<double>(cy),
                                             static_cast<double>(cx + 1),
                                             static_cast<double>(cy + 1), std::nullopt};
                            bool holds = false;
                            for (const SceneObject& o : scene.objects) {
                                holds = holds || (o.color == c && o.shape == s &&
                                                  o.box.same_extent(cand));
                            }
                            if (!holds) {
                                color = c;
                                shape = s;
                                where = cand;
                                found = true;
                            }
                        }
                        if (!found) {
                            // Guaranteed false: a category absent from the scene.
                            for (const auto& [c, s] : pool) {
                                const std::string cat = c + " " + s;
                                if (std::none_of(present.begin(), present.end(),
                                                 [&](const auto& e) { return e.first == cat; })) {
                                    color = c;
                                    shape = s;
                                    break;
                                }
                            }
                            where = BoundingBox{0, 0, 1, 1, std::nullopt};
                        }
                    }
                    pb.word("is");
                    pb.word("there");
                    pb.word("a");
                    pb.category(color, shape);
                    pb.word("at");
                    pb.box(where);
                    pb.word("?");
                    break;
                }
                case TaskKind::classification: {
                    // "is there a <category>?"
                    std::string color, shape;
                    if (truth) {
                        const auto& cat = present[static_cast<std::size_t>(
                            uniform_int(rng, 0, static_cast<int>(present.size()) - 1))];
                        const SceneObject& o = scene.objects[cat.second.front()];
                        color = o.color;
                        shape = o.shape;
                    } else {
                        std::vector<std::pair<std::string, std::string>> absent;
                        for (const auto& [c, s] : pool) {
                            const std::string cat = c + " " + s;
                            if (std::none_of(present.begin(), present.end(),
                                             [&](const auto& e) { return e.first == cat; })) {
                                absent.emplace_back(c, s);
                            }
                        }
                        const auto& [c, s] = pick(absent, rng);
                        color = c;
                        shape = s;
                    }
                    pb.word("is");
                    pb.word("there");
                    pb.word("a");
                    pb.category(color, shape);
                    pb.word("?");
                    break;
                }
                case TaskKind::math: {
                    if (text_math) {
                        // "is <a> <op> <b> = <c>?"
                        const int claim =
                            truth ? ar.result
                                  : nearby_wrong_value(ar.result, vocab().max_number(), rng);
                        pb.word("is");
                        pb.num(ar.a);
                        pb.word(ar.op);
                        pb.num(ar.b);
                        pb.word("=");
                        pb.num(claim);
                        pb.word("?");
                    } else {
                        // "is the number of objects exactly <n>?"
                        const int claim =
                            truth ? count : nearby_wrong_value(count, vocab().max_number(), rng);
                        pb.word("is");
                        pb.word("the");
                        pb.word("number");
                        pb.word("of");
                        pb.word("objects");
                        pb.word("exactly");
                        pb.num(claim);
                        pb.word("?");
                    }
                    break;
                }
            }
            task.answer.value = BinaryAnswer{truth};
            break;
        }

        case StageId::multiple_choice: {
            std::vector<std::string> texts;
            std::set<std::size_t> correct;
            switch (kind) {
                case TaskKind::detection: {
                    // "which box bounds a <category>?" One option is a box of
                    // that category; distractor cells never contain it.
                    const auto& target = present[static_cast<std::size_t>(
                        uniform_int(rng, 0, static_cast<int>(present.size()) - 1))];
                    const SceneObject& sample = scene.objects[pick(target.second, rng)];
                    std::set<std::pair<int, int>> taken;
                    for (std::size_t idx : target.second) {
                        const BoundingBox& b = scene.objects[idx].box;
                        taken.insert({static_cast<int>(b.x_min), static_cast<int>(b.y_min)});
                    }
                    texts.push_back(box_text(sample.box));
                    correct.insert(0);
                    while (texts.size() < 4) {
                        const int cx = uniform_int(rng, 0, scene.grid_width - 1);
                        const int cy = uniform_int(rng, 0, scene.grid_height - 1);
                        if (!taken.insert({cx, cy}).second) continue;
                        texts.push_back(box_text(BoundingBox{
                            static_cast<double>(cx), static_cast<double>(cy),
                            static_cast<double>(cx + 1), static_cast<double>(cy + 1),
                            std::nullopt}));
                    }
                    auto positions = shuffle_options(texts, correct, rng);
                    task.answer.value =
                        SingleChoiceAnswer{static_cast<char>('A' + positions.front())};
                    pb.word("which");
                    pb.word("box");
                    pb.word("bounds");
                    pb.word("a");
                    pb.category(sample.color, sample.shape);
                    pb.word("?");
                    break;
                }
                case TaskKind::classification: {
                    // "which categories appear?" Correct letters are the
                    // present categories; distractors are absent ones.
                    for (std::size_t i = 0; i < present.size(); ++i) {
                        texts.push_back(present[i].first);
                        correct.insert(i);
                    }
                    std::vector<std::string> absent;
                    for (const auto& [c, s] : pool) {
                        const std::string cat = c + " " + s;
                        if (std::none_of(present.begin(), present.end(),
                                         [&](const auto& e) { return e.first == cat; })) {
                            absent.push_back(cat);
                        }
                    }
                    std::shuffle(absent.begin(), absent.end(), rng);
                    for (std::size_t i = 0; texts.size() < 4; ++i) texts.push_back(absent[i]);
                    auto positions = shuffle_options(texts, correct, rng);
                    MultiChoiceAnswer answer;
                    for (std::size_t pos : positions) {
                        answer.options.insert(static_cast<char>('A' + pos));
                    }
                    task.answer.value = std::move(answer);
                    pb.word("which");
                    pb.word("categories");
                    pb.word("appear");
                    pb.word("?");
                    break;
                }
                case TaskKind::math: {
                    const int truth_value = text_math ? ar.result : count;
                    std::set<int> values{truth_value};
                    texts.push_back(std::to_string(truth_value));
                    correct.insert(0);
                    while (texts.size() < 4) {
                        const int v = uniform_int(
                            rng, std::max(0, truth_value - 4),
                            std::min(vocab().max_number(), truth_value + 4));
                        if (!values.insert(v).second) continue;
                        texts.push_back(std::to_string(v));
                    }
                    auto positions = shuffle_options(texts, correct, rng);
                    task.answer.value =
                        SingleChoiceAnswer{static_cast<char>('A' + positions.front())};
                    if (text_math) {
                        pb.word("what");
                        pb.word("is");
                        pb.num(ar.a);
                        pb.word(ar.op);
                        pb.num(ar.b);
                        pb.word("?");
                    } else {
                        pb.word("how");
                        pb.word("many");
                        pb.word("objects");
                        pb.word("?");
                    }
                    break;
                }
            }
            task.option_texts = texts;
            emit_options(pb, texts);
            break;
        }

        case StageId::open_ended: {
            switch (kind) {
                case TaskKind::detection: {
                    // "list all boxes of the <category>."
                    const auto& target = present[static_cast<std::size_t>(
                        uniform_int(rng, 0, static_cast<int>(present.size()) - 1))];
                    BoxListAnswer answer;
                    for (std::size_t idx : target.second) {
                        answer.boxes.push_back(scene.objects[idx].box);
                    }
                    const SceneObject& o = scene.objects[target.second.front()];
                    task.answer.value = std::move(answer);
                    pb.word("list");
                    pb.word("all");
                    pb.word("boxes");
                    pb.word("of");
                    pb.word("the");
                    pb.category(o.color, o.shape);
                    pb.word("?");
                    break;
                }
                case TaskKind::classification: {
                    CategorySetAnswer answer;
                    for (const auto& e : present) answer.labels.insert(e.first);
                    task.answer.value = std::move(answer);
                    pb.word("what");
                    pb.word("categories");
                    pb.word("appear");
                    pb.word("?");
                    break;
                }
                case TaskKind::math: {
                    task.answer.value = NumericAnswer{Rational(text_math ? ar.result : count)};
                    if (text_math) {
                        pb.word("what");
                        pb.word("is");
                        pb.num(ar.a);
                        pb.word(ar.op);
                        pb.num(ar.b);
                        pb.word("?");
                    } else {
                        pb.word("how");
                        pb.word("many");
                        pb.word("objects");
                        pb.word("?");
                    }
                    break;
                }
            }
            break;
        }
    }

    pb.word("answer");
    pb.word(":");
    task.prompt_tokens = std::move(pb.toks);
    task.id = "unassigned";
    task.validate();
    return task;
}

TaskInstance make_task(StageId stage, TaskKind kind, const GeneratorConfig& cfg,
                       std::mt19937_64& rng) {
    if (kind == TaskKind::math && coin(rng)) {
        SceneSpec text_scene;
        text_scene.grid_width = cfg.grid_width;
        text_scene.grid_height = cfg.grid_height;
        return render_task(text_scene, stage, kind, rng);
    }
    return render_task(generate_scene(cfg, rng), stage, kind, rng);
}

nlohmann::json answer_to_json(const AnswerSpec& answer) {
    nlohmann::json j;
    if (const auto* b = std::get_if<BinaryAnswer>(&answer.value)) {
        j = {{"type", "binary"}, {"yes", b->yes}};
    } else if (const auto* s = std::get_if<SingleChoiceAnswer>(&answer.value)) {
        j = {{"type", "single_choice"}, {"option", std::string(1, s->option)}};
    } else if (const auto* m = std::get_if<MultiChoiceAnswer>(&answer.value)) {
        nlohmann::json opts = nlohmann::json::array();
        for (char c : m->options) opts.push_back(std::string(1, c));
        j = {{"type", "multi_choice"}, {"options", opts}};
    } else if (const auto* cats = std::get_if<CategorySetAnswer>(&answer.value)) {
        nlohmann::json labels = nlohmann::json::array();
        for (const std::string& label : cats->labels) labels.push_back(label);
        j = {{"type", "categories"}, {"labels", labels}};
    } else if (const auto* boxes = std::get_if<BoxListAnswer>(&answer.value)) {
        nlohmann::json arr = nlohmann::json::array();
        for (const BoundingBox& b : boxes->boxes) {
            nlohmann::json jb = {b.x_min, b.y_min, b.x_max, b.y_max};
            if (b.confidence) jb.push_back(*b.confidence);
            arr.push_back(jb);
        }
        j = {{"type", "boxes"}, {"boxes", arr}};
    } else {
        const auto& n = std::get<NumericAnswer>(answer.value);
        j = {{"type", "numeric"}, {"num", n.value.num()}, {"den", n.value.den()}};
    }
    return j;
}

AnswerSpec answer_from_json(const nlohmann::json& j) {
    AnswerSpec answer;
    const std::string type = j.at("type").get<std::string>();
    if (type == "binary") {
        answer.value = BinaryAnswer{j.at("yes").get<bool>()};
    } else if (type == "single_choice") {
        answer.value = SingleChoiceAnswer{j.at("option").get<std::string>().at(0)};
    } else if (type == "multi_choice") {
        MultiChoiceAnswer m;
        for (const auto& o : j.at("options")) m.options.insert(o.get<std::string>().at(0));
        answer.value = std::move(m);
    } else if (type == "categories") {
        CategorySetAnswer cats;
        for (const auto& l : j.at("labels")) cats.labels.insert(l.get<std::string>());
        answer.value = std::move(cats);
    } else if (type == "boxes") {
        BoxListAnswer boxes;
        for (const auto& jb : j.at("boxes")) {
            BoundingBox b{jb.at(0).get<double>(), jb.at(1).get<double>(),
                          jb.at(2).get<double>(), jb.at(3).get<double>(), std::nullopt};
            if (jb.size() == 5) b.confidence = jb.at(4).get<double>();
            boxes.boxes.push_back(b);
        }
        answer.value = std::move(boxes);
    } else if (type == "numeric") {
        answer.value =
            NumericAnswer{Rational(j.at("num").get<std::int64_t>(), j.at("den").get<std::int64_t>())};
    } else {
        throw std::invalid_argument("answer_from_json: unknown type '" + type + "'");
    }
    return answer;
}

nlohmann::json task_to_json(const TaskInstance& task) {
    nlohmann::json j;
    j["id"] = task.id;
    j["stage"] = std::string(stage_name(task.stage));
    j["kind"] = std::string(kind_name(task.kind));
    j["prompt_tokens"] = task.prompt_tokens;
    if (!task.option_texts.empty()) j["options"] = task.option_texts;
    j["answer"] = answer_to_json(task.answer);
    j["scene"] = scene_to_json(task.scene);
    return j;
}

TaskInstance task_from_json(const nlohmann::json& j) {
    TaskInstance task;
    task.id = j.at("id").get<std::string>();
    task.stage = stage_from_name(j.at("stage").get<std::string>());
    task.kind = kind_from_name(j.at("kind").get<std::string>());
    task.prompt_tokens = j.at("prompt_tokens").get<TokenSequence>();
    if (j.contains("options")) task.option_texts = j.at("options").get<std::vector<std::string>>();
    task.answer = answer_from_json(j.at("answer"));
    task.scene = scene_from_json(j.at("scene"));
    task.validate();
    return task;
}

}  // namespace ladder
