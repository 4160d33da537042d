#include "ladder/scene.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <stdexcept>

#include "ladder/vocab.hpp"

namespace ladder {

void SceneSpec::validate() const {
    if (grid_width < 1 || grid_height < 1) {
        throw std::invalid_argument("SceneSpec: grid dimensions must be positive");
    }
    std::set<std::pair<double, double>> cells;
    const auto& shapes = vocab().shapes();
    const auto& colors = vocab().colors();
    for (const SceneObject& o : objects) {
        if (std::find(shapes.begin(), shapes.end(), o.shape) == shapes.end()) {
            throw std::invalid_argument("SceneSpec: unknown shape '" + o.shape + "'");
        }
        if (std::find(colors.begin(), colors.end(), o.color) == colors.end()) {
            throw std::invalid_argument("SceneSpec: unknown color '" + o.color + "'");
        }
        if (!o.box.valid() || o.box.x_max > grid_width || o.box.y_max > grid_height) {
            throw std::invalid_argument("SceneSpec: object box outside grid");
        }
        if (!cells.insert({o.box.x_min, o.box.y_min}).second) {
            throw std::invalid_argument("SceneSpec: two objects share a cell");
        }
    }
}

nlohmann::json scene_to_json(const SceneSpec& scene) {
    nlohmann::json objects = nlohmann::json::array();
    for (const SceneObject& o : scene.objects) {
        objects.push_back({{"shape", o.shape},
                           {"color", o.color},
                           {"box", {o.box.x_min, o.box.y_min, o.box.x_max, o.box.y_max}}});
    }
    return {{"grid", {scene.grid_width, scene.grid_height}}, {"objects", objects}};
}

SceneSpec scene_from_json(const nlohmann::json& j) {
    SceneSpec scene;
    scene.grid_width = j.at("grid").at(0).get<int>();
    scene.grid_height = j.at("grid").at(1).get<int>();
    for (const auto& jo : j.at("objects")) {
        SceneObject o;
        o.shape = jo.at("shape").get<std::string>();
        o.color = jo.at("color").get<std::string>();
        const auto& b = jo.at("box");
        o.box = BoundingBox{b.at(0).get<double>(), b.at(1).get<double>(),
                            b.at(2).get<double>(), b.at(3).get<double>(), std::nullopt};
        scene.objects.push_back(std::move(o));
    }
    scene.validate();
    return scene;
}

void GeneratorConfig::validate() const {
    if (grid_width < 2 || grid_height < 2) {
        throw std::invalid_argument("GeneratorConfig: grid must be at least 2x2");
    }
    if (min_objects < 1 || max_objects < min_objects) {
        throw std::invalid_argument("GeneratorConfig: bad object count range");
    }
    if (max_objects > grid_width * grid_height) {
        throw std::invalid_argument("GeneratorConfig: more objects than cells");
    }
    if (max_objects > vocab().max_number()) {
        throw std::invalid_argument("GeneratorConfig: counts exceed the number vocabulary");
    }
    if (max_distinct_categories < 1) {
        throw std::invalid_argument("GeneratorConfig: need at least one category");
    }
    if (grid_width > vocab().max_number() || grid_height > vocab().max_number()) {
        throw std::invalid_argument("GeneratorConfig: grid exceeds the number vocabulary");
    }
}

bool pair_held_out(int shape_index, int color_index) {
    return (shape_index + color_index) % 4 == 3;
}

SceneSpec generate_scene(const GeneratorConfig& cfg, std::mt19937_64& rng) {
    cfg.validate();
    const auto& shapes = vocab().shapes();
    const auto& colors = vocab().colors();

    std::vector<std::pair<int, int>> pool;
    for (int si = 0; si < static_cast<int>(shapes.size()); ++si) {
        for (int ci = 0; ci < static_cast<int>(colors.size()); ++ci) {
            if (pair_held_out(si, ci) == cfg.held_out) pool.emplace_back(si, ci);
        }
    }

    const int max_distinct =
        std::min<int>(cfg.max_distinct_categories, static_cast<int>(pool.size()));
    std::uniform_int_distribution<int> distinct_dist(1, max_distinct);
    const int distinct = distinct_dist(rng);
    std::shuffle(pool.begin(), pool.end(), rng);
    pool.resize(static_cast<std::size_t>(distinct));

    std::uniform_int_distribution<int> count_dist(cfg.min_objects, cfg.max_objects);
    const int count = count_dist(rng);

    std::vector<int> cells(static_cast<std::size_t>(cfg.grid_width * cfg.grid_height));
    std::iota(cells.begin(), cells.end(), 0);
    std::shuffle(cells.begin(), cells.end(), rng);

    std::uniform_int_distribution<std::size_t> pick_pair(0, pool.size() - 1);
    SceneSpec scene;
    scene.grid_width = cfg.grid_width;
    scene.grid_height = cfg.grid_height;
    for (int k = 0; k < count; ++k) {
        const int cell = cells[static_cast<std::size_t>(k)];
        const int cx = cell % cfg.grid_width;
        const int cy = cell / cfg.grid_width;
        const auto [si, ci] = pool[pick_pair(rng)];
        SceneObject o;
        o.shape = shapes[static_cast<std::size_t>(si)];
        o.color = colors[static_cast<std::size_t>(ci)];
        o.box = BoundingBox{static_cast<double>(cx), static_cast<double>(cy),
                            static_cast<double>(cx + 1), static_cast<double>(cy + 1),
                            std::nullopt};
        scene.objects.push_back(std::move(o));
    }
    // Reading order keeps prompts canonical for a given object set.
    std::sort(scene.objects.begin(), scene.objects.end(),
              [](const SceneObject& a, const SceneObject& b) {
                  if (a.box.y_min != b.box.y_min) return a.box.y_min < b.box.y_min;
                  return a.box.x_min < b.box.x_min;
              });
    scene.validate();
    return scene;
}

}  // namespace ladder
