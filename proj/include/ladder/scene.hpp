#pragma once

#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "ladder/answer.hpp"

namespace ladder {

struct SceneObject {
    std::string shape;
    std::string color;
    BoundingBox box;  // one grid cell, integer coordinates

    // Category label in normalized form, e.g. "red circle".
    std::string category() const { return color + " " + shape; }
};

// Symbolic stand-in for an image. An empty object list marks a text-only
// task (arithmetic); visual generators always place at least one object.
struct SceneSpec {
    int grid_width = 8;
    int grid_height = 8;
    std::vector<SceneObject> objects;

    bool text_only() const { return objects.empty(); }
    void validate() const;  // grid positive, boxes inside grid, palette labels known
};

nlohmann::json scene_to_json(const SceneSpec& scene);
SceneSpec scene_from_json(const nlohmann::json& j);

struct GeneratorConfig {
    int grid_width = 8;
    int grid_height = 8;
    int min_objects = 2;
    int max_objects = 5;
    // Bounds the distinct category count per scene, which keeps the
    // category-overlap score lattice coarse enough for judge filtering.
    int max_distinct_categories = 3;
    // Draw (shape, color) pairs from the reserved held-out combinations
    // instead of the training combinations.
    bool held_out = false;

    void validate() const;
};

// Shape/color combinations with (shape_index + color_index) % 4 == 3 are
// reserved for the held-out evaluation split and never appear in
// in-distribution scenes.
bool pair_held_out(int shape_index, int color_index);

SceneSpec generate_scene(const GeneratorConfig& cfg, std::mt19937_64& rng);

}  // namespace ladder
