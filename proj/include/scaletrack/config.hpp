#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "scaletrack/hog.hpp"
#include "scaletrack/scale.hpp"
#include "scaletrack/translation.hpp"

namespace scaletrack {

struct TrackerConfig {
    ScaleMethod method = ScaleMethod::hrsem;
    ScaleParams scale;
    TranslationParams translation;
    HogConfig hog;

    std::string provider = "hog";
    std::vector<std::string> translation_layers = {"hog"};
    std::string scale_layer = "hog-fine";

    double padding = 4.0;  // search area / target area
    double min_search_cells = 400.0;
    double max_search_cells = 1600.0;
    // HRSEM only: take translation features from the full-frame map when the
    // translation layer equals the scale layer.
    bool share_frame_features = false;
    double min_target_size = 4.0;  // pixels, per side
};

void validate(const TrackerConfig& cfg);

/// Flat JSON object; every key optional. Unknown keys are rejected.
TrackerConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const TrackerConfig& cfg);
TrackerConfig load_config(const std::filesystem::path& path);

} // namespace scaletrack
