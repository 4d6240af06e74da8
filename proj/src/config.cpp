#include "scaletrack/config.hpp"

#include <fstream>
#include <functional>
#include <map>

#include "scaletrack/errors.hpp"

namespace scaletrack {
namespace {

using Setter = std::function<void(TrackerConfig&, const nlohmann::json&)>;

template <typename T>
Setter field(T TrackerConfig::*member) {
    return [member](TrackerConfig& c, const nlohmann::json& v) { c.*member = v.get<T>(); };
}

template <typename S, typename T>
Setter nested(S TrackerConfig::*group, T S::*member) {
    return [group, member](TrackerConfig& c, const nlohmann::json& v) {
        (c.*group).*member = v.get<T>();
    };
}

const std::map<std::string, Setter>& setters() {
    static const std::map<std::string, Setter> table = {
        {"method", [](TrackerConfig& c, const nlohmann::json& v) {
             c.method = parse_scale_method(v.get<std::string>());
         }},
        {"scale_step", nested(&TrackerConfig::scale, &ScaleParams::step)},
        {"scale_levels", nested(&TrackerConfig::scale, &ScaleParams::levels)},
        {"learning_rate", nested(&TrackerConfig::scale, &ScaleParams::learning_rate)},
        {"scale_sigma", nested(&TrackerConfig::scale, &ScaleParams::sigma)},
        {"newton_iterations", nested(&TrackerConfig::scale, &ScaleParams::newton_iterations)},
        {"scale_lambda", nested(&TrackerConfig::scale, &ScaleParams::lambda)},
        {"scale_max_template_cells", nested(&TrackerConfig::scale, &ScaleParams::max_template_cells)},
        {"dsst_max_area", nested(&TrackerConfig::scale, &ScaleParams::dsst_max_area)},
        {"basis_channels", nested(&TrackerConfig::translation, &TranslationParams::basis_channels)},
        {"translation_lambda", nested(&TrackerConfig::translation, &TranslationParams::lambda)},
        {"output_sigma_factor", nested(&TrackerConfig::translation, &TranslationParams::sigma_factor)},
        {"cg_iterations_first", nested(&TrackerConfig::translation, &TranslationParams::cg_iterations_first)},
        {"cg_iterations_update", nested(&TrackerConfig::translation, &TranslationParams::cg_iterations_update)},
        {"cg_tolerance", nested(&TrackerConfig::translation, &TranslationParams::cg_tolerance)},
        {"memory_capacity", nested(&TrackerConfig::translation, &TranslationParams::memory_capacity)},
        {"memory_decay", nested(&TrackerConfig::translation, &TranslationParams::memory_decay)},
        {"spatial_weight_gain", nested(&TrackerConfig::translation, &TranslationParams::weight_gain)},
        {"translation_newton_iterations", nested(&TrackerConfig::translation, &TranslationParams::newton_iterations)},
        {"hog_cell_size", nested(&TrackerConfig::hog, &HogConfig::cell_size)},
        {"hog_orientations", [](TrackerConfig& c, const nlohmann::json& v) {
             c.hog.orientations = v.get<int>();
             c.hog.channels = 3 * c.hog.orientations + 4;
         }},
        {"hog_clip", nested(&TrackerConfig::hog, &HogConfig::clip)},
        {"provider", field(&TrackerConfig::provider)},
        {"translation_layers", field(&TrackerConfig::translation_layers)},
        {"scale_layer", field(&TrackerConfig::scale_layer)},
        {"padding", field(&TrackerConfig::padding)},
        {"min_search_cells", field(&TrackerConfig::min_search_cells)},
        {"max_search_cells", field(&TrackerConfig::max_search_cells)},
        {"share_frame_features", field(&TrackerConfig::share_frame_features)},
        {"min_target_size", field(&TrackerConfig::min_target_size)},
    };
    return table;
}

} // namespace

void validate(const TrackerConfig& cfg) {
    validate(cfg.scale);
    validate(cfg.translation);
    validate(cfg.hog);
    if (cfg.translation_layers.empty()) throw InvalidInput("config: need at least one translation layer");
    if (!(cfg.padding >= 1.0)) throw InvalidInput("config: padding must be >= 1");
    if (!(cfg.min_search_cells >= 16.0) || !(cfg.max_search_cells >= cfg.min_search_cells))
        throw InvalidInput("config: invalid search cell bounds");
    if (!(cfg.min_target_size >= 1.0)) throw InvalidInput("config: min target size must be >= 1");
}

TrackerConfig config_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw InvalidInput("config: expected a JSON object");
    TrackerConfig cfg;
    for (const auto& [key, value] : j.items()) {
        const auto it = setters().find(key);
        if (it == setters().end()) throw InvalidInput("config: unknown key '" + key + "'");
        try {
            it->second(cfg, value);
        } catch (const nlohmann::json::exception& e) {
            throw InvalidInput("config: bad value for '" + key + "': " + e.what());
        }
    }
    validate(cfg);
    return cfg;
}

nlohmann::json config_to_json(const TrackerConfig& c) {
    return {
        {"method", to_string(c.method)},
        {"scale_step", c.scale.step},
        {"scale_levels", c.scale.levels},
        {"learning_rate", c.scale.learning_rate},
        {"scale_sigma", c.scale.sigma},
        {"newton_iterations", c.scale.newton_iterations},
        {"scale_lambda", c.scale.lambda},
        {"scale_max_template_cells", c.scale.max_template_cells},
        {"dsst_max_area", c.scale.dsst_max_area},
        {"basis_channels", c.translation.basis_channels},
        {"translation_lambda", c.translation.lambda},
        {"output_sigma_factor", c.translation.sigma_factor},
        {"cg_iterations_first", c.translation.cg_iterations_first},
        {"cg_iterations_update", c.translation.cg_iterations_update},
        {"cg_tolerance", c.translation.cg_tolerance},
        {"memory_capacity", c.translation.memory_capacity},
        {"memory_decay", c.translation.memory_decay},
        {"spatial_weight_gain", c.translation.weight_gain},
        {"translation_newton_iterations", c.translation.newton_iterations},
        {"hog_cell_size", c.hog.cell_size},
        {"hog_orientations", c.hog.orientations},
        {"hog_clip", c.hog.clip},
        {"provider", c.provider},
        {"translation_layers", c.translation_layers},
        {"scale_layer", c.scale_layer},
        {"padding", c.padding},
        {"min_search_cells", c.min_search_cells},
        {"max_search_cells", c.max_search_cells},
        {"share_frame_features", c.share_frame_features},
        {"min_target_size", c.min_target_size},
    };
}

TrackerConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InvalidInput("config: cannot open " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw InvalidInput("config: " + path.string() + " is not valid JSON: " + e.what());
    }
    return config_from_json(j);
}

} // namespace scaletrack
