#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "scaletrack/dataset.hpp"
#include "scaletrack/tracker.hpp"

namespace scaletrack {

inline constexpr std::size_t kPrecisionPoints = 51;  // thresholds 0..50 px
inline constexpr std::size_t kSuccessPoints = 101;   // thresholds i / 100

double precision_threshold(std::size_t i);
double success_threshold(std::size_t i);

struct Curves {
    std::vector<double> precision;  // fraction with centre error <= threshold
    std::vector<double> success;    // fraction with IoU > threshold
    double precision_at_20 = 0.0;
    double success_at_50 = 0.0;
    double auc = 0.0;               // mean of the success curve
    std::size_t frames = 0;
};

Curves compute_curves(std::span<const double> center_errors, std::span<const double> overlaps);

struct SequenceReport {
    std::string name;
    std::vector<std::string> attributes;
    std::vector<double> center_errors;
    std::vector<double> overlaps;
    Curves curves;
    std::size_t low_confidence_frames = 0;
    double seconds = 0.0;
    double fps = 0.0;
};

struct EvalReport {
    std::string method;
    std::vector<SequenceReport> sequences;  // sorted by name
    Curves aggregate;                       // frame-weighted over all sequences
    std::map<std::string, Curves> by_attribute;
    std::vector<std::string> failures;      // "name: message" for sequences that did not run
    double fps = 0.0;
};

SequenceReport evaluate_sequence(const TrackResult& result, const Sequence& sequence);

/// One result per sequence, matched by position.
EvalReport evaluate(const std::vector<TrackResult>& results, const std::vector<Sequence>& sequences);

/// Pools already evaluated sequences into aggregate and attribute curves.
EvalReport aggregate(std::string method, std::vector<SequenceReport> sequences,
                     std::vector<std::string> failures = {});

/// Report as JSON; timing fields only when requested, so the default output
/// is reproducible.
nlohmann::json report_to_json(const EvalReport& report, bool include_timing);

/// Writes "threshold,value" rows.
void write_curve_csv(const std::filesystem::path& path, const std::vector<double>& values,
                     bool precision);

} // namespace scaletrack
