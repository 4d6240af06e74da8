#include "scaletrack/evaluation.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>

#include "scaletrack/errors.hpp"

namespace scaletrack {

double precision_threshold(std::size_t i) { return static_cast<double>(i); }
double success_threshold(std::size_t i) { return static_cast<double>(i) / 100.0; }

Curves compute_curves(std::span<const double> center_errors, std::span<const double> overlaps) {
    if (center_errors.size() != overlaps.size())
        throw InvalidInput("curves: error and overlap counts differ");
    Curves c;
    c.frames = center_errors.size();
    c.precision.assign(kPrecisionPoints, 0.0);
    c.success.assign(kSuccessPoints, 0.0);
    if (c.frames == 0) return c;
    const double n = static_cast<double>(c.frames);
    for (std::size_t i = 0; i < kPrecisionPoints; ++i) {
        const double t = precision_threshold(i);
        const auto k = std::count_if(center_errors.begin(), center_errors.end(),
                                     [t](double e) { return e <= t; });
        c.precision[i] = static_cast<double>(k) / n;
    }
    for (std::size_t i = 0; i < kSuccessPoints; ++i) {
        const double t = success_threshold(i);
        const auto k = std::count_if(overlaps.begin(), overlaps.end(), [t](double o) { return o > t; });
        c.success[i] = static_cast<double>(k) / n;
    }
    c.precision_at_20 = c.precision[20];
    c.success_at_50 = c.success[50];
    double sum = 0.0;
    for (double v : c.success) sum += v;
    c.auc = sum / static_cast<double>(kSuccessPoints);
    return c;
}

SequenceReport evaluate_sequence(const TrackResult& result, const Sequence& sequence) {
    if (result.boxes.size() != sequence.ground_truth.size())
        throw InvalidInput("evaluate: '" + sequence.name + "' has " + std::to_string(result.boxes.size()) +
                           " predictions vs " + std::to_string(sequence.ground_truth.size()) +
                           " ground-truth boxes");
    SequenceReport r;
    r.name = sequence.name;
    r.attributes = sequence.attributes;
    for (std::size_t i = 0; i < result.boxes.size(); ++i) {
        r.center_errors.push_back(center_error(result.boxes[i], sequence.ground_truth[i]));
        r.overlaps.push_back(iou(result.boxes[i], sequence.ground_truth[i]));
    }
    r.curves = compute_curves(r.center_errors, r.overlaps);
    r.low_confidence_frames = static_cast<std::size_t>(
        std::count(result.low_confidence.begin(), result.low_confidence.end(), true));
    for (double s : result.frame_seconds) r.seconds += s;
    r.fps = result.fps;
    return r;
}

EvalReport aggregate(std::string method, std::vector<SequenceReport> sequences,
                     std::vector<std::string> failures) {
    std::sort(sequences.begin(), sequences.end(),
              [](const SequenceReport& a, const SequenceReport& b) { return a.name < b.name; });
    EvalReport rep;
    rep.method = std::move(method);
    rep.failures = std::move(failures);
    std::sort(rep.failures.begin(), rep.failures.end());

    std::vector<double> errors, overlaps;
    std::map<std::string, std::pair<std::vector<double>, std::vector<double>>> tagged;
    double seconds = 0.0;
    std::size_t frames = 0;
    for (const auto& s : sequences) {
        errors.insert(errors.end(), s.center_errors.begin(), s.center_errors.end());
        overlaps.insert(overlaps.end(), s.overlaps.begin(), s.overlaps.end());
        for (const auto& tag : s.attributes) {
            auto& [e, o] = tagged[tag];
            e.insert(e.end(), s.center_errors.begin(), s.center_errors.end());
            o.insert(o.end(), s.overlaps.begin(), s.overlaps.end());
        }
        seconds += s.seconds;
        frames += s.center_errors.size();
    }
    rep.aggregate = compute_curves(errors, overlaps);
    for (const auto& [tag, eo] : tagged) rep.by_attribute[tag] = compute_curves(eo.first, eo.second);
    rep.fps = seconds > 0.0 ? static_cast<double>(frames) / seconds : 0.0;
    rep.sequences = std::move(sequences);
    return rep;
}

EvalReport evaluate(const std::vector<TrackResult>& results, const std::vector<Sequence>& sequences) {
    if (results.size() != sequences.size())
        throw InvalidInput("evaluate: " + std::to_string(results.size()) + " results vs " +
                           std::to_string(sequences.size()) + " sequences");
    std::vector<SequenceReport> reports;
    for (std::size_t i = 0; i < results.size(); ++i) reports.push_back(evaluate_sequence(results[i], sequences[i]));
    return aggregate("", std::move(reports));
}

namespace {

nlohmann::json curves_json(const Curves& c) {
    return {{"frames", c.frames},
            {"precision_at_20", c.precision_at_20},
            {"success_at_0.5", c.success_at_50},
            {"auc", c.auc},
            {"precision_curve", c.precision},
            {"success_curve", c.success}};
}

} // namespace

nlohmann::json report_to_json(const EvalReport& rep, bool include_timing) {
    nlohmann::json j;
    j["method"] = rep.method;
    j["aggregation"] = "frame-weighted";
    j["precision_thresholds"] = "0..50 px, step 1, centre error <= threshold";
    j["success_thresholds"] = "0..1, step 0.01, IoU > threshold";
    j["aggregate"] = curves_json(rep.aggregate);
    j["attributes"] = nlohmann::json::object();
    for (const auto& [tag, c] : rep.by_attribute) j["attributes"][tag] = curves_json(c);
    j["sequences"] = nlohmann::json::array();
    for (const auto& s : rep.sequences) {
        nlohmann::json e = curves_json(s.curves);
        e["name"] = s.name;
        e["attributes"] = s.attributes;
        e["low_confidence_frames"] = s.low_confidence_frames;
        if (include_timing) e["fps"] = s.fps;
        j["sequences"].push_back(std::move(e));
    }
    j["failures"] = rep.failures;
    if (include_timing) j["fps"] = rep.fps;
    return j;
}

void write_curve_csv(const std::filesystem::path& path, const std::vector<double>& values, bool precision) {
    std::ofstream out(path);
    if (!out) throw InvalidInput("cannot write " + path.string());
    out << "threshold,value\n";
    char buf[64];
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double t = precision ? precision_threshold(i) : success_threshold(i);
        std::snprintf(buf, sizeof buf, "%.2f,%.6f\n", t, values[i]);
        out << buf;
    }
}

} // namespace scaletrack
