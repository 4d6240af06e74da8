#include <algorithm>
#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "scaletrack/config.hpp"
#include "scaletrack/dataset.hpp"
#include "scaletrack/errors.hpp"
#include "scaletrack/evaluation.hpp"
#include "scaletrack/oracle_suite.hpp"
#include "scaletrack/synth.hpp"
#include "scaletrack/tracker.hpp"

namespace fs = std::filesystem;
using namespace scaletrack;

namespace {

enum Exit { kOk = 0, kVerificationFailed = 1, kInputError = 2, kTrackingFailed = 3 };

struct Common {
    std::string config_path;
    std::vector<std::string> methods;
    std::string out_dir;
    bool timing = false;
};

TrackerConfig load_tracker_config(const Common& c) {
    TrackerConfig cfg = c.config_path.empty() ? TrackerConfig{} : load_config(c.config_path);
    if (!c.methods.empty()) cfg.method = parse_scale_method(c.methods.front());
    if (const char* env = std::getenv("SCALETRACK_PROVIDER"); env && *env) cfg.provider = env;
    return cfg;
}

std::unique_ptr<FeatureProvider> provider_for(const TrackerConfig& cfg) {
    return make_provider(cfg.provider, cfg.hog);
}

Box parse_init(const std::string& text) {
    // Same convention as ground-truth files: 1-indexed corner.
    Box b = parse_box_line(text);
    b.x -= 1.0;
    b.y -= 1.0;
    return b;
}

void write_json(const fs::path& path, const nlohmann::json& j) {
    std::ofstream out(path);
    if (!out) throw InvalidInput("cannot write " + path.string());
    out << j.dump(2) << '\n';
}

void write_boxes(const fs::path& path, const std::vector<Box>& boxes) {
    std::ofstream out(path);
    if (!out) throw InvalidInput("cannot write " + path.string());
    out << "frame,x,y,w,h\n";
    char line[160];
    for (std::size_t i = 0; i < boxes.size(); ++i) {
        const Box& b = boxes[i];
        std::snprintf(line, sizeof line, "%zu,%.4f,%.4f,%.4f,%.4f\n", i + 1, b.x + 1.0, b.y + 1.0, b.width,
                      b.height);
        out << line;
    }
}

int cmd_track(const Common& c, const std::string& sequence_dir, const std::string& init) {
    const TrackerConfig cfg = load_tracker_config(c);
    Sequence seq;
    Box box;
    if (!init.empty()) {
        seq = load_frames(sequence_dir);
        box = parse_init(init);
    } else {
        if (!fs::exists(fs::path(sequence_dir) / "groundtruth_rect.txt"))
            throw InvalidInput("no ground truth in " + sequence_dir + "; pass --init x,y,w,h");
        seq = load_sequence(sequence_dir);
        box = seq.ground_truth.front();
    }
    auto provider = provider_for(cfg);
    const TrackResult r =
        track_sequence(seq.size(), [&](std::size_t i) { return seq.frame(i); }, box, cfg, *provider);

    fs::create_directories(c.out_dir);
    write_boxes(fs::path(c.out_dir) / "boxes.csv", r.boxes);
    nlohmann::json meta;
    meta["sequence"] = seq.name;
    meta["frames"] = seq.size();
    meta["config"] = config_to_json(cfg);
    meta["low_confidence_frames"] = std::count(r.low_confidence.begin(), r.low_confidence.end(), true);
    if (c.timing) meta["fps"] = r.fps;
    write_json(fs::path(c.out_dir) / "run.json", meta);
    std::cout << seq.name << ": " << seq.size() << " frames tracked\n";
    return kOk;
}

struct SequenceOutcome {
    std::optional<SequenceReport> report;
    std::string error;
};

std::vector<SequenceOutcome> run_bench(const std::vector<fs::path>& dirs, const TrackerConfig& cfg,
                                       std::size_t workers) {
    std::vector<SequenceOutcome> outcomes(dirs.size());
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i = next++; i < dirs.size(); i = next++) {
            try {
                const Sequence seq = load_sequence(dirs[i]);
                auto provider = provider_for(cfg);
                const TrackResult r = track_sequence(seq.size(), [&](std::size_t k) { return seq.frame(k); },
                                                     seq.ground_truth.front(), cfg, *provider);
                outcomes[i].report = evaluate_sequence(r, seq);
            } catch (const std::exception& e) {
                outcomes[i].error = dirs[i].filename().string() + ": " + e.what();
            }
        }
    };
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < std::max<std::size_t>(1, workers); ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
    return outcomes;
}

void write_attribute_csv(const fs::path& path, const EvalReport& rep) {
    std::ofstream out(path);
    if (!out) throw InvalidInput("cannot write " + path.string());
    out << "attribute,frames,precision_at_20,success_at_0.5,auc\n";
    char line[160];
    for (const auto& [tag, c] : rep.by_attribute) {
        std::snprintf(line, sizeof line, "%s,%zu,%.6f,%.6f,%.6f\n", tag.c_str(), c.frames, c.precision_at_20,
                      c.success_at_50, c.auc);
        out << line;
    }
}

int cmd_bench(const Common& c, const std::string& root, std::size_t workers) {
    const TrackerConfig base = load_tracker_config(c);
    const auto dirs = list_sequences(root);
    if (dirs.empty()) throw IngestionError("no sequences under " + root);
    std::vector<std::string> methods = c.methods;
    if (methods.empty()) methods.push_back(to_string(base.method));

    fs::create_directories(c.out_dir);
    const fs::path out(c.out_dir);
    std::ofstream comparison(out / "comparison.csv");
    comparison << "method,sequences,frames,precision_at_20,success_at_0.5,auc\n";
    bool any_ok = false;
    for (const auto& name : methods) {
        TrackerConfig cfg = base;
        cfg.method = parse_scale_method(name);
        std::vector<SequenceReport> reports;
        std::vector<std::string> failures;
        for (auto& o : run_bench(dirs, cfg, workers)) {
            if (o.report) reports.push_back(std::move(*o.report));
            else failures.push_back(o.error);
        }
        any_ok = any_ok || !reports.empty();
        const EvalReport rep = aggregate(to_string(cfg.method), std::move(reports), std::move(failures));
        const std::string m = to_string(cfg.method);
        write_json(out / ("report_" + m + ".json"), report_to_json(rep, c.timing));
        write_curve_csv(out / ("precision_" + m + ".csv"), rep.aggregate.precision, true);
        write_curve_csv(out / ("success_" + m + ".csv"), rep.aggregate.success, false);
        write_attribute_csv(out / ("attributes_" + m + ".csv"), rep);
        char line[200];
        std::snprintf(line, sizeof line, "%s,%zu,%zu,%.6f,%.6f,%.6f\n", m.c_str(), rep.sequences.size(),
                      rep.aggregate.frames, rep.aggregate.precision_at_20, rep.aggregate.success_at_50,
                      rep.aggregate.auc);
        comparison << line;
        std::cout << m << ": " << rep.sequences.size() << " sequences, precision@20 " << rep.aggregate.precision_at_20
                  << ", success@0.5 " << rep.aggregate.success_at_50 << ", AUC " << rep.aggregate.auc << '\n';
        for (const auto& f : rep.failures) std::cerr << "failed: " << f << '\n';
    }
    return any_ok ? kOk : kTrackingFailed;
}

int cmd_synth(const Common& c, SynthParams p) {
    const Sequence seq = synth_sequence(p);
    save_sequence(seq, c.out_dir);
    std::cout << "wrote " << seq.size() << " frames to " << c.out_dir << '\n';
    return kOk;
}

int cmd_oracle(std::uint64_t seed, const std::string& force_fail) {
    const auto results = oracle::run_oracle_suite(seed, force_fail);
    std::size_t failed = 0;
    for (const auto& r : results) {
        std::printf("%-28s %s  %s\n", r.name.c_str(), r.passed ? "PASS" : "FAIL", r.detail.c_str());
        if (!r.passed) ++failed;
    }
    std::printf("%zu/%zu oracles passed\n", results.size() - failed, results.size());
    return failed == 0 ? kOk : kVerificationFailed;
}

void parse_pair(const std::string& text, double& a, double& b, char sep) {
    const auto cut = text.find(sep);
    if (cut == std::string::npos) throw InvalidInput("expected A" + std::string(1, sep) + "B, got '" + text + "'");
    a = std::stod(text.substr(0, cut));
    b = std::stod(text.substr(cut + 1));
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Correlation-filter tracking with one-pass scale estimation"};
    app.require_subcommand(1);

    Common common;
    auto add_common = [&](CLI::App* sub, bool methods) {
        sub->add_option("--config", common.config_path, "JSON tracker configuration")->check(CLI::ExistingFile);
        if (methods)
            sub->add_option("--method", common.methods, "hrsem, rrsem or dsst (repeatable for bench)");
        sub->add_option("--out", common.out_dir, "Output directory")->required();
        sub->add_flag("--timing", common.timing, "Include wall-clock timing in outputs");
    };

    std::string sequence_dir, init;
    auto* track = app.add_subcommand("track", "Track one sequence");
    track->add_option("sequence", sequence_dir, "Sequence directory (OTB layout)")->required();
    track->add_option("--init", init, "Initial box x,y,w,h (1-indexed, as in ground-truth files)");
    add_common(track, true);

    std::string root;
    std::size_t workers = std::max(1u, std::thread::hardware_concurrency());
    auto* bench = app.add_subcommand("bench", "Evaluate methods on a dataset");
    bench->add_option("dataset", root, "Directory of sequence directories")->required();
    bench->add_option("--workers", workers, "Parallel sequences")->check(CLI::PositiveNumber);
    add_common(bench, true);

    SynthParams sp;
    std::string kind = "static", size, object, drift;
    auto* synth = app.add_subcommand("synth", "Render a synthetic sequence");
    synth->add_option("kind", kind, "static, zoom, drift or zoom+drift");
    synth->add_option("--frames", sp.frames, "Frame count");
    synth->add_option("--size", size, "Frame size WxH");
    synth->add_option("--object", object, "First-frame object size WxH");
    synth->add_option("--rate", sp.zoom_rate, "Size factor per frame");
    synth->add_option("--drift", drift, "Motion per frame dx,dy");
    synth->add_option("--seed", sp.seed, "Texture seed");
    synth->add_option("--out", common.out_dir, "Output directory")->required();

    std::uint64_t seed = 1;
    std::string force_fail;
    auto* oracle_cmd = app.add_subcommand("oracle", "Run the brute-force oracle suite");
    oracle_cmd->add_option("--seed", seed, "Seed for random instances");
    oracle_cmd->add_option("--force-fail", force_fail, "Report the named oracle as failed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kInputError;
    }

    try {
        if (*track) return cmd_track(common, sequence_dir, init);
        if (*bench) return cmd_bench(common, root, workers);
        if (*synth) {
            sp.kind = parse_synth_kind(kind);
            double a = 0, b = 0;
            if (!size.empty()) {
                parse_pair(size, a, b, 'x');
                sp.width = static_cast<std::size_t>(a);
                sp.height = static_cast<std::size_t>(b);
            }
            if (!object.empty()) parse_pair(object, sp.object_width, sp.object_height, 'x');
            if (!drift.empty()) parse_pair(drift, sp.drift_x, sp.drift_y, ',');
            return cmd_synth(common, sp);
        }
        if (*oracle_cmd) return cmd_oracle(seed, force_fail);
    } catch (const InvalidInput& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kInputError;
    } catch (const IngestionError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kInputError;
    } catch (const ContractError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kInputError;
    } catch (const std::exception& e) {
        std::cerr << "tracking failed: " << e.what() << '\n';
        return kTrackingFailed;
    }
    return kInputError;
}
