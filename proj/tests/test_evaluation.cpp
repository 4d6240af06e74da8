#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>

#include "scaletrack/config.hpp"
#include "scaletrack/dataset.hpp"
#include "scaletrack/errors.hpp"
#include "scaletrack/evaluation.hpp"
#include "scaletrack/geometry.hpp"
#include "scaletrack/oracle_suite.hpp"
#include "scaletrack/oracles.hpp"
#include "scaletrack/synth.hpp"

using namespace scaletrack;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& tag) {
        path = fs::temp_directory_path() / ("scaletrack_test_" + tag + "_" + std::to_string(::getpid()));
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

void write_file(const fs::path& p, const std::string& text) {
    fs::create_directories(p.parent_path());
    std::ofstream(p) << text;
}

std::string message_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const std::exception& e) {
        return e.what();
    }
    return "";
}

// Boxes with the requested centre error and IoU relative to a 10x10 box at
// the origin, built by shifting along x (error e gives IoU (10-e)/(10+e)).
TrackResult shifted(const std::vector<double>& shifts) {
    TrackResult r;
    for (double s : shifts) r.boxes.push_back({s, 0, 10, 10});
    return r;
}

} // namespace

TEST_CASE("iou and centre error") {
    const Box a{0, 0, 10, 10};
    CHECK(iou(a, a) == 1.0);
    CHECK(iou(a, {20, 20, 5, 5}) == 0.0);
    CHECK(iou(a, {5, 0, 10, 10}) == doctest::Approx(1.0 / 3.0));
    CHECK(center_error(a, a) == 0.0);
    CHECK(center_error(a, {3, 4, 10, 10}) == doctest::Approx(5.0));
    CHECK(center_error(a, {10, 0, 10, 10}) == doctest::Approx(10.0));
    CHECK_THROWS_AS(iou(a, {0, 0, 0, 3}), InvalidInput);
    CHECK_THROWS_AS(center_error({0, 0, -1, 3}, a), InvalidInput);
    CHECK(oracle::find_case("geometry").run(1).passed);
}

TEST_CASE("handcrafted curves") {
    const std::vector<double> errors{5, 15, 25, 35}, overlaps{1.0, 0.6, 0.4, 0.0};
    const Curves c = compute_curves(errors, overlaps);
    CHECK(c.precision_at_20 == 0.5);
    CHECK(c.success_at_50 == 0.5);
    CHECK(c.precision.size() == kPrecisionPoints);
    CHECK(c.success.size() == kSuccessPoints);
    double auc = 0.0;
    for (std::size_t i = 0; i < kSuccessPoints; ++i) {
        const double expect = oracle::fraction_above(overlaps, static_cast<double>(i) / 100.0);
        CHECK(c.success[i] == expect);
        auc += expect / static_cast<double>(kSuccessPoints);
    }
    CHECK(c.auc == doctest::Approx(auc).epsilon(1e-15));
    for (std::size_t i = 0; i < kPrecisionPoints; ++i)
        CHECK(c.precision[i] == oracle::fraction_at_most(errors, static_cast<double>(i)));
    CHECK(precision_threshold(20) == 20.0);
    CHECK(success_threshold(50) == 0.5);
    CHECK_THROWS_AS(compute_curves(errors, std::vector<double>{1.0}), InvalidInput);
}

TEST_CASE("curves are monotone and bound the AUC") {
    CHECK(oracle::find_case("metrics").run(2).passed);
    oracle::Random rng(3);
    for (int inst = 0; inst < 50; ++inst) {
        const std::size_t n = rng.index(1, 40);
        std::vector<double> e(n), o(n);
        for (std::size_t i = 0; i < n; ++i) {
            e[i] = rng.uniform(0.0, 80.0);
            o[i] = rng.uniform(0.0, 1.0);
        }
        const Curves c = compute_curves(e, o);
        for (std::size_t i = 1; i < c.precision.size(); ++i) CHECK(c.precision[i] >= c.precision[i - 1]);
        for (std::size_t i = 1; i < c.success.size(); ++i) CHECK(c.success[i] <= c.success[i - 1]);
        CHECK(c.auc >= c.success.back());
        CHECK(c.auc <= c.success.front());
    }
}

TEST_CASE("perfect predictions") {
    Sequence seq;
    seq.name = "perfect";
    for (int i = 0; i < 5; ++i) seq.ground_truth.push_back({double(i), 2.0, 20, 30});
    TrackResult r;
    r.boxes = seq.ground_truth;
    const SequenceReport rep = evaluate_sequence(r, seq);
    CHECK(rep.curves.precision_at_20 == 1.0);
    CHECK(rep.curves.success_at_50 == 1.0);
    CHECK(rep.curves.auc > 0.99);
    r.boxes.pop_back();
    CHECK_THROWS_AS(evaluate_sequence(r, seq), InvalidInput);
}

TEST_CASE("aggregation weights by frame count and filters by attribute") {
    Sequence a, b;
    a.name = "b-seq";
    a.attributes = {"SV"};
    b.name = "a-seq";
    b.attributes = {"OCC"};
    for (int i = 0; i < 3; ++i) a.ground_truth.push_back({0, 0, 10, 10});
    b.ground_truth.push_back({0, 0, 10, 10});
    // a: errors 0, 0, 30; b: error 30.
    const TrackResult ra = shifted({0, 0, 30}), rb = shifted({30});
    const EvalReport rep = evaluate({ra, rb}, {a, b});
    REQUIRE(rep.sequences.size() == 2);
    CHECK(rep.sequences[0].name == "a-seq");
    CHECK(rep.aggregate.frames == 4);
    CHECK(rep.aggregate.precision_at_20 == 0.5);
    CHECK(rep.by_attribute.at("SV").precision_at_20 == doctest::Approx(2.0 / 3.0));
    CHECK(rep.by_attribute.at("OCC").precision_at_20 == 0.0);

    // A single-sequence aggregate equals that sequence's own curves.
    const EvalReport one = evaluate({ra}, {a});
    CHECK(one.aggregate.precision == one.sequences[0].curves.precision);
    CHECK(one.aggregate.success == one.sequences[0].curves.success);
    CHECK(one.aggregate.auc == one.sequences[0].curves.auc);
    CHECK_THROWS_AS(evaluate({ra}, {a, b}), InvalidInput);
}

TEST_CASE("report json omits timing by default") {
    Sequence a;
    a.name = "s";
    a.ground_truth = {{0, 0, 10, 10}};
    TrackResult r = shifted({1});
    r.fps = 123.0;
    r.frame_seconds = {0.01};
    const EvalReport rep = evaluate({r}, {a});
    const std::string plain = report_to_json(rep, false).dump();
    CHECK(plain.find("fps") == std::string::npos);
    CHECK(report_to_json(rep, true).dump().find("fps") != std::string::npos);

    TempDir dir("curve");
    write_curve_csv(dir.path / "p.csv", rep.aggregate.precision, true);
    std::ifstream in(dir.path / "p.csv");
    std::string header, first;
    std::getline(in, header);
    std::getline(in, first);
    CHECK(header == "threshold,value");
    CHECK(first == "0.00,0.000000");
}

TEST_CASE("ground-truth parsing") {
    const Box b = parse_box_line("198,214,34,81");
    CHECK(b == Box{198, 214, 34, 81});
    CHECK(parse_box_line("198\t214\t34\t81") == b);
    CHECK(parse_box_line("198 214 34 81") == b);
    CHECK_THROWS_AS(parse_box_line("1,2,3"), IngestionError);
    CHECK_THROWS_AS(parse_box_line("1,2,x,4"), IngestionError);

    TempDir dir("gt");
    write_file(dir.path / "gt.txt", "11,21,5,6\n\n1,1,2,2\n");
    const auto boxes = load_ground_truth(dir.path / "gt.txt");
    REQUIRE(boxes.size() == 2);
    CHECK(boxes[0] == Box{10, 20, 5, 6});
    write_file(dir.path / "bad.txt", "1,1,2,2\n1,1,2\n");
    CHECK(message_of([&] { load_ground_truth(dir.path / "bad.txt"); }).find("bad.txt:2") != std::string::npos);
    write_file(dir.path / "neg.txt", "1,1,-2,2\n");
    CHECK_THROWS_AS(load_ground_truth(dir.path / "neg.txt"), IngestionError);
}

TEST_CASE("sequence round trip through disk") {
    SynthParams p;
    p.kind = SynthKind::zoom;
    p.frames = 3;
    p.width = 64;
    p.height = 48;
    p.object_width = p.object_height = 16;
    const Sequence seq = synth_sequence(p);
    TempDir dir("seq");
    save_sequence(seq, dir.path / "zoom");
    const Sequence back = load_sequence(dir.path / "zoom");
    CHECK(back.name == "zoom");
    REQUIRE(back.size() == 3);
    REQUIRE(back.ground_truth.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(back.ground_truth[i].x == doctest::Approx(seq.ground_truth[i].x).epsilon(1e-4));
        CHECK(back.ground_truth[i].width == doctest::Approx(seq.ground_truth[i].width).epsilon(1e-4));
    }
    CHECK(back.has_attribute("SV"));
    const Frame f = back.frame(1);
    CHECK(f.width() == 64);
    CHECK(f.height() == 48);
    double err = 0.0;
    for (std::size_t i = 0; i < f.pixels().size(); ++i)
        err = std::max(err, std::abs(f.pixels().data()[i] - seq.frame(1).pixels().data()[i]));
    CHECK(err <= 0.5);
    CHECK(list_sequences(dir.path) == std::vector<fs::path>{dir.path / "zoom"});
}

TEST_CASE("frame and box count mismatch") {
    SynthParams p;
    p.frames = 3;
    p.width = p.height = 32;
    p.object_width = p.object_height = 8;
    TempDir dir("mismatch");
    save_sequence(synth_sequence(p), dir.path / "s");
    write_file(dir.path / "s" / "groundtruth_rect.txt", "1,1,8,8\n1,1,8,8\n");
    const std::string msg = message_of([&] { load_sequence(dir.path / "s"); });
    CHECK(msg.find("3 frames vs 2 boxes") != std::string::npos);
    CHECK_THROWS_AS(load_sequence(dir.path / "s"), IngestionError);
    CHECK(load_frames(dir.path / "s").size() == 3);

    write_file(dir.path / "s" / "attributes.txt", "SV\nWOBBLE\n");
    CHECK_THROWS_AS(load_frames(dir.path / "s"), IngestionError);
    CHECK_THROWS_AS(load_sequence(dir.path / "missing"), IngestionError);
}

TEST_CASE("synthetic sequences") {
    SynthParams p;
    const Sequence still = synth_sequence(p);
    REQUIRE(still.size() == 30);
    for (const Box& b : still.ground_truth) CHECK(b == still.ground_truth[0]);
    CHECK(still.ground_truth[0].center_x() == 160.0);
    CHECK(still.frame(3).pixels() == still.frame(4).pixels());

    p.kind = SynthKind::zoom;
    p.frames = 10;
    const Sequence zoom = synth_sequence(p);
    CHECK(zoom.ground_truth.back().width == doctest::Approx(50.0 * std::pow(1.02, 9)));
    CHECK(zoom.ground_truth.back().width == doctest::Approx(59.75).epsilon(1e-3));
    CHECK(zoom.ground_truth.back().center_x() == doctest::Approx(160.0));

    p.kind = SynthKind::drift;
    const Sequence drift = synth_sequence(p);
    CHECK(drift.ground_truth.back().center_x() - drift.ground_truth[0].center_x() == doctest::Approx(18.0));
    CHECK(drift.ground_truth.back().center_y() == doctest::Approx(drift.ground_truth[0].center_y()));

    CHECK(synth_sequence(p).frame(5).pixels() == drift.frame(5).pixels());
    SynthParams other = p;
    other.seed = 2;
    CHECK_FALSE(synth_sequence(other).frame(0).pixels() == drift.frame(0).pixels());

    SynthParams big;
    big.object_width = 400;
    CHECK_THROWS_AS(synth_sequence(big), InvalidInput);
    CHECK(parse_synth_kind("zoom+drift") == SynthKind::zoom_drift);
    CHECK_THROWS_AS(parse_synth_kind("spin"), InvalidInput);
    CHECK(oracle::find_case("synthetic-ground-truth").run(4).passed);
}

TEST_CASE("configuration") {
    const TrackerConfig d = config_from_json(nlohmann::json::object());
    CHECK(d.method == ScaleMethod::hrsem);
    CHECK(d.scale.step == 1.02);
    CHECK(d.scale.levels == 17);
    CHECK(d.scale.learning_rate == 0.025);
    CHECK(d.scale.sigma == 1.0625);
    CHECK(d.scale.newton_iterations == 5);

    const TrackerConfig c = config_from_json({{"method", "rrsem"}, {"scale_levels", 9}, {"translation_layers", {"hog"}}});
    CHECK(c.method == ScaleMethod::rrsem);
    CHECK(c.scale.levels == 9);
    CHECK(config_from_json(config_to_json(c)).scale.levels == 9);
    CHECK(config_to_json(config_from_json(config_to_json(c))) == config_to_json(c));

    CHECK_THROWS_AS(config_from_json({{"scale_stepp", 1.02}}), InvalidInput);
    CHECK_THROWS_AS(config_from_json({{"scale_levels", "many"}}), InvalidInput);
    CHECK_THROWS_AS(config_from_json({{"learning_rate", 1.5}}), InvalidInput);
    CHECK_THROWS_AS(config_from_json(nlohmann::json::array()), InvalidInput);

    TempDir dir("cfg");
    write_file(dir.path / "c.json", R"({"scale_step": 1.05})");
    CHECK(load_config(dir.path / "c.json").scale.step == 1.05);
    write_file(dir.path / "bad.json", "{");
    CHECK_THROWS_AS(load_config(dir.path / "bad.json"), InvalidInput);
}
