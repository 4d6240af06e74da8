#include <doctest.h>

#include <cmath>

#include "scaletrack/errors.hpp"
#include "scaletrack/oracle_suite.hpp"
#include "scaletrack/synth.hpp"
#include "scaletrack/tracker.hpp"

using namespace scaletrack;

namespace {

Sequence make_sequence(SynthKind kind, std::size_t frames, double object = 60.0) {
    SynthParams p;
    p.kind = kind;
    p.frames = frames;
    p.object_width = p.object_height = object;
    return synth_sequence(p);
}

TrackResult run(const Sequence& seq, const TrackerConfig& cfg, FeatureProvider& provider) {
    return track_sequence(seq.size(), [&](std::size_t i) { return seq.frame(i); }, seq.ground_truth[0], cfg,
                          provider);
}

TrackerConfig mock_config(ScaleMethod method) {
    TrackerConfig cfg;
    cfg.method = method;
    cfg.provider = "mock";
    cfg.translation_layers = {"conv-3"};
    cfg.scale_layer = "conv-2";
    return cfg;
}

} // namespace

TEST_CASE("init then localize on the same frame") {
    CHECK(oracle::find_case("tracker-self-detection").run(1).passed);
}

TEST_CASE("repeated inits give identical states") {
    const Sequence seq = make_sequence(SynthKind::still, 1);
    HogProvider hog;
    Tracker a(TrackerConfig{}, hog), b(TrackerConfig{}, hog);
    a.init(seq.frame(0), seq.ground_truth[0]);
    b.init(seq.frame(0), seq.ground_truth[0]);
    CHECK(a.state().box() == b.state().box());
    CHECK(a.translation().filter().filter == b.translation().filter().filter);
    CHECK(a.scale().model().numerator == b.scale().model().numerator);
    CHECK(a.template_rows() >= 4);
    CHECK(a.template_rows() * a.template_cols() >= 300);
    CHECK(a.template_rows() * a.template_cols() <= 1700);
}

TEST_CASE("single step on an identical frame keeps the box") {
    const Sequence seq = make_sequence(SynthKind::still, 1);
    HogProvider hog;
    for (ScaleMethod m : {ScaleMethod::hrsem, ScaleMethod::rrsem, ScaleMethod::dsst}) {
        TrackerConfig cfg;
        cfg.method = m;
        Tracker t(cfg, hog);
        t.init(seq.frame(0), seq.ground_truth[0]);
        const FrameResult r = t.step(seq.frame(0));
        const Box& g = seq.ground_truth[0];
        CHECK(std::abs(r.box.x - g.x) < 1.0);
        CHECK(std::abs(r.box.y - g.y) < 1.0);
        CHECK(std::abs(r.box.width - g.width) < 1.0);
        CHECK(std::abs(r.box.height - g.height) < 1.0);
        CHECK_FALSE(r.low_confidence);
        CHECK(t.state().frame == 2);
    }
}

TEST_CASE("one-frame sequence returns the init box") {
    const Sequence seq = make_sequence(SynthKind::still, 1);
    HogProvider hog;
    const TrackResult r = run(seq, TrackerConfig{}, hog);
    REQUIRE(r.boxes.size() == 1);
    CHECK(r.boxes[0] == seq.ground_truth[0]);
    CHECK(r.low_confidence.size() == 1);
}

TEST_CASE("tracking is deterministic") {
    const Sequence seq = make_sequence(SynthKind::zoom_drift, 8);
    HogProvider hog;
    for (ScaleMethod m : {ScaleMethod::hrsem, ScaleMethod::rrsem, ScaleMethod::dsst}) {
        TrackerConfig cfg;
        cfg.method = m;
        const TrackResult a = run(seq, cfg, hog), b = run(seq, cfg, hog);
        CHECK(a.boxes == b.boxes);
        CHECK(a.scores == b.scores);
    }
}

TEST_CASE("single scale level keeps the size constant") {
    const Sequence seq = make_sequence(SynthKind::zoom, 6);
    HogProvider hog;
    TrackerConfig cfg;
    cfg.scale.levels = 1;
    const TrackResult r = run(seq, cfg, hog);
    for (const Box& b : r.boxes) {
        CHECK(b.width == seq.ground_truth[0].width);
        CHECK(b.height == seq.ground_truth[0].height);
    }
}

TEST_CASE("per-frame scale change stays within the pyramid") {
    const Sequence seq = make_sequence(SynthKind::zoom, 12);
    HogProvider hog;
    TrackerConfig cfg;
    const TrackResult r = run(seq, cfg, hog);
    const double lo = std::pow(cfg.scale.step, -8.5), hi = std::pow(cfg.scale.step, 8.5);
    for (std::size_t i = 1; i < r.boxes.size(); ++i) {
        const double ratio = r.boxes[i].width / r.boxes[i - 1].width;
        CHECK(ratio >= lo);
        CHECK(ratio <= hi);
    }
}

TEST_CASE("provider invocations per frame") {
    const Sequence seq = make_sequence(SynthKind::drift, 5);
    auto mock = make_provider("mock");
    const std::size_t steps = seq.size() - 1;

    SUBCASE("hrsem: one translation and one full-frame extraction") {
        mock->reset_counters();
        run(seq, mock_config(ScaleMethod::hrsem), *mock);
        CHECK(mock->single_invocations() == 2 * seq.size());
        CHECK(mock->batch_invocations() == 0);
    }
    SUBCASE("rrsem: one translation extraction and one batch") {
        mock->reset_counters();
        run(seq, mock_config(ScaleMethod::rrsem), *mock);
        // init: translation + learn batch; each step: translation + detect batch.
        CHECK(mock->single_invocations() == seq.size());
        CHECK(mock->batch_invocations() == seq.size());
    }
    SUBCASE("hrsem sharing the full-frame map") {
        TrackerConfig cfg = mock_config(ScaleMethod::hrsem);
        cfg.translation_layers = {"conv-2"};
        cfg.share_frame_features = true;
        mock->reset_counters();
        const TrackResult r = run(seq, cfg, *mock);
        CHECK(mock->invocations() == seq.size());
        CHECK(r.boxes.size() == seq.size());
    }
    SUBCASE("dsst: one extraction per level for detection and again for learning") {
        TrackerConfig cfg = mock_config(ScaleMethod::dsst);
        cfg.scale.levels = 5;
        mock->reset_counters();
        run(seq, cfg, *mock);
        CHECK(mock->single_invocations() == 6 + 11 * steps);
    }
}

TEST_CASE("multi-layer translation features") {
    const Sequence seq = make_sequence(SynthKind::drift, 4);
    HogProvider hog;
    TrackerConfig cfg;
    cfg.translation_layers = {"hog", "hog-fine"};
    cfg.translation.basis_channels = 24;
    const TrackResult r = run(seq, cfg, hog);
    CHECK(r.boxes.size() == 4);
    CHECK(center_error(r.boxes.back(), seq.ground_truth.back()) < 3.0);
}

TEST_CASE("a featureless frame is flagged and the state kept") {
    const Sequence seq = make_sequence(SynthKind::still, 1);
    HogProvider hog;
    Tracker t(TrackerConfig{}, hog);
    t.init(seq.frame(0), seq.ground_truth[0]);
    const Box before = t.state().box();
    const Frame blank(Tensor(seq.frame(0).height(), seq.frame(0).width(), 1, 0.5));
    const FrameResult r = t.step(blank);
    CHECK(r.low_confidence);
    CHECK(r.box == before);
    // Tracking resumes on the next good frame.
    const FrameResult next = t.step(seq.frame(0));
    CHECK_FALSE(next.low_confidence);
    CHECK(center_error(next.box, before) < 1.0);
}

TEST_CASE("tracker contracts") {
    const Sequence seq = make_sequence(SynthKind::still, 1);
    HogProvider hog;
    Tracker t(TrackerConfig{}, hog);
    CHECK_THROWS_AS(t.step(seq.frame(0)), ContractError);
    CHECK_THROWS_AS(t.init(seq.frame(0), Box{10, 10, 0, 5}), InvalidInput);
    CHECK_THROWS_AS(t.init(seq.frame(0), Box{1000, 10, 20, 20}), InvalidInput);
    t.init(seq.frame(0), seq.ground_truth[0]);
    CHECK_THROWS_AS(t.step(Frame(Tensor(50, 50, 1, 0.1))), InvalidInput);

    TrackerConfig cfg;
    cfg.scale_layer = "conv-9";
    CHECK_THROWS_AS(Tracker(cfg, hog), ContractError);
    CHECK_THROWS_AS(track_sequence(0, [&](std::size_t) { return seq.frame(0); }, seq.ground_truth[0],
                                   TrackerConfig{}, hog),
                    InvalidInput);
}
