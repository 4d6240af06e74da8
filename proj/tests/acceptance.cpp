// Acceptance checks: one PASS/FAIL line per criterion, exit status 0 only if
// every criterion passes.

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "scaletrack/evaluation.hpp"
#include "scaletrack/fft.hpp"
#include "scaletrack/oracles.hpp"
#include "scaletrack/scale.hpp"
#include "scaletrack/synth.hpp"
#include "scaletrack/tracker.hpp"
#include "scaletrack/translation.hpp"

using namespace scaletrack;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
    bool passed = false;
    std::string detail;
};

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

Eigen::MatrixXd random_matrix(oracle::Random& rng, Eigen::Index rows, Eigen::Index cols) {
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = rng.uniform(-1.0, 1.0);
    return m;
}

// 1. Closed-form learning against a dense circulant ridge-regression solve.
Outcome closed_form_learning() {
    const auto t0 = Clock::now();
    oracle::Random rng(101);
    double err = 0.0;
    for (int inst = 0; inst < 20; ++inst) {
        const auto k = static_cast<Eigen::Index>(rng.index(1, 8));
        const auto d = static_cast<Eigen::Index>(rng.index(1, 16));
        const Eigen::MatrixXd w = random_matrix(rng, k, d);
        std::vector<double> y(static_cast<std::size_t>(d));
        for (auto& v : y) v = rng.uniform(0.0, 1.0);
        const double lambda = rng.uniform(1e-3, 1.0);
        const ScaleFilter f = learn_scale_filter(w, y, lambda);
        const auto dense = oracle::dense_ridge_regression(w, y, lambda);
        err = std::max(err, (oracle::spatial_rows(f.filter()) - dense.filter).cwiseAbs().maxCoeff());
        const auto pred = scale_confidence(f, w);
        for (Eigen::Index i = 0; i < d; ++i)
            err = std::max(err, std::abs(pred[static_cast<std::size_t>(i)] - dense.prediction(i)));
    }
    const double secs = seconds_since(t0);
    return {err < 1e-8 && secs < 5.0,
            "20 instances, max|d| " + fmt("%.2e", err) + " (tol 1e-8), " + fmt("%.3f", secs) + " s (limit 5 s)"};
}

// 2. Frequency-domain detection against an O(D^2) circular loop.
Outcome detection_equivalence() {
    oracle::Random rng(202);
    double err = 0.0;
    for (int inst = 0; inst < 20; ++inst) {
        const auto k = static_cast<Eigen::Index>(rng.index(1, 8));
        const auto d = static_cast<Eigen::Index>(rng.index(1, 16));
        const Eigen::MatrixXd w = random_matrix(rng, k, d), z = random_matrix(rng, k, d);
        const ScaleFilter f = learn_scale_filter(w, make_scale_label(static_cast<std::size_t>(d), 1.0625), 1e-2);
        const auto fast = scale_confidence(f, z);
        const auto slow = oracle::direct_scale_confidence(oracle::spatial_rows(f.filter()), z);
        for (std::size_t i = 0; i < fast.size(); ++i) err = std::max(err, std::abs(fast[i] - slow[i]));
    }
    return {err < 1e-9, "20 instances, max|d| " + fmt("%.2e", err) + " (tol 1e-9)"};
}

// 3. Translation CG against a dense spatial-domain solve.
Outcome translation_cg() {
    oracle::Random rng(303);
    const std::size_t n = 8;
    double err = 0.0;
    bool monotone = true;
    const int instances = 10;
    for (int inst = 0; inst < instances; ++inst) {
        TranslationParams p;
        p.uniform_weight = true;
        TranslationFilter f;
        f.lambda = rng.uniform(0.05, 0.5);
        f.spatial_weight = make_spatial_weight(n, n, 3.0, 3.0, p);
        f.label = make_translation_label(n, n, 1.0);
        SampleMemory memory(5, 0.3);
        std::vector<Tensor> xs;
        for (int j = 0; j <= inst % 3; ++j) {
            xs.push_back(rng.tensor(n, n, 1));
            memory.insert(fft(xs.back()).data);
        }
        const SolveReport rep = learn_translation_filter(memory, f, 400, 1e-13, true);
        for (std::size_t i = 1; i < rep.objectives.size(); ++i)
            if (rep.objectives[i] > rep.objectives[i - 1] * (1.0 + 1e-12)) monotone = false;

        CTensor freq = f.filter;
        for (auto& v : freq.values()) v = std::conj(v);
        const Tensor fast = ifft_real({freq, Axes::both});
        std::vector<double> weights;
        for (const auto& e : memory.entries()) weights.push_back(e.weight);
        const Tensor label = ifft_real({f.label, Axes::both});
        const Tensor dense = oracle::dense_translation_solve(xs, weights, label, f.spatial_weight, f.lambda);
        for (std::size_t i = 0; i < fast.size(); ++i)
            err = std::max(err, std::abs(fast.data()[i] - dense.data()[i]));
    }
    return {err < 1e-6 && monotone, std::to_string(instances) + " instances 8x8x1, max|d| " + fmt("%.2e", err) +
                                        " (tol 1e-6), objective " + (monotone ? "non-increasing" : "INCREASED")};
}

// 4. Scale-set arithmetic.
Outcome scale_set() {
    const ScaleSet q = build_scale_set(100.0, 50.0, 1.02, 17);
    const auto direct = oracle::direct_scale_levels(100.0, 50.0, 1.02, 17);
    bool levels = q.size() == direct.size();
    double err = 0.0;
    for (std::size_t i = 0; levels && i < direct.size(); ++i) {
        levels = q.levels[i].level == direct[i].level;
        err = std::max({err, std::abs(q.levels[i].width - direct[i].width),
                        std::abs(q.levels[i].height - direct[i].height)});
    }
    const ScaleSet one = build_scale_set(10.0, 10.0, 1.02, 1);
    const bool identity = one.size() == 1 && one.levels[0].level == 0 && one.levels[0].factor == 1.0 &&
                          one.levels[0].width == 10.0 && one.levels[0].height == 10.0;
    return {levels && err == 0.0 && identity,
            "a=1.02 D=17: levels -8..8 " + std::string(levels ? "match" : "DIFFER") + ", max|d| dims " +
                fmt("%.1e", err) + " (exact); D=1 " + (identity ? "identity" : "NOT identity")};
}

Sequence synthetic(SynthKind kind, std::size_t frames) {
    SynthParams p;
    p.kind = kind;
    p.frames = frames;
    p.object_width = p.object_height = 60.0;
    return synth_sequence(p);
}

TrackResult track(const Sequence& seq, ScaleMethod method, FeatureProvider& provider,
                  TrackerConfig cfg = TrackerConfig{}) {
    cfg.method = method;
    return track_sequence(seq.size(), [&](std::size_t i) { return seq.frame(i); }, seq.ground_truth[0], cfg,
                          provider);
}

// 5. Synthetic zoom tracking.
Outcome zoom_tracking() {
    const auto t0 = Clock::now();
    const Sequence seq = synthetic(SynthKind::zoom, 60);
    HogProvider hog;
    bool ok = true;
    std::string detail;
    for (ScaleMethod m : {ScaleMethod::hrsem, ScaleMethod::rrsem, ScaleMethod::dsst}) {
        const TrackResult r = track(seq, m, hog);
        double worst = 0.0;
        for (std::size_t i = 0; i < seq.size(); ++i)
            worst = std::max(worst, std::abs(r.boxes[i].area() / seq.ground_truth[i].area() - 1.0));
        const double drift = std::abs(r.boxes.back().width / seq.ground_truth.back().width - 1.0);
        if (m != ScaleMethod::dsst) ok = ok && worst <= 0.10 && drift < 0.10;
        detail += std::string(detail.empty() ? "" : "; ") + to_string(m) + (m == ScaleMethod::dsst ? " (reference)" : "") +
                  " max|area ratio-1| " + fmt("%.4f", worst) + " drift " + fmt("%.4f", drift);
    }
    const double secs = seconds_since(t0);
    ok = ok && secs < 60.0;
    return {ok, detail + "; tol 0.10/0.10, " + fmt("%.1f", secs) + " s (limit 60 s)"};
}

// 6. Static and drifting sequences.
Outcome static_and_drift() {
    HogProvider hog;
    bool ok = true;
    std::string detail;
    const Sequence still = synthetic(SynthKind::still, 30), drift = synthetic(SynthKind::drift, 50);
    for (ScaleMethod m : {ScaleMethod::hrsem, ScaleMethod::rrsem}) {
        const TrackResult rs = track(still, m, hog);
        double lo = 1.0, hi = 1.0;
        for (std::size_t i = 0; i < still.size(); ++i) {
            const double ratio = rs.boxes[i].width / still.ground_truth[i].width;
            lo = std::min(lo, ratio);
            hi = std::max(hi, ratio);
        }
        const TrackResult rd = track(drift, m, hog);
        double mean_err = 0.0, scale_drift = 0.0;
        for (std::size_t i = 0; i < drift.size(); ++i) {
            mean_err += center_error(rd.boxes[i], drift.ground_truth[i]) / static_cast<double>(drift.size());
            scale_drift = std::max(scale_drift, std::abs(rd.boxes[i].width / drift.ground_truth[i].width - 1.0));
        }
        ok = ok && lo >= 0.99 && hi <= 1.01 && mean_err < 3.0 && scale_drift < 0.05;
        detail += std::string(detail.empty() ? "" : "; ") + to_string(m) + " static ratio [" + fmt("%.4f", lo) +
                  ", " + fmt("%.4f", hi) + "] drift CE " + fmt("%.2f", mean_err) + " px scale " +
                  fmt("%.4f", scale_drift);
    }
    return {ok, detail + "; tol [0.99,1.01], 3 px, 0.05"};
}

// Mock provider that counts calls per layer.
class LayerCounter final : public FeatureProvider {
public:
    explicit LayerCounter(ProviderDescriptor d) : FeatureProvider(d), inner_(d) {}
    std::map<std::string, std::size_t> singles, batches;

protected:
    FeatureMap do_extract(const Frame& image, const LayerSpec& layer) override {
        ++singles[layer.id];
        return inner_.extract(image, layer.id);
    }
    FeatureStack do_extract_batch(const FrameBatch& batch, const LayerSpec& layer) override {
        ++batches[layer.id];
        return inner_.extract_batch(batch, layer.id);
    }

private:
    MockProvider inner_;
};

// 7. One scale extraction per frame.
Outcome one_pass_extraction() {
    const Sequence seq = synthetic(SynthKind::drift, 10);
    const ProviderDescriptor d{"counter", {{"conv-3", 4.0, 32}, {"conv-2", 2.0, 16}}, 0, 0, true};
    TrackerConfig cfg;
    cfg.translation_layers = {"conv-3"};
    cfg.scale_layer = "conv-2";

    LayerCounter h(d);
    track(seq, ScaleMethod::hrsem, h, cfg);
    LayerCounter r(d);
    track(seq, ScaleMethod::rrsem, r, cfg);
    const std::size_t n = seq.size();
    const bool ok = h.singles["conv-2"] == n && h.batches["conv-2"] == 0 && r.batches["conv-2"] == n &&
                    r.singles["conv-2"] == 0 && h.singles["conv-3"] == n && r.singles["conv-3"] == n;
    return {ok, std::to_string(n) + " frames: hrsem " + std::to_string(h.singles["conv-2"]) +
                    " full-frame extractions, " + std::to_string(h.batches["conv-2"]) + " batches; rrsem " +
                    std::to_string(r.batches["conv-2"]) + " batches, " + std::to_string(r.singles["conv-2"]) +
                    " single scale extractions"};
}

// 8. Metric oracle.
Outcome metrics() {
    const std::vector<double> errors{5, 15, 25, 35}, overlaps{1.0, 0.6, 0.4, 0.0};
    const Curves c = compute_curves(errors, overlaps);
    bool ok = c.precision_at_20 == 0.5 && c.success_at_50 == 0.5;
    oracle::Random rng(808);
    bool monotone = true;
    for (int inst = 0; inst < 200; ++inst) {
        const std::size_t n = rng.index(1, 60);
        std::vector<double> e(n), o(n);
        for (std::size_t i = 0; i < n; ++i) {
            e[i] = rng.uniform(0.0, 80.0);
            o[i] = rng.uniform(0.0, 1.0);
        }
        const Curves r = compute_curves(e, o);
        for (std::size_t i = 1; i < r.precision.size(); ++i) monotone = monotone && r.precision[i] >= r.precision[i - 1];
        for (std::size_t i = 1; i < r.success.size(); ++i) monotone = monotone && r.success[i] <= r.success[i - 1];
    }
    ok = ok && monotone;
    return {ok, "precision@20 " + fmt("%.17g", c.precision_at_20) + ", success@0.5 " + fmt("%.17g", c.success_at_50) +
                    " (exact 0.5); 200 random curves " + (monotone ? "monotone" : "NOT monotone")};
}

// 9. Update rule.
Outcome update_rule() {
    oracle::Random rng(909);
    const auto y = make_scale_label(9, 1.0625);
    const ScaleFilter old = learn_scale_filter(random_matrix(rng, 6, 9), y, 1e-2);
    const ScaleFilter fresh = learn_scale_filter(random_matrix(rng, 6, 9), y, 1e-2);

    ScaleFilter m = old;
    update_scale_model(m, fresh, 0.0);
    const bool keep = m.numerator == old.numerator && m.denominator == old.denominator;
    m = old;
    update_scale_model(m, fresh, 1.0);
    const bool replace = m.numerator == fresh.numerator && m.denominator == fresh.denominator;

    m = old;
    update_scale_model(m, fresh, 0.025);
    double blend = 0.0, scale = 0.0;
    for (Eigen::Index i = 0; i < m.numerator.size(); ++i) {
        const cdouble expect = 0.975 * old.numerator.data()[i] + 0.025 * fresh.numerator.data()[i];
        blend = std::max(blend, std::abs(m.numerator.data()[i] - expect));
        scale = std::max(scale, std::abs(expect));
    }
    for (Eigen::Index i = 0; i < m.denominator.size(); ++i) {
        const double expect = 0.975 * old.denominator(i) + 0.025 * fresh.denominator(i);
        blend = std::max(blend, std::abs(m.denominator(i) - expect));
        scale = std::max(scale, std::abs(expect));
    }
    const double machine = 4.0 * std::numeric_limits<double>::epsilon() * scale;

    m = fresh;
    update_scale_model(m, fresh, 0.025);
    const double idem = std::max((m.numerator - fresh.numerator).cwiseAbs().maxCoeff(),
                                 (m.denominator - fresh.denominator).cwiseAbs().maxCoeff());

    ScaleFilter scalar;
    scalar.numerator = Eigen::MatrixXcd::Constant(1, 1, 1.0);
    scalar.denominator = Eigen::VectorXd::Constant(1, 1.0);
    ScaleFilter zero = scalar;
    zero.numerator(0, 0) = 0.0;
    zero.denominator(0) = 0.0;
    update_scale_model(scalar, zero, 0.025);
    const bool arithmetic = scalar.numerator(0, 0) == cdouble(0.975, 0.0) && scalar.denominator(0) == 0.975;

    const bool ok = keep && replace && blend <= machine && idem <= 1e-12 && arithmetic;
    return {ok, std::string("eta=0 ") + (keep ? "identity" : "CHANGED") + ", eta=1 " +
                    (replace ? "replacement" : "WRONG") + ", eta=0.025 max|d| " + fmt("%.1e", blend) + " (tol " +
                    fmt("%.1e", machine) + "), 1.0->0.975 " + (arithmetic ? "exact" : "WRONG") + ", idempotence " +
                    fmt("%.1e", idem) + " (tol 1e-12)"};
}

// 10. Byte-identical CLI outputs.
int run_cli(const std::string& args, const fs::path& log) {
    const std::string cmd = std::string("\"") + SCALETRACK_BIN + "\" " + args + " > \"" + log.string() + "\" 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::map<std::string, std::string> snapshot(const fs::path& dir) {
    std::map<std::string, std::string> files;
    for (const auto& e : fs::recursive_directory_iterator(dir)) {
        if (!e.is_regular_file()) continue;
        std::ifstream in(e.path(), std::ios::binary);
        std::stringstream ss;
        ss << in.rdbuf();
        files[fs::relative(e.path(), dir).string()] = ss.str();
    }
    return files;
}

Outcome cli_determinism() {
    const fs::path root = fs::temp_directory_path() / ("scaletrack_accept_" + std::to_string(::getpid()));
    fs::remove_all(root);
    std::vector<std::map<std::string, std::string>> runs;
    bool exits_ok = true;
    for (int rep = 0; rep < 2; ++rep) {
        const fs::path out = root / ("run" + std::to_string(rep));
        const fs::path log = root / "log.txt";
        fs::create_directories(out);
        const std::string data = "\"" + (out / "data").string() + "\"";
        for (const std::string& args :
             {"synth zoom --frames 12 --size 200x160 --object 40x40 --seed 3 --out \"" + (out / "data/zoom").string() + "\"",
              "synth drift --frames 10 --size 200x160 --object 40x30 --out \"" + (out / "data/drift").string() + "\"",
              "track \"" + (out / "data/zoom").string() + "\" --method rrsem --out \"" + (out / "track").string() + "\"",
              "bench " + data + " --method hrsem --method rrsem --method dsst --workers 2 --out \"" +
                  (out / "bench").string() + "\""})
            exits_ok = exits_ok && run_cli(args, log) == 0;
        fs::remove(log);
        runs.push_back(snapshot(out));
    }
    fs::remove_all(root);
    const bool same = runs[0] == runs[1];
    return {exits_ok && same && !runs[0].empty(),
            std::to_string(runs[0].size()) + " output files from synth/track/bench, " +
                (same ? "byte-identical" : "DIFFERENT") + " across two runs" + (exits_ok ? "" : " (a command failed)")};
}

} // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
        {"closed-form scale learning", closed_form_learning},
        {"scale detection equivalence", detection_equivalence},
        {"translation CG", translation_cg},
        {"scale-set arithmetic", scale_set},
        {"synthetic zoom tracking", zoom_tracking},
        {"static and drift tracking", static_and_drift},
        {"one-pass scale extraction", one_pass_extraction},
        {"metric oracle", metrics},
        {"update rule", update_rule},
        {"CLI determinism", cli_determinism},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("threw: ") + e.what()};
        }
        if (!o.passed) ++failed;
        std::printf("criterion %2zu %-30s %s  %s\n", i + 1, criteria[i].first, o.passed ? "PASS" : "FAIL",
                    o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%zu/%zu criteria passed\n", criteria.size() - static_cast<std::size_t>(failed), criteria.size());
    return failed == 0 ? 0 : 1;
}
