#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

namespace fs = std::filesystem;

namespace {

const fs::path kWork = fs::temp_directory_path() / ("scaletrack_cli_" + std::to_string(::getpid()));

struct Run {
    int code = -1;
    std::string out;
};

// Runs the CLI with the given arguments; stdout and stderr are captured.
Run cli(const std::string& args) {
    const fs::path log = kWork / "last.log";
    fs::create_directories(kWork);
    const std::string cmd = std::string("\"") + SCALETRACK_BIN + "\" " + args + " > \"" + log.string() + "\" 2>&1";
    const int status = std::system(cmd.c_str());
    Run r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    std::ifstream in(log);
    std::stringstream ss;
    ss << in.rdbuf();
    r.out = ss.str();
    return r;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::string> lines(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    for (std::string l; std::getline(in, l);) out.push_back(l);
    return out;
}

std::string q(const fs::path& p) { return "\"" + p.string() + "\""; }

struct Workspace {
    Workspace() {
        fs::remove_all(kWork);
        fs::create_directories(kWork);
    }
    ~Workspace() { fs::remove_all(kWork); }
};

} // namespace

TEST_CASE("cli") {
    Workspace ws;
    const fs::path data = kWork / "data";
    REQUIRE(cli("synth static --frames 6 --size 160x120 --object 40x40 --out " + q(data / "still")).code == 0);
    REQUIRE(fs::exists(data / "still" / "img" / "0001.png"));
    REQUIRE(fs::exists(data / "still" / "groundtruth_rect.txt"));

    SUBCASE("track writes 1-indexed boxes and is byte-identical when repeated") {
        const Run a = cli("track " + q(data / "still") + " --out " + q(kWork / "t1"));
        REQUIRE(a.code == 0);
        REQUIRE(cli("track " + q(data / "still") + " --out " + q(kWork / "t2")).code == 0);
        CHECK(slurp(kWork / "t1" / "boxes.csv") == slurp(kWork / "t2" / "boxes.csv"));
        CHECK(slurp(kWork / "t1" / "run.json") == slurp(kWork / "t2" / "run.json"));

        const auto rows = lines(slurp(kWork / "t1" / "boxes.csv"));
        REQUIRE(rows.size() == 7);
        CHECK(rows[0] == "frame,x,y,w,h");
        const auto gt = lines(slurp(data / "still" / "groundtruth_rect.txt"));
        CHECK(rows[1] == "1," + gt[0]);

        const auto meta = nlohmann::json::parse(slurp(kWork / "t1" / "run.json"));
        CHECK(meta["frames"] == 6);
        CHECK_FALSE(meta.contains("fps"));
        REQUIRE(cli("track " + q(data / "still") + " --timing --out " + q(kWork / "t3")).code == 0);
        CHECK(nlohmann::json::parse(slurp(kWork / "t3" / "run.json")).contains("fps"));
    }

    SUBCASE("one-frame sequence tracked from an explicit init box") {
        REQUIRE(cli("synth static --frames 1 --size 96x96 --object 30x20 --out " + q(data / "one")).code == 0);
        fs::remove(data / "one" / "groundtruth_rect.txt");
        CHECK(cli("track " + q(data / "one") + " --out " + q(kWork / "o")).code == 2);
        REQUIRE(cli("track " + q(data / "one") + " --init 34,39,30,20 --out " + q(kWork / "o")).code == 0);
        const auto rows = lines(slurp(kWork / "o" / "boxes.csv"));
        REQUIRE(rows.size() == 2);
        CHECK(rows[1] == "1,34.0000,39.0000,30.0000,20.0000");
    }

    SUBCASE("bench reports, comparison and determinism") {
        const Run r = cli("bench " + q(data) + " --method hrsem --method rrsem --out " + q(kWork / "b1"));
        REQUIRE(r.code == 0);
        for (const char* f : {"report_hrsem.json", "report_rrsem.json", "precision_hrsem.csv", "success_rrsem.csv",
                              "attributes_hrsem.csv", "comparison.csv"})
            CHECK(fs::exists(kWork / "b1" / f));
        const auto rep = nlohmann::json::parse(slurp(kWork / "b1" / "report_hrsem.json"));
        CHECK(rep["aggregate"]["success_at_0.5"] == 1.0);
        CHECK(lines(slurp(kWork / "b1" / "comparison.csv")).size() == 3);

        REQUIRE(cli("bench " + q(data) + " --method hrsem --method rrsem --out " + q(kWork / "b2")).code == 0);
        for (const auto& e : fs::directory_iterator(kWork / "b1"))
            CHECK(slurp(e.path()) == slurp(kWork / "b2" / e.path().filename()));
    }

    SUBCASE("bench keeps going past broken sequences") {
        fs::create_directories(data / "broken" / "img");
        std::ofstream(data / "broken" / "groundtruth_rect.txt") << "1,1,5,5\n";
        const Run r = cli("bench " + q(data) + " --out " + q(kWork / "b3"));
        CHECK(r.code == 0);
        const auto rep = nlohmann::json::parse(slurp(kWork / "b3" / "report_hrsem.json"));
        CHECK(rep["failures"].size() == 1);
        CHECK(rep["sequences"].size() == 1);

        fs::create_directories(kWork / "only_broken");
        fs::rename(data / "broken", kWork / "only_broken" / "broken");
        CHECK(cli("bench " + q(kWork / "only_broken") + " --out " + q(kWork / "b4")).code == 3);
    }

    SUBCASE("input errors exit with 2") {
        fs::create_directories(kWork / "empty");
        CHECK(cli("bench " + q(kWork / "empty") + " --out " + q(kWork / "b5")).code == 2);
        CHECK(cli("track " + q(kWork / "nowhere") + " --init 1,1,5,5 --out " + q(kWork / "x")).code == 2);
        CHECK(cli("track " + q(data / "still") + " --method fdsst --out " + q(kWork / "x")).code == 2);
        CHECK(cli("synth spin --out " + q(kWork / "x")).code == 2);
        CHECK(cli("synth static --object 400x400 --out " + q(kWork / "x")).code == 2);
        CHECK(cli("frobnicate").code == 2);
        CHECK(cli("oracle --force-fail no-such-oracle").code == 2);
    }

    SUBCASE("synth output is deterministic") {
        REQUIRE(cli("synth zoom+drift --frames 3 --size 96x80 --object 20x20 --seed 9 --out " + q(kWork / "s1")).code == 0);
        REQUIRE(cli("synth zoom+drift --frames 3 --size 96x80 --object 20x20 --seed 9 --out " + q(kWork / "s2")).code == 0);
        for (const char* f : {"img/0001.png", "img/0003.png", "groundtruth_rect.txt", "attributes.txt"})
            CHECK(slurp(kWork / "s1" / f) == slurp(kWork / "s2" / f));
    }
}

TEST_CASE("oracle subcommand") {
    Workspace ws;
    const Run ok = cli("oracle --seed 7");
    CHECK(ok.code == 0);
    CHECK(ok.out.find("oracles passed") != std::string::npos);
    CHECK(ok.out.find("FAIL") == std::string::npos);

    const Run forced = cli("oracle --force-fail scale-detection");
    CHECK(forced.code == 1);
    bool named = false;
    for (const auto& l : lines(forced.out))
        if (l.rfind("scale-detection", 0) == 0 && l.find("FAIL") != std::string::npos) named = true;
    CHECK(named);
}
