#include "scaletrack/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>

#include <opencv2/imgcodecs.hpp>

#include "scaletrack/errors.hpp"

namespace scaletrack {
namespace {

namespace fs = std::filesystem;

constexpr const char* kImageDir = "img";
constexpr const char* kGroundTruth = "groundtruth_rect.txt";
constexpr const char* kAttributes = "attributes.txt";

bool is_image(const fs::path& p) {
    std::string ext = p.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    return ext == ".jpg" || ext == ".jpeg" || ext == ".png" || ext == ".bmp" || ext == ".pgm" ||
           ext == ".ppm" || ext == ".tif" || ext == ".tiff";
}

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

} // namespace

const std::vector<std::string>& known_attributes() {
    static const std::vector<std::string> tags = {"IV", "SV", "FM", "OV", "BC", "OPR",
                                                  "OCC", "DEF", "MB", "IPR", "LR"};
    return tags;
}

Frame Sequence::frame(std::size_t index) const {
    if (index >= size()) throw InvalidInput("sequence '" + name + "': frame index out of range");
    return frames.empty() ? load_frame(frame_paths[index]) : frames[index];
}

bool Sequence::has_attribute(std::string_view tag) const {
    return std::find(attributes.begin(), attributes.end(), tag) != attributes.end();
}

Frame load_frame(const fs::path& path) {
    cv::Mat img = cv::imread(path.string(), cv::IMREAD_ANYCOLOR);
    if (img.empty()) throw IngestionError("cannot read image " + path.string());
    const auto rows = static_cast<std::size_t>(img.rows), cols = static_cast<std::size_t>(img.cols);
    const auto chans = static_cast<std::size_t>(img.channels());
    if (chans != 1 && chans != 3) throw IngestionError("unsupported channel count in " + path.string());
    cv::Mat img8;
    img.convertTo(img8, CV_8U);
    Tensor t(rows, cols, chans);
    for (std::size_t r = 0; r < rows; ++r) {
        const auto* row = img8.ptr<unsigned char>(static_cast<int>(r));
        for (std::size_t c = 0; c < cols; ++c)
            for (std::size_t ch = 0; ch < chans; ++ch)
                // OpenCV stores BGR; keep RGB order in frames.
                t(r, c, chans == 3 ? 2 - ch : ch) = row[c * chans + ch];
    }
    return Frame(std::move(t));
}

Box parse_box_line(std::string_view line) {
    double v[4];
    std::size_t n = 0;
    std::size_t pos = 0;
    line = trim(line);
    while (pos < line.size()) {
        while (pos < line.size() && (line[pos] == ',' || line[pos] == '\t' || line[pos] == ' ')) ++pos;
        if (pos >= line.size()) break;
        if (n == 4) throw IngestionError("expected 4 values, found more");
        const char* begin = line.data() + pos;
        const char* end = line.data() + line.size();
        const auto res = std::from_chars(begin, end, v[n]);
        if (res.ec != std::errc()) throw IngestionError("malformed number");
        pos += static_cast<std::size_t>(res.ptr - begin);
        if (pos < line.size() && line[pos] != ',' && line[pos] != '\t' && line[pos] != ' ')
            throw IngestionError("malformed number");
        ++n;
    }
    if (n != 4) throw IngestionError("expected 4 values, found " + std::to_string(n));
    return {v[0], v[1], v[2], v[3]};
}

std::vector<Box> load_ground_truth(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw IngestionError("cannot open " + path.string());
    std::vector<Box> boxes;
    std::string line;
    for (std::size_t number = 1; std::getline(in, line); ++number) {
        if (trim(line).empty()) continue;
        Box b;
        try {
            b = parse_box_line(line);
        } catch (const IngestionError& e) {
            throw IngestionError(path.string() + ":" + std::to_string(number) + ": " + e.what());
        }
        if (!(b.width > 0.0 && b.height > 0.0))
            throw IngestionError(path.string() + ":" + std::to_string(number) +
                                 ": box must have positive width and height");
        b.x -= 1.0;
        b.y -= 1.0;
        boxes.push_back(b);
    }
    return boxes;
}

Sequence load_frames(const fs::path& directory) {
    const fs::path img_dir = directory / kImageDir;
    if (!fs::is_directory(img_dir)) throw IngestionError("missing image folder " + img_dir.string());
    Sequence seq;
    seq.name = directory.filename().string();
    if (seq.name.empty()) seq.name = directory.parent_path().filename().string();
    for (const auto& entry : fs::directory_iterator(img_dir))
        if (entry.is_regular_file() && is_image(entry.path())) seq.frame_paths.push_back(entry.path());
    std::sort(seq.frame_paths.begin(), seq.frame_paths.end(),
              [](const fs::path& a, const fs::path& b) { return a.filename().string() < b.filename().string(); });
    if (seq.frame_paths.empty()) throw IngestionError("no images in " + img_dir.string());

    const fs::path attr = directory / kAttributes;
    if (fs::exists(attr)) {
        std::ifstream in(attr);
        std::string line;
        for (std::size_t number = 1; std::getline(in, line); ++number) {
            std::string_view rest = line;
            while (!rest.empty()) {
                const auto cut = rest.find_first_of(",\t ");
                const std::string_view tag = trim(rest.substr(0, cut));
                rest = cut == std::string_view::npos ? std::string_view{} : rest.substr(cut + 1);
                if (tag.empty()) continue;
                const auto& known = known_attributes();
                if (std::find(known.begin(), known.end(), tag) == known.end())
                    throw IngestionError(attr.string() + ":" + std::to_string(number) +
                                         ": unknown attribute '" + std::string(tag) + "'");
                if (!seq.has_attribute(tag)) seq.attributes.emplace_back(tag);
            }
        }
    }
    return seq;
}

Sequence load_sequence(const fs::path& directory) {
    Sequence seq = load_frames(directory);
    const fs::path gt = directory / kGroundTruth;
    if (!fs::exists(gt)) throw IngestionError("missing ground truth " + gt.string());
    seq.ground_truth = load_ground_truth(gt);
    if (seq.ground_truth.size() != seq.frame_paths.size())
        throw IngestionError(seq.name + ": " + std::to_string(seq.frame_paths.size()) + " frames vs " +
                             std::to_string(seq.ground_truth.size()) + " boxes");
    return seq;
}

void save_sequence(const Sequence& seq, const fs::path& directory) {
    const fs::path img_dir = directory / kImageDir;
    fs::create_directories(img_dir);
    for (std::size_t i = 0; i < seq.size(); ++i) {
        const Frame f = seq.frame(i);
        const Tensor& t = f.pixels();
        const int type = t.channels() == 3 ? CV_8UC3 : CV_8UC1;
        cv::Mat img(static_cast<int>(t.rows()), static_cast<int>(t.cols()), type);
        for (std::size_t r = 0; r < t.rows(); ++r) {
            auto* row = img.ptr<unsigned char>(static_cast<int>(r));
            for (std::size_t c = 0; c < t.cols(); ++c)
                for (std::size_t ch = 0; ch < t.channels(); ++ch) {
                    const double v = std::clamp(std::round(t(r, c, t.channels() == 3 ? 2 - ch : ch)), 0.0, 255.0);
                    row[c * t.channels() + ch] = static_cast<unsigned char>(v);
                }
        }
        char name[32];
        std::snprintf(name, sizeof name, "%04zu.png", i + 1);
        if (!cv::imwrite((img_dir / name).string(), img))
            throw IngestionError("cannot write " + (img_dir / name).string());
    }
    std::ofstream gt(directory / kGroundTruth);
    char line[128];
    for (const Box& b : seq.ground_truth) {
        std::snprintf(line, sizeof line, "%.4f,%.4f,%.4f,%.4f\n", b.x + 1.0, b.y + 1.0, b.width, b.height);
        gt << line;
    }
    if (!gt) throw IngestionError("cannot write ground truth in " + directory.string());
    if (!seq.attributes.empty()) {
        std::ofstream attr(directory / kAttributes);
        for (const auto& tag : seq.attributes) attr << tag << '\n';
    }
}

std::vector<fs::path> list_sequences(const fs::path& root) {
    if (!fs::is_directory(root)) throw IngestionError("dataset root is not a directory: " + root.string());
    std::vector<fs::path> out;
    for (const auto& entry : fs::directory_iterator(root))
        if (entry.is_directory() && fs::exists(entry.path() / kGroundTruth)) out.push_back(entry.path());
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace scaletrack
