#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "scaletrack/geometry.hpp"
#include "scaletrack/tensor.hpp"

namespace scaletrack {

/// Attribute tags recognised in attribute files.
const std::vector<std::string>& known_attributes();

/// A tracking sequence. Frames live either on disk (frame_paths) or in
/// memory (frames); ground truth is 0-indexed, one box per frame.
struct Sequence {
    std::string name;
    std::vector<std::filesystem::path> frame_paths;
    std::vector<Frame> frames;
    std::vector<Box> ground_truth;
    std::vector<std::string> attributes;

    std::size_t size() const { return frames.empty() ? frame_paths.size() : frames.size(); }
    Frame frame(std::size_t index) const;
    bool has_attribute(std::string_view tag) const;
};

/// Reads an image as a 1- or 3-channel frame with values in [0, 255].
Frame load_frame(const std::filesystem::path& path);

/// Parses "x,y,w,h" with comma, tab or space separators. Values are returned
/// as written (no index conversion).
Box parse_box_line(std::string_view line);

/// Parses a ground-truth file, converting 1-indexed corners to 0-indexed.
/// Blank lines are skipped; malformed lines raise IngestionError with the
/// line number.
std::vector<Box> load_ground_truth(const std::filesystem::path& path);

/// OTB layout: <dir>/img/ (images, sorted by file name), <dir>/groundtruth_rect.txt
/// and an optional <dir>/attributes.txt with one tag per line.
Sequence load_sequence(const std::filesystem::path& directory);

/// Frames only (no ground truth required); used when the init box is given.
Sequence load_frames(const std::filesystem::path& directory);

/// Writes a sequence in the OTB layout read by load_sequence: 8-bit PNG
/// frames (rounded, clamped), 1-indexed ground truth and attribute tags.
void save_sequence(const Sequence& sequence, const std::filesystem::path& directory);

/// Sub-directories of `root` that contain a ground-truth file, sorted by name.
std::vector<std::filesystem::path> list_sequences(const std::filesystem::path& root);

} // namespace scaletrack
