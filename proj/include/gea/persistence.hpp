#pragma once

// Newline-delimited files: a header object on line 1, then one record per
// line. Every writer ends each line with '\n'; a final line without one is
// reported as truncated.

#include <filesystem>
#include <string>
#include <string_view>

#include "gea/core.hpp"
#include "gea/engine.hpp"
#include "gea/simenv.hpp"

namespace gea {

inline constexpr int kFormatVersion = 1;

std::string encode_archive(const Archive& archive);
Archive decode_archive(std::string_view text);
void save_archive(const Archive& archive, const std::filesystem::path& path);
Archive load_archive(const std::filesystem::path& path);

std::string encode_world(const SimWorld& world);
SimWorld decode_world(std::string_view text);
void save_world(const SimWorld& world, const std::filesystem::path& path);
SimWorld load_world(const std::filesystem::path& path);

std::string encode_transcript(const RunTranscript& transcript);
RunTranscript decode_transcript(std::string_view text);
void save_transcript(const RunTranscript& transcript, const std::filesystem::path& path);
RunTranscript load_transcript(const std::filesystem::path& path);

/// Whole-file read; Error if the file cannot be opened.
std::string read_file(const std::filesystem::path& path);
/// Writes to a sibling temporary file and renames it into place.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

}  // namespace gea
