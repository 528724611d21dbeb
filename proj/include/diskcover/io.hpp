#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "diskcover/types.hpp"

namespace diskcover {

/// 8-bit grayscale raster, used as overlay background.
struct GrayImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;
};

/// Parses a binary PGM ("P5", maxval 255). The payload must be exactly
/// width*height bytes after the single whitespace that ends the header.
GrayImage parse_pgm(std::string_view bytes);
GrayImage read_gray_pgm(const std::filesystem::path& path);

/// Pixels > 127 become 1.
BinaryMask read_mask_pgm(const std::filesystem::path& path);
BinaryMask decode_mask_pgm(std::string_view bytes);

std::string encode_mask_pgm(const BinaryMask& mask);
/// Bytes are round(255 * clamp(tanh(v), 0, 1)).
std::string encode_field_pgm(const ScalarField& field);

void write_mask_pgm(const BinaryMask& mask, const std::filesystem::path& path);
void write_field_pgm(const ScalarField& field, const std::filesystem::path& path);

/// {"n":N,"m":M,"assoc":[...],"centers":[[x,y],...],"sigmas":[...]} with
/// one-based assoc entries and %.17g numbers.
std::string diskset_to_json(const DiskSet& disks);
/// Throws Schema naming the offending field, or InvalidArgument when the
/// document is well-formed but describes an invalid disk set.
DiskSet diskset_from_json(std::string_view text);

/// Category colors, indexed by category id modulo 8.
inline constexpr std::uint8_t kPalette[8][3] = {
    {230, 25, 75},  {60, 180, 75},  {255, 225, 25}, {0, 130, 200},
    {245, 130, 48}, {145, 30, 180}, {70, 240, 240}, {240, 50, 230},
};

struct CategorizedMask {
  BinaryMask mask;
  int category = 0;
};

/// Binary PPM ("P6"). Each covered pixel becomes the 50% blend
/// (gray + color + 1) / 2 per channel with the color of the LAST mask
/// covering it; uncovered pixels copy the background. A missing background
/// is black.
std::string encode_overlay_ppm(const std::optional<GrayImage>& background, const std::vector<CategorizedMask>& masks);
void write_overlay_ppm(const std::optional<GrayImage>& background, const std::vector<CategorizedMask>& masks,
                       const std::filesystem::path& path);

/// Writes through a sibling temporary file and renames it into place.
void write_file_atomic(const std::filesystem::path& path, std::string_view bytes);
std::string read_file(const std::filesystem::path& path);

// Corpus layout: <image>_<instance>_<category>.pgm files, optionally listed
// in a suite.json manifest {"entries":[{"file":...,"category":...},...]}.
struct CorpusEntry {
  std::filesystem::path file;
  std::string image;
  int instance = 0;
  int category = 0;
};

/// Parses "<image>_<instance>_<category>.pgm"; the image part may contain
/// underscores. Returns nullopt for names that do not match.
std::optional<CorpusEntry> parse_corpus_name(const std::filesystem::path& file);

/// Entries from suite.json when present (every listed file must exist),
/// otherwise every matching .pgm in the directory, sorted by file name.
std::vector<CorpusEntry> list_corpus(const std::filesystem::path& root);

std::string corpus_manifest_json(const std::vector<CorpusEntry>& entries);

}  // namespace diskcover
