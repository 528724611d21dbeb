#include "diskcover/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace diskcover {
namespace fs = std::filesystem;

namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f'; }
bool is_digit(char c) { return c >= '0' && c <= '9'; }

class HeaderReader {
 public:
  explicit HeaderReader(std::string_view bytes) : bytes_(bytes) {}

  // Skips whitespace and comments, then reads an unsigned decimal that must
  // be followed by whitespace.
  long number(const char* what) {
    for (;;) {
      if (pos_ >= bytes_.size()) throw Error(ErrorCode::Truncated, std::string("header ends before ") + what);
      const char c = bytes_[pos_];
      if (is_space(c)) {
        ++pos_;
      } else if (c == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n' && bytes_[pos_] != '\r') ++pos_;
      } else {
        break;
      }
    }
    long value = 0;
    std::size_t digits = 0;
    while (pos_ < bytes_.size() && is_digit(bytes_[pos_])) {
      if (++digits > 9) throw Error(ErrorCode::BadHeader, std::string(what) + " has too many digits");
      value = value * 10 + (bytes_[pos_] - '0');
      ++pos_;
    }
    if (digits == 0) throw Error(ErrorCode::BadHeader, std::string("expected ") + what);
    if (pos_ >= bytes_.size()) throw Error(ErrorCode::Truncated, std::string("header ends after ") + what);
    if (!is_space(bytes_[pos_])) throw Error(ErrorCode::BadHeader, std::string(what) + " is not followed by whitespace");
    return value;
  }

  // Consumes the single whitespace byte that terminates the header.
  std::size_t payload_offset() { return pos_ + 1; }

  void skip(std::size_t n) { pos_ += n; }

 private:
  std::string_view bytes_;
  std::size_t pos_ = 0;
};

std::string netpbm_header(const char* magic, int w, int h) {
  return std::string(magic) + "\n" + std::to_string(w) + " " + std::to_string(h) + "\n255\n";
}

std::string g17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

[[noreturn]] void schema(const std::string& field, const std::string& what) {
  throw Error(ErrorCode::Schema, "field \"" + field + "\": " + what);
}

}  // namespace

GrayImage parse_pgm(std::string_view bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P') throw Error(ErrorCode::BadMagic, "not a netpbm file");
  if (bytes[1] >= '1' && bytes[1] <= '7' && bytes[1] != '5') {
    throw Error(ErrorCode::UnsupportedVariant, std::string("netpbm variant P") + bytes[1] + " is not supported (need P5)");
  }
  if (bytes[1] != '5') throw Error(ErrorCode::BadMagic, "not a netpbm file");
  if (bytes.size() < 3 || !is_space(bytes[2])) throw Error(ErrorCode::BadMagic, "magic must be followed by whitespace");

  HeaderReader reader(bytes);
  reader.skip(2);
  const long width = reader.number("width");
  const long height = reader.number("height");
  const long maxval = reader.number("maxval");
  if (width <= 0 || height <= 0) throw Error(ErrorCode::BadHeader, "dimensions must be positive");
  if (maxval != 255) throw Error(ErrorCode::BadMaxval, "maxval " + std::to_string(maxval) + " (need 255)");

  const std::size_t offset = reader.payload_offset();
  const auto need = static_cast<std::uint64_t>(width) * static_cast<std::uint64_t>(height);
  const std::uint64_t have = bytes.size() - offset;
  if (have < need) {
    throw Error(ErrorCode::Truncated, "payload has " + std::to_string(have) + " bytes, header needs " + std::to_string(need));
  }
  if (have > need) throw Error(ErrorCode::TrailingData, std::to_string(have - need) + " bytes after the payload");

  GrayImage img;
  img.width = static_cast<int>(width);
  img.height = static_cast<int>(height);
  img.pixels.assign(bytes.begin() + static_cast<std::ptrdiff_t>(offset), bytes.end());
  return img;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw Error(ErrorCode::Io, "read failed for " + path.string());
  return ss.str();
}

GrayImage read_gray_pgm(const fs::path& path) {
  try {
    return parse_pgm(read_file(path));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::Io) throw;
    throw Error(e.code(), path.string() + ": " + e.detail());
  }
}

BinaryMask decode_mask_pgm(std::string_view bytes) {
  GrayImage img = parse_pgm(bytes);
  for (auto& v : img.pixels) v = v > 127 ? 1 : 0;
  return BinaryMask(img.width, img.height, std::move(img.pixels));
}

BinaryMask read_mask_pgm(const fs::path& path) {
  try {
    return decode_mask_pgm(read_file(path));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::Io) throw;
    throw Error(e.code(), path.string() + ": " + e.detail());
  }
}

std::string encode_mask_pgm(const BinaryMask& mask) {
  std::string out = netpbm_header("P5", mask.width(), mask.height());
  for (std::uint8_t v : mask.data()) out.push_back(static_cast<char>(v ? 255 : 0));
  return out;
}

std::string encode_field_pgm(const ScalarField& field) {
  std::string out = netpbm_header("P5", field.width(), field.height());
  for (double v : field.data()) {
    const double t = std::clamp(std::tanh(v), 0.0, 1.0);
    out.push_back(static_cast<char>(static_cast<unsigned char>(std::lround(255.0 * t))));
  }
  return out;
}

void write_mask_pgm(const BinaryMask& mask, const fs::path& path) { write_file_atomic(path, encode_mask_pgm(mask)); }

void write_field_pgm(const ScalarField& field, const fs::path& path) {
  write_file_atomic(path, encode_field_pgm(field));
}

std::string diskset_to_json(const DiskSet& disks) {
  std::string out = "{\"n\":" + std::to_string(disks.n_disks()) + ",\"m\":" + std::to_string(disks.n_radii()) +
                    ",\"assoc\":[";
  for (std::size_t i = 0; i < disks.n_disks(); ++i) {
    if (i) out += ",";
    out += std::to_string(disks.assoc()[i] + 1);
  }
  out += "],\"centers\":[";
  for (std::size_t i = 0; i < disks.n_disks(); ++i) {
    if (i) out += ",";
    out += "[" + g17(disks.centers()[i].x) + "," + g17(disks.centers()[i].y) + "]";
  }
  out += "],\"sigmas\":[";
  for (std::size_t j = 0; j < disks.n_radii(); ++j) {
    if (j) out += ",";
    out += g17(disks.sigmas()[j]);
  }
  out += "]}\n";
  return out;
}

DiskSet diskset_from_json(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::Schema, std::string("malformed JSON: ") + e.what());
  }
  if (!doc.is_object()) throw Error(ErrorCode::Schema, "document must be an object");
  for (const char* key : {"n", "m", "assoc", "centers", "sigmas"}) {
    if (!doc.contains(key)) schema(key, "missing");
  }
  if (!doc["n"].is_number_integer()) schema("n", "must be an integer");
  if (!doc["m"].is_number_integer()) schema("m", "must be an integer");
  const long n = doc["n"].get<long>();
  const long m = doc["m"].get<long>();
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "field \"n\": N ≥ 1 violated");
  if (m < 1) throw Error(ErrorCode::InvalidArgument, "field \"m\": M ≥ 1 violated");
  if (m > n) throw Error(ErrorCode::InvalidArgument, "field \"m\": M ≤ N violated");

  const auto& assoc_doc = doc["assoc"];
  if (!assoc_doc.is_array() || static_cast<long>(assoc_doc.size()) != n) schema("assoc", "must be an array of n integers");
  std::vector<int> assoc;
  for (const auto& a : assoc_doc) {
    if (!a.is_number_integer()) schema("assoc", "entries must be integers");
    const long v = a.get<long>();
    if (v < 1 || v > m) schema("assoc", "entries must lie in 1..m");
    assoc.push_back(static_cast<int>(v - 1));
  }

  const auto& centers_doc = doc["centers"];
  if (!centers_doc.is_array() || static_cast<long>(centers_doc.size()) != n) schema("centers", "must be an array of n pairs");
  std::vector<Point> centers;
  for (const auto& c : centers_doc) {
    if (!c.is_array() || c.size() != 2 || !c[0].is_number() || !c[1].is_number()) {
      schema("centers", "entries must be [x, y] number pairs");
    }
    centers.push_back({c[0].get<double>(), c[1].get<double>()});
  }

  const auto& sigmas_doc = doc["sigmas"];
  if (!sigmas_doc.is_array() || static_cast<long>(sigmas_doc.size()) != m) schema("sigmas", "must be an array of m numbers");
  std::vector<double> sigmas;
  for (const auto& s : sigmas_doc) {
    if (!s.is_number()) schema("sigmas", "entries must be numbers");
    sigmas.push_back(s.get<double>());
  }
  return DiskSet(std::move(centers), std::move(sigmas), std::move(assoc));
}

std::string encode_overlay_ppm(const std::optional<GrayImage>& background, const std::vector<CategorizedMask>& masks) {
  int w = 0;
  int h = 0;
  if (background) {
    w = background->width;
    h = background->height;
  } else if (!masks.empty()) {
    w = masks.front().mask.width();
    h = masks.front().mask.height();
  } else {
    throw Error(ErrorCode::InvalidArgument, "overlay needs a background or at least one mask");
  }
  for (const auto& m : masks) {
    if (m.mask.width() != w || m.mask.height() != h) throw Error(ErrorCode::DimensionMismatch, "overlay masks differ in size");
  }
  if (masks.size() > 0 && background && (background->width != w || background->height != h)) {
    throw Error(ErrorCode::DimensionMismatch, "background differs in size from masks");
  }

  const auto count = static_cast<std::size_t>(w) * static_cast<std::size_t>(h);
  std::vector<int> owner(count, -1);
  for (std::size_t k = 0; k < masks.size(); ++k) {
    const auto d = masks[k].mask.data();
    for (std::size_t p = 0; p < count; ++p) {
      if (d[p]) owner[p] = static_cast<int>(k);
    }
  }

  std::string out = netpbm_header("P6", w, h);
  out.reserve(out.size() + 3 * count);
  for (std::size_t p = 0; p < count; ++p) {
    const int gray = background ? background->pixels[p] : 0;
    if (owner[p] < 0) {
      for (int ch = 0; ch < 3; ++ch) out.push_back(static_cast<char>(gray));
      continue;
    }
    const int cat = masks[static_cast<std::size_t>(owner[p])].category;
    const auto& color = kPalette[((cat % 8) + 8) % 8];
    for (int ch = 0; ch < 3; ++ch) out.push_back(static_cast<char>((gray + color[ch] + 1) / 2));
  }
  return out;
}

void write_overlay_ppm(const std::optional<GrayImage>& background, const std::vector<CategorizedMask>& masks,
                       const fs::path& path) {
  write_file_atomic(path, encode_overlay_ppm(background, masks));
}

void write_file_atomic(const fs::path& path, std::string_view bytes) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::Io, "cannot open " + tmp.string() + " for writing");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) throw Error(ErrorCode::Io, "write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw Error(ErrorCode::Io, "cannot move " + tmp.string() + " to " + path.string());
  }
}

std::optional<CorpusEntry> parse_corpus_name(const fs::path& file) {
  if (file.extension() != ".pgm") return std::nullopt;
  const std::string stem = file.stem().string();
  const auto last = stem.rfind('_');
  if (last == std::string::npos || last == 0) return std::nullopt;
  const auto prev = stem.rfind('_', last - 1);
  if (prev == std::string::npos || prev == 0) return std::nullopt;
  const std::string image = stem.substr(0, prev);
  const std::string instance = stem.substr(prev + 1, last - prev - 1);
  const std::string category = stem.substr(last + 1);
  const auto all_digits = [](const std::string& s) {
    return !s.empty() && s.size() <= 9 && std::all_of(s.begin(), s.end(), is_digit);
  };
  if (!all_digits(instance) || !all_digits(category)) return std::nullopt;
  return CorpusEntry{file, image, std::stoi(instance), std::stoi(category)};
}

std::vector<CorpusEntry> list_corpus(const fs::path& root) {
  if (!fs::is_directory(root)) throw Error(ErrorCode::Io, root.string() + " is not a directory");
  std::vector<CorpusEntry> entries;
  const fs::path manifest = root / "suite.json";
  if (fs::exists(manifest)) {
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(read_file(manifest));
    } catch (const nlohmann::json::parse_error& e) {
      throw Error(ErrorCode::Schema, manifest.string() + ": " + e.what());
    }
    if (!doc.is_object() || !doc.contains("entries") || !doc["entries"].is_array()) {
      throw Error(ErrorCode::Schema, manifest.string() + ": field \"entries\" must be an array");
    }
    int index = 0;
    for (const auto& e : doc["entries"]) {
      if (!e.is_object() || !e.contains("file") || !e["file"].is_string()) {
        throw Error(ErrorCode::Schema, manifest.string() + ": entry " + std::to_string(index) + " needs a \"file\" string");
      }
      if (!e.contains("category") || !e["category"].is_number_integer() || e["category"].get<long>() < 0) {
        throw Error(ErrorCode::Schema,
                    manifest.string() + ": entry " + std::to_string(index) + " needs a nonnegative integer \"category\"");
      }
      const fs::path file = root / e["file"].get<std::string>();
      if (!fs::exists(file)) throw Error(ErrorCode::Io, "manifest lists missing file " + file.string());
      CorpusEntry entry;
      if (auto parsed = parse_corpus_name(file)) entry = *parsed;
      entry.file = file;
      if (entry.image.empty()) {
        entry.image = file.stem().string();
        entry.instance = index;
      }
      entry.category = static_cast<int>(e["category"].get<long>());
      entries.push_back(std::move(entry));
      ++index;
    }
    return entries;
  }
  for (const auto& de : fs::directory_iterator(root)) {
    if (!de.is_regular_file()) continue;
    if (auto parsed = parse_corpus_name(de.path())) entries.push_back(std::move(*parsed));
  }
  std::sort(entries.begin(), entries.end(),
            [](const CorpusEntry& a, const CorpusEntry& b) { return a.file.filename() < b.file.filename(); });
  return entries;
}

std::string corpus_manifest_json(const std::vector<CorpusEntry>& entries) {
  nlohmann::ordered_json doc;
  auto& list = doc["entries"] = nlohmann::ordered_json::array();
  for (const auto& e : entries) {
    list.push_back({{"file", e.file.filename().string()}, {"category", e.category}});
  }
  return doc.dump(2) + "\n";
}

}  // namespace diskcover
