#include "gbmcut/metaimage.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <vector>

namespace gbmcut {
namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<double> parse_numbers(const std::string& key, const std::string& value,
                                  std::size_t expected) {
  std::istringstream in(value);
  std::vector<double> out;
  std::string token;
  while (in >> token) {
    double v = 0.0;
    const auto* end = token.data() + token.size();
    const auto [ptr, ec] = std::from_chars(token.data(), end, v);
    if (ec != std::errc{} || ptr != end) {
      throw FormatError("header key " + key + ": '" + token + "' is not a number");
    }
    out.push_back(v);
  }
  if (out.size() != expected) {
    throw FormatError("header key " + key + " needs " + std::to_string(expected) + " values");
  }
  return out;
}

bool parse_bool(const std::string& key, const std::string& value) {
  std::string v = value;
  std::transform(v.begin(), v.end(), v.begin(), [](unsigned char c) { return std::tolower(c); });
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw FormatError("header key " + key + ": expected True/False");
}

ElementKind parse_element_type(const std::string& value) {
  if (value == "MET_UCHAR") return ElementKind::kU8;
  if (value == "MET_SHORT") return ElementKind::kI16;
  if (value == "MET_USHORT") return ElementKind::kU16;
  if (value == "MET_FLOAT") return ElementKind::kF32;
  throw UnsupportedElementType("unsupported ElementType " + value);
}

struct Header {
  Geometry geometry;
  ElementKind kind = ElementKind::kU8;
  std::string data_file;
  std::size_t data_offset = 0;  // byte offset of LOCAL data in the input
};

Header parse_header(std::string_view bytes) {
  std::map<std::string, std::string> keys;
  std::size_t pos = 0;
  bool saw_data_file = false;
  while (pos < bytes.size() && !saw_data_file) {
    auto eol = bytes.find('\n', pos);
    const bool last_line = eol == std::string_view::npos;
    if (last_line) eol = bytes.size();
    const std::string line = trim(bytes.substr(pos, eol - pos));
    pos = last_line ? bytes.size() : eol + 1;
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw FormatError("malformed header line: " + line);
    const std::string key = trim(std::string_view(line).substr(0, eq));
    const std::string value = trim(std::string_view(line).substr(eq + 1));
    if (key.empty()) throw FormatError("malformed header line: " + line);
    keys[key] = value;
    if (key == "ElementDataFile") saw_data_file = true;
  }
  if (!saw_data_file) throw FormatError("header lacks ElementDataFile");

  const auto require = [&](const char* key) -> const std::string& {
    const auto it = keys.find(key);
    if (it == keys.end()) throw FormatError(std::string("header lacks ") + key);
    return it->second;
  };
  const auto find = [&](std::initializer_list<const char*> names) -> std::optional<std::string> {
    for (const char* n : names) {
      if (auto it = keys.find(n); it != keys.end()) return it->second;
    }
    return std::nullopt;
  };

  if (auto type = find({"ObjectType"}); type && *type != "Image") {
    throw FormatError("ObjectType must be Image");
  }
  const auto ndims = parse_numbers("NDims", require("NDims"), 1);
  if (ndims[0] != 3.0) throw FormatError("NDims must be 3");
  if (auto c = find({"CompressedData"}); c && parse_bool("CompressedData", *c)) {
    throw FormatError("compressed data is not supported");
  }
  if (auto msb = find({"ElementByteOrderMSB", "BinaryDataByteOrderMSB"});
      msb && parse_bool("ElementByteOrderMSB", *msb)) {
    throw FormatError("big-endian data is not supported");
  }
  if (auto ch = find({"ElementNumberOfChannels"}); ch && trim(*ch) != "1") {
    throw FormatError("multi-channel data is not supported");
  }

  Header h;
  const auto dims = parse_numbers("DimSize", require("DimSize"), 3);
  for (int a = 0; a < 3; ++a) {
    if (dims[a] < 1 || dims[a] != static_cast<double>(static_cast<std::int64_t>(dims[a]))) {
      throw FormatError("DimSize entries must be positive integers");
    }
    h.geometry.dims[a] = static_cast<std::int64_t>(dims[a]);
  }
  if (auto sp = find({"ElementSpacing", "ElementSize"})) {
    const auto s = parse_numbers("ElementSpacing", *sp, 3);
    h.geometry.spacing = {s[0], s[1], s[2]};
    if (!(s[0] > 0 && s[1] > 0 && s[2] > 0)) throw FormatError("ElementSpacing must be > 0");
  }
  if (auto off = find({"Offset", "Origin", "Position"})) {
    const auto o = parse_numbers("Offset", *off, 3);
    h.geometry.origin = {o[0], o[1], o[2]};
  }
  h.kind = parse_element_type(require("ElementType"));
  h.data_file = require("ElementDataFile");
  h.data_offset = pos;
  return h;
}

template <typename T>
T read_le(const unsigned char* p) {
  using U = std::conditional_t<sizeof(T) == 1, std::uint8_t,
                               std::conditional_t<sizeof(T) == 2, std::uint16_t, std::uint32_t>>;
  U u = 0;
  for (std::size_t b = 0; b < sizeof(T); ++b) u |= static_cast<U>(static_cast<U>(p[b]) << (8 * b));
  return std::bit_cast<T>(u);
}

template <typename T>
void write_le(std::string& out, T value) {
  using U = std::conditional_t<sizeof(T) == 1, std::uint8_t,
                               std::conditional_t<sizeof(T) == 2, std::uint16_t, std::uint32_t>>;
  const U u = std::bit_cast<U>(value);
  for (std::size_t b = 0; b < sizeof(T); ++b) out.push_back(static_cast<char>((u >> (8 * b)) & 0xFF));
}

std::vector<float> decode(std::string_view raw, ElementKind kind, std::size_t count) {
  const std::size_t expected = count * element_size(kind);
  if (raw.size() != expected) {
    throw DataLengthMismatch("data length mismatch: expected " + std::to_string(expected) +
                             " bytes, found " + std::to_string(raw.size()));
  }
  std::vector<float> out(count);
  const auto* p = reinterpret_cast<const unsigned char*>(raw.data());
  for (std::size_t n = 0; n < count; ++n) {
    switch (kind) {
      case ElementKind::kU8:
        out[n] = static_cast<float>(p[n]);
        break;
      case ElementKind::kI16:
        out[n] = static_cast<float>(read_le<std::int16_t>(p + 2 * n));
        break;
      case ElementKind::kU16:
        out[n] = static_cast<float>(read_le<std::uint16_t>(p + 2 * n));
        break;
      case ElementKind::kF32:
        out[n] = read_le<float>(p + 4 * n);
        break;
    }
  }
  return out;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("read failed: " + path.string());
  return std::move(ss).str();
}

void write_file(const std::filesystem::path& path, std::string_view bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed: " + path.string());
}

std::string format_number(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

std::string format_triple(Vec3 v) {
  return format_number(v.x) + " " + format_number(v.y) + " " + format_number(v.z);
}

std::string encode_header(const Geometry& g, ElementKind kind, const std::string& data_file) {
  std::string h;
  h += "ObjectType = Image\n";
  h += "NDims = 3\n";
  h += "DimSize = " + std::to_string(g.dims[0]) + " " + std::to_string(g.dims[1]) + " " +
       std::to_string(g.dims[2]) + "\n";
  h += "ElementSpacing = " + format_triple(g.spacing) + "\n";
  h += "Offset = " + format_triple(g.origin) + "\n";
  h += "ElementType = " + std::string(metaimage_name(kind)) + "\n";
  h += "ElementByteOrderMSB = False\n";
  h += "ElementDataFile = " + data_file + "\n";
  return h;
}

std::string encode_data(const Volume& volume) {
  std::string out;
  out.reserve(volume.data().size() * element_size(volume.element_kind()));
  for (float v : volume.data()) {
    switch (volume.element_kind()) {
      case ElementKind::kU8:
        out.push_back(static_cast<char>(static_cast<std::uint8_t>(v)));
        break;
      case ElementKind::kI16:
        write_le(out, static_cast<std::int16_t>(v));
        break;
      case ElementKind::kU16:
        write_le(out, static_cast<std::uint16_t>(v));
        break;
      case ElementKind::kF32:
        write_le(out, v);
        break;
    }
  }
  return out;
}

std::string encode_mask_data(const Mask& mask) {
  const auto& d = mask.data();
  if (std::any_of(d.begin(), d.end(), [](std::uint8_t v) { return v > 1; })) {
    throw InvalidArgument("mask contains values other than 0/1");
  }
  return std::string(reinterpret_cast<const char*>(d.data()), d.size());
}

bool is_single_file(const std::filesystem::path& path) { return path.extension() == ".mha"; }

}  // namespace

Volume parse_metaimage(std::string_view bytes, const std::string* detached_raw) {
  const Header h = parse_header(bytes);
  std::string_view raw;
  if (h.data_file == "LOCAL") {
    raw = bytes.substr(h.data_offset);
  } else {
    if (detached_raw == nullptr) throw FormatError("header references external data file");
    raw = *detached_raw;
  }
  return Volume(h.geometry, decode(raw, h.kind, h.geometry.voxel_count()), h.kind);
}

Volume load_volume(const std::filesystem::path& path) {
  const std::string bytes = read_file(path);
  const Header h = parse_header(bytes);
  if (h.data_file == "LOCAL") return parse_metaimage(bytes);
  const auto raw_path = path.parent_path() / h.data_file;
  const std::string raw = read_file(raw_path);
  return parse_metaimage(bytes, &raw);
}

std::string encode_volume_mha(const Volume& volume) {
  return encode_header(volume.geometry(), volume.element_kind(), "LOCAL") + encode_data(volume);
}

std::string encode_mask_mha(const Mask& mask) {
  return encode_header(mask.geometry(), ElementKind::kU8, "LOCAL") + encode_mask_data(mask);
}

void save_volume(const Volume& volume, const std::filesystem::path& path) {
  if (is_single_file(path)) {
    write_file(path, encode_volume_mha(volume));
    return;
  }
  auto raw_path = path;
  raw_path.replace_extension(".raw");
  write_file(path, encode_header(volume.geometry(), volume.element_kind(),
                                 raw_path.filename().string()));
  write_file(raw_path, encode_data(volume));
}

void save_mask(const Mask& mask, const std::filesystem::path& path) {
  if (is_single_file(path)) {
    write_file(path, encode_mask_mha(mask));
    return;
  }
  const std::string data = encode_mask_data(mask);
  auto raw_path = path;
  raw_path.replace_extension(".raw");
  write_file(path, encode_header(mask.geometry(), ElementKind::kU8, raw_path.filename().string()));
  write_file(raw_path, data);
}

}  // namespace gbmcut
