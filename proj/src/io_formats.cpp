#include "streamstab/io_formats.hpp"

#include "streamstab/errors.hpp"
#include "streamstab/format.hpp"

#include <bit>
#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>
#include <vector>

namespace streamstab::io {

namespace {

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f';
}

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && is_space(line[i])) ++i;
    const auto start = i;
    while (i < line.size() && !is_space(line[i])) ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

std::optional<double> parse_double(std::string_view token) {
  double v = 0.0;
  const auto* end = token.data() + token.size();
  const auto res = std::from_chars(token.data(), end, v);
  if (res.ec != std::errc() || res.ptr != end) return std::nullopt;
  return v;
}

std::optional<std::uint64_t> parse_uint(std::string_view token) {
  std::uint64_t v = 0;
  const auto* end = token.data() + token.size();
  const auto res = std::from_chars(token.data(), end, v);
  if (res.ec != std::errc() || res.ptr != end) return std::nullopt;
  return v;
}

/// Iterates '\n'-terminated lines, tracking 1-based line numbers.
class LineReader {
 public:
  explicit LineReader(std::string_view text) : text_(text) {}

  bool next(std::string_view& line) {
    if (pos_ >= text_.size()) return false;
    const auto nl = text_.find('\n', pos_);
    const auto end = nl == std::string_view::npos ? text_.size() : nl;
    line = text_.substr(pos_, end - pos_);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    pos_ = nl == std::string_view::npos ? text_.size() : nl + 1;
    ++line_no_;
    return true;
  }

  std::size_t line_no() const { return line_no_; }
  std::string_view rest() const { return text_.substr(pos_); }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_no_ = 0;
};

bool blank(std::string_view s) {
  for (char c : s) {
    if (!is_space(c)) return false;
  }
  return true;
}

/// Token scanner for netpbm-style headers ('#' comments run to end of line).
class HeaderScanner {
 public:
  explicit HeaderScanner(std::string_view bytes) : bytes_(bytes) {}

  std::string_view token() {
    for (;;) {
      while (pos_ < bytes_.size() && is_space(bytes_[pos_])) ++pos_;
      if (pos_ < bytes_.size() && bytes_[pos_] == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
        continue;
      }
      break;
    }
    const auto start = pos_;
    while (pos_ < bytes_.size() && !is_space(bytes_[pos_]) && bytes_[pos_] != '#') ++pos_;
    return bytes_.substr(start, pos_ - start);
  }

  std::uint64_t uint_token(const char* what) {
    const auto t = token();
    const auto v = parse_uint(t);
    if (!v) throw Error(ErrorCode::ParseError, std::string("bad ") + what + " '" + std::string(t) + "'");
    return *v;
  }

  /// Consumes the single whitespace byte that separates header and raster.
  void end_of_header() {
    if (pos_ >= bytes_.size() || !is_space(bytes_[pos_])) {
      throw Error(ErrorCode::ParseError, "header not terminated by whitespace");
    }
    ++pos_;
  }

  std::string_view rest() const { return bytes_.substr(pos_); }
  bool only_whitespace_and_comments_left() {
    const auto t = token();
    return t.empty() && pos_ >= bytes_.size();
  }

 private:
  std::string_view bytes_;
  std::size_t pos_ = 0;
};

constexpr std::uint64_t kMaxDimension = 1u << 20;

void check_dims(std::uint64_t w, std::uint64_t h) {
  if (w == 0 || h == 0 || w > kMaxDimension || h > kMaxDimension) {
    throw Error(ErrorCode::ParseError,
                "unsupported image size " + std::to_string(w) + "x" + std::to_string(h));
  }
}

}  // namespace

// ─── TUM ─────────────────────────────────────────────────────────────────────

Trajectory read_trajectory_tum(std::string_view text) {
  Trajectory traj;
  LineReader reader(text);
  std::string_view line;
  while (reader.next(line)) {
    const auto fields = split_ws(line);
    if (fields.empty() || fields.front().front() == '#') continue;
    const auto line_no = reader.line_no();
    if (fields.size() != 8) {
      throw Error(ErrorCode::ParseError,
                  "expected 8 fields, found " + std::to_string(fields.size()), line_no);
    }
    double v[8];
    for (std::size_t i = 0; i < 8; ++i) {
      const auto parsed = parse_double(fields[i]);
      if (!parsed || !std::isfinite(*parsed)) {
        throw Error(ErrorCode::ParseError, "bad number '" + std::string(fields[i]) + "'", line_no);
      }
      v[i] = *parsed;
    }
    Pose pose;
    pose.timestamp = v[0];
    pose.t = Vec3(v[1], v[2], v[3]);
    const Quaternion raw{v[7], v[4], v[5], v[6]};
    if (!(raw.norm() >= 1e-12)) throw Error(ErrorCode::ParseError, "zero quaternion", line_no);
    pose.q = quat_normalize(raw);
    if (!traj.empty() && !(pose.timestamp > traj.poses.back().timestamp)) {
      throw Error(ErrorCode::NonMonotonicTimestamps,
                  "timestamp " + format_real(pose.timestamp, kRoundTripDigits) +
                      " does not increase",
                  line_no);
    }
    traj.poses.push_back(pose);
  }
  return traj;
}

std::string write_trajectory_tum(const Trajectory& traj) {
  std::string out = "# timestamp tx ty tz qx qy qz qw\n";
  for (const auto& p : traj) {
    const double fields[8] = {p.timestamp, p.t.x(), p.t.y(), p.t.z(), p.q.x, p.q.y, p.q.z, p.q.w};
    for (int i = 0; i < 8; ++i) {
      if (i) out += ' ';
      out += format_real(fields[i], kRoundTripDigits);
    }
    out += '\n';
  }
  return out;
}

// ─── PGM ─────────────────────────────────────────────────────────────────────

GrayImage read_pgm(std::string_view bytes) {
  HeaderScanner scan(bytes);
  const auto magic = scan.token();
  if (magic != "P2" && magic != "P5") {
    throw Error(ErrorCode::UnsupportedMagic, "'" + std::string(magic) + "' is not P2 or P5");
  }
  const auto w = scan.uint_token("width");
  const auto h = scan.uint_token("height");
  check_dims(w, h);
  const auto maxval = scan.uint_token("maxval");
  if (maxval == 0 || maxval > 65535) {
    throw Error(ErrorCode::ParseError, "maxval " + std::to_string(maxval) + " outside 1..65535");
  }
  const auto count = w * h;
  const double scale = 1.0 / static_cast<double>(maxval);

  if (magic == "P5") {
    scan.end_of_header();
    const auto raster = scan.rest();
    const std::uint64_t bpp = maxval < 256 ? 1 : 2;
    if (raster.size() != count * bpp) {
      throw Error(ErrorCode::ParseError, "raster holds " + std::to_string(raster.size()) +
                                             " bytes, expected " + std::to_string(count * bpp));
    }
    GrayImage img(w, h);
    const auto* p = reinterpret_cast<const unsigned char*>(raster.data());
    for (std::uint64_t i = 0; i < count; ++i) {
      const unsigned v = bpp == 1 ? p[i] : (static_cast<unsigned>(p[2 * i]) << 8) | p[2 * i + 1];
      if (v > maxval) throw Error(ErrorCode::ParseError, "sample exceeds maxval");
      img.pixels[i] = static_cast<double>(v) * scale;
    }
    return img;
  }

  // Every ASCII sample needs at least one digit and one separator.
  if (count > bytes.size()) throw Error(ErrorCode::ParseError, "truncated P2 raster");
  GrayImage img(w, h);
  for (std::uint64_t i = 0; i < count; ++i) {
    const auto t = scan.token();
    const auto v = parse_uint(t);
    if (!v) throw Error(ErrorCode::ParseError, "bad or missing sample " + std::to_string(i));
    if (*v > maxval) throw Error(ErrorCode::ParseError, "sample exceeds maxval");
    img.pixels[i] = static_cast<double>(*v) * scale;
  }
  if (!scan.only_whitespace_and_comments_left()) {
    throw Error(ErrorCode::ParseError, "trailing data after P2 raster");
  }
  return img;
}

std::string write_pgm(const GrayImage& img) {
  std::string out = "P5\n" + std::to_string(img.width) + " " + std::to_string(img.height) + "\n255\n";
  out.reserve(out.size() + img.pixels.size());
  for (double v : img.pixels) {
    out += static_cast<char>(static_cast<unsigned char>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0)));
  }
  return out;
}

// ─── PFM ─────────────────────────────────────────────────────────────────────

namespace {

std::uint32_t byteswap32(std::uint32_t v) {
  return (v >> 24) | ((v >> 8) & 0xff00u) | ((v << 8) & 0xff0000u) | (v << 24);
}

}  // namespace

DepthMap read_pfm(std::string_view bytes) {
  HeaderScanner scan(bytes);
  const auto magic = scan.token();
  if (magic != "Pf") {
    throw Error(ErrorCode::UnsupportedMagic,
                "'" + std::string(magic) + "' is not a single-channel PFM (Pf)");
  }
  const auto w = scan.uint_token("width");
  const auto h = scan.uint_token("height");
  check_dims(w, h);
  const auto scale_tok = scan.token();
  const auto scale = parse_double(scale_tok);
  if (!scale || *scale == 0.0 || !std::isfinite(*scale)) {
    throw Error(ErrorCode::ParseError, "bad PFM scale '" + std::string(scale_tok) + "'");
  }
  scan.end_of_header();
  const auto raster = scan.rest();
  const auto count = w * h;
  if (raster.size() != count * 4) {
    throw Error(ErrorCode::ParseError, "raster holds " + std::to_string(raster.size()) +
                                           " bytes, expected " + std::to_string(count * 4));
  }
  const bool file_little = *scale < 0.0;
  const bool swap = file_little != (std::endian::native == std::endian::little);

  DepthMap map(w, h);
  for (std::uint64_t row = 0; row < h; ++row) {
    const auto y = h - 1 - row;  // bottom-up
    for (std::uint64_t x = 0; x < w; ++x) {
      std::uint32_t bits;
      std::memcpy(&bits, raster.data() + 4 * (row * w + x), 4);
      if (swap) bits = byteswap32(bits);
      const auto value = static_cast<double>(std::bit_cast<float>(bits));
      const bool ok = std::isfinite(value) && value > 0.0;
      map.depths[map.index(x, y)] = ok ? value : 0.0;
      map.valid[map.index(x, y)] = ok ? 1 : 0;
    }
  }
  return map;
}

std::string write_pfm(const DepthMap& map) {
  std::string out =
      "Pf\n" + std::to_string(map.width) + " " + std::to_string(map.height) + "\n-1\n";
  const auto header = out.size();
  out.resize(header + 4 * map.width * map.height);
  const bool swap = std::endian::native != std::endian::little;
  std::size_t offset = header;
  for (std::size_t row = 0; row < map.height; ++row) {
    const auto y = map.height - 1 - row;
    for (std::size_t x = 0; x < map.width; ++x) {
      const float v = map.is_valid(x, y) ? static_cast<float>(map.depth(x, y)) : 0.0f;
      auto bits = std::bit_cast<std::uint32_t>(v);
      if (swap) bits = byteswap32(bits);
      std::memcpy(out.data() + offset, &bits, 4);
      offset += 4;
    }
  }
  return out;
}

// ─── PLY ─────────────────────────────────────────────────────────────────────

PointSet read_ply_ascii(std::string_view text) {
  LineReader reader(text);
  std::string_view line;
  auto next_fields = [&]() {
    if (!reader.next(line)) throw Error(ErrorCode::ParseError, "unexpected end of PLY header");
    return split_ws(line);
  };

  auto fields = next_fields();
  if (fields.size() != 1 || fields[0] != "ply") throw Error(ErrorCode::ParseError, "missing 'ply' magic", 1);

  std::optional<std::uint64_t> vertex_count;
  std::vector<std::string> props;
  bool in_vertex = false;
  bool format_seen = false;
  for (;;) {
    fields = next_fields();
    const auto no = reader.line_no();
    if (fields.empty()) continue;
    const auto key = fields[0];
    if (key == "end_header") break;
    if (key == "comment" || key == "obj_info") continue;
    if (key == "format") {
      if (fields.size() != 3 || fields[1] != "ascii" || fields[2] != "1.0") {
        throw Error(ErrorCode::ParseError, "only 'format ascii 1.0' is supported", no);
      }
      format_seen = true;
    } else if (key == "element") {
      if (fields.size() != 3) throw Error(ErrorCode::ParseError, "malformed element line", no);
      const auto n = parse_uint(fields[2]);
      if (!n) throw Error(ErrorCode::ParseError, "bad element count", no);
      in_vertex = fields[1] == "vertex";
      if (in_vertex) {
        if (vertex_count) throw Error(ErrorCode::ParseError, "duplicate vertex element", no);
        vertex_count = *n;
      } else if (*n != 0) {
        throw Error(ErrorCode::ParseError,
                    "unsupported non-empty element '" + std::string(fields[1]) + "'", no);
      }
    } else if (key == "property") {
      if (fields.size() != 3) throw Error(ErrorCode::ParseError, "unsupported property line", no);
      if (in_vertex) props.emplace_back(fields[2]);
    } else {
      throw Error(ErrorCode::ParseError, "unknown header keyword '" + std::string(key) + "'", no);
    }
  }
  if (!format_seen) throw Error(ErrorCode::ParseError, "missing format line");
  if (!vertex_count) throw Error(ErrorCode::ParseError, "missing vertex element");

  auto column = [&](const char* name) -> std::optional<std::size_t> {
    for (std::size_t i = 0; i < props.size(); ++i) {
      if (props[i] == name) return i;
    }
    return std::nullopt;
  };
  const auto cx = column("x");
  const auto cy = column("y");
  const auto cz = column("z");
  if (!cx || !cy || !cz) throw Error(ErrorCode::MissingProperty, "vertex needs x, y and z properties");
  const auto cc = column("confidence");

  PointSet cloud;
  // Each vertex line needs at least two bytes per property.
  if (*vertex_count > reader.rest().size() / (2 * props.size()) + 1) {
    throw Error(ErrorCode::ParseError, "file too short for declared vertex count");
  }
  cloud.points.reserve(*vertex_count);
  if (cc) cloud.confidences.emplace().reserve(*vertex_count);
  std::vector<double> values(props.size());
  for (std::uint64_t i = 0; i < *vertex_count; ++i) {
    if (!reader.next(line)) throw Error(ErrorCode::ParseError, "truncated vertex list");
    const auto f = split_ws(line);
    const auto no = reader.line_no();
    if (f.size() != props.size()) {
      throw Error(ErrorCode::ParseError, "expected " + std::to_string(props.size()) + " values", no);
    }
    for (std::size_t j = 0; j < f.size(); ++j) {
      const auto v = parse_double(f[j]);
      if (!v) throw Error(ErrorCode::ParseError, "bad number '" + std::string(f[j]) + "'", no);
      values[j] = *v;
    }
    cloud.points.emplace_back(values[*cx], values[*cy], values[*cz]);
    if (cc) cloud.confidences->push_back(values[*cc]);
  }
  while (reader.next(line)) {
    if (!blank(line)) throw Error(ErrorCode::ParseError, "trailing data after vertices", reader.line_no());
  }
  return cloud;
}

std::string write_ply_ascii(const PointSet& cloud) {
  const bool conf = cloud.confidences.has_value();
  std::string out = "ply\nformat ascii 1.0\nelement vertex " + std::to_string(cloud.size()) +
                    "\nproperty double x\nproperty double y\nproperty double z\n";
  if (conf) out += "property double confidence\n";
  out += "end_header\n";
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const auto& p = cloud.points[i];
    out += format_real(p.x(), kRoundTripDigits) + ' ' + format_real(p.y(), kRoundTripDigits) +
           ' ' + format_real(p.z(), kRoundTripDigits);
    if (conf) out += ' ' + format_real((*cloud.confidences)[i], kRoundTripDigits);
    out += '\n';
  }
  return out;
}

// ─── Files ───────────────────────────────────────────────────────────────────

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw Error(ErrorCode::IoError, "cannot read '" + path.string() + "'");
  return std::move(ss).str();
}

void write_file(const std::filesystem::path& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot create '" + path.string() + "'");
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw Error(ErrorCode::IoError, "cannot write '" + path.string() + "'");
}

}  // namespace streamstab::io
