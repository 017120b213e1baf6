// Netpbm gray/color maps: P2 and P3 (plain), P5 and P6 (raw), maxval 255 only.

#include <string>

#include "ovoscope/error.hpp"
#include "ovoscope/raster.hpp"

namespace ovoscope {
namespace {

bool is_space(std::uint8_t c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f';
}

bool is_digit(std::uint8_t c) { return c >= '0' && c <= '9'; }

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  bool at_end() const { return pos_ >= bytes_.size(); }
  std::size_t pos() const { return pos_; }
  std::size_t remaining() const { return bytes_.size() - pos_; }
  std::uint8_t peek() const { return bytes_[pos_]; }
  void advance(std::size_t n) { pos_ += n; }

  void skip_space_and_comments() {
    while (!at_end()) {
      if (is_space(peek())) {
        ++pos_;
      } else if (peek() == '#') {
        while (!at_end() && peek() != '\n' && peek() != '\r') {
          ++pos_;
        }
      } else {
        break;
      }
    }
  }

  // Decimal integer terminated by whitespace, '#', or end of input.
  // Returns false when no digits are present or a stray character follows them.
  bool read_uint(std::uint64_t& value) {
    skip_space_and_comments();
    if (at_end() || !is_digit(peek())) {
      return false;
    }
    value = 0;
    while (!at_end() && is_digit(peek())) {
      value = value * 10 + (peek() - '0');
      if (value > (1ull << 32)) {
        return false;
      }
      ++pos_;
    }
    return at_end() || is_space(peek()) || peek() == '#';
  }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

struct Header {
  char kind = 0;  // '2', '3', '5' or '6'
  std::size_t width = 0;
  std::size_t height = 0;
};

Header read_header(Reader& in) {
  if (in.remaining() < 2 || in.peek() != 'P') {
    throw ParseError(ParseErrorKind::UnknownMagic, "netpbm: missing 'P' magic");
  }
  in.advance(1);
  Header h;
  h.kind = static_cast<char>(in.peek());
  if (h.kind != '2' && h.kind != '3' && h.kind != '5' && h.kind != '6') {
    throw ParseError(ParseErrorKind::UnknownMagic,
                     std::string("netpbm: unsupported magic P") + h.kind);
  }
  in.advance(1);
  if (!in.at_end() && !is_space(in.peek()) && in.peek() != '#') {
    throw ParseError(ParseErrorKind::MalformedHeader, "netpbm: garbage after magic");
  }

  std::uint64_t width = 0, height = 0, maxval = 0;
  if (!in.read_uint(width) || !in.read_uint(height)) {
    throw ParseError(ParseErrorKind::MalformedHeader, "netpbm: bad width/height");
  }
  if (width == 0 || height == 0 || width * height > (1ull << 31)) {
    throw ParseError(ParseErrorKind::MalformedHeader,
                     "netpbm: unsupported dimensions " + std::to_string(width) + "x" +
                         std::to_string(height));
  }
  if (!in.read_uint(maxval)) {
    throw ParseError(ParseErrorKind::MalformedHeader, "netpbm: bad maxval");
  }
  if (maxval != 255) {
    throw ParseError(ParseErrorKind::UnsupportedMaxval,
                     "netpbm: maxval " + std::to_string(maxval) + " (only 255 is supported)");
  }
  h.width = width;
  h.height = height;
  return h;
}

std::vector<std::uint8_t> read_plain_samples(Reader& in, std::size_t count) {
  std::vector<std::uint8_t> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    in.skip_space_and_comments();
    if (in.at_end()) {
      throw ParseError(ParseErrorKind::Truncated, "netpbm: expected " + std::to_string(count) +
                                                      " samples, got " + std::to_string(i));
    }
    std::uint64_t v = 0;
    if (!in.read_uint(v) || v > 255) {
      throw ParseError(ParseErrorKind::BadSample,
                       "netpbm: invalid sample #" + std::to_string(i));
    }
    out.push_back(static_cast<std::uint8_t>(v));
  }
  return out;
}

std::vector<std::uint8_t> read_raw_samples(Reader& in, std::span<const std::uint8_t> bytes,
                                           std::size_t count) {
  // Exactly one whitespace byte separates maxval from the raster.
  if (in.at_end() || !is_space(in.peek())) {
    throw ParseError(ParseErrorKind::Truncated, "netpbm: missing raster");
  }
  in.advance(1);
  if (in.remaining() < count) {
    throw ParseError(ParseErrorKind::Truncated, "netpbm: raster has " +
                                                    std::to_string(in.remaining()) +
                                                    " bytes, expected " + std::to_string(count));
  }
  const auto first = bytes.begin() + static_cast<std::ptrdiff_t>(in.pos());
  return std::vector<std::uint8_t>(first, first + static_cast<std::ptrdiff_t>(count));
}

void append(std::vector<std::uint8_t>& out, const std::string& s) {
  out.insert(out.end(), s.begin(), s.end());
}

std::string header(const char* magic, std::size_t w, std::size_t h) {
  return std::string(magic) + "\n" + std::to_string(w) + " " + std::to_string(h) + "\n255\n";
}

void append_plain_rows(std::vector<std::uint8_t>& out, std::span<const std::uint8_t> samples,
                       std::size_t per_row) {
  for (std::size_t i = 0; i < samples.size(); ++i) {
    append(out, std::to_string(samples[i]));
    out.push_back((i + 1) % per_row == 0 ? '\n' : ' ');
  }
}

}  // namespace

AnyImage decode_netpbm(std::span<const std::uint8_t> bytes) {
  Reader in(bytes);
  const Header h = read_header(in);
  const bool color = h.kind == '3' || h.kind == '6';
  const bool raw = h.kind == '5' || h.kind == '6';
  const std::size_t count = h.width * h.height * (color ? 3 : 1);
  std::vector<std::uint8_t> samples =
      raw ? read_raw_samples(in, bytes, count) : read_plain_samples(in, count);
  if (color) {
    return RgbImage(h.width, h.height, std::move(samples));
  }
  return GrayImage(h.width, h.height, std::move(samples));
}

std::vector<std::uint8_t> encode_pgm(const GrayImage& image, bool binary) {
  std::vector<std::uint8_t> out;
  append(out, header(binary ? "P5" : "P2", image.width(), image.height()));
  if (binary) {
    out.insert(out.end(), image.pixels().begin(), image.pixels().end());
  } else {
    append_plain_rows(out, image.pixels(), image.width());
  }
  return out;
}

std::vector<std::uint8_t> encode_ppm(const RgbImage& image, bool binary) {
  std::vector<std::uint8_t> out;
  append(out, header(binary ? "P6" : "P3", image.width(), image.height()));
  if (binary) {
    out.insert(out.end(), image.data().begin(), image.data().end());
  } else {
    append_plain_rows(out, image.data(), 3 * image.width());
  }
  return out;
}

}  // namespace ovoscope
