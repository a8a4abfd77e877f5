#include "mscm/image.hpp"

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>
#include <memory>

namespace mscm {

ImageIoError::ImageIoError(Kind kind, const std::filesystem::path& path, const std::string& what)
    : std::runtime_error(path.string() + ": " + what), kind_(kind), path_(path) {}

namespace {

using Kind = ImageIoError::Kind;

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ImageIoError(Kind::unreadable, path, "cannot open file");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw ImageIoError(Kind::unreadable, path, "read failed");
  return bytes;
}

// Reads one header token of a PNM file, skipping whitespace and '#' comments.
bool next_token(const std::vector<std::uint8_t>& bytes, std::size_t& pos, std::string& token) {
  token.clear();
  while (pos < bytes.size()) {
    const char c = static_cast<char>(bytes[pos]);
    if (c == '#') {
      while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
    } else if (std::isspace(static_cast<unsigned char>(c))) {
      ++pos;
    } else {
      break;
    }
  }
  while (pos < bytes.size() && !std::isspace(bytes[pos])) token.push_back(static_cast<char>(bytes[pos++]));
  return !token.empty();
}

int parse_dimension(const std::string& token, const std::filesystem::path& path) {
  if (token.empty() || token.size() > 9) throw ImageIoError(Kind::unsupported, path, "bad PGM header field '" + token + "'");
  for (char c : token) {
    if (!std::isdigit(static_cast<unsigned char>(c)))
      throw ImageIoError(Kind::unsupported, path, "bad PGM header field '" + token + "'");
  }
  return std::stoi(token);
}

GrayImage decode_pgm(const std::vector<std::uint8_t>& bytes, const std::filesystem::path& path) {
  std::size_t pos = 2;
  std::string token;
  int fields[3] = {0, 0, 0};
  for (int& field : fields) {
    if (!next_token(bytes, pos, token)) throw ImageIoError(Kind::truncated, path, "truncated PGM header");
    field = parse_dimension(token, path);
  }
  const auto [w, h, maxval] = fields;
  if (w <= 0 || h <= 0) throw ImageIoError(Kind::unsupported, path, "PGM with empty raster");
  if (maxval != 255) throw ImageIoError(Kind::unsupported, path, "unsupported PGM maxval " + std::to_string(maxval));
  // Exactly one whitespace byte separates the header from the payload.
  if (pos >= bytes.size()) throw ImageIoError(Kind::truncated, path, "truncated PGM header");
  ++pos;
  const std::size_t need = static_cast<std::size_t>(w) * static_cast<std::size_t>(h);
  if (bytes.size() - pos < need)
    throw ImageIoError(Kind::truncated, path,
                       "truncated PGM payload: expected " + std::to_string(need) + " bytes, found " +
                           std::to_string(bytes.size() - pos));
  GrayImage image(h, w);
  std::memcpy(image.data(), bytes.data() + pos, need);
  return image;
}

struct PngReader {
  png_structp png = nullptr;
  png_infop info = nullptr;
  ~PngReader() { png_destroy_read_struct(&png, info ? &info : nullptr, nullptr); }
};

struct MemorySource {
  const std::vector<std::uint8_t>* bytes;
  std::size_t pos;
};

void read_from_memory(png_structp png, png_bytep out, png_size_t count) {
  auto* src = static_cast<MemorySource*>(png_get_io_ptr(png));
  if (src->bytes->size() - src->pos < count) png_error(png, "truncated PNG stream");
  std::memcpy(out, src->bytes->data() + src->pos, count);
  src->pos += count;
}

// libpng reports errors via longjmp; these wrappers keep only trivial state inside the setjmp frame.
bool read_png_header(png_structp png, png_infop info, png_uint_32* w, png_uint_32* h, int* color_type,
                     int* bit_depth) {
  if (setjmp(png_jmpbuf(png))) return false;
  png_read_info(png, info);
  *w = png_get_image_width(png, info);
  *h = png_get_image_height(png, info);
  *color_type = png_get_color_type(png, info);
  *bit_depth = png_get_bit_depth(png, info);
  return true;
}

bool read_png_rows(png_structp png, png_bytepp rows) {
  if (setjmp(png_jmpbuf(png))) return false;
  png_read_image(png, rows);
  return true;
}

AnyImage decode_png(const std::vector<std::uint8_t>& bytes, const std::filesystem::path& path) {
  PngReader reader;
  reader.png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!reader.png) throw ImageIoError(Kind::unreadable, path, "libpng initialisation failed");
  reader.info = png_create_info_struct(reader.png);
  if (!reader.info) throw ImageIoError(Kind::unreadable, path, "libpng initialisation failed");

  MemorySource source{&bytes, 0};
  png_set_read_fn(reader.png, &source, read_from_memory);

  png_uint_32 w = 0, h = 0;
  int color_type = 0;
  int bit_depth = 0;
  if (!read_png_header(reader.png, reader.info, &w, &h, &color_type, &bit_depth))
    throw ImageIoError(Kind::truncated, path, "corrupt or truncated PNG header");
  if (bit_depth != 8 || (color_type != PNG_COLOR_TYPE_GRAY && color_type != PNG_COLOR_TYPE_RGB)) {
    throw ImageIoError(Kind::unsupported, path,
                       "unsupported PNG (only 8-bit gray or RGB): bit depth " + std::to_string(bit_depth) +
                           ", color type " + std::to_string(color_type));
  }
  std::vector<png_bytep> rows(h);
  GrayImage gray;
  RgbImage rgb;
  if (color_type == PNG_COLOR_TYPE_GRAY) {
    gray.resize(h, w);
    for (png_uint_32 y = 0; y < h; ++y) rows[y] = gray.data() + static_cast<std::size_t>(y) * w;
  } else {
    rgb = RgbImage(static_cast<int>(w), static_cast<int>(h));
    for (png_uint_32 y = 0; y < h; ++y) rows[y] = rgb.data.data() + static_cast<std::size_t>(y) * w * 3;
  }
  if (!read_png_rows(reader.png, rows.data()))
    throw ImageIoError(Kind::truncated, path, "corrupt or truncated PNG payload");
  if (color_type == PNG_COLOR_TYPE_GRAY) return gray;
  return rgb;
}

constexpr std::uint8_t kPngSignature[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};

}  // namespace

AnyImage load_image(const std::filesystem::path& path) {
  const auto bytes = read_file(path);
  if (bytes.size() >= 2 && bytes[0] == 'P' && bytes[1] == '5') return decode_pgm(bytes, path);
  if (bytes.size() >= 8 && std::memcmp(bytes.data(), kPngSignature, 8) == 0) return decode_png(bytes, path);
  if (bytes.size() >= 2 && bytes[0] == 'P' && bytes[1] >= '1' && bytes[1] <= '7')
    throw ImageIoError(Kind::unsupported, path, "only binary PGM (P5) is supported");
  throw ImageIoError(Kind::unsupported, path, "unrecognised image format");
}

GrayImage load_gray(const std::filesystem::path& path, GrayConversion conversion) {
  auto image = load_image(path);
  if (auto* gray = std::get_if<GrayImage>(&image)) return std::move(*gray);
  return to_gray(std::get<RgbImage>(image), conversion);
}

GrayImage to_gray(const RgbImage& image, GrayConversion conversion) {
  // Integer weights scaled so that (sum + denominator/2) / denominator is round-half-up.
  int wr = 299, wg = 587, wb = 114, denom = 1000;
  switch (conversion) {
    case GrayConversion::rec601: break;
    case GrayConversion::rec709: wr = 2126, wg = 7152, wb = 722, denom = 10000; break;
    case GrayConversion::channel_mean: wr = wg = wb = 2, denom = 6; break;
  }
  GrayImage gray(image.height, image.width);
  for (int y = 0; y < image.height; ++y) {
    for (int x = 0; x < image.width; ++x) {
      const std::uint8_t* p = image.pixel(x, y);
      const int luma = (wr * p[0] + wg * p[1] + wb * p[2] + denom / 2) / denom;
      gray(y, x) = static_cast<std::uint8_t>(std::min(luma, 255));
    }
  }
  return gray;
}

void save_pgm(const GrayImage& image, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ImageIoError(Kind::write_failed, path, "cannot open for writing");
  out << "P5\n" << image.cols() << ' ' << image.rows() << "\n255\n";
  out.write(reinterpret_cast<const char*>(image.data()), static_cast<std::streamsize>(image.size()));
  out.flush();
  if (!out) throw ImageIoError(Kind::write_failed, path, "write failed");
}

std::string to_string(GrayConversion conversion) {
  switch (conversion) {
    case GrayConversion::rec601: return "rec601";
    case GrayConversion::rec709: return "rec709";
    case GrayConversion::channel_mean: return "mean";
  }
  return "rec601";
}

GrayConversion parse_gray_conversion(const std::string& name) {
  if (name == "rec601") return GrayConversion::rec601;
  if (name == "rec709") return GrayConversion::rec709;
  if (name == "mean") return GrayConversion::channel_mean;
  throw std::invalid_argument("unknown gray conversion '" + name + "' (expected rec601, rec709 or mean)");
}

}  // namespace mscm
