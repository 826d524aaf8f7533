#include "hashq/image.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <string>

#include "hashq/errors.hpp"

namespace hashq {

RenderTarget::RenderTarget(int w, int h, int c)
    : width(w), height(h), channels(c), pixels(static_cast<std::size_t>(w) * h * c, 0.0f) {
  if (w < 1 || h < 1 || c < 1) throw ConfigError("image dimensions must be positive");
}

double mse(const RenderTarget& a, const RenderTarget& b) {
  if (a.width != b.width || a.height != b.height || a.channels != b.channels) {
    throw ConfigError("image dimension mismatch");
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < a.pixels.size(); ++i) {
    const double d = static_cast<double>(a.pixels[i]) - b.pixels[i];
    acc += d * d;
  }
  return acc / static_cast<double>(a.pixels.size());
}

double psnr(const RenderTarget& a, const RenderTarget& b) {
  const double e = mse(a, b);
  if (e <= 0.0) return kPsnrCap;
  return std::min(kPsnrCap, 10.0 * std::log10(1.0 / e));
}

RenderTarget make_checkerboard(int width, int height, int cell_pixels, float dark, float light) {
  if (cell_pixels < 1) throw ConfigError("checkerboard cell size must be positive");
  RenderTarget img(width, height, 3);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const bool on = ((x / cell_pixels) + (y / cell_pixels)) % 2 == 1;
      for (int c = 0; c < 3; ++c) img.at(x, y, c) = on ? light : dark;
    }
  }
  return img;
}

RenderTarget make_constant(int width, int height, float value) {
  RenderTarget img(width, height, 3);
  std::fill(img.pixels.begin(), img.pixels.end(), value);
  return img;
}

namespace {

// Next whitespace-delimited header token, skipping '#' comments.
std::string header_token(std::istream& in) {
  std::string tok;
  int ch;
  while ((ch = in.get()) != EOF) {
    if (ch == '#') {
      while ((ch = in.get()) != EOF && ch != '\n') {
      }
      continue;
    }
    if (std::isspace(ch)) {
      if (!tok.empty()) break;
      continue;
    }
    tok.push_back(static_cast<char>(ch));
  }
  return tok;
}

int header_int(std::istream& in) {
  const auto tok = header_token(in);
  try {
    std::size_t used = 0;
    const int v = std::stoi(tok, &used);
    if (used != tok.size()) throw FormatError("bad PPM header field '" + tok + "'");
    return v;
  } catch (const std::logic_error&) {
    throw FormatError("bad PPM header field '" + tok + "'");
  }
}

}  // namespace

RenderTarget read_ppm(std::istream& in) {
  if (header_token(in) != "P6") throw FormatError("not a binary PPM (P6) file");
  const int w = header_int(in);
  const int h = header_int(in);
  const int maxval = header_int(in);
  if (w < 1 || h < 1 || maxval != 255) throw FormatError("unsupported PPM geometry or maxval");
  RenderTarget img(w, h, 3);
  std::vector<unsigned char> raw(img.pixels.size());
  in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (in.gcount() != static_cast<std::streamsize>(raw.size())) throw FormatError("truncated PPM pixel data");
  std::transform(raw.begin(), raw.end(), img.pixels.begin(),
                 [](unsigned char v) { return static_cast<float>(v) / 255.0f; });
  return img;
}

RenderTarget read_ppm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open image '" + path.string() + "'");
  return read_ppm(in);
}

void write_ppm(std::ostream& out, const RenderTarget& image) {
  if (image.channels != 3) throw ConfigError("PPM output requires 3 channels");
  out << "P6\n" << image.width << ' ' << image.height << "\n255\n";
  std::vector<unsigned char> raw(image.pixels.size());
  std::transform(image.pixels.begin(), image.pixels.end(), raw.begin(), [](float v) {
    return static_cast<unsigned char>(std::lround(std::clamp(v, 0.0f, 1.0f) * 255.0f));
  });
  out.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
}

void write_ppm(const std::filesystem::path& path, const RenderTarget& image) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write image '" + path.string() + "'");
  write_ppm(out, image);
}

}  // namespace hashq
