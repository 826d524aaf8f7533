#pragma once

#include <filesystem>
#include <istream>
#include <ostream>
#include <vector>

namespace hashq {

// Row-major interleaved image with channel values in [0, 1].
struct RenderTarget {
  int width = 0;
  int height = 0;
  int channels = 3;
  std::vector<float> pixels;

  RenderTarget() = default;
  RenderTarget(int w, int h, int c = 3);

  std::size_t pixel_count() const { return static_cast<std::size_t>(width) * height; }
  float& at(int x, int y, int c) { return pixels[(static_cast<std::size_t>(y) * width + x) * channels + c]; }
  float at(int x, int y, int c) const { return pixels[(static_cast<std::size_t>(y) * width + x) * channels + c]; }
};

inline constexpr double kPsnrCap = 100.0;

// 10 log10(1 / MSE) for unit peak; 100 dB when the images are identical.
double psnr(const RenderTarget& a, const RenderTarget& b);
double mse(const RenderTarget& a, const RenderTarget& b);

RenderTarget make_checkerboard(int width, int height, int cell_pixels, float dark = 0.0f,
                               float light = 1.0f);
RenderTarget make_constant(int width, int height, float value);

// Binary PPM (P6, maxval 255).
RenderTarget read_ppm(std::istream& in);
RenderTarget read_ppm(const std::filesystem::path& path);
void write_ppm(std::ostream& out, const RenderTarget& image);
void write_ppm(const std::filesystem::path& path, const RenderTarget& image);

}  // namespace hashq
