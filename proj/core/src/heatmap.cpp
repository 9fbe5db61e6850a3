#include "imscat/heatmap.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>
#include <stdexcept>
#include <vector>

namespace imscat {

unsigned char heatmap_level(double value) {
  if (!std::isfinite(value)) return 0;
  const double t = std::clamp((value - kHeatmapMin) / (kHeatmapMax - kHeatmapMin), 0.0, 1.0);
  return static_cast<unsigned char>(std::lround(255.0 * t));
}

void render_heatmap(const Medium& medium, const std::filesystem::path& path) {
  const CellGrid& g = medium.grid();
  const int cells = g.cells_per_axis();
  const int side = cells * kHeatmapCellPixels;
  const int M = g.divisions();

  std::vector<unsigned char> pixels(static_cast<std::size_t>(side) * side * 3, 0);
  for (int row = 0; row < side; ++row) {
    const int m2 = M - 1 - row / kHeatmapCellPixels;
    for (int col = 0; col < side; ++col) {
      const int m1 = col / kHeatmapCellPixels - M;
      const unsigned char level = heatmap_level(medium[g.index(m1, m2)].real());
      pixels[(static_cast<std::size_t>(row) * side + col) * 3 + 1] = level;
    }
  }

  std::unique_ptr<FILE, int (*)(FILE*)> file(std::fopen(path.c_str(), "wb"), &std::fclose);
  if (!file) throw std::runtime_error("cannot open '" + path.string() + "' for writing");

  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw std::runtime_error("png_create_write_struct failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    throw std::runtime_error("png_create_info_struct failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw std::runtime_error("libpng error while writing '" + path.string() + "'");
  }
  png_init_io(png, file.get());
  png_set_IHDR(png, info, side, side, 8, PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  for (int row = 0; row < side; ++row) {
    png_write_row(png, pixels.data() + static_cast<std::size_t>(row) * side * 3);
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

}  // namespace imscat
