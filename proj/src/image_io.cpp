#include "rose2/image_io.hpp"

#include <png.h>

#include <cctype>
#include <csetjmp>
#include <cstdio>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

namespace rose2::io {
namespace fs = std::filesystem;

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

fs::path temp_sibling(const fs::path& path) {
  fs::path tmp = path;
  tmp += ".tmp";
  return tmp;
}

void commit(const fs::path& tmp, const fs::path& path) {
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw InputError("cannot rename " + tmp.string() + " -> " + path.string());
}

bool has_png_signature(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  unsigned char sig[8] = {};
  in.read(reinterpret_cast<char*>(sig), 8);
  return in.gcount() == 8 && png_sig_cmp(sig, 0, 8) == 0;
}

// PGM header tokens may be separated by arbitrary whitespace and comments.
std::string next_token(std::istream& in) {
  std::string tok;
  int c;
  while ((c = in.get()) != EOF) {
    if (c == '#') {
      while ((c = in.get()) != EOF && c != '\n') {
      }
      continue;
    }
    if (std::isspace(c)) {
      if (!tok.empty()) break;
      continue;
    }
    tok.push_back(static_cast<char>(c));
  }
  return tok;
}

Raster<std::uint8_t> read_pgm(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  if (next_token(in) != "P5") throw InputError(path.string() + ": not a binary PGM (P5)");
  int width = 0, height = 0, maxval = 0;
  try {
    width = std::stoi(next_token(in));
    height = std::stoi(next_token(in));
    maxval = std::stoi(next_token(in));
  } catch (const std::exception&) {
    throw InputError(path.string() + ": malformed PGM header");
  }
  if (width <= 0 || height <= 0 || maxval <= 0 || maxval > 255)
    throw InputError(path.string() + ": unsupported PGM geometry or depth");
  Raster<std::uint8_t> gray(height, width);
  in.read(reinterpret_cast<char*>(gray.data()), static_cast<std::streamsize>(gray.size()));
  if (in.gcount() != static_cast<std::streamsize>(gray.size()))
    throw InputError(path.string() + ": truncated PGM data");
  if (maxval != 255) {
    gray = (gray.cast<int>() * 255 / maxval).cast<std::uint8_t>();
  }
  return gray;
}

struct PngRead {
  int width = 0;
  int height = 0;
  int color_type = 0;
  std::vector<std::uint8_t> pixels;  // one byte per sample after transforms
  int channels = 0;
};

// Kept free of non-trivial locals so longjmp out of libpng is well-defined.
bool png_read_raw(std::FILE* fp, PngRead* out, bool keep_palette_indices) {
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) return false;
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    return false;
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    return false;
  }
  png_init_io(png, fp);
  png_read_info(png, info);
  const png_uint_32 w = png_get_image_width(png, info);
  const png_uint_32 h = png_get_image_height(png, info);
  const int color = png_get_color_type(png, info);
  const int depth = png_get_bit_depth(png, info);
  if (depth == 16) png_set_strip_16(png);
  if (color == PNG_COLOR_TYPE_PALETTE) {
    if (keep_palette_indices) {
      if (depth < 8) png_set_packing(png);
    } else {
      png_set_palette_to_rgb(png);
    }
  } else if (color == PNG_COLOR_TYPE_GRAY && depth < 8) {
    png_set_expand_gray_1_2_4_to_8(png);
  }
  if (!keep_palette_indices || color != PNG_COLOR_TYPE_PALETTE) {
    png_set_strip_alpha(png);
    if (color == PNG_COLOR_TYPE_GRAY_ALPHA) png_set_strip_alpha(png);
  }
  png_read_update_info(png, info);
  const int channels = png_get_channels(png, info);
  const std::size_t rowbytes = png_get_rowbytes(png, info);
  out->width = static_cast<int>(w);
  out->height = static_cast<int>(h);
  out->color_type = color;
  out->channels = channels;
  out->pixels.resize(rowbytes * h);
  for (png_uint_32 r = 0; r < h; ++r) {
    png_read_row(png, out->pixels.data() + r * rowbytes, nullptr);
  }
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return true;
}

PngRead read_png(const fs::path& path, bool keep_palette_indices) {
  FilePtr fp(std::fopen(path.string().c_str(), "rb"));
  if (!fp) throw InputError("cannot open " + path.string());
  PngRead result;
  if (!png_read_raw(fp.get(), &result, keep_palette_indices))
    throw InputError(path.string() + ": malformed PNG");
  return result;
}

struct PngWrite {
  int width = 0;
  int height = 0;
  int color_type = 0;
  const std::uint8_t* pixels = nullptr;
  std::size_t rowbytes = 0;
  const png_color* palette = nullptr;
  int palette_size = 0;
};

bool png_write_raw(std::FILE* fp, const PngWrite* img) {
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) return false;
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    return false;
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    return false;
  }
  png_init_io(png, fp);
  png_set_IHDR(png, info, static_cast<png_uint_32>(img->width),
               static_cast<png_uint_32>(img->height), 8, img->color_type, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  if (img->palette) png_set_PLTE(png, info, img->palette, img->palette_size);
  png_write_info(png, info);
  for (int r = 0; r < img->height; ++r) {
    png_write_row(png, img->pixels + static_cast<std::size_t>(r) * img->rowbytes);
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  return true;
}

void write_png(const PngWrite& img, const fs::path& path) {
  const fs::path tmp = temp_sibling(path);
  {
    FilePtr fp(std::fopen(tmp.string().c_str(), "wb"));
    if (!fp) throw InputError("cannot write " + tmp.string());
    if (!png_write_raw(fp.get(), &img)) throw InputError("PNG encoding failed: " + path.string());
  }
  commit(tmp, path);
}

}  // namespace

Raster<std::uint8_t> read_gray(const fs::path& path) {
  if (!fs::exists(path)) throw InputError("missing raster " + path.string());
  if (!has_png_signature(path)) return read_pgm(path);
  const PngRead png = read_png(path, false);
  Raster<std::uint8_t> gray(png.height, png.width);
  for (int r = 0; r < png.height; ++r) {
    for (int c = 0; c < png.width; ++c) {
      const std::uint8_t* px =
          png.pixels.data() + (static_cast<std::size_t>(r) * png.width + c) * png.channels;
      if (png.channels >= 3) {
        gray(r, c) = static_cast<std::uint8_t>((299 * px[0] + 587 * px[1] + 114 * px[2] + 500) / 1000);
      } else {
        gray(r, c) = px[0];
      }
    }
  }
  return gray;
}

void write_pgm(const Raster<std::uint8_t>& gray, const fs::path& path) {
  const fs::path tmp = temp_sibling(path);
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw InputError("cannot write " + tmp.string());
    out << "P5\n" << gray.cols() << ' ' << gray.rows() << "\n255\n";
    out.write(reinterpret_cast<const char*>(gray.data()), static_cast<std::streamsize>(gray.size()));
    if (!out) throw InputError("write failed: " + tmp.string());
  }
  commit(tmp, path);
}

void write_gray_png(const Raster<std::uint8_t>& gray, const fs::path& path) {
  PngWrite img;
  img.width = static_cast<int>(gray.cols());
  img.height = static_cast<int>(gray.rows());
  img.color_type = PNG_COLOR_TYPE_GRAY;
  img.pixels = gray.data();
  img.rowbytes = static_cast<std::size_t>(gray.cols());
  write_png(img, path);
}

void write_rgb_png(const Raster<std::uint8_t>& rgb, const fs::path& path) {
  if (rgb.cols() % 3 != 0) throw InputError("RGB raster width must be a multiple of 3");
  PngWrite img;
  img.width = static_cast<int>(rgb.cols() / 3);
  img.height = static_cast<int>(rgb.rows());
  img.color_type = PNG_COLOR_TYPE_RGB;
  img.pixels = rgb.data();
  img.rowbytes = static_cast<std::size_t>(rgb.cols());
  write_png(img, path);
}

void write_indexed_png(const Raster<std::uint8_t>& indices,
                       std::span<const std::array<std::uint8_t, 3>> palette, const fs::path& path) {
  if (palette.empty() || palette.size() > 256) throw InputError("palette must hold 1..256 colors");
  const std::uint8_t max_index = indices.size() ? indices.maxCoeff() : 0;
  if (max_index >= palette.size()) throw InputError("index exceeds palette size");
  std::vector<png_color> colors(palette.size());
  for (std::size_t i = 0; i < palette.size(); ++i) {
    colors[i] = png_color{palette[i][0], palette[i][1], palette[i][2]};
  }
  PngWrite img;
  img.width = static_cast<int>(indices.cols());
  img.height = static_cast<int>(indices.rows());
  img.color_type = PNG_COLOR_TYPE_PALETTE;
  img.pixels = indices.data();
  img.rowbytes = static_cast<std::size_t>(indices.cols());
  img.palette = colors.data();
  img.palette_size = static_cast<int>(colors.size());
  write_png(img, path);
}

Raster<std::uint8_t> read_index_png(const fs::path& path) {
  if (!fs::exists(path)) throw InputError("missing label image " + path.string());
  if (!has_png_signature(path)) throw InputError(path.string() + ": not a PNG");
  const PngRead png = read_png(path, true);
  if (png.color_type != PNG_COLOR_TYPE_PALETTE && png.color_type != PNG_COLOR_TYPE_GRAY)
    throw InputError(path.string() + ": label image must be indexed or grayscale");
  Raster<std::uint8_t> out(png.height, png.width);
  for (int r = 0; r < png.height; ++r) {
    for (int c = 0; c < png.width; ++c) {
      out(r, c) = png.pixels[(static_cast<std::size_t>(r) * png.width + c) * png.channels];
    }
  }
  return out;
}

void write_text_atomic(const fs::path& path, const std::string& text) {
  const fs::path tmp = temp_sibling(path);
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw InputError("cannot write " + tmp.string());
    out << text;
    if (!out) throw InputError("write failed: " + tmp.string());
  }
  commit(tmp, path);
}

}  // namespace rose2::io
