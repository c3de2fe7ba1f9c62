#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace atelier {

// 8-bit grayscale raster, row major.
struct GrayImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> pixels;

    std::uint8_t at(int x, int y) const { return pixels[static_cast<std::size_t>(y) * width + x]; }
};

// 8-bit interleaved RGB raster, row major.
struct RgbImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> pixels;
};

// Integer luma: (299 R + 587 G + 114 B + 500) / 1000.
GrayImage to_gray(const RgbImage& image);

// Decodes JPEG, PNG or binary PGM/PPM (P5/P6) by signature. Throws
// Error(undecodable_image).
RgbImage decode_image(std::string_view bytes);
GrayImage decode_gray(std::string_view bytes);
GrayImage load_gray(const std::filesystem::path& path);

// Baseline JPEG at the given quality (1-100).
std::string encode_jpeg(const RgbImage& image, int quality);

// Binary P6 / P5.
std::string encode_ppm(const RgbImage& image);
std::string encode_pgm(const GrayImage& image);

}  // namespace atelier
