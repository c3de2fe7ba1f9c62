#include "atelier/image.hpp"

#include <cctype>
#include <csetjmp>
#include <cstdio>
#include <cstdlib>
#include <cstring>

#include <jpeglib.h>
#include <png.h>

#include "atelier/error.hpp"
#include "atelier/ingest.hpp"

namespace atelier {

namespace {

[[noreturn]] void undecodable(const std::string& why) { throw Error(ErrorCode::undecodable_image, why); }

struct JpegErrorManager {
    jpeg_error_mgr base;
    std::jmp_buf jump;
    char message[JMSG_LENGTH_MAX];
};

void jpeg_error_exit(j_common_ptr info) {
    auto* err = reinterpret_cast<JpegErrorManager*>(info->err);
    (*info->err->format_message)(info, err->message);
    std::longjmp(err->jump, 1);
}

void jpeg_silent(j_common_ptr, int) {}

RgbImage decode_jpeg(std::string_view bytes) {
    RgbImage out;
    jpeg_decompress_struct info{};
    JpegErrorManager err{};
    info.err = jpeg_std_error(&err.base);
    err.base.error_exit = jpeg_error_exit;
    err.base.emit_message = jpeg_silent;
    // Nothing with a destructor may be created between setjmp and the last
    // libjpeg call; out is constructed above and only resized below.
    if (setjmp(err.jump)) {
        jpeg_destroy_decompress(&info);
        undecodable(std::string("jpeg: ") + err.message);
    }
    jpeg_create_decompress(&info);
    jpeg_mem_src(&info, reinterpret_cast<const unsigned char*>(bytes.data()), static_cast<unsigned long>(bytes.size()));
    jpeg_read_header(&info, TRUE);
    info.out_color_space = JCS_RGB;
    jpeg_start_decompress(&info);
    out.width = static_cast<int>(info.output_width);
    out.height = static_cast<int>(info.output_height);
    out.pixels.resize(static_cast<std::size_t>(out.width) * out.height * 3);
    while (info.output_scanline < info.output_height) {
        JSAMPROW row = out.pixels.data() + static_cast<std::size_t>(info.output_scanline) * out.width * 3;
        jpeg_read_scanlines(&info, &row, 1);
    }
    jpeg_finish_decompress(&info);
    jpeg_destroy_decompress(&info);
    return out;
}

RgbImage decode_png(std::string_view bytes) {
    png_image image{};
    image.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_memory(&image, bytes.data(), bytes.size())) {
        undecodable(std::string("png: ") + image.message);
    }
    image.format = PNG_FORMAT_RGB;
    RgbImage out;
    out.width = static_cast<int>(image.width);
    out.height = static_cast<int>(image.height);
    out.pixels.resize(PNG_IMAGE_SIZE(image));
    if (!png_image_finish_read(&image, nullptr, out.pixels.data(), 0, nullptr)) {
        std::string why = std::string("png: ") + image.message;
        png_image_free(&image);
        undecodable(why);
    }
    return out;
}

// Binary netpbm: P5 (gray) or P6 (rgb), maxval <= 255.
RgbImage decode_pnm(std::string_view bytes) {
    std::size_t pos = 2;
    auto skip_space = [&] {
        while (pos < bytes.size()) {
            if (bytes[pos] == '#') {
                while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
            } else if (std::isspace(static_cast<unsigned char>(bytes[pos]))) {
                ++pos;
            } else {
                break;
            }
        }
    };
    auto number = [&] {
        skip_space();
        long v = 0;
        std::size_t digits = 0;
        while (pos < bytes.size() && bytes[pos] >= '0' && bytes[pos] <= '9' && digits < 9) {
            v = v * 10 + (bytes[pos++] - '0');
            ++digits;
        }
        if (digits == 0) undecodable("pnm: malformed header");
        return v;
    };
    const bool rgb = bytes[1] == '6';
    const long w = number(), h = number(), maxval = number();
    if (w <= 0 || h <= 0 || maxval <= 0 || maxval > 255) undecodable("pnm: unsupported dimensions or maxval");
    ++pos;  // single whitespace before the raster
    const std::size_t channels = rgb ? 3 : 1;
    const std::size_t need = static_cast<std::size_t>(w) * static_cast<std::size_t>(h) * channels;
    if (pos > bytes.size() || bytes.size() - pos < need) undecodable("pnm: truncated raster");

    RgbImage out;
    out.width = static_cast<int>(w);
    out.height = static_cast<int>(h);
    out.pixels.resize(static_cast<std::size_t>(w) * h * 3);
    const auto* src = reinterpret_cast<const std::uint8_t*>(bytes.data() + pos);
    for (std::size_t i = 0; i < static_cast<std::size_t>(w) * h; ++i) {
        for (std::size_t c = 0; c < 3; ++c) {
            const std::uint8_t v = rgb ? src[i * 3 + c] : src[i];
            out.pixels[i * 3 + c] = static_cast<std::uint8_t>(maxval == 255 ? v : v * 255 / maxval);
        }
    }
    return out;
}

}  // namespace

GrayImage to_gray(const RgbImage& image) {
    GrayImage out{image.width, image.height, {}};
    const std::size_t n = static_cast<std::size_t>(image.width) * image.height;
    out.pixels.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const unsigned r = image.pixels[i * 3], g = image.pixels[i * 3 + 1], b = image.pixels[i * 3 + 2];
        out.pixels[i] = static_cast<std::uint8_t>((299 * r + 587 * g + 114 * b + 500) / 1000);
    }
    return out;
}

RgbImage decode_image(std::string_view bytes) {
    if (bytes.size() >= 3 && static_cast<unsigned char>(bytes[0]) == 0xFF &&
        static_cast<unsigned char>(bytes[1]) == 0xD8) {
        return decode_jpeg(bytes);
    }
    if (bytes.size() >= 8 && png_sig_cmp(reinterpret_cast<png_const_bytep>(bytes.data()), 0, 8) == 0) {
        return decode_png(bytes);
    }
    if (bytes.size() >= 3 && bytes[0] == 'P' && (bytes[1] == '5' || bytes[1] == '6')) {
        return decode_pnm(bytes);
    }
    undecodable("unrecognized image format");
}

GrayImage decode_gray(std::string_view bytes) { return to_gray(decode_image(bytes)); }

GrayImage load_gray(const std::filesystem::path& path) {
    try {
        return decode_gray(read_file(path));
    } catch (const Error& e) {
        throw Error(ErrorCode::undecodable_image, path.string() + ": " + e.what());
    }
}

std::string encode_jpeg(const RgbImage& image, int quality) {
    jpeg_compress_struct info{};
    JpegErrorManager err{};
    info.err = jpeg_std_error(&err.base);
    err.base.error_exit = jpeg_error_exit;
    unsigned char* buffer = nullptr;
    unsigned long size = 0;
    if (setjmp(err.jump)) {
        jpeg_destroy_compress(&info);
        std::free(buffer);
        throw Error(ErrorCode::io_error, std::string("jpeg encode: ") + err.message);
    }
    jpeg_create_compress(&info);
    jpeg_mem_dest(&info, &buffer, &size);
    info.image_width = static_cast<JDIMENSION>(image.width);
    info.image_height = static_cast<JDIMENSION>(image.height);
    info.input_components = 3;
    info.in_color_space = JCS_RGB;
    jpeg_set_defaults(&info);
    jpeg_set_quality(&info, quality, TRUE);
    jpeg_start_compress(&info, TRUE);
    while (info.next_scanline < info.image_height) {
        auto* row = const_cast<JSAMPLE*>(image.pixels.data() + static_cast<std::size_t>(info.next_scanline) * image.width * 3);
        jpeg_write_scanlines(&info, &row, 1);
    }
    jpeg_finish_compress(&info);
    jpeg_destroy_compress(&info);
    std::string out(reinterpret_cast<const char*>(buffer), size);
    std::free(buffer);
    return out;
}

std::string encode_ppm(const RgbImage& image) {
    std::string out = "P6\n" + std::to_string(image.width) + " " + std::to_string(image.height) + "\n255\n";
    out.append(reinterpret_cast<const char*>(image.pixels.data()), image.pixels.size());
    return out;
}

std::string encode_pgm(const GrayImage& image) {
    std::string out = "P5\n" + std::to_string(image.width) + " " + std::to_string(image.height) + "\n255\n";
    out.append(reinterpret_cast<const char*>(image.pixels.data()), image.pixels.size());
    return out;
}

}  // namespace atelier
