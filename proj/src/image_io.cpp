#include "image_io.hpp"

#include <png.h>

#include <algorithm>
#include <cstddef>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>

#include "error.hpp"

namespace eyespot {

namespace {

constexpr std::uint64_t kMaxPixelBytes = 1ull << 31;

std::vector<std::uint8_t> read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        fail(ErrorCode::io, "cannot open " + path);
    }
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
    if (in.bad()) {
        fail(ErrorCode::io, "read failed for " + path);
    }
    return bytes;
}

void check_dims(std::uint64_t width, std::uint64_t height, const std::string& path) {
    if (width == 0 || height == 0) {
        fail(ErrorCode::dimension, "empty image in " + path);
    }
    if (width * height > kMaxPixelBytes / 3) {
        fail(ErrorCode::dimension, "image dimensions overflow in " + path);
    }
}

ImageRgb decode_png(const std::vector<std::uint8_t>& bytes, const std::string& path) {
    png_image im;
    std::memset(&im, 0, sizeof(im));
    im.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_memory(&im, bytes.data(), bytes.size())) {
        std::string msg = im.message;
        png_image_free(&im);
        fail(ErrorCode::format, "bad PNG " + path + ": " + msg);
    }
    check_dims(im.width, im.height, path);
    im.format = PNG_FORMAT_RGB;
    ImageRgb img(static_cast<int>(im.width), static_cast<int>(im.height));
    if (!png_image_finish_read(&im, nullptr, img.data.data(), 0, nullptr)) {
        std::string msg = im.message;
        png_image_free(&im);
        fail(ErrorCode::format, "bad PNG " + path + ": " + msg);
    }
    return img;
}

struct PnmHeader {
    int width = 0;
    int height = 0;
    int maxval = 0;
    std::size_t payload = 0; // offset of the first sample byte
};

bool pnm_space(std::uint8_t c) {
    return c == ' ' || c == '\t' || c == '\r' || c == '\n';
}

// Parses the three header integers after the magic, honoring '#' comments.
PnmHeader parse_pnm_header(const std::vector<std::uint8_t>& bytes, const std::string& path) {
    std::size_t pos = 2;
    int fields[3] = {0, 0, 0};
    for (int& field : fields) {
        for (;;) {
            if (pos >= bytes.size()) {
                fail(ErrorCode::truncated, "truncated header in " + path);
            }
            if (pnm_space(bytes[pos])) {
                ++pos;
            } else if (bytes[pos] == '#') {
                while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
            } else {
                break;
            }
        }
        if (bytes[pos] < '0' || bytes[pos] > '9') {
            fail(ErrorCode::format, "malformed header in " + path);
        }
        long value = 0;
        while (pos < bytes.size() && bytes[pos] >= '0' && bytes[pos] <= '9') {
            value = value * 10 + (bytes[pos] - '0');
            if (value > std::numeric_limits<int>::max() / 4) {
                fail(ErrorCode::dimension, "header value overflow in " + path);
            }
            ++pos;
        }
        field = static_cast<int>(value);
    }
    if (pos >= bytes.size() || !pnm_space(bytes[pos])) {
        fail(ErrorCode::format, "malformed header in " + path);
    }
    PnmHeader h;
    h.width = fields[0];
    h.height = fields[1];
    h.maxval = fields[2];
    h.payload = pos + 1;
    return h;
}

ImageRgb decode_pnm(const std::vector<std::uint8_t>& bytes, bool color, const std::string& path) {
    const PnmHeader h = parse_pnm_header(bytes, path);
    check_dims(static_cast<std::uint64_t>(h.width), static_cast<std::uint64_t>(h.height), path);
    if (h.maxval < 1 || h.maxval > 255) {
        fail(ErrorCode::format, "unsupported maxval " + std::to_string(h.maxval) + " in " + path);
    }
    const std::size_t pixels = static_cast<std::size_t>(h.width) * h.height;
    const std::size_t need = color ? pixels * 3 : pixels;
    if (bytes.size() - h.payload < need) {
        fail(ErrorCode::truncated, "truncated pixel data in " + path);
    }
    ImageRgb img(h.width, h.height);
    const std::uint8_t* src = bytes.data() + h.payload;
    if (color) {
        std::copy(src, src + need, img.data.begin());
    } else {
        for (std::size_t i = 0; i < pixels; ++i) {
            img.data[i * 3] = img.data[i * 3 + 1] = img.data[i * 3 + 2] = src[i];
        }
    }
    return img;
}

void encode_png(png_image& im, const void* data, const std::string& path) {
    if (!png_image_write_to_file(&im, path.c_str(), 0, data, 0, nullptr)) {
        std::string msg = im.message;
        png_image_free(&im);
        fail(ErrorCode::io, "cannot write " + path + ": " + msg);
    }
}

} // namespace

ImageRgb load_image(const std::string& path) {
    const std::vector<std::uint8_t> bytes = read_file(path);
    if (bytes.size() >= 4 && bytes[0] == 0x89 && bytes[1] == 'P' && bytes[2] == 'N' &&
        bytes[3] == 'G') {
        return decode_png(bytes, path);
    }
    if (bytes.size() >= 2 && bytes[0] == 'P' && (bytes[1] == '6' || bytes[1] == '5')) {
        return decode_pnm(bytes, bytes[1] == '6', path);
    }
    fail(ErrorCode::format, "unrecognized image format in " + path);
}

void save_png(const ImageRgb& img, const std::string& path) {
    png_image im;
    std::memset(&im, 0, sizeof(im));
    im.version = PNG_IMAGE_VERSION;
    im.width = static_cast<png_uint_32>(img.width);
    im.height = static_cast<png_uint_32>(img.height);
    im.format = PNG_FORMAT_RGB;
    encode_png(im, img.data.data(), path);
}

void save_png_gray(const std::vector<std::uint8_t>& bytes, int width, int height,
                   const std::string& path) {
    if (width <= 0 || height <= 0 ||
        bytes.size() != static_cast<std::size_t>(width) * height) {
        fail(ErrorCode::dimension, "gray buffer does not match dimensions");
    }
    png_image im;
    std::memset(&im, 0, sizeof(im));
    im.version = PNG_IMAGE_VERSION;
    im.width = static_cast<png_uint_32>(width);
    im.height = static_cast<png_uint_32>(height);
    im.format = PNG_FORMAT_GRAY;
    encode_png(im, bytes.data(), path);
}

void save_pgm(const std::vector<std::uint8_t>& bytes, int width, int height,
              const std::string& path) {
    if (width <= 0 || height <= 0 ||
        bytes.size() != static_cast<std::size_t>(width) * height) {
        fail(ErrorCode::dimension, "mask buffer does not match dimensions");
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        fail(ErrorCode::io, "cannot open " + path);
    }
    out << "P5\n" << width << ' ' << height << "\n255\n";
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) {
        fail(ErrorCode::io, "write failed for " + path);
    }
}

} // namespace eyespot
