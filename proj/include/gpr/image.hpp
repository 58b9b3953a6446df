#pragma once

#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include "gpr/errors.hpp"

namespace gpr {

// 8-bit RGB image, row-major, pixels.size() == width * height * 3.
struct Image {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> pixels;

    Image() = default;
    Image(int w, int h) : width(w), height(h), pixels(static_cast<std::size_t>(w) * h * 3, 0) {}

    std::uint8_t& at(int x, int y, int c) {
        return pixels[(static_cast<std::size_t>(y) * width + x) * 3 + c];
    }
    std::uint8_t at(int x, int y, int c) const {
        return pixels[(static_cast<std::size_t>(y) * width + x) * 3 + c];
    }

    friend bool operator==(const Image& a, const Image& b) {
        return a.width == b.width && a.height == b.height && a.pixels == b.pixels;
    }
};

// Binary PPM (P6), maxval 255.
inline void write_ppm(const Image& image, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) raise(ErrorKind::io_error, "cannot open for writing: " + path);
    out << "P6\n" << image.width << " " << image.height << "\n255\n";
    out.write(reinterpret_cast<const char*>(image.pixels.data()),
              static_cast<std::streamsize>(image.pixels.size()));
    if (!out) raise(ErrorKind::io_error, "write failed: " + path);
}

inline Image read_ppm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) raise(ErrorKind::io_error, "cannot open for reading: " + path);
    std::string magic;
    in >> magic;
    if (magic != "P6") raise(ErrorKind::format_error, "expected magic P6 in " + path);
    int w = 0, h = 0, maxval = 0;
    in >> w >> h >> maxval;
    if (!in || w < 1 || h < 1) raise(ErrorKind::format_error, "bad PPM dimensions in " + path);
    if (maxval != 255) raise(ErrorKind::format_error, "expected maxval 255 in " + path);
    in.get(); // single whitespace byte after the header
    Image image(w, h);
    in.read(reinterpret_cast<char*>(image.pixels.data()),
            static_cast<std::streamsize>(image.pixels.size()));
    if (in.gcount() != static_cast<std::streamsize>(image.pixels.size()))
        raise(ErrorKind::format_error, "unexpected end of stream in " + path);
    return image;
}

} // namespace gpr
