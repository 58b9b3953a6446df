#pragma once

// Pixel statistics used by the renderer oracles.

#include <algorithm>
#include <array>
#include <cmath>

#include "gpr/image.hpp"

namespace gpr_test {

inline double mean_luminance(const gpr::Image& img) {
    double acc = 0.0;
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x)
            acc += 0.299 * img.at(x, y, 0) + 0.587 * img.at(x, y, 1) + 0.114 * img.at(x, y, 2);
    return acc / (255.0 * img.width * img.height);
}

// Mean RGB over the first and last `rows` rows (the glyph-free border).
inline std::array<double, 3> border_mean_rgb(const gpr::Image& img, int rows) {
    std::array<double, 3> acc = {0, 0, 0};
    int count = 0;
    for (int y = 0; y < img.height; ++y) {
        if (y >= rows && y < img.height - rows) continue;
        for (int x = 0; x < img.width; ++x) {
            for (int c = 0; c < 3; ++c) acc[static_cast<std::size_t>(c)] += img.at(x, y, c);
            ++count;
        }
    }
    for (auto& v : acc) v /= 255.0 * count;
    return acc;
}

inline double mean_saturation(const gpr::Image& img) {
    double acc = 0.0;
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x) {
            int mx = std::max({img.at(x, y, 0), img.at(x, y, 1), img.at(x, y, 2)});
            int mn = std::min({img.at(x, y, 0), img.at(x, y, 1), img.at(x, y, 2)});
            acc += mx > 0 ? static_cast<double>(mx - mn) / mx : 0.0;
        }
    return acc / (img.width * img.height);
}

inline double mean_vertical_gradient(const gpr::Image& img) {
    double acc = 0.0;
    int count = 0;
    for (int y = 1; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x) {
            double a = 0.299 * img.at(x, y, 0) + 0.587 * img.at(x, y, 1) + 0.114 * img.at(x, y, 2);
            double b = 0.299 * img.at(x, y - 1, 0) + 0.587 * img.at(x, y - 1, 1) +
                       0.114 * img.at(x, y - 1, 2);
            acc += std::fabs(a - b);
            ++count;
        }
    return acc / (255.0 * count);
}

inline double near_white_fraction(const gpr::Image& img) {
    int count = 0;
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x)
            if (img.at(x, y, 0) > 205 && img.at(x, y, 1) > 205 && img.at(x, y, 2) > 205) ++count;
    return static_cast<double>(count) / (img.width * img.height);
}

// Circular-mean hue in [0,1) over all pixels.
inline double mean_hue(const gpr::Image& img) {
    double sx = 0.0, sy = 0.0;
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x) {
            double r = img.at(x, y, 0) / 255.0, g = img.at(x, y, 1) / 255.0,
                   b = img.at(x, y, 2) / 255.0;
            double mx = std::max({r, g, b}), mn = std::min({r, g, b});
            if (mx - mn < 1e-9) continue;
            double h;
            if (mx == r) h = std::fmod((g - b) / (mx - mn), 6.0);
            else if (mx == g) h = (b - r) / (mx - mn) + 2.0;
            else h = (r - g) / (mx - mn) + 4.0;
            h /= 6.0;
            sx += std::cos(h * 6.283185307179586);
            sy += std::sin(h * 6.283185307179586);
        }
    double a = std::atan2(sy, sx) / 6.283185307179586;
    return a < 0 ? a + 1.0 : a;
}

// Bounding box of pixels that differ between two images (the glyph region
// when the images differ only in identity). Returns {x0,y0,x1,y1} inclusive,
// or all -1 when identical.
inline std::array<int, 4> diff_bounding_box(const gpr::Image& a, const gpr::Image& b) {
    std::array<int, 4> box = {-1, -1, -1, -1};
    for (int y = 0; y < a.height; ++y)
        for (int x = 0; x < a.width; ++x) {
            bool differs = false;
            for (int c = 0; c < 3; ++c)
                if (a.at(x, y, c) != b.at(x, y, c)) differs = true;
            if (!differs) continue;
            if (box[0] < 0) box = {x, y, x, y};
            box[0] = std::min(box[0], x);
            box[1] = std::min(box[1], y);
            box[2] = std::max(box[2], x);
            box[3] = std::max(box[3], y);
        }
    return box;
}

} // namespace gpr_test
