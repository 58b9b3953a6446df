#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>

#include "gpr/image.hpp"
#include "gpr/manifest.hpp"
#include "gpr/rng.hpp"

namespace gpr {
namespace detail {

struct Rgb {
    double r = 0, g = 0, b = 0;
};

inline Rgb hsv_to_rgb(double h, double s, double v) {
    h = h - std::floor(h);
    double c = v * s;
    double hp = h * 6.0;
    double x = c * (1.0 - std::fabs(std::fmod(hp, 2.0) - 1.0));
    double r = 0, g = 0, b = 0;
    if (hp < 1)      { r = c; g = x; }
    else if (hp < 2) { r = x; g = c; }
    else if (hp < 3) { g = c; b = x; }
    else if (hp < 4) { g = x; b = c; }
    else if (hp < 5) { r = x; b = c; }
    else             { r = c; b = x; }
    double m = v - c;
    return {r + m, g + m, b + m};
}

inline double luminance(const Rgb& c) { return 0.299 * c.r + 0.587 * c.g + 0.114 * c.b; }

// Position-hash noise in [0,1); independent of evaluation order.
inline double pixel_noise(std::uint64_t token, int x, int y) {
    std::uint64_t z = seed_mix(seed_mix(token, static_cast<std::uint64_t>(x) + 1),
                               static_cast<std::uint64_t>(y) + 3);
    return static_cast<double>(z >> 11) * 0x1.0p-53;
}

// Background texture: a per-background pair of plane waves with distinct
// orientation and scale, tinted by a per-background hue. Every background
// gets a clearly different second-order pixel statistic.
inline Rgb background_pixel(int bg, std::uint64_t env_token, double x, double y) {
    static constexpr double kFreqA[9][2] = {
        {1.0, 0.0}, {0.0, 1.0}, {0.9, 0.9}, {2.0, 0.3}, {0.3, 2.0},
        {1.8, 1.2}, {0.7, 1.6}, {2.2, 2.2}, {1.4, 0.5}};
    static constexpr double kFreqB[9][2] = {
        {0.4, 1.7}, {1.5, 0.6}, {2.1, 0.2}, {0.5, 1.1}, {1.9, 1.9},
        {0.2, 0.9}, {2.3, 0.8}, {1.1, 0.4}, {0.6, 2.4}};
    static constexpr double kTau = 6.283185307179586;

    Rng phase(seed_mix(env_token, 0x6267ULL));
    double phi = phase.uniform(0.0, kTau);
    double psi = phase.uniform(0.0, kTau);

    double a = std::sin(kTau * (kFreqA[bg][0] * x + kFreqA[bg][1] * y) / 16.0 + phi);
    double b = std::sin(kTau * (kFreqB[bg][0] * x - kFreqB[bg][1] * y) / 11.0 + psi);
    double value = 0.55 + 0.27 * a + 0.12 * b;

    double hue = 0.03 + 0.107 * bg;
    return hsv_to_rgb(hue, 0.45, std::clamp(value, 0.05, 0.98));
}

struct GlyphPalette {
    Rgb torso_a, torso_b, legs, head;
};

inline GlyphPalette glyph_palette(std::uint64_t identity_token) {
    Rng rng(seed_mix(identity_token, 0x70616cULL));
    GlyphPalette p;
    double torso_hue = rng.next_double();
    p.torso_a = hsv_to_rgb(torso_hue, 0.80, 0.55 + 0.40 * rng.next_double());
    p.torso_b = hsv_to_rgb(torso_hue + 0.45 + 0.10 * rng.next_double(), 0.75,
                           0.30 + 0.30 * rng.next_double());
    p.legs = hsv_to_rgb(rng.next_double(), 0.65, 0.35 + 0.35 * rng.next_double());
    p.head = hsv_to_rgb(0.07 + 0.04 * rng.next_double(), 0.45, 0.55 + 0.35 * rng.next_double());
    return p;
}

// Person glyph confined to rows [0.20h, 0.86h]; the rows above and below
// stay pure environment. Torso width tracks |cos(theta)|, the torso stripes
// run at theta/2 so every viewpoint has a unique texture orientation, and
// the head shifts with sin(theta) to mark the facing direction.
inline bool glyph_pixel(const GlyphPalette& pal, int view_index, double w, double h,
                        double x, double y, Rgb* out) {
    double theta = view_index * 30.0 * 0.017453292519943295;
    double cx = 0.5 * w;
    double width_scale = std::fabs(std::cos(theta));

    // head
    double head_r = 0.055 * h;
    double head_cx = cx + 0.35 * w * 0.35 * std::sin(theta);
    double head_cy = 0.265 * h;
    double dxh = x - head_cx, dyh = y - head_cy;
    if (dxh * dxh + dyh * dyh <= head_r * head_r) {
        *out = pal.head;
        return true;
    }

    // torso ellipse with oriented stripes
    double a = (0.105 + 0.155 * width_scale) * w;
    double b = 0.155 * h;
    double tcy = 0.475 * h;
    double dx = x - cx, dy = y - tcy;
    if ((dx * dx) / (a * a) + (dy * dy) / (b * b) <= 1.0) {
        double alpha = 0.5 * theta;
        double s = std::cos(alpha) * dx + std::sin(alpha) * dy;
        *out = (std::sin(6.283185307179586 * s / (0.11 * h)) >= 0.0) ? pal.torso_a : pal.torso_b;
        return true;
    }

    // legs: two bars whose separation follows the torso width
    double top = 0.63 * h, bottom = 0.85 * h;
    if (y >= top && y <= bottom) {
        double gap = 0.45 * a;
        double lw = 0.30 * a;
        if (std::fabs(std::fabs(dx) - gap) <= lw * 0.5) {
            *out = pal.legs;
            return true;
        }
    }
    return false;
}

// Per-band illumination: brightness falls off with the band midpoint's
// distance from noon, and each band carries a small colour cast normalised
// to unit luminance so mean luminance orders strictly by that distance.
struct IlluminationModel {
    double factor;
    Rgb tint;
};

inline IlluminationModel illumination_model(int band_index) {
    double dist = std::fabs(band_midpoint_hour(band_index) - 12.0);
    double factor = 0.52 + 0.43 * (1.0 - dist / 10.5);
    static constexpr double kCast[8][3] = {
        {0.85, 0.95, 1.25}, // 00~03 deep night, blue
        {0.95, 0.90, 1.18}, // 03~06 pre-dawn
        {1.15, 1.00, 0.88}, // 06~09 golden morning
        {1.02, 1.00, 0.98}, // 09~12 near-neutral
        {0.98, 1.00, 1.03}, // 12~15 near-neutral, cooler
        {1.12, 0.98, 0.85}, // 15~18 warm afternoon
        {1.22, 0.92, 0.80}, // 18~21 sunset orange
        {0.88, 0.92, 1.22}, // 21~24 night, blue
    };
    Rgb tint{kCast[band_index][0], kCast[band_index][1], kCast[band_index][2]};
    double lum = luminance(tint);
    tint.r /= lum;
    tint.g /= lum;
    tint.b /= lum;
    return {factor, tint};
}

// Weather overlays. Each of the seven conditions has its own statistical
// signature of comparable magnitude (clear included, as a faint crispening)
// so slice-mean Grams never collapse onto one another.
inline Rgb apply_weather(int weather, std::uint64_t env_token, double w, double h,
                         int xi, int yi, double x, double y, Rgb c) {
    auto blend = [](Rgb base, Rgb target, double t) {
        return Rgb{base.r + (target.r - base.r) * t, base.g + (target.g - base.g) * t,
                   base.b + (target.b - base.b) * t};
    };
    static constexpr double kTau = 6.283185307179586;
    switch (weather) {
        case 0: { // clear: faint high-frequency sharpening pattern
            double s = 0.05 * std::sin(kTau * (x + y) / 3.0);
            return {c.r + s, c.g + s, c.b + s};
        }
        case 1: { // clouds: low-frequency multiplicative luminance blobs
            Rng phase(seed_mix(env_token, 0x636cULL));
            double p1 = phase.uniform(0.0, kTau), p2 = phase.uniform(0.0, kTau);
            double m = 1.0 - 0.24 * (0.5 + 0.5 * std::sin(kTau * x / w + p1) *
                                               std::sin(1.3 * kTau * y / h + p2));
            return {c.r * m, c.g * m, c.b * m};
        }
        case 2: { // overcast: strong desaturation, mild darkening
            double l = luminance(c) * 0.88;
            return blend(Rgb{c.r * 0.88, c.g * 0.88, c.b * 0.88}, Rgb{l, l, l}, 0.55);
        }
        case 3: // foggy: blend toward bright grey
            return blend(c, Rgb{0.72, 0.72, 0.72}, 0.42);
        case 4: // neutral: mild grey veil
            return blend(c, Rgb{0.50, 0.50, 0.50}, 0.16);
        case 5: { // rainy: darkened vertical streaks on hashed columns
            std::uint64_t col = seed_mix(seed_mix(env_token, 0x7261ULL),
                                         static_cast<std::uint64_t>(xi));
            Rgb base{c.r * 0.93, c.g * 0.93, c.b * 0.97};
            if ((col & 0xffff) < 0.22 * 65536.0) {
                double y0 = static_cast<double>((col >> 16) & 0xffff) / 65536.0 * h;
                double len = 0.25 * h + static_cast<double>((col >> 32) & 0xff) / 256.0 * 0.5 * h;
                double dy = y - y0;
                if (dy < 0) dy += h;
                if (dy < len) return blend(base, Rgb{0.25, 0.28, 0.38}, 0.45);
            }
            return base;
        }
        case 6: { // blizzard: white speckles plus a cold bright veil
            Rgb base = blend(c, Rgb{0.88, 0.90, 0.95}, 0.14);
            if (pixel_noise(seed_mix(env_token, 0x626cULL), xi, yi) < 0.085)
                return blend(base, Rgb{0.97, 0.97, 1.0}, 0.85);
            return base;
        }
        default: return c;
    }
}

} // namespace detail

// Deterministic procedural rendering. The environment layers (background,
// weather) are seeded from the record's attribute tuple only, so records
// that differ in identity alone share every environment pixel; the glyph is
// seeded from the per-identity token recovered from render_seed.
inline Image render_record_at(const ImageRecord& record, int width, int height) {
    const int w = width, h = height;
    Image image(w, h);

    std::uint64_t env_token = detail::attribute_token(record.background, record.weather,
                                                      record.illumination, record.viewpoint);
    std::uint64_t id_token = record.render_seed ^ env_token;

    detail::GlyphPalette palette = detail::glyph_palette(id_token);
    detail::IlluminationModel ill = detail::illumination_model(record.illumination);

    for (int yi = 0; yi < h; ++yi) {
        for (int xi = 0; xi < w; ++xi) {
            double x = xi + 0.5, y = yi + 0.5;
            detail::Rgb c = detail::background_pixel(record.background, env_token, x, y);
            detail::Rgb g;
            if (detail::glyph_pixel(palette, record.viewpoint, w, h, x, y, &g)) c = g;
            c = detail::apply_weather(record.weather, env_token, w, h, xi, yi, x, y, c);
            c.r *= ill.factor * ill.tint.r;
            c.g *= ill.factor * ill.tint.g;
            c.b *= ill.factor * ill.tint.b;
            image.at(xi, yi, 0) = static_cast<std::uint8_t>(
                std::lround(std::clamp(c.r, 0.0, 1.0) * 255.0));
            image.at(xi, yi, 1) = static_cast<std::uint8_t>(
                std::lround(std::clamp(c.g, 0.0, 1.0) * 255.0));
            image.at(xi, yi, 2) = static_cast<std::uint8_t>(
                std::lround(std::clamp(c.b, 0.0, 1.0) * 255.0));
        }
    }
    return image;
}

inline Image render_image(const ImageRecord& record, const GeneratorConfig& config) {
    return render_record_at(record, config.image_width, config.image_height);
}

} // namespace gpr
