#pragma once

#include <array>
#include <string>
#include <vector>

#include "gpr/errors.hpp"

namespace gpr {

enum class Dimension { background = 0, weather = 1, illumination = 2, viewpoint = 3 };

inline constexpr std::array<Dimension, 4> kAllDimensions = {
    Dimension::background, Dimension::weather, Dimension::illumination, Dimension::viewpoint};

inline const char* dimension_name(Dimension d) {
    switch (d) {
        case Dimension::background:   return "background";
        case Dimension::weather:      return "weather";
        case Dimension::illumination: return "illumination";
        case Dimension::viewpoint:    return "viewpoint";
    }
    return "?";
}

// The factorial attribute space: 9 backgrounds x 7 weathers x 8 three-hour
// illumination bands x 12 viewpoint angles. Labels are ordered; indices into
// these lists are the canonical record encoding.
struct AttributeSchema {
    std::vector<std::string> backgrounds;
    std::vector<std::string> weathers;
    std::vector<std::string> illumination_bands;
    std::vector<int> viewpoints; // degrees

    std::size_t cardinality(Dimension d) const {
        switch (d) {
            case Dimension::background:   return backgrounds.size();
            case Dimension::weather:      return weathers.size();
            case Dimension::illumination: return illumination_bands.size();
            case Dimension::viewpoint:    return viewpoints.size();
        }
        return 0;
    }

    // Label of value i in dimension d (viewpoints stringified as degrees).
    std::string label(Dimension d, int i) const {
        switch (d) {
            case Dimension::background:   return backgrounds[static_cast<std::size_t>(i)];
            case Dimension::weather:      return weathers[static_cast<std::size_t>(i)];
            case Dimension::illumination: return illumination_bands[static_cast<std::size_t>(i)];
            case Dimension::viewpoint:    return std::to_string(viewpoints[static_cast<std::size_t>(i)]);
        }
        return {};
    }

    int background_index(const std::string& s) const { return find(backgrounds, s); }
    int weather_index(const std::string& s) const { return find(weathers, s); }
    int illumination_index(const std::string& s) const { return find(illumination_bands, s); }
    int viewpoint_index(int degrees) const {
        for (std::size_t i = 0; i < viewpoints.size(); ++i)
            if (viewpoints[i] == degrees) return static_cast<int>(i);
        return -1;
    }

private:
    static int find(const std::vector<std::string>& v, const std::string& s) {
        for (std::size_t i = 0; i < v.size(); ++i)
            if (v[i] == s) return static_cast<int>(i);
        return -1;
    }
};

// Schema of the full generation space: backgrounds #1..#9, the seven weather
// conditions, eight 3-hour bands over 24h, and viewpoints every 30 degrees.
inline AttributeSchema default_schema() {
    AttributeSchema s;
    for (int i = 1; i <= 9; ++i) s.backgrounds.push_back("#" + std::to_string(i));
    s.weathers = {"clear", "clouds", "overcast", "foggy", "neutral", "rainy", "blizzard"};
    for (int h = 0; h < 24; h += 3) {
        auto two = [](int v) {
            std::string t = std::to_string(v);
            return t.size() == 1 ? "0" + t : t;
        };
        s.illumination_bands.push_back(two(h) + "~" + two(h + 3));
    }
    for (int a = 0; a < 360; a += 30) s.viewpoints.push_back(a);
    return s;
}

// Midpoint hour of an illumination band index of the default schema.
inline double band_midpoint_hour(int band_index) {
    return 3.0 * band_index + 1.5;
}

} // namespace gpr
