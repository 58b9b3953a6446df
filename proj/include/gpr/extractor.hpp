#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "gpr/errors.hpp"
#include "gpr/image.hpp"
#include "gpr/matrix.hpp"
#include "gpr/rng.hpp"

namespace gpr {

static_assert(std::endian::native == std::endian::little,
              "weight files are little-endian; big-endian hosts are unsupported");

struct ConvSpec {
    int filters = 0;
    int kernel = 3;
    int stride = 2;

    friend bool operator==(const ConvSpec&, const ConvSpec&) = default;
};

// Fixed random convolutional feature extractor. Five stride-2 same-padding
// ReLU layers, all tapped, stand in for the pretrained texture network: only
// the correlation statistics of the responses matter downstream.
struct ExtractorConfig {
    int input_height = 64;
    int input_width = 32;
    std::vector<ConvSpec> layers = {{8, 3, 2}, {16, 3, 2}, {16, 3, 2}, {32, 3, 2}, {32, 3, 2}};
    std::vector<int> taps = {0, 1, 2, 3, 4};
    std::uint64_t weight_seed = 1;

    friend bool operator==(const ExtractorConfig&, const ExtractorConfig&) = default;
};

struct LayerShape {
    int channels = 0;
    int height = 0;
    int width = 0;
    int positions() const { return height * width; }
};

// Activations of the tapped layers: one N_l x M_l matrix per tap, rows are
// filters, columns are spatial positions in row-major order.
struct FeatureMaps {
    std::vector<int> layers;
    std::vector<Matrix> maps;
};

struct ConvWeights {
    std::vector<float> kernel; // [out][in][ky][kx]
    std::vector<float> bias;   // [out]
};

namespace detail {

inline int same_pad_out(int in, int stride) { return (in + stride - 1) / stride; }

inline int same_pad_begin(int in, int out, int kernel, int stride) {
    int total = std::max((out - 1) * stride + kernel - in, 0);
    return total / 2;
}

} // namespace detail

class Extractor {
public:
    explicit Extractor(const ExtractorConfig& config) : config_(config) {
        validate(config_);
        shapes_ = compute_shapes(config_);
        weights_.resize(config_.layers.size());
        int in_c = 3;
        for (std::size_t l = 0; l < config_.layers.size(); ++l) {
            const ConvSpec& spec = config_.layers[l];
            Rng rng(seed_mix(config_.weight_seed, static_cast<std::uint64_t>(l)));
            double bound = 1.0 / std::sqrt(static_cast<double>(in_c) * spec.kernel * spec.kernel);
            auto& w = weights_[l];
            w.kernel.resize(static_cast<std::size_t>(spec.filters) * in_c * spec.kernel * spec.kernel);
            w.bias.resize(static_cast<std::size_t>(spec.filters));
            for (auto& k : w.kernel) k = static_cast<float>(rng.uniform(-bound, bound));
            for (auto& b : w.bias) b = static_cast<float>(rng.uniform(-bound, bound));
            in_c = spec.filters;
        }
    }

    const ExtractorConfig& config() const { return config_; }

    // Output shape of conv layer l (0-based).
    const LayerShape& layer_shape(int l) const { return shapes_[static_cast<std::size_t>(l)]; }
    const std::vector<LayerShape>& layer_shapes() const { return shapes_; }

    std::vector<ConvWeights>& weights() { return weights_; }
    const std::vector<ConvWeights>& weights() const { return weights_; }

    FeatureMaps extract(const Image& image) const {
        if (image.width != config_.input_width || image.height != config_.input_height) {
            raise(ErrorKind::size_mismatch,
                  "extractor expects " + std::to_string(config_.input_width) + "x" +
                      std::to_string(config_.input_height) + ", got " +
                      std::to_string(image.width) + "x" + std::to_string(image.height));
        }

        // input planes, normalized to [0,1]
        int ih = config_.input_height, iw = config_.input_width;
        std::vector<double> act(static_cast<std::size_t>(3) * ih * iw);
        for (int y = 0; y < ih; ++y)
            for (int x = 0; x < iw; ++x)
                for (int c = 0; c < 3; ++c)
                    act[(static_cast<std::size_t>(c) * ih + y) * iw + x] =
                        image.at(x, y, c) / 255.0;

        FeatureMaps out;
        int in_c = 3;
        for (std::size_t l = 0; l < config_.layers.size(); ++l) {
            const ConvSpec& spec = config_.layers[l];
            const LayerShape& os = shapes_[l];
            std::vector<double> next(static_cast<std::size_t>(os.channels) * os.height * os.width);
            conv_relu(act.data(), in_c, ih, iw, weights_[l], spec, os, next.data());
            act = std::move(next);
            in_c = os.channels;
            ih = os.height;
            iw = os.width;
            if (tapped(static_cast<int>(l))) {
                Matrix m(os.channels, os.positions());
                std::memcpy(m.data.data(), act.data(), act.size() * sizeof(double));
                out.layers.push_back(static_cast<int>(l));
                out.maps.push_back(std::move(m));
            }
        }
        return out;
    }

    void save(const std::string& path) const {
        std::ofstream out(path, std::ios::binary);
        if (!out) raise(ErrorKind::io_error, "cannot open for writing: " + path);
        out.write("GPRW", 4);
        write_u32(out, 1); // version
        write_u32(out, static_cast<std::uint32_t>(config_.input_height));
        write_u32(out, static_cast<std::uint32_t>(config_.input_width));
        write_u32(out, static_cast<std::uint32_t>(config_.layers.size()));
        write_u32(out, static_cast<std::uint32_t>(config_.taps.size()));
        for (int t : config_.taps) write_u32(out, static_cast<std::uint32_t>(t));
        int in_c = 3;
        for (std::size_t l = 0; l < config_.layers.size(); ++l) {
            const ConvSpec& spec = config_.layers[l];
            write_u32(out, static_cast<std::uint32_t>(spec.filters));
            write_u32(out, static_cast<std::uint32_t>(spec.kernel));
            write_u32(out, static_cast<std::uint32_t>(spec.stride));
            const auto& w = weights_[l];
            out.write(reinterpret_cast<const char*>(w.kernel.data()),
                      static_cast<std::streamsize>(w.kernel.size() * sizeof(float)));
            out.write(reinterpret_cast<const char*>(w.bias.data()),
                      static_cast<std::streamsize>(w.bias.size() * sizeof(float)));
            in_c = spec.filters;
        }
        (void)in_c;
        if (!out) raise(ErrorKind::io_error, "write failed: " + path);
    }

    static Extractor load(const std::string& path) {
        std::ifstream in(path, std::ios::binary);
        if (!in) raise(ErrorKind::io_error, "cannot open for reading: " + path);
        char magic[4] = {};
        in.read(magic, 4);
        if (in.gcount() != 4 || std::memcmp(magic, "GPRW", 4) != 0)
            raise(ErrorKind::format_error, path + ": expected magic GPRW");
        std::uint32_t version = read_u32(in, path);
        if (version != 1)
            raise(ErrorKind::format_error, path + ": unsupported version " + std::to_string(version));

        ExtractorConfig cfg;
        cfg.input_height = static_cast<int>(read_u32(in, path));
        cfg.input_width = static_cast<int>(read_u32(in, path));
        std::uint32_t n_layers = read_u32(in, path);
        std::uint32_t n_taps = read_u32(in, path);
        if (n_layers == 0 || n_layers > 64 || n_taps == 0 || n_taps > n_layers)
            raise(ErrorKind::format_error, path + ": implausible layer/tap counts");
        cfg.taps.clear();
        for (std::uint32_t i = 0; i < n_taps; ++i)
            cfg.taps.push_back(static_cast<int>(read_u32(in, path)));
        cfg.layers.clear();

        std::vector<ConvWeights> weights;
        int in_c = 3;
        for (std::uint32_t l = 0; l < n_layers; ++l) {
            ConvSpec spec;
            spec.filters = static_cast<int>(read_u32(in, path));
            spec.kernel = static_cast<int>(read_u32(in, path));
            spec.stride = static_cast<int>(read_u32(in, path));
            if (spec.filters < 1 || spec.kernel < 1 || spec.stride < 1)
                raise(ErrorKind::format_error, path + ": bad layer shape header");
            cfg.layers.push_back(spec);
            ConvWeights w;
            w.kernel.resize(static_cast<std::size_t>(spec.filters) * in_c * spec.kernel * spec.kernel);
            w.bias.resize(static_cast<std::size_t>(spec.filters));
            read_floats(in, w.kernel, path);
            read_floats(in, w.bias, path);
            weights.push_back(std::move(w));
            in_c = spec.filters;
        }
        Extractor e(cfg);
        e.weights_ = std::move(weights);
        return e;
    }

private:
    static void validate(const ExtractorConfig& cfg) {
        if (cfg.input_height < 1 || cfg.input_width < 1)
            raise(ErrorKind::bad_config, "extractor input size must be positive");
        if (cfg.layers.empty()) raise(ErrorKind::bad_config, "extractor needs at least one layer");
        if (cfg.taps.empty()) raise(ErrorKind::bad_config, "extractor needs at least one tap");
        for (const auto& spec : cfg.layers)
            if (spec.filters < 1 || spec.kernel < 1 || spec.stride < 1)
                raise(ErrorKind::bad_config, "layer filters/kernel/stride must be >= 1");
        for (int t : cfg.taps)
            if (t < 0 || t >= static_cast<int>(cfg.layers.size()))
                raise(ErrorKind::bad_config, "tap index out of range: " + std::to_string(t));
    }

    static std::vector<LayerShape> compute_shapes(const ExtractorConfig& cfg) {
        std::vector<LayerShape> shapes;
        int ih = cfg.input_height, iw = cfg.input_width;
        for (const auto& spec : cfg.layers) {
            LayerShape s;
            s.channels = spec.filters;
            s.height = detail::same_pad_out(ih, spec.stride);
            s.width = detail::same_pad_out(iw, spec.stride);
            if (s.positions() < 1)
                raise(ErrorKind::bad_config, "layer output has no spatial positions");
            shapes.push_back(s);
            ih = s.height;
            iw = s.width;
        }
        return shapes;
    }

    bool tapped(int layer) const {
        for (int t : config_.taps)
            if (t == layer) return true;
        return false;
    }

    static void conv_relu(const double* in, int in_c, int ih, int iw, const ConvWeights& w,
                          const ConvSpec& spec, const LayerShape& os, double* out) {
        int pad_y = detail::same_pad_begin(ih, os.height, spec.kernel, spec.stride);
        int pad_x = detail::same_pad_begin(iw, os.width, spec.kernel, spec.stride);
        for (int oc = 0; oc < os.channels; ++oc) {
            const float* kern =
                w.kernel.data() + static_cast<std::size_t>(oc) * in_c * spec.kernel * spec.kernel;
            for (int oy = 0; oy < os.height; ++oy) {
                for (int ox = 0; ox < os.width; ++ox) {
                    double acc = w.bias[static_cast<std::size_t>(oc)];
                    for (int ic = 0; ic < in_c; ++ic) {
                        const double* plane = in + static_cast<std::size_t>(ic) * ih * iw;
                        const float* kchan = kern + static_cast<std::size_t>(ic) * spec.kernel * spec.kernel;
                        for (int ky = 0; ky < spec.kernel; ++ky) {
                            int iy = oy * spec.stride - pad_y + ky;
                            if (iy < 0 || iy >= ih) continue;
                            for (int kx = 0; kx < spec.kernel; ++kx) {
                                int ix = ox * spec.stride - pad_x + kx;
                                if (ix < 0 || ix >= iw) continue;
                                acc += static_cast<double>(kchan[ky * spec.kernel + kx]) *
                                       plane[static_cast<std::size_t>(iy) * iw + ix];
                            }
                        }
                    }
                    out[(static_cast<std::size_t>(oc) * os.height + oy) * os.width + ox] =
                        acc > 0.0 ? acc : 0.0;
                }
            }
        }
    }

    static void write_u32(std::ofstream& out, std::uint32_t v) {
        out.write(reinterpret_cast<const char*>(&v), 4);
    }
    static std::uint32_t read_u32(std::ifstream& in, const std::string& path) {
        std::uint32_t v = 0;
        in.read(reinterpret_cast<char*>(&v), 4);
        if (in.gcount() != 4) raise(ErrorKind::format_error, path + ": unexpected end of stream");
        return v;
    }
    static void read_floats(std::ifstream& in, std::vector<float>& dst, const std::string& path) {
        in.read(reinterpret_cast<char*>(dst.data()),
                static_cast<std::streamsize>(dst.size() * sizeof(float)));
        if (in.gcount() != static_cast<std::streamsize>(dst.size() * sizeof(float)))
            raise(ErrorKind::format_error, path + ": unexpected end of stream");
    }

    ExtractorConfig config_;
    std::vector<LayerShape> shapes_;
    std::vector<ConvWeights> weights_;
};

inline Extractor init_extractor(const ExtractorConfig& config) { return Extractor(config); }

inline FeatureMaps extract(const Extractor& extractor, const Image& image) {
    return extractor.extract(image);
}

inline void persist_weights(const Extractor& extractor, const std::string& path) {
    extractor.save(path);
}

inline Extractor load_weights(const std::string& path) { return Extractor::load(path); }

} // namespace gpr
