#pragma once

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "gpr/errors.hpp"
#include "gpr/extractor.hpp" // ConvSpec, LayerShape, same-padding helpers
#include "gpr/rng.hpp"

namespace gpr {

// CHW double tensor in [0,1] after preprocessing.
struct Tensor {
    int channels = 0, height = 0, width = 0;
    std::vector<double> data;

    Tensor() = default;
    Tensor(int c, int h, int w)
        : channels(c), height(h), width(w), data(static_cast<std::size_t>(c) * h * w, 0.0) {}

    double& at(int c, int y, int x) {
        return data[(static_cast<std::size_t>(c) * height + y) * width + x];
    }
    double at(int c, int y, int x) const {
        return data[(static_cast<std::size_t>(c) * height + y) * width + x];
    }
};

struct ModelConfig {
    int input_height = 128;
    int input_width = 64;
    std::vector<ConvSpec> trunk = {{8, 3, 2}, {16, 3, 2}, {32, 3, 2}, {32, 3, 2}};
    int embedding_dim = 64; // D
    int num_identities = 2; // P_s
    std::uint64_t init_seed = 1;

    friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

namespace detail {

struct ConvParams {
    ConvSpec spec;
    int in_c = 0;
    std::vector<double> kernel; // [out][in][ky][kx]
    std::vector<double> bias;
};

struct DenseParams {
    int in = 0, out = 0;
    std::vector<double> w; // [out][in]
    std::vector<double> b;
};

} // namespace detail

struct ForwardResult {
    std::vector<double> embedding; // D
    std::vector<double> logits;    // P_s
};

// Per-image activation cache for backprop: acts[0] is the input, acts[l+1]
// the post-ReLU output of trunk layer l; gap and embedding follow.
struct ForwardCache {
    std::vector<Tensor> acts;
    std::vector<double> gap;
    std::vector<double> embedding;
};

class EmbeddingModel;
struct ModelGradients {
    std::vector<std::vector<double>> blocks; // same order as parameter_vectors()

    void zero() {
        for (auto& b : blocks) std::fill(b.begin(), b.end(), 0.0);
    }
};

// Small trainable re-ID network: stride-2 ReLU conv trunk, global average
// pooling, a linear embedding head (D) and a linear classifier head (P_s).
// The triplet loss acts on the embedding, the ID loss on the logits.
class EmbeddingModel {
public:
    explicit EmbeddingModel(const ModelConfig& config) : cfg_(config) {
        if (cfg_.embedding_dim < 2) raise(ErrorKind::bad_config, "embedding_dim must be >= 2");
        if (cfg_.num_identities < 2) raise(ErrorKind::bad_config, "num_identities must be >= 2");
        if (cfg_.input_height < 1 || cfg_.input_width < 1)
            raise(ErrorKind::bad_config, "model input size must be positive");
        if (cfg_.trunk.empty()) raise(ErrorKind::bad_config, "trunk needs at least one layer");

        int in_c = 3, ih = cfg_.input_height, iw = cfg_.input_width;
        std::uint64_t block = 0;
        for (const auto& spec : cfg_.trunk) {
            if (spec.filters < 1 || spec.kernel < 1 || spec.stride < 1)
                raise(ErrorKind::bad_config, "trunk filters/kernel/stride must be >= 1");
            detail::ConvParams layer;
            layer.spec = spec;
            layer.in_c = in_c;
            layer.kernel.resize(static_cast<std::size_t>(spec.filters) * in_c * spec.kernel * spec.kernel);
            layer.bias.resize(static_cast<std::size_t>(spec.filters));
            fill_uniform(layer.kernel, in_c * spec.kernel * spec.kernel, block++);
            fill_uniform(layer.bias, in_c * spec.kernel * spec.kernel, block++);
            trunk_.push_back(std::move(layer));

            LayerShape s;
            s.channels = spec.filters;
            s.height = detail::same_pad_out(ih, spec.stride);
            s.width = detail::same_pad_out(iw, spec.stride);
            shapes_.push_back(s);
            in_c = spec.filters;
            ih = s.height;
            iw = s.width;
        }
        embed_.in = in_c;
        embed_.out = cfg_.embedding_dim;
        embed_.w.resize(static_cast<std::size_t>(embed_.out) * embed_.in);
        embed_.b.resize(static_cast<std::size_t>(embed_.out));
        fill_uniform(embed_.w, embed_.in, block++);
        fill_uniform(embed_.b, embed_.in, block++);

        cls_.in = cfg_.embedding_dim;
        cls_.out = cfg_.num_identities;
        cls_.w.resize(static_cast<std::size_t>(cls_.out) * cls_.in);
        cls_.b.resize(static_cast<std::size_t>(cls_.out));
        fill_uniform(cls_.w, cls_.in, block++);
        fill_uniform(cls_.b, cls_.in, block++);
    }

    const ModelConfig& config() const { return cfg_; }

    ForwardResult forward(const Tensor& input) const {
        ForwardCache cache;
        return run(input, cache, false);
    }

    ForwardResult forward_cached(const Tensor& input, ForwardCache& cache) const {
        return run(input, cache, true);
    }

    // Backprop of d_logits (at the classifier output) plus d_embedding (a
    // gradient applied directly to the embedding, e.g. from the triplet
    // loss). Accumulates into grads.
    void backward(const ForwardCache& cache, const std::vector<double>& d_logits,
                  const std::vector<double>& d_embedding, ModelGradients& grads) const {
        std::size_t gi = grads.blocks.size();
        auto& g_cls_b = grads.blocks[--gi];
        auto& g_cls_w = grads.blocks[--gi];
        auto& g_emb_b = grads.blocks[--gi];
        auto& g_emb_w = grads.blocks[--gi];

        // classifier head
        std::vector<double> d_emb = d_embedding;
        d_emb.resize(static_cast<std::size_t>(cls_.in), 0.0);
        for (int o = 0; o < cls_.out; ++o) {
            double g = d_logits[static_cast<std::size_t>(o)];
            g_cls_b[static_cast<std::size_t>(o)] += g;
            const double* wrow = cls_.w.data() + static_cast<std::size_t>(o) * cls_.in;
            double* grow = g_cls_w.data() + static_cast<std::size_t>(o) * cls_.in;
            for (int i = 0; i < cls_.in; ++i) {
                grow[i] += g * cache.embedding[static_cast<std::size_t>(i)];
                d_emb[static_cast<std::size_t>(i)] += g * wrow[i];
            }
        }

        // embedding head
        std::vector<double> d_gap(static_cast<std::size_t>(embed_.in), 0.0);
        for (int o = 0; o < embed_.out; ++o) {
            double g = d_emb[static_cast<std::size_t>(o)];
            g_emb_b[static_cast<std::size_t>(o)] += g;
            const double* wrow = embed_.w.data() + static_cast<std::size_t>(o) * embed_.in;
            double* grow = g_emb_w.data() + static_cast<std::size_t>(o) * embed_.in;
            for (int i = 0; i < embed_.in; ++i) {
                grow[i] += g * cache.gap[static_cast<std::size_t>(i)];
                d_gap[static_cast<std::size_t>(i)] += g * wrow[i];
            }
        }

        // global average pooling
        const Tensor& last = cache.acts.back();
        Tensor d_act(last.channels, last.height, last.width);
        double inv = 1.0 / (static_cast<double>(last.height) * last.width);
        for (int c = 0; c < last.channels; ++c) {
            double g = d_gap[static_cast<std::size_t>(c)] * inv;
            for (int y = 0; y < last.height; ++y)
                for (int x = 0; x < last.width; ++x) d_act.at(c, y, x) = g;
        }

        // trunk, back to front
        for (int l = static_cast<int>(trunk_.size()) - 1; l >= 0; --l) {
            auto& g_bias = grads.blocks[static_cast<std::size_t>(2 * l + 1)];
            auto& g_kern = grads.blocks[static_cast<std::size_t>(2 * l)];
            d_act = conv_backward(trunk_[static_cast<std::size_t>(l)],
                                  cache.acts[static_cast<std::size_t>(l)],
                                  cache.acts[static_cast<std::size_t>(l) + 1], d_act, g_kern, g_bias);
        }
    }

    // Parameter blocks in a fixed order (trunk kernels/biases front to back,
    // then embedding and classifier heads). Gradient blocks mirror this.
    std::vector<std::vector<double>*> parameter_vectors() {
        std::vector<std::vector<double>*> out;
        for (auto& layer : trunk_) {
            out.push_back(&layer.kernel);
            out.push_back(&layer.bias);
        }
        out.push_back(&embed_.w);
        out.push_back(&embed_.b);
        out.push_back(&cls_.w);
        out.push_back(&cls_.b);
        return out;
    }

    std::vector<const std::vector<double>*> parameter_vectors() const {
        std::vector<const std::vector<double>*> out;
        for (const auto& layer : trunk_) {
            out.push_back(&layer.kernel);
            out.push_back(&layer.bias);
        }
        out.push_back(&embed_.w);
        out.push_back(&embed_.b);
        out.push_back(&cls_.w);
        out.push_back(&cls_.b);
        return out;
    }

    ModelGradients make_gradients() const {
        ModelGradients g;
        for (const auto* p : parameter_vectors()) g.blocks.emplace_back(p->size(), 0.0);
        return g;
    }

    void save(const std::string& path) const {
        std::ofstream out(path, std::ios::binary);
        if (!out) raise(ErrorKind::io_error, "cannot open for writing: " + path);
        out.write("GPRM", 4);
        write_u32(out, 1);
        write_u32(out, static_cast<std::uint32_t>(cfg_.input_height));
        write_u32(out, static_cast<std::uint32_t>(cfg_.input_width));
        write_u32(out, static_cast<std::uint32_t>(cfg_.trunk.size()));
        for (const auto& spec : cfg_.trunk) {
            write_u32(out, static_cast<std::uint32_t>(spec.filters));
            write_u32(out, static_cast<std::uint32_t>(spec.kernel));
            write_u32(out, static_cast<std::uint32_t>(spec.stride));
        }
        write_u32(out, static_cast<std::uint32_t>(cfg_.embedding_dim));
        write_u32(out, static_cast<std::uint32_t>(cfg_.num_identities));
        for (const auto* block : parameter_vectors()) {
            std::vector<float> f(block->size());
            for (std::size_t i = 0; i < f.size(); ++i) f[i] = static_cast<float>((*block)[i]);
            out.write(reinterpret_cast<const char*>(f.data()),
                      static_cast<std::streamsize>(f.size() * sizeof(float)));
        }
        if (!out) raise(ErrorKind::io_error, "write failed: " + path);
    }

    static EmbeddingModel load(const std::string& path) {
        std::ifstream in(path, std::ios::binary);
        if (!in) raise(ErrorKind::io_error, "cannot open for reading: " + path);
        char magic[4] = {};
        in.read(magic, 4);
        if (in.gcount() != 4 || std::memcmp(magic, "GPRM", 4) != 0)
            raise(ErrorKind::format_error, path + ": expected magic GPRM");
        std::uint32_t version = read_u32(in, path);
        if (version != 1)
            raise(ErrorKind::format_error, path + ": unsupported version " + std::to_string(version));
        ModelConfig cfg;
        cfg.input_height = static_cast<int>(read_u32(in, path));
        cfg.input_width = static_cast<int>(read_u32(in, path));
        std::uint32_t n_trunk = read_u32(in, path);
        if (n_trunk == 0 || n_trunk > 64)
            raise(ErrorKind::format_error, path + ": implausible trunk layer count");
        cfg.trunk.clear();
        for (std::uint32_t l = 0; l < n_trunk; ++l) {
            ConvSpec spec;
            spec.filters = static_cast<int>(read_u32(in, path));
            spec.kernel = static_cast<int>(read_u32(in, path));
            spec.stride = static_cast<int>(read_u32(in, path));
            if (spec.filters < 1 || spec.kernel < 1 || spec.stride < 1)
                raise(ErrorKind::format_error, path + ": bad trunk shape header");
            cfg.trunk.push_back(spec);
        }
        cfg.embedding_dim = static_cast<int>(read_u32(in, path));
        cfg.num_identities = static_cast<int>(read_u32(in, path));

        EmbeddingModel model(cfg);
        for (auto* block : model.parameter_vectors()) {
            std::vector<float> f(block->size());
            in.read(reinterpret_cast<char*>(f.data()),
                    static_cast<std::streamsize>(f.size() * sizeof(float)));
            if (in.gcount() != static_cast<std::streamsize>(f.size() * sizeof(float)))
                raise(ErrorKind::format_error, path + ": unexpected end of stream");
            for (std::size_t i = 0; i < f.size(); ++i) (*block)[i] = static_cast<double>(f[i]);
        }
        return model;
    }

    // Test hook: zero the classifier head (uniform softmax regardless of input).
    void zero_classifier() {
        std::fill(cls_.w.begin(), cls_.w.end(), 0.0);
        std::fill(cls_.b.begin(), cls_.b.end(), 0.0);
    }

private:
    void fill_uniform(std::vector<double>& v, int fan_in, std::uint64_t block) {
        Rng rng(seed_mix(cfg_.init_seed, block));
        double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
        for (auto& x : v) x = rng.uniform(-bound, bound);
    }

    ForwardResult run(const Tensor& input, ForwardCache& cache, bool keep) const {
        if (input.channels != 3 || input.height != cfg_.input_height ||
            input.width != cfg_.input_width)
            raise(ErrorKind::size_mismatch, "model expects 3x" + std::to_string(cfg_.input_height) +
                                                "x" + std::to_string(cfg_.input_width));
        Tensor act = input;
        if (keep) {
            cache.acts.clear();
            cache.acts.push_back(act);
        }
        for (std::size_t l = 0; l < trunk_.size(); ++l) {
            act = conv_forward(trunk_[l], act, shapes_[l]);
            if (keep) cache.acts.push_back(act);
        }

        std::vector<double> gap(static_cast<std::size_t>(act.channels), 0.0);
        double inv = 1.0 / (static_cast<double>(act.height) * act.width);
        for (int c = 0; c < act.channels; ++c) {
            double acc = 0.0;
            for (int y = 0; y < act.height; ++y)
                for (int x = 0; x < act.width; ++x) acc += act.at(c, y, x);
            gap[static_cast<std::size_t>(c)] = acc * inv;
        }

        ForwardResult r;
        r.embedding = dense_forward(embed_, gap);
        r.logits = dense_forward(cls_, r.embedding);
        if (keep) {
            cache.gap = std::move(gap);
            cache.embedding = r.embedding;
        }
        return r;
    }

    static std::vector<double> dense_forward(const detail::DenseParams& d,
                                             const std::vector<double>& x) {
        std::vector<double> y(static_cast<std::size_t>(d.out));
        for (int o = 0; o < d.out; ++o) {
            double acc = d.b[static_cast<std::size_t>(o)];
            const double* wrow = d.w.data() + static_cast<std::size_t>(o) * d.in;
            for (int i = 0; i < d.in; ++i) acc += wrow[i] * x[static_cast<std::size_t>(i)];
            y[static_cast<std::size_t>(o)] = acc;
        }
        return y;
    }

    static Tensor conv_forward(const detail::ConvParams& layer, const Tensor& in,
                               const LayerShape& os) {
        const ConvSpec& spec = layer.spec;
        Tensor out(os.channels, os.height, os.width);
        int pad_y = detail::same_pad_begin(in.height, os.height, spec.kernel, spec.stride);
        int pad_x = detail::same_pad_begin(in.width, os.width, spec.kernel, spec.stride);
        for (int oc = 0; oc < os.channels; ++oc) {
            const double* kern = layer.kernel.data() +
                                 static_cast<std::size_t>(oc) * layer.in_c * spec.kernel * spec.kernel;
            for (int oy = 0; oy < os.height; ++oy) {
                for (int ox = 0; ox < os.width; ++ox) {
                    double acc = layer.bias[static_cast<std::size_t>(oc)];
                    for (int ic = 0; ic < layer.in_c; ++ic) {
                        const double* kchan = kern + static_cast<std::size_t>(ic) * spec.kernel * spec.kernel;
                        for (int ky = 0; ky < spec.kernel; ++ky) {
                            int iy = oy * spec.stride - pad_y + ky;
                            if (iy < 0 || iy >= in.height) continue;
                            for (int kx = 0; kx < spec.kernel; ++kx) {
                                int ix = ox * spec.stride - pad_x + kx;
                                if (ix < 0 || ix >= in.width) continue;
                                acc += kchan[ky * spec.kernel + kx] * in.at(ic, iy, ix);
                            }
                        }
                    }
                    out.at(oc, oy, ox) = acc > 0.0 ? acc : 0.0;
                }
            }
        }
        return out;
    }

    // Returns d_input; accumulates kernel/bias gradients. ReLU mask comes
    // from the cached post-activation (> 0).
    static Tensor conv_backward(const detail::ConvParams& layer, const Tensor& in,
                                const Tensor& post, const Tensor& d_post,
                                std::vector<double>& g_kernel, std::vector<double>& g_bias) {
        const ConvSpec& spec = layer.spec;
        Tensor d_in(in.channels, in.height, in.width);
        int pad_y = detail::same_pad_begin(in.height, post.height, spec.kernel, spec.stride);
        int pad_x = detail::same_pad_begin(in.width, post.width, spec.kernel, spec.stride);
        for (int oc = 0; oc < post.channels; ++oc) {
            const double* kern = layer.kernel.data() +
                                 static_cast<std::size_t>(oc) * layer.in_c * spec.kernel * spec.kernel;
            double* gkern = g_kernel.data() +
                            static_cast<std::size_t>(oc) * layer.in_c * spec.kernel * spec.kernel;
            for (int oy = 0; oy < post.height; ++oy) {
                for (int ox = 0; ox < post.width; ++ox) {
                    if (post.at(oc, oy, ox) <= 0.0) continue; // ReLU gate
                    double g = d_post.at(oc, oy, ox);
                    if (g == 0.0) continue;
                    g_bias[static_cast<std::size_t>(oc)] += g;
                    for (int ic = 0; ic < layer.in_c; ++ic) {
                        const double* kchan = kern + static_cast<std::size_t>(ic) * spec.kernel * spec.kernel;
                        double* gchan = gkern + static_cast<std::size_t>(ic) * spec.kernel * spec.kernel;
                        for (int ky = 0; ky < spec.kernel; ++ky) {
                            int iy = oy * spec.stride - pad_y + ky;
                            if (iy < 0 || iy >= in.height) continue;
                            for (int kx = 0; kx < spec.kernel; ++kx) {
                                int ix = ox * spec.stride - pad_x + kx;
                                if (ix < 0 || ix >= in.width) continue;
                                gchan[ky * spec.kernel + kx] += g * in.at(ic, iy, ix);
                                d_in.at(ic, iy, ix) += g * kchan[ky * spec.kernel + kx];
                            }
                        }
                    }
                }
            }
        }
        return d_in;
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

    ModelConfig cfg_;
    std::vector<detail::ConvParams> trunk_;
    std::vector<LayerShape> shapes_;
    detail::DenseParams embed_, cls_;
};

inline void save_model(const EmbeddingModel& model, const std::string& path) { model.save(path); }
inline EmbeddingModel load_model(const std::string& path) { return EmbeddingModel::load(path); }

} // namespace gpr
