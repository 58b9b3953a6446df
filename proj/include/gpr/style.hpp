#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "gpr/extractor.hpp"
#include "gpr/manifest.hpp"
#include "gpr/parallel.hpp"
#include "gpr/render.hpp"
#include "gpr/rng.hpp"

namespace gpr {

struct GramMatrix {
    int layer = 0;
    Matrix values; // N_l x N_l

    friend bool operator==(const GramMatrix&, const GramMatrix&) = default;
};

// Filter-correlation matrix of one layer's activations:
// G_ij = sum_k F_ik * F_jk. No normalization here; the 1/(4 N^2 M^2) factor
// belongs to the layer loss.
inline GramMatrix gram(const Matrix& feature_map, int layer = 0) {
    const int n = feature_map.rows, m = feature_map.cols;
    GramMatrix g;
    g.layer = layer;
    g.values = Matrix(n, n);
    for (int i = 0; i < n; ++i) {
        const double* fi = feature_map.data.data() + static_cast<std::size_t>(i) * m;
        for (int j = i; j < n; ++j) {
            const double* fj = feature_map.data.data() + static_cast<std::size_t>(j) * m;
            double acc = 0.0;
            for (int k = 0; k < m; ++k) acc += fi[k] * fj[k];
            g.values.at(i, j) = acc;
            g.values.at(j, i) = acc;
        }
    }
    return g;
}

// Mean-squared Gram distance of one layer, normalized by 4 N^2 M^2.
inline double layer_loss(const GramMatrix& g, const GramMatrix& a, int n_filters, int n_positions) {
    if (!g.values.same_shape(a.values))
        raise(ErrorKind::shape_mismatch, "gram matrices have different shapes");
    double acc = 0.0;
    for (std::size_t i = 0; i < g.values.data.size(); ++i) {
        double d = g.values.data[i] - a.values.data[i];
        acc += d * d;
    }
    double n = static_cast<double>(n_filters), m = static_cast<double>(n_positions);
    return acc / (4.0 * n * n * m * m);
}

struct StyleWeights {
    std::vector<double> values;

    // Uniform layer weights; five taps give the canonical 0.2 each.
    static StyleWeights uniform(std::size_t taps) {
        StyleWeights w;
        w.values.assign(taps, 1.0 / static_cast<double>(taps));
        return w;
    }
};

// Total attribute-style loss between two tap stacks: sum_l w_l E_l.
inline double style_loss(const FeatureMaps& a, const FeatureMaps& x, const StyleWeights& w) {
    if (a.maps.size() != x.maps.size() || a.layers != x.layers)
        raise(ErrorKind::shape_mismatch, "feature maps have different tap structure");
    if (w.values.size() != a.maps.size())
        raise(ErrorKind::shape_mismatch, "style weights do not match tap count");
    double total = 0.0;
    for (std::size_t l = 0; l < a.maps.size(); ++l) {
        if (a.maps[l].rows != x.maps[l].rows || a.maps[l].cols != x.maps[l].cols)
            raise(ErrorKind::shape_mismatch, "feature maps have different shapes at a tap");
        total += w.values[l] * layer_loss(gram(a.maps[l], a.layers[l]), gram(x.maps[l], x.layers[l]),
                                          a.maps[l].rows, a.maps[l].cols);
    }
    return total;
}

namespace detail {

// Deterministic sample of n distinct indices from [0, size): partial
// Fisher-Yates driven by the seed. When the cap covers the whole set the
// canonical order is kept, so full-coverage means are summation-order
// identical no matter which seed asked for them.
inline std::vector<std::size_t> sample_indices(std::size_t size, std::size_t n, std::uint64_t seed) {
    std::vector<std::size_t> idx(size);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    if (n >= size) return idx;
    Rng rng(seed);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t j = i + static_cast<std::size_t>(rng.next_below(size - i));
        std::swap(idx[i], idx[j]);
    }
    idx.resize(n);
    return idx;
}

// Sum in a fixed pairwise tree so the result is independent of how the
// leaves were produced (serial or with any worker count).
inline Matrix pairwise_sum(std::vector<Matrix> items) {
    while (items.size() > 1) {
        std::vector<Matrix> next;
        next.reserve((items.size() + 1) / 2);
        for (std::size_t i = 0; i + 1 < items.size(); i += 2) {
            Matrix s = std::move(items[i]);
            const Matrix& b = items[i + 1];
            for (std::size_t k = 0; k < s.data.size(); ++k) s.data[k] += b.data[k];
            next.push_back(std::move(s));
        }
        if (items.size() % 2 == 1) next.push_back(std::move(items.back()));
        items = std::move(next);
    }
    return std::move(items.front());
}

// Mean Gram per tapped layer over a deterministic sample of the records.
inline std::vector<GramMatrix> mean_grams(const Extractor& extractor,
                                          const std::vector<ImageRecord>& records,
                                          std::size_t sample_cap, std::uint64_t seed,
                                          int workers = 1) {
    if (records.empty()) raise(ErrorKind::empty_slice, "cannot average grams over an empty slice");
    auto picks = sample_indices(records.size(), sample_cap, seed);

    const auto& taps = extractor.config().taps;
    std::vector<std::vector<Matrix>> per_layer(taps.size());
    for (auto& v : per_layer) v.resize(picks.size());

    const int iw = extractor.config().input_width;
    const int ih = extractor.config().input_height;
    parallel_for(picks.size(), workers, [&](std::size_t i) {
        Image img = render_record_at(records[picks[i]], iw, ih);
        FeatureMaps maps = extractor.extract(img);
        for (std::size_t l = 0; l < maps.maps.size(); ++l)
            per_layer[l][i] = gram(maps.maps[l], maps.layers[l]).values;
    });

    std::vector<GramMatrix> out(taps.size());
    for (std::size_t l = 0; l < taps.size(); ++l) {
        Matrix sum = pairwise_sum(std::move(per_layer[l]));
        double inv = 1.0 / static_cast<double>(picks.size());
        for (auto& v : sum.data) v *= inv;
        out[l].layer = taps[l];
        out[l].values = std::move(sum);
    }
    return out;
}

inline std::vector<ImageRecord> records_with_value(const DatasetManifest& m, Dimension d, int value) {
    std::vector<ImageRecord> out;
    for (const auto& r : m.records) {
        int v = 0;
        switch (d) {
            case Dimension::background:   v = r.background; break;
            case Dimension::weather:      v = r.weather; break;
            case Dimension::illumination: v = r.illumination; break;
            case Dimension::viewpoint:    v = r.viewpoint; break;
        }
        if (v == value) out.push_back(r);
    }
    return out;
}

} // namespace detail

// Arithmetic mean of per-image Gram matrices at one layer, over at most
// sample_cap images of the slice chosen deterministically by seed.
inline GramMatrix slice_mean_gram(const Extractor& extractor, const DatasetManifest& slice,
                                  int layer, std::size_t sample_cap, std::uint64_t seed,
                                  int workers = 1) {
    const auto& taps = extractor.config().taps;
    auto it = std::find(taps.begin(), taps.end(), layer);
    if (it == taps.end())
        raise(ErrorKind::bad_config, "layer " + std::to_string(layer) + " is not tapped");
    auto all = detail::mean_grams(extractor, slice.records, sample_cap, seed, workers);
    return all[static_cast<std::size_t>(it - taps.begin())];
}

struct LossEntry {
    std::string value;
    double loss = 0.0;
    int samples = 0;
    bool absent = false; // no records carried this value in the source
};

// Per-attribute-value style losses against the target set; the data behind
// the per-dimension bar charts.
struct LossTable {
    std::array<std::vector<LossEntry>, 4> dims; // indexed by Dimension

    const std::vector<LossEntry>& entries(Dimension d) const {
        return dims[static_cast<std::size_t>(d)];
    }
    std::vector<LossEntry>& entries(Dimension d) { return dims[static_cast<std::size_t>(d)]; }
};

// For every dimension and schema value: style loss between the mean Gram of
// the source slice {dimension = value} and the mean Gram of the target set.
// Target Grams are computed once and reused across all 36 slices.
inline LossTable attribute_loss_table(const Extractor& extractor, const DatasetManifest& source,
                                      const DatasetManifest& target, const StyleWeights& weights,
                                      std::size_t sample_cap, std::uint64_t seed, int workers = 1) {
    const auto& taps = extractor.config().taps;
    if (weights.values.size() != taps.size())
        raise(ErrorKind::shape_mismatch, "style weights do not match tap count");
    if (target.records.empty()) raise(ErrorKind::empty_slice, "target manifest is empty");

    auto target_grams =
        detail::mean_grams(extractor, target.records, sample_cap, seed_mix(seed, 0x74ULL), workers);

    LossTable table;
    const AttributeSchema& schema = source.schema;
    for (Dimension d : kAllDimensions) {
        auto& entries = table.entries(d);
        std::size_t cardinality = schema.cardinality(d);
        for (std::size_t v = 0; v < cardinality; ++v) {
            LossEntry entry;
            entry.value = schema.label(d, static_cast<int>(v));
            auto slice = detail::records_with_value(source, d, static_cast<int>(v));
            if (slice.empty()) {
                entry.absent = true;
            } else {
                std::uint64_t slice_seed =
                    seed_mix(seed_mix(seed, static_cast<std::uint64_t>(d)), v);
                auto grams = detail::mean_grams(extractor, slice, sample_cap, slice_seed, workers);
                double loss = 0.0;
                for (std::size_t l = 0; l < taps.size(); ++l) {
                    const LayerShape& shape = extractor.layer_shape(taps[l]);
                    loss += weights.values[l] *
                            layer_loss(grams[l], target_grams[l], shape.channels, shape.positions());
                }
                entry.loss = loss;
                entry.samples = static_cast<int>(std::min(sample_cap, slice.size()));
            }
            entries.push_back(std::move(entry));
        }
    }
    return table;
}

struct KConfig {
    int backgrounds = 3;
    int weathers = 2;
    int illumination_bands = 4;
    int viewpoints = 6;

    int get(Dimension d) const {
        switch (d) {
            case Dimension::background:   return backgrounds;
            case Dimension::weather:      return weathers;
            case Dimension::illumination: return illumination_bands;
            case Dimension::viewpoint:    return viewpoints;
        }
        return 0;
    }
};

// Chosen value subset per dimension, ordered by ascending loss (ties broken
// by schema order), plus the table and k-config it came from.
struct AttributeSelection {
    std::array<std::vector<std::string>, 4> chosen; // indexed by Dimension
    KConfig k;
    LossTable provenance;

    const std::vector<std::string>& values(Dimension d) const {
        return chosen[static_cast<std::size_t>(d)];
    }
};

inline AttributeSelection select_attributes(const LossTable& table, const KConfig& k) {
    AttributeSelection sel;
    sel.k = k;
    sel.provenance = table;
    for (Dimension d : kAllDimensions) {
        const auto& entries = table.entries(d);
        int want = k.get(d);
        if (want < 1 || want > static_cast<int>(entries.size()))
            raise(ErrorKind::bad_k, std::string("k for ") + dimension_name(d) +
                                        " must be in [1, " + std::to_string(entries.size()) + "]");
        std::vector<std::size_t> order;
        for (std::size_t i = 0; i < entries.size(); ++i)
            if (!entries[i].absent) order.push_back(i);
        if (want > static_cast<int>(order.size()))
            raise(ErrorKind::bad_k, std::string("k for ") + dimension_name(d) +
                                        " exceeds the number of present entries");
        // ascending loss; schema order (the index) breaks ties
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return entries[a].loss < entries[b].loss;
        });
        auto& out = sel.chosen[static_cast<std::size_t>(d)];
        for (int i = 0; i < want; ++i) out.push_back(entries[order[static_cast<std::size_t>(i)]].value);
    }
    return sel;
}

inline DatasetManifest apply_selection(const DatasetManifest& manifest,
                                       const AttributeSelection& selection) {
    SliceFilter filter;
    filter.backgrounds = selection.values(Dimension::background);
    filter.weathers = selection.values(Dimension::weather);
    filter.illumination_bands = selection.values(Dimension::illumination);
    std::vector<int> vps;
    for (const auto& v : selection.values(Dimension::viewpoint)) vps.push_back(std::stoi(v));
    filter.viewpoints = vps;
    return slice_manifest(manifest, filter);
}

} // namespace gpr
