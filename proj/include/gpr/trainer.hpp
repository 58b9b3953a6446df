#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <numeric>
#include <string>
#include <unordered_map>
#include <vector>

#include "gpr/errors.hpp"
#include "gpr/format.hpp"
#include "gpr/manifest.hpp"
#include "gpr/matrix.hpp"
#include "gpr/model.hpp"
#include "gpr/render.hpp"
#include "gpr/rng.hpp"

namespace gpr {

struct ErasingConfig {
    double probability = 0.5;
    double area_min = 0.02, area_max = 0.4;
    double aspect_min = 0.3, aspect_max = 3.3;
};

// Aspect-preserving scale-to-fit with centered zero letterboxing, values in
// [0,1]; random erasing (one rectangle, per-channel-mean fill) only in train
// mode.
inline Tensor preprocess(const Image& image, int target_height, int target_width, bool train_mode,
                         const ErasingConfig& erasing, Rng& rng) {
    Tensor out(3, target_height, target_width);
    double scale = std::min(static_cast<double>(target_height) / image.height,
                            static_cast<double>(target_width) / image.width);
    int rh = std::max(1, static_cast<int>(std::lround(image.height * scale)));
    int rw = std::max(1, static_cast<int>(std::lround(image.width * scale)));
    int off_y = (target_height - rh) / 2;
    int off_x = (target_width - rw) / 2;

    for (int ry = 0; ry < rh; ++ry) {
        double sy = (ry + 0.5) * image.height / rh - 0.5;
        sy = std::clamp(sy, 0.0, static_cast<double>(image.height - 1));
        int y0 = static_cast<int>(sy);
        int y1 = std::min(y0 + 1, image.height - 1);
        double fy = sy - y0;
        for (int rx = 0; rx < rw; ++rx) {
            double sx = (rx + 0.5) * image.width / rw - 0.5;
            sx = std::clamp(sx, 0.0, static_cast<double>(image.width - 1));
            int x0 = static_cast<int>(sx);
            int x1 = std::min(x0 + 1, image.width - 1);
            double fx = sx - x0;
            for (int c = 0; c < 3; ++c) {
                double v00 = image.at(x0, y0, c), v01 = image.at(x1, y0, c);
                double v10 = image.at(x0, y1, c), v11 = image.at(x1, y1, c);
                double v = (1 - fy) * ((1 - fx) * v00 + fx * v01) +
                           fy * ((1 - fx) * v10 + fx * v11);
                out.at(c, off_y + ry, off_x + rx) = v / 255.0;
            }
        }
    }

    if (train_mode && rng.bernoulli(erasing.probability)) {
        double area = static_cast<double>(target_height) * target_width;
        for (int attempt = 0; attempt < 100; ++attempt) {
            double target_area = rng.uniform(erasing.area_min, erasing.area_max) * area;
            double aspect = rng.uniform(erasing.aspect_min, erasing.aspect_max);
            int eh = static_cast<int>(std::lround(std::sqrt(target_area * aspect)));
            int ew = static_cast<int>(std::lround(std::sqrt(target_area / aspect)));
            if (eh < 1 || ew < 1 || eh >= target_height || ew >= target_width) continue;
            int ey = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(target_height - eh)));
            int ex = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(target_width - ew)));
            double mean[3] = {0, 0, 0};
            for (int c = 0; c < 3; ++c) {
                double acc = 0.0;
                for (int y = 0; y < target_height; ++y)
                    for (int x = 0; x < target_width; ++x) acc += out.at(c, y, x);
                mean[c] = acc / area;
            }
            for (int c = 0; c < 3; ++c)
                for (int y = ey; y < ey + eh; ++y)
                    for (int x = ex; x < ex + ew; ++x) out.at(c, y, x) = mean[c];
            break;
        }
    }
    return out;
}

struct IdLossResult {
    double loss = 0.0;
    std::vector<double> grad; // d loss / d logits = softmax - onehot
};

// Cross-entropy over identity logits.
inline IdLossResult id_loss(const std::vector<double>& logits, int label) {
    if (label < 0 || label >= static_cast<int>(logits.size()))
        raise(ErrorKind::bad_label, "label " + std::to_string(label) + " out of range");
    double max_v = *std::max_element(logits.begin(), logits.end());
    double sum = 0.0;
    for (double v : logits) sum += std::exp(v - max_v);
    double lse = max_v + std::log(sum);

    IdLossResult r;
    r.loss = lse - logits[static_cast<std::size_t>(label)];
    r.grad.resize(logits.size());
    for (std::size_t i = 0; i < logits.size(); ++i)
        r.grad[i] = std::exp(logits[i] - lse) - (static_cast<int>(i) == label ? 1.0 : 0.0);
    return r;
}

struct TripletResult {
    double loss = 0.0;
    Matrix grads; // B x D, d loss / d embeddings
};

// Batch-hard triplet loss: per anchor, hinge on margin + hardest-positive
// distance - hardest-negative distance, averaged over anchors. Ties go to
// the first index in batch order; zero distances get a zero subgradient.
inline TripletResult batch_hard_triplet(const Matrix& embeddings, const std::vector<int>& labels,
                                        double margin) {
    const int b = embeddings.rows, d = embeddings.cols;
    if (static_cast<int>(labels.size()) != b)
        raise(ErrorKind::shape_mismatch, "labels do not match embedding count");
    {
        std::unordered_map<int, int> counts;
        for (int l : labels) counts[l]++;
        if (counts.size() < 2)
            raise(ErrorKind::degenerate_batch, "batch needs at least two distinct labels");
        for (const auto& [label, count] : counts)
            if (count < 2)
                raise(ErrorKind::degenerate_batch,
                      "label " + std::to_string(label) + " has a single instance");
    }

    Matrix dist(b, b);
    for (int i = 0; i < b; ++i)
        for (int j = i + 1; j < b; ++j) {
            double acc = 0.0;
            for (int k = 0; k < d; ++k) {
                double diff = embeddings.at(i, k) - embeddings.at(j, k);
                acc += diff * diff;
            }
            double dv = std::sqrt(acc);
            dist.at(i, j) = dv;
            dist.at(j, i) = dv;
        }

    TripletResult r;
    r.grads = Matrix(b, d);
    double inv_b = 1.0 / static_cast<double>(b);
    for (int a = 0; a < b; ++a) {
        int hardest_pos = -1, hardest_neg = -1;
        for (int j = 0; j < b; ++j) {
            if (j == a) continue;
            if (labels[static_cast<std::size_t>(j)] == labels[static_cast<std::size_t>(a)]) {
                if (hardest_pos < 0 || dist.at(a, j) > dist.at(a, hardest_pos)) hardest_pos = j;
            } else {
                if (hardest_neg < 0 || dist.at(a, j) < dist.at(a, hardest_neg)) hardest_neg = j;
            }
        }
        double hinge = margin + dist.at(a, hardest_pos) - dist.at(a, hardest_neg);
        if (hinge <= 0.0) continue;
        r.loss += hinge;

        double dp = dist.at(a, hardest_pos);
        if (dp > 0.0) {
            double s = inv_b / dp;
            for (int k = 0; k < d; ++k) {
                double diff = embeddings.at(a, k) - embeddings.at(hardest_pos, k);
                r.grads.at(a, k) += s * diff;
                r.grads.at(hardest_pos, k) -= s * diff;
            }
        }
        double dn = dist.at(a, hardest_neg);
        if (dn > 0.0) {
            double s = inv_b / dn;
            for (int k = 0; k < d; ++k) {
                double diff = embeddings.at(a, k) - embeddings.at(hardest_neg, k);
                r.grads.at(a, k) -= s * diff;
                r.grads.at(hardest_neg, k) += s * diff;
            }
        }
    }
    r.loss *= inv_b;
    return r;
}

struct BatchLoss {
    double id = 0.0;
    double triplet = 0.0;
    double total = 0.0;
};

// Combined loss (mean ID cross-entropy + batch-hard triplet, unit weights)
// over a prepared batch; optionally accumulates parameter gradients. Shared
// by the training loop and the finite-difference checks.
inline BatchLoss compute_batch(const EmbeddingModel& model, const std::vector<Tensor>& inputs,
                               const std::vector<int>& labels, double margin,
                               ModelGradients* grads) {
    const int b = static_cast<int>(inputs.size());
    const int d = model.config().embedding_dim;
    std::vector<ForwardCache> caches(static_cast<std::size_t>(b));
    std::vector<IdLossResult> id_results(static_cast<std::size_t>(b));
    Matrix embeddings(b, d);

    BatchLoss out;
    double inv_b = 1.0 / static_cast<double>(b);
    for (int i = 0; i < b; ++i) {
        ForwardResult f = grads ? model.forward_cached(inputs[static_cast<std::size_t>(i)],
                                                       caches[static_cast<std::size_t>(i)])
                                : model.forward(inputs[static_cast<std::size_t>(i)]);
        id_results[static_cast<std::size_t>(i)] =
            id_loss(f.logits, labels[static_cast<std::size_t>(i)]);
        out.id += id_results[static_cast<std::size_t>(i)].loss * inv_b;
        for (int k = 0; k < d; ++k) embeddings.at(i, k) = f.embedding[static_cast<std::size_t>(k)];
    }
    TripletResult triplet = batch_hard_triplet(embeddings, labels, margin);
    out.triplet = triplet.loss;
    out.total = out.id + out.triplet;

    if (grads) {
        for (int i = 0; i < b; ++i) {
            std::vector<double> d_logits = id_results[static_cast<std::size_t>(i)].grad;
            for (auto& g : d_logits) g *= inv_b;
            std::vector<double> d_emb(static_cast<std::size_t>(d));
            for (int k = 0; k < d; ++k) d_emb[static_cast<std::size_t>(k)] = triplet.grads.at(i, k);
            model.backward(caches[static_cast<std::size_t>(i)], d_logits, d_emb, *grads);
        }
    }
    return out;
}

struct TrainConfig {
    int epochs = 10;
    int batch_p = 4; // identities per batch
    int batch_k = 4; // instances per identity
    double margin = 0.3;
    double learning_rate = 0.05;
    double momentum = 0.9;
    double weight_decay = 0.0005;
    ErasingConfig erasing;
    std::uint64_t seed = 1;
};

struct EpochStats {
    double id_loss = 0.0;
    double triplet_loss = 0.0;
    double total = 0.0;
};

struct TrainLog {
    std::vector<EpochStats> epochs;
};

inline std::string train_log_to_csv(const TrainLog& log) {
    std::string out = "epoch,id_loss,triplet_loss,total\n";
    for (std::size_t e = 0; e < log.epochs.size(); ++e) {
        out += std::to_string(e + 1);
        out += ',';
        out += format_double(log.epochs[e].id_loss);
        out += ',';
        out += format_double(log.epochs[e].triplet_loss);
        out += ',';
        out += format_double(log.epochs[e].total);
        out += '\n';
    }
    return out;
}

inline void write_train_log_csv(const TrainLog& log, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) raise(ErrorKind::io_error, "cannot open for writing: " + path);
    std::string text = train_log_to_csv(log);
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) raise(ErrorKind::io_error, "write failed: " + path);
}

// SGD with momentum and L2 weight decay over PK-sampled batches. Update rule
// per parameter: v <- momentum * v + (grad + weight_decay * w); w <- w - lr * v.
// Deterministic given the seed (single-worker execution).
inline TrainLog train(EmbeddingModel& model, const DatasetManifest& manifest,
                      const TrainConfig& config) {
    TrainLog log;
    if (config.epochs == 0) return log;
    if (config.batch_p < 2 || config.batch_k < 2)
        raise(ErrorKind::bad_config, "PK batch needs P >= 2 and K >= 2");
    if (config.margin < 0.0) raise(ErrorKind::bad_config, "margin must be >= 0");

    auto ids = manifest.identities_in_order();
    if (static_cast<int>(ids.size()) < config.batch_p)
        raise(ErrorKind::degenerate_batch, "manifest has fewer identities than P");
    if (static_cast<int>(ids.size()) > model.config().num_identities)
        raise(ErrorKind::bad_config, "model classifier is smaller than the identity count");

    std::unordered_map<std::int32_t, int> label_of;
    for (std::size_t i = 0; i < ids.size(); ++i) label_of[ids[i]] = static_cast<int>(i);
    std::vector<std::vector<std::size_t>> records_of(ids.size());
    for (std::size_t r = 0; r < manifest.records.size(); ++r)
        records_of[static_cast<std::size_t>(label_of[manifest.records[r].identity_id])].push_back(r);
    for (std::size_t i = 0; i < ids.size(); ++i)
        if (static_cast<int>(records_of[i].size()) < config.batch_k)
            raise(ErrorKind::degenerate_batch,
                  "identity " + std::to_string(ids[i]) + " has fewer than K images");

    const int ih = model.config().input_height, iw = model.config().input_width;
    Rng rng(config.seed);
    ModelGradients grads = model.make_gradients();
    auto params = model.parameter_vectors();
    std::vector<std::vector<double>> velocity;
    for (const auto* p : params) velocity.emplace_back(p->size(), 0.0);

    const int steps = static_cast<int>(ids.size()) / config.batch_p;
    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        std::vector<int> order(ids.size());
        std::iota(order.begin(), order.end(), 0);
        for (std::size_t i = order.size(); i > 1; --i)
            std::swap(order[i - 1], order[static_cast<std::size_t>(rng.next_below(i))]);

        EpochStats stats;
        for (int step = 0; step < steps; ++step) {
            std::vector<Tensor> inputs;
            std::vector<int> labels;
            inputs.reserve(static_cast<std::size_t>(config.batch_p) * config.batch_k);
            for (int p = 0; p < config.batch_p; ++p) {
                int label = order[static_cast<std::size_t>(step * config.batch_p + p)];
                auto recs = records_of[static_cast<std::size_t>(label)];
                for (int k = 0; k < config.batch_k; ++k) {
                    std::size_t j =
                        static_cast<std::size_t>(k) +
                        static_cast<std::size_t>(rng.next_below(recs.size() - static_cast<std::size_t>(k)));
                    std::swap(recs[static_cast<std::size_t>(k)], recs[j]);
                    const ImageRecord& record = manifest.records[recs[static_cast<std::size_t>(k)]];
                    Image img = render_record_at(record, iw, ih);
                    inputs.push_back(preprocess(img, ih, iw, true, config.erasing, rng));
                    labels.push_back(label);
                }
            }

            grads.zero();
            BatchLoss loss = compute_batch(model, inputs, labels, config.margin, &grads);
            if (!std::isfinite(loss.total))
                raise(ErrorKind::non_finite_loss, "epoch " + std::to_string(epoch + 1) + " step " +
                                                      std::to_string(step + 1) +
                                                      ": loss is not finite");
            stats.id_loss += loss.id;
            stats.triplet_loss += loss.triplet;

            for (std::size_t blk = 0; blk < params.size(); ++blk) {
                auto& w = *params[blk];
                auto& v = velocity[blk];
                const auto& g = grads.blocks[blk];
                for (std::size_t i = 0; i < w.size(); ++i) {
                    v[i] = config.momentum * v[i] + (g[i] + config.weight_decay * w[i]);
                    w[i] -= config.learning_rate * v[i];
                }
            }
        }
        stats.id_loss /= steps;
        stats.triplet_loss /= steps;
        stats.total = stats.id_loss + stats.triplet_loss;
        log.epochs.push_back(stats);
    }
    return log;
}

} // namespace gpr
