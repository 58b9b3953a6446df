#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "gpr/errors.hpp"
#include "gpr/format.hpp"
#include "gpr/manifest.hpp"
#include "gpr/matrix.hpp"
#include "gpr/model.hpp"
#include "gpr/parallel.hpp"
#include "gpr/render.hpp"
#include "gpr/trainer.hpp"

namespace gpr {

struct EmbeddingEntry {
    std::vector<double> vec;
    std::int32_t identity = 0;
    int camera = 0;
};

struct EmbeddingSet {
    std::vector<EmbeddingEntry> entries;

    int dim() const { return entries.empty() ? 0 : static_cast<int>(entries.front().vec.size()); }
    std::size_t size() const { return entries.size(); }
};

inline Matrix pairwise_distances(const EmbeddingSet& queries, const EmbeddingSet& gallery) {
    if (!queries.entries.empty() && !gallery.entries.empty() && queries.dim() != gallery.dim())
        raise(ErrorKind::dim_mismatch, "query and gallery embeddings have different dimensions");
    Matrix out(static_cast<int>(queries.size()), static_cast<int>(gallery.size()));
    for (std::size_t q = 0; q < queries.size(); ++q) {
        const auto& qv = queries.entries[q].vec;
        for (std::size_t g = 0; g < gallery.size(); ++g) {
            const auto& gv = gallery.entries[g].vec;
            double acc = 0.0;
            for (std::size_t k = 0; k < qv.size(); ++k) {
                double d = qv[k] - gv[k];
                acc += d * d;
            }
            out.at(static_cast<int>(q), static_cast<int>(g)) = std::sqrt(acc);
        }
    }
    return out;
}

// AP = (1/R) * sum over relevant ranks k of precision@k, over a ranked
// relevance list.
inline double average_precision(const std::vector<int>& ranked_relevance) {
    int relevant_total = 0;
    for (int f : ranked_relevance) relevant_total += (f != 0);
    if (relevant_total == 0)
        raise(ErrorKind::no_relevant, "ranked list contains no relevant item");
    double ap = 0.0;
    int hits = 0;
    for (std::size_t k = 0; k < ranked_relevance.size(); ++k) {
        if (ranked_relevance[k] != 0) {
            ++hits;
            ap += static_cast<double>(hits) / static_cast<double>(k + 1);
        }
    }
    return ap / relevant_total;
}

struct EvalReport {
    double mean_ap = 0.0;
    std::vector<std::pair<int, double>> cmc; // (rank, fraction), ascending ranks
    int queries_evaluated = 0;
    int queries_skipped = 0;

    double cmc_at(int rank) const {
        for (const auto& [r, v] : cmc)
            if (r == rank) return v;
        raise(ErrorKind::bad_config, "rank " + std::to_string(rank) + " was not evaluated");
    }
};

// Retrieval protocol: rank the gallery by ascending distance (ties by
// gallery index), drop gallery entries sharing BOTH identity and camera
// with the query, relevance = same identity. Queries left without any
// relevant candidate are skipped and counted.
inline EvalReport evaluate(const EmbeddingSet& queries, const EmbeddingSet& gallery,
                           const std::vector<int>& ranks = {1, 5}) {
    if (queries.entries.empty() || gallery.entries.empty())
        raise(ErrorKind::empty_slice, "queries and gallery must be non-empty");
    if (queries.dim() != gallery.dim())
        raise(ErrorKind::dim_mismatch, "query and gallery embeddings have different dimensions");

    std::vector<int> sorted_ranks = ranks;
    std::sort(sorted_ranks.begin(), sorted_ranks.end());

    EvalReport report;
    double ap_sum = 0.0;
    std::vector<int> first_hit_counts(sorted_ranks.size(), 0);

    for (const auto& q : queries.entries) {
        std::vector<std::pair<double, std::size_t>> order;
        order.reserve(gallery.size());
        for (std::size_t g = 0; g < gallery.size(); ++g) {
            const auto& e = gallery.entries[g];
            if (e.identity == q.identity && e.camera == q.camera) continue;
            double acc = 0.0;
            for (std::size_t k = 0; k < q.vec.size(); ++k) {
                double d = q.vec[k] - e.vec[k];
                acc += d * d;
            }
            order.emplace_back(std::sqrt(acc), g);
        }
        if (order.empty()) { // EmptyGalleryAfterExclusion
            ++report.queries_skipped;
            continue;
        }
        std::sort(order.begin(), order.end());

        int relevant_total = 0;
        for (const auto& [dist, g] : order)
            relevant_total += (gallery.entries[g].identity == q.identity);
        if (relevant_total == 0) {
            ++report.queries_skipped;
            continue;
        }

        double ap = 0.0;
        int hits = 0;
        int first_rank = 0;
        for (std::size_t k = 0; k < order.size(); ++k) {
            if (gallery.entries[order[k].second].identity == q.identity) {
                ++hits;
                ap += static_cast<double>(hits) / static_cast<double>(k + 1);
                if (first_rank == 0) first_rank = static_cast<int>(k + 1);
            }
        }
        ap_sum += ap / relevant_total;
        for (std::size_t r = 0; r < sorted_ranks.size(); ++r)
            if (first_rank <= sorted_ranks[r]) ++first_hit_counts[r];
        ++report.queries_evaluated;
    }

    if (report.queries_evaluated > 0) {
        report.mean_ap = ap_sum / report.queries_evaluated;
        for (std::size_t r = 0; r < sorted_ranks.size(); ++r)
            report.cmc.emplace_back(sorted_ranks[r],
                                    static_cast<double>(first_hit_counts[r]) /
                                        report.queries_evaluated);
    } else {
        for (int r : sorted_ranks) report.cmc.emplace_back(r, 0.0);
    }
    return report;
}

inline std::string eval_report_to_csv(const EvalReport& report) {
    std::string out = "metric,value\n";
    out += "mAP," + format_double(report.mean_ap) + "\n";
    for (const auto& [rank, value] : report.cmc)
        out += "cmc@" + std::to_string(rank) + "," + format_double(value) + "\n";
    out += "queries_evaluated," + std::to_string(report.queries_evaluated) + "\n";
    out += "queries_skipped," + std::to_string(report.queries_skipped) + "\n";
    return out;
}

inline void write_eval_report_csv(const EvalReport& report, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) raise(ErrorKind::io_error, "cannot open for writing: " + path);
    std::string text = eval_report_to_csv(report);
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) raise(ErrorKind::io_error, "write failed: " + path);
}

// Embeds every record of the manifest (eval-mode preprocessing, no erasing)
// in manifest order.
inline EmbeddingSet embed_manifest(const EmbeddingModel& model, const DatasetManifest& manifest,
                                   int workers = 1) {
    const int ih = model.config().input_height, iw = model.config().input_width;
    EmbeddingSet set;
    set.entries.resize(manifest.records.size());
    ErasingConfig no_erase;
    parallel_for(manifest.records.size(), workers, [&](std::size_t i) {
        const ImageRecord& r = manifest.records[i];
        Image img = render_record_at(r, iw, ih);
        Rng rng(0); // unused in eval mode
        Tensor t = preprocess(img, ih, iw, false, no_erase, rng);
        ForwardResult f = model.forward(t);
        set.entries[i] = {std::move(f.embedding), r.identity_id, r.camera_id};
    });
    return set;
}

// Deterministic query pick: up to per_id entries per identity, chosen by
// seed; the full set serves as the gallery under the exclusion rule.
inline EmbeddingSet pick_queries(const EmbeddingSet& set, int per_id, std::uint64_t seed) {
    std::unordered_map<std::int32_t, std::vector<std::size_t>> by_id;
    std::vector<std::int32_t> id_order;
    for (std::size_t i = 0; i < set.entries.size(); ++i) {
        auto id = set.entries[i].identity;
        if (!by_id.count(id)) id_order.push_back(id);
        by_id[id].push_back(i);
    }
    EmbeddingSet queries;
    for (auto id : id_order) {
        auto idx = by_id[id];
        Rng rng(seed_mix(seed, static_cast<std::uint64_t>(id)));
        int take = std::min<int>(per_id, static_cast<int>(idx.size()));
        for (int k = 0; k < take; ++k) {
            std::size_t j = static_cast<std::size_t>(k) +
                            static_cast<std::size_t>(rng.next_below(idx.size() - static_cast<std::size_t>(k)));
            std::swap(idx[static_cast<std::size_t>(k)], idx[j]);
            queries.entries.push_back(set.entries[idx[static_cast<std::size_t>(k)]]);
        }
    }
    return queries;
}

} // namespace gpr
