#pragma once

// Brute-force retrieval oracle, written independently of gpr::evaluate and
// kept deliberately naive: explicit distance recomputation, selection-sort
// ranking, and precision@k recounted from scratch at every relevant rank.

#include <cmath>
#include <vector>

#include "gpr/eval.hpp"

namespace gpr_test {

struct OracleResult {
    double mean_ap = 0.0;
    double cmc1 = 0.0, cmc5 = 0.0;
    int evaluated = 0;
    int skipped = 0;
};

inline OracleResult oracle_evaluate(const gpr::EmbeddingSet& queries,
                                    const gpr::EmbeddingSet& gallery) {
    OracleResult out;
    double ap_sum = 0.0;
    int hit1 = 0, hit5 = 0;

    for (const auto& q : queries.entries) {
        // keep indices that survive the same-id+same-camera exclusion
        std::vector<int> kept;
        for (int g = 0; g < static_cast<int>(gallery.entries.size()); ++g) {
            const auto& e = gallery.entries[static_cast<std::size_t>(g)];
            if (e.identity == q.identity && e.camera == q.camera) continue;
            kept.push_back(g);
        }

        auto dist_to = [&](int g) {
            const auto& e = gallery.entries[static_cast<std::size_t>(g)];
            double acc = 0.0;
            for (std::size_t k = 0; k < q.vec.size(); ++k)
                acc += (q.vec[k] - e.vec[k]) * (q.vec[k] - e.vec[k]);
            return std::sqrt(acc);
        };

        // selection sort by (distance, gallery index)
        std::vector<int> ranked = kept;
        for (std::size_t i = 0; i < ranked.size(); ++i) {
            std::size_t best = i;
            for (std::size_t j = i + 1; j < ranked.size(); ++j) {
                double dj = dist_to(ranked[j]), db = dist_to(ranked[best]);
                if (dj < db || (dj == db && ranked[j] < ranked[best])) best = j;
            }
            std::swap(ranked[i], ranked[best]);
        }

        int relevant = 0;
        for (int g : ranked)
            relevant += (gallery.entries[static_cast<std::size_t>(g)].identity == q.identity);
        if (ranked.empty() || relevant == 0) {
            ++out.skipped;
            continue;
        }

        double ap = 0.0;
        int first = -1;
        for (std::size_t k = 0; k < ranked.size(); ++k) {
            if (gallery.entries[static_cast<std::size_t>(ranked[k])].identity != q.identity)
                continue;
            if (first < 0) first = static_cast<int>(k) + 1;
            int hits_so_far = 0; // recount precision@k from scratch
            for (std::size_t j = 0; j <= k; ++j)
                hits_so_far +=
                    (gallery.entries[static_cast<std::size_t>(ranked[j])].identity == q.identity);
            ap += static_cast<double>(hits_so_far) / static_cast<double>(k + 1);
        }
        ap_sum += ap / relevant;
        if (first >= 1 && first <= 1) ++hit1;
        if (first >= 1 && first <= 5) ++hit5;
        ++out.evaluated;
    }

    if (out.evaluated > 0) {
        out.mean_ap = ap_sum / out.evaluated;
        out.cmc1 = static_cast<double>(hit1) / out.evaluated;
        out.cmc5 = static_cast<double>(hit5) / out.evaluated;
    }
    return out;
}

} // namespace gpr_test
