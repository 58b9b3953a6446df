#pragma once

// Central finite differences over model parameters, for checking the
// analytic gradients of the losses and the full backward pass.

#include <cmath>
#include <functional>
#include <vector>

#include "gpr/model.hpp"

namespace gpr_test {

// Relative error between an analytic gradient vector and its central
// finite-difference estimate: |a - n| / max(1, |a|, |n|), elementwise max.
inline double max_relative_error(const std::vector<double>& analytic,
                                 const std::vector<double>& numeric) {
    double worst = 0.0;
    for (std::size_t i = 0; i < analytic.size(); ++i) {
        double denom = std::max({1.0, std::fabs(analytic[i]), std::fabs(numeric[i])});
        worst = std::max(worst, std::fabs(analytic[i] - numeric[i]) / denom);
    }
    return worst;
}

// Central differences of a scalar loss with respect to every model
// parameter, in parameter_vectors() order.
inline std::vector<double> model_finite_diff(gpr::EmbeddingModel& model,
                                             const std::function<double()>& loss,
                                             double h = 1e-6) {
    std::vector<double> out;
    for (auto* block : model.parameter_vectors()) {
        for (auto& w : *block) {
            double keep = w;
            w = keep + h;
            double up = loss();
            w = keep - h;
            double down = loss();
            w = keep;
            out.push_back((up - down) / (2.0 * h));
        }
    }
    return out;
}

inline std::vector<double> flatten_gradients(const gpr::ModelGradients& grads) {
    std::vector<double> out;
    for (const auto& block : grads.blocks) out.insert(out.end(), block.begin(), block.end());
    return out;
}

} // namespace gpr_test
