#pragma once

// Cyclic Jacobi eigenvalue iteration for small symmetric matrices. Test-only:
// used to check positive semidefiniteness of Gram matrices numerically.

#include <cmath>
#include <vector>

#include "gpr/matrix.hpp"

namespace gpr_test {

inline std::vector<double> symmetric_eigenvalues(gpr::Matrix a) {
    const int n = a.rows;
    for (int sweep = 0; sweep < 64; ++sweep) {
        double off = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) off += a.at(i, j) * a.at(i, j);
        if (off < 1e-26) break;
        for (int p = 0; p < n; ++p) {
            for (int q = p + 1; q < n; ++q) {
                double apq = a.at(p, q);
                if (std::fabs(apq) < 1e-300) continue;
                double theta = (a.at(q, q) - a.at(p, p)) / (2.0 * apq);
                double t = (theta >= 0 ? 1.0 : -1.0) /
                           (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
                double c = 1.0 / std::sqrt(t * t + 1.0);
                double s = t * c;
                for (int k = 0; k < n; ++k) {
                    double akp = a.at(k, p), akq = a.at(k, q);
                    a.at(k, p) = c * akp - s * akq;
                    a.at(k, q) = s * akp + c * akq;
                }
                for (int k = 0; k < n; ++k) {
                    double apk = a.at(p, k), aqk = a.at(q, k);
                    a.at(p, k) = c * apk - s * aqk;
                    a.at(q, k) = s * apk + c * aqk;
                }
            }
        }
    }
    std::vector<double> eig(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) eig[static_cast<std::size_t>(i)] = a.at(i, i);
    return eig;
}

inline double smallest_eigenvalue(const gpr::Matrix& a) {
    auto eig = symmetric_eigenvalues(a);
    double mn = eig.empty() ? 0.0 : eig[0];
    for (double v : eig) mn = std::min(mn, v);
    return mn;
}

} // namespace gpr_test
