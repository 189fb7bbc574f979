#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace ntk {

// P x Q x C image, row-major by (i, j, channel).
struct ImageTensor {
    int P = 0;
    int Q = 0;
    int C = 0;
    std::vector<double> data;

    ImageTensor() = default;
    ImageTensor(int p, int q, int c)
        : P(p), Q(q), C(c), data(static_cast<std::size_t>(p) * q * c, 0.0) {
        if (p <= 0 || q <= 0 || c <= 0)
            throw std::invalid_argument("ImageTensor: dimensions must be positive");
    }

    double& at(int i, int j, int c) {
        return data[(static_cast<std::size_t>(i) * Q + j) * C + c];
    }
    double at(int i, int j, int c) const {
        return data[(static_cast<std::size_t>(i) * Q + j) * C + c];
    }
    std::size_t size() const { return data.size(); }
};

// 4th-order P x Q x P x Q tensor indexed by (i, j, i', j'), row-major.
// Holds the per-layer covariance blocks of the convolutional recursion.
struct PatchKernelTensor {
    int P = 0;
    int Q = 0;
    std::vector<double> data;

    PatchKernelTensor() = default;
    PatchKernelTensor(int p, int q)
        : P(p), Q(q), data(static_cast<std::size_t>(p) * q * p * q, 0.0) {
        if (p <= 0 || q <= 0)
            throw std::invalid_argument("PatchKernelTensor: dimensions must be positive");
    }

    std::size_t idx(int i, int j, int ip, int jp) const {
        return ((static_cast<std::size_t>(i) * Q + j) * P + ip) * Q + jp;
    }
    double& at(int i, int j, int ip, int jp) { return data[idx(i, j, ip, jp)]; }
    double at(int i, int j, int ip, int jp) const { return data[idx(i, j, ip, jp)]; }
};

// Symmetric 2x2 covariance [[s11, s12], [s12, s22]].
struct Cov2 {
    double s11 = 0.0;
    double s12 = 0.0;
    double s22 = 0.0;
};

// PSD up to numerical slack 1e-12 * max(s11, s22).
bool cov2_is_psd(const Cov2& c);

// Filter geometry: odd filter side q, stride 1, zero padding. The offset
// window is [-(q-1)/2, (q-1)/2] in both directions.
struct PatchGeometry {
    int q = 3;

    explicit PatchGeometry(int filter = 3) : q(filter) {
        if (q <= 0 || q % 2 == 0)
            throw std::invalid_argument("PatchGeometry: filter side must be odd and positive");
    }
    int half() const { return (q - 1) / 2; }
};

// Entry (i,j,i',j') = sum over channels and in-range offsets (a,b) of
// x[i+a, j+b] * x'[i'+a, j'+b]; out-of-range terms are zero (zero padding).
PatchKernelTensor patch_inner_sum(const ImageTensor& x, const ImageTensor& xp,
                                  const PatchGeometry& geom);

// Entry (i,j,i',j') = sum over in-range offsets (a,b) of T[i+a, j+b, i'+a, j'+b].
// Carries no normalization factor; callers scale where the recursion demands.
PatchKernelTensor trace_over_patches(const PatchKernelTensor& T, const PatchGeometry& geom);

// Sum of the (i,j,i,j) entries.
double trace_diag(const PatchKernelTensor& T);

// Mean over all P^2 Q^2 entries.
double mean_all(const PatchKernelTensor& T);

}  // namespace ntk
