#pragma once

#include <cstdint>
#include <vector>

#include "ntk/kernel_matrix.hpp"
#include "ntk/tensor.hpp"

namespace ntk {

enum class CntkArch {
    Vanilla,
    GlobalAveragePooling,
};

struct CntkConfig {
    int L = 1;  // number of convolution layers
    PatchGeometry geom;
    CntkArch arch = CntkArch::Vanilla;

    CntkConfig(int depth, PatchGeometry g, CntkArch a) : L(depth), geom(g), arch(a) {
        if (L < 1) throw std::invalid_argument("CntkConfig: depth must be >= 1");
    }
};

// Layer state of the convolutional recursion for one input pair: the three
// covariance streams and the running kernel tensor for the cross pair.
struct CntkPairState {
    PatchKernelTensor sigma_xx;
    PatchKernelTensor sigma_xy;
    PatchKernelTensor sigma_yy;
    PatchKernelTensor theta;
    int h = 0;
};

// Layer-0 state: sigma tensors from patch_inner_sum; theta starts at
// sigma_xy for the vanilla head and at zero under global average pooling
// (first layer untrained there).
CntkPairState cntk_layer0(const ImageTensor& x, const ImageTensor& xp, const CntkConfig& cfg);

// One layer of the recursion. Per entry, Lambda is assembled from the three
// streams, K = (cSigma/q^2) t(Lambda) and Kdot = (cSigma/q^2) tdot(Lambda);
// the new Sigma is trace_over_patches(K). Theta advances as
// trace_over_patches(Kdot . theta + K) on interior layers; the last layer
// skips the trace, and under global average pooling also drops the +K term
// (last layer untrained).
CntkPairState cntk_step(const CntkPairState& state, const CntkConfig& cfg, bool is_last);

// Exact kernel value for one pair: trace of the final theta for Vanilla, mean
// over all entries for GlobalAveragePooling. Internally uses the streamlined
// path that keeps only the per-position diagonals of the same-input streams.
double cntk_pair(const ImageTensor& x, const ImageTensor& xp, const CntkConfig& cfg);

// Same value through the literal layer0/step state recursion with all three
// streams materialized. Reference path for tests; memory O(P^2 Q^2) per
// stream.
double cntk_pair_reference(const ImageTensor& x, const ImageTensor& xp, const CntkConfig& cfg);

// Oracle variant: the same recursion with Monte Carlo expectations in place
// of the closed forms. Deterministic given seed.
double cntk_pair_naive(const ImageTensor& x, const ImageTensor& xp, const CntkConfig& cfg,
                       std::int64_t mc_samples, std::uint64_t seed);

// Gram matrix of cntk_pair values; per-input diagonal streams are computed
// once and reused across pairs.
KernelMatrix cntk_matrix(const std::vector<ImageTensor>& inputs, const CntkConfig& cfg);

// Kernel values between two input lists (rows index `a`, columns `b`).
std::vector<double> cntk_cross(const std::vector<ImageTensor>& a,
                               const std::vector<ImageTensor>& b, const CntkConfig& cfg);

}  // namespace ntk
