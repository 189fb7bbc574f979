#pragma once

#include <span>
#include <vector>

#include "ntk/kernel_matrix.hpp"

namespace ntk {

// Full record of the fully-connected kernel recursion for one input pair:
// covariances Sigma^(0..L), derivative covariances Sigmadot^(1..L+1) with
// Sigmadot^(L+1) = 1 by convention, and the kernel value theta.
struct FcKernelTrace {
    int L = 0;
    std::vector<double> sigmas;       // Sigma^(h)(x, x'), h = 0..L
    std::vector<double> sigma_dots;   // Sigmadot^(h)(x, x'), h = 1..L+1
    std::vector<double> sigmas_xx;    // Sigma^(h)(x, x), h = 0..L
    std::vector<double> sigmas_yy;    // Sigma^(h)(x', x'), h = 0..L
    double theta = 0.0;
};

// Exact kernel for an L-hidden-layer ReLU network on a pair of inputs:
//   Sigma^(0) = x . x'
//   Sigma^(h) = cSigma * t(Lambda^(h)),  Sigmadot^(h) = cSigma * tdot(Lambda^(h))
//   theta     = sum_{h=1}^{L+1} Sigma^(h-1) * prod_{h'=h}^{L+1} Sigmadot^(h')
// where Lambda^(h) collects the three layer-(h-1) covariance streams.
FcKernelTrace ntk_pair(std::span<const double> x, std::span<const double> xp, int L);

// Gram matrix of ntk_pair values. Upper triangle computed, then mirrored;
// the per-input diagonal streams are computed once and shared.
KernelMatrix ntk_matrix(const std::vector<std::vector<double>>& inputs, int L);

// Rows of kernel values between two input lists (rows index `a`, columns `b`).
std::vector<double> ntk_cross(const std::vector<std::vector<double>>& a,
                              const std::vector<std::vector<double>>& b, int L);

}  // namespace ntk
