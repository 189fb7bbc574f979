#pragma once

#include <cstdint>

#include "ntk/tensor.hpp"

namespace ntk {

// Activation normalization constant for ReLU: 1 / E[relu(z)^2], z ~ N(0,1).
// Only ReLU is supported; the closed forms below are specific to it.
inline constexpr double kCSigma = 2.0;

struct ReluExpectationPair {
    double t = 0.0;     // E[relu(u) relu(v)] under N(0, Lambda)
    double tdot = 0.0;  // E[1{u>=0} 1{v>=0}] under N(0, Lambda)
};

// Closed-form Gaussian expectations for ReLU and its derivative. With
// c1 = sqrt(s11), c2 = sqrt(s22) and correlation lam = s12/(c1 c2), clamped
// into [-1, 1]:
//   t    = c1 c2 * (lam (pi - arccos lam) + sqrt(1 - lam^2)) / (2 pi)
//   tdot = (pi - arccos lam) / (2 pi)
// When either marginal variance is 0 the correlation is taken as 0 (the
// independent limit), so t = 0 and tdot = 1/4. No cSigma factor is applied
// here; callers scale per their recursion.
ReluExpectationPair relu_expectations(const Cov2& lambda);

// Monte Carlo estimate of the same expectations, drawing (u, v) through the
// Cholesky factor of Lambda. Deterministic given seed. Standard errors of the
// two sample means are reported alongside.
struct ReluExpectationEstimate {
    double t = 0.0;
    double tdot = 0.0;
    double t_stderr = 0.0;
    double tdot_stderr = 0.0;
};

ReluExpectationEstimate mc_relu_expectations(const Cov2& lambda, std::int64_t samples,
                                             std::uint64_t seed);

}  // namespace ntk
