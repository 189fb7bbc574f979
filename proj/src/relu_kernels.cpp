#include "ntk/relu_kernels.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ntk/rng.hpp"

namespace ntk {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 2.0 * kPi;
}  // namespace

ReluExpectationPair relu_expectations(const Cov2& lambda) {
    if (!std::isfinite(lambda.s11) || !std::isfinite(lambda.s12) || !std::isfinite(lambda.s22))
        throw std::invalid_argument("relu_expectations: non-finite covariance");
    // One sqrt of the product, not sqrt(s11)*sqrt(s22): sqrt(v*v) == v
    // exactly, so an entry whose three components are one value lands on
    // lam == 1 with no rounding, and t below comes out as exactly half the
    // variance. acos amplifies an ulp of drift in lam near +-1 into ~1e-8,
    // so recursions that hold lam at 1 structurally depend on this.
    const double denom = std::sqrt(std::max(lambda.s11, 0.0) * std::max(lambda.s22, 0.0));
    double lam = denom > 0.0 ? lambda.s12 / denom : 0.0;
    lam = std::clamp(lam, -1.0, 1.0);
    const double angle = kPi - std::acos(lam);
    const double that = (lam * angle + std::sqrt(std::max(1.0 - lam * lam, 0.0))) / kTwoPi;
    ReluExpectationPair out;
    out.t = denom * that;
    out.tdot = angle / kTwoPi;
    return out;
}

ReluExpectationEstimate mc_relu_expectations(const Cov2& lambda, std::int64_t samples,
                                             std::uint64_t seed) {
    if (samples < 1) throw std::invalid_argument("mc_relu_expectations: samples must be >= 1");
    if (!cov2_is_psd(lambda))
        throw std::invalid_argument("mc_relu_expectations: covariance not PSD");
    // Cholesky of [[s11, s12], [s12, s22]]; a zero first marginal forces a
    // zero off-diagonal (PSD), so the b term drops out.
    const double a = std::sqrt(std::max(lambda.s11, 0.0));
    const double b = a > 0.0 ? lambda.s12 / a : 0.0;
    const double c = std::sqrt(std::max(lambda.s22 - b * b, 0.0));
    GaussianRng rng(seed);
    double sum_t = 0.0, sumsq_t = 0.0;
    std::int64_t count_dot = 0;
    for (std::int64_t s = 0; s < samples; ++s) {
        const double z1 = rng.normal();
        const double z2 = rng.normal();
        const double u = a * z1;
        const double v = b * z1 + c * z2;
        const double prod = (u > 0.0 ? u : 0.0) * (v > 0.0 ? v : 0.0);
        sum_t += prod;
        sumsq_t += prod * prod;
        count_dot += (u >= 0.0 && v >= 0.0) ? 1 : 0;
    }
    const double n = static_cast<double>(samples);
    ReluExpectationEstimate out;
    out.t = sum_t / n;
    out.tdot = static_cast<double>(count_dot) / n;
    const double var_t = std::max(sumsq_t / n - out.t * out.t, 0.0);
    out.t_stderr = std::sqrt(var_t / n);
    // Bernoulli variance for the indicator product.
    out.tdot_stderr = std::sqrt(std::max(out.tdot * (1.0 - out.tdot), 0.0) / n);
    return out;
}

}  // namespace ntk
