#pragma once

#include <cstdint>
#include <span>
#include <variant>
#include <vector>

#include "ntk/kernel_matrix.hpp"
#include "ntk/tensor.hpp"

namespace ntk {

// widths = {d0, d1, ..., dL}: input dimension followed by L hidden widths.
// Output is scalar. Forward pass carries the sqrt(cSigma/d_h) factor; stored
// weights stay standard normal.
struct MlpArch {
    std::vector<int> widths;

    int depth() const { return static_cast<int>(widths.size()) - 1; }
};

enum class CnnHead {
    Dense,      // one fully-connected layer over all positions and channels
    GapScalar,  // global average pool per channel, then a scalar weight each;
                // first conv layer and head are untrained under this head
};

// channels = {C0, C1, ..., CL}: input channels followed by L conv layer
// channel counts. Filters are q x q, stride 1, zero padding; the
// sqrt(cSigma/(C_h q^2)) factor sits after each activation.
struct CnnArch {
    int P = 0;
    int Q = 0;
    std::vector<int> channels;
    PatchGeometry geom;
    CnnHead head = CnnHead::Dense;

    int depth() const { return static_cast<int>(channels.size()) - 1; }
};

using NetArch = std::variant<MlpArch, CnnArch>;

// All weights of a finite network, flat, partitioned by layer. Layer h
// occupies [offsets[h-1], offsets[h]) for h = 1..L+1.
struct FiniteNetParams {
    NetArch arch;
    std::vector<double> theta;
    std::vector<std::size_t> offsets;  // L+2 entries, offsets[0] = 0
    std::uint64_t seed = 0;

    std::size_t layer_begin(int h) const { return offsets[h - 1]; }
    std::size_t layer_end(int h) const { return offsets[h]; }
    int depth() const;
};

using GradientVector = std::vector<double>;

// Standard-normal weights, reproducible per seed.
FiniteNetParams init_net(const NetArch& arch, std::uint64_t seed);

double forward(const FiniteNetParams& params, std::span<const double> x);
double forward(const FiniteNetParams& params, const ImageTensor& x);

// Exact reverse-mode gradient of the scalar output with respect to every
// weight (untrained layers included). The derivative of ReLU at 0 is taken
// as 0.
GradientVector param_gradient(const FiniteNetParams& params, std::span<const double> x);
GradientVector param_gradient(const FiniteNetParams& params, const ImageTensor& x);

// Whether layer h's weights receive gradient updates: always true except the
// first conv layer and the scalar head of a GapScalar network, which stay at
// their initialization to match the pooled kernel.
bool layer_is_trained(const NetArch& arch, int h);

// Gradient inner product over trained layers only (all layers for MLPs and
// dense-head CNNs). For MLPs this uses the layerwise factorization
//   sum_h <g^(h-1)(x), g^(h-1)(x')> . <b^(h)(x), b^(h)(x')>
// which avoids materializing the gradients.
double empirical_kernel(const FiniteNetParams& params, std::span<const double> x,
                        std::span<const double> xp);
double empirical_kernel(const FiniteNetParams& params, const ImageTensor& x,
                        const ImageTensor& xp);

struct McEstimate {
    double mean = 0.0;
    double stderr_ = 0.0;
};

// Sample mean and standard error of empirical_kernel over fresh
// initializations seeded from base_seed.
McEstimate mc_ntk_estimate(const NetArch& arch, std::span<const double> x,
                           std::span<const double> xp, int num_seeds, std::uint64_t base_seed);
McEstimate mc_ntk_estimate(const NetArch& arch, const ImageTensor& x, const ImageTensor& xp,
                           int num_seeds, std::uint64_t base_seed);

// Gram matrix of empirical_kernel at one fixed initialization. Gradients are
// streamed in blocks so memory stays bounded for wide networks.
KernelMatrix random_feature_kernel(const FiniteNetParams& params,
                                   const std::vector<ImageTensor>& inputs);
KernelMatrix random_feature_kernel(const FiniteNetParams& params,
                                   const std::vector<std::vector<double>>& inputs);

struct TrainState {
    FiniteNetParams params;
    double kappa = 1.0;
    double eta = 1.0;
    std::vector<double> outputs;  // u(t): kappa * f at each training input
    double loss = 0.0;            // 0.5 * sum (u_i - y_i)^2
    long steps = 0;
};

// Full-batch gradient descent on the squared loss of f_nn = kappa * f.
// Mutates and returns the state; untrained layers stay fixed. Aborts with a
// diagnostic if the loss stops being finite.
TrainState& train_full_batch(TrainState& state, const std::vector<std::vector<double>>& x,
                             const std::vector<double>& y, long steps);

// Runs until loss <= target_loss or max_steps, whichever first.
TrainState& train_to_loss(TrainState& state, const std::vector<std::vector<double>>& x,
                          const std::vector<double>& y, double target_loss, long max_steps);

}  // namespace ntk
