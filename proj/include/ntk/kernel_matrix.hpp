#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace ntk {

enum class KernelKind : std::uint8_t {
    FcNtk = 0,
    CntkVanilla = 1,
    CntkGap = 2,
    RandomFeature = 3,
};

const char* kernel_kind_name(KernelKind kind);

// Symmetric n x n Gram matrix plus the metadata needed to reproduce it.
struct KernelMatrix {
    std::size_t n = 0;
    std::vector<double> entries;  // row-major, n*n
    KernelKind kind = KernelKind::FcNtk;
    int depth = 0;
    int filter_size = 0;           // 0 when not a convolutional kernel
    std::uint64_t input_checksum = 0;
    bool has_lambda0 = false;
    double lambda0 = 0.0;          // cached minimum eigenvalue, when computed

    KernelMatrix() = default;
    KernelMatrix(std::size_t n_, KernelKind kind_, int depth_)
        : n(n_), entries(n_ * n_, 0.0), kind(kind_), depth(depth_) {}

    double& at(std::size_t i, std::size_t j) { return entries[i * n + j]; }
    double at(std::size_t i, std::size_t j) const { return entries[i * n + j]; }
};

// Largest absolute off-diagonal asymmetry, 0 for n <= 1.
double max_asymmetry(const KernelMatrix& H);

// Minimum eigenvalue of the symmetrized matrix.
double min_eigenvalue(const KernelMatrix& H);

}  // namespace ntk
