#pragma once

#include <span>
#include <vector>

#include "ntk/kernel_matrix.hpp"

namespace ntk {

// Row i is -0.1 everywhere except 0.9 at position labels[i]. Labels are
// 0-based class indices below k. Row-major n x k.
std::vector<double> encode_labels(const std::vector<int>& labels, int k);

struct FittedPredictor {
    std::size_t n = 0;
    int k = 0;
    std::vector<double> alpha;  // row-major n x k, solves (H + ridge I) alpha = Y
    double ridge = 0.0;
};

// Solves (H + ridge I) alpha = Y with a Cholesky factorization; if that
// fails, falls back to a pivoted least-squares solve with a warning on
// stderr, except that a rank-deficient system with ridge == 0 is an error
// (duplicate training points make the kernel singular).
FittedPredictor fit(const KernelMatrix& H, const std::vector<double>& Y, int k, double ridge);

// k_row holds the kernel values between one test point and the n training
// points; returns k_row^T alpha, one score per class.
std::vector<double> predict(const FittedPredictor& pred, std::span<const double> k_row);

// Argmax with lowest-index tie-break.
int classify(std::span<const double> scores);

double accuracy(const std::vector<int>& predictions, const std::vector<int>& labels);

}  // namespace ntk
