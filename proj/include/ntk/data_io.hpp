#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ntk/kernel_matrix.hpp"
#include "ntk/tensor.hpp"

namespace ntk {

struct LabeledDataset {
    std::vector<ImageTensor> images;
    std::vector<int> labels;  // 0-based, < k
    int k = 0;
    std::string provenance;
};

// FNV-1a over a byte range; used for dataset and payload checksums.
std::uint64_t fnv1a64(const void* data, std::size_t len, std::uint64_t h = 0xcbf29ce484222325ULL);

// Checksum over image bytes and labels, independent of provenance text.
std::uint64_t dataset_checksum(const LabeledDataset& ds);

// CIFAR-10 binary format: 3073-byte records, one label byte then 3072 pixel
// bytes (3 x 32 x 32, plane-major). Pixels map to [0,1]; `normalize` rescales
// each image to unit Euclidean norm. limit = 0 reads everything.
LabeledDataset read_cifar10_bin(const std::string& path, std::size_t limit, bool normalize);

// Average-pools non-overlapping factor x factor blocks per channel.
LabeledDataset downsample(const LabeledDataset& ds, int factor);

// Rescales every image to unit Euclidean norm (all-zero images are left
// untouched).
LabeledDataset unit_normalize(const LabeledDataset& ds);

// n unit-norm Gaussian vectors (as 1 x 1 x dim images) with labels from a
// seeded random-hyperplane rule: label = argmax_c <a_c, x> over k anchors.
LabeledDataset synthetic_sphere_dataset(std::size_t n, int dim, int k, std::uint64_t seed);

// Same, shaped as P x Q x C images.
LabeledDataset synthetic_image_dataset(std::size_t n, int P, int Q, int C, int k,
                                       std::uint64_t seed);

// Flattens an image to the vector layout the fully-connected ops expect.
std::vector<double> flatten(const ImageTensor& x);

// On-disk kernel format: "CNTK" magic, u32 version, u64 n, kind byte,
// u32 depth, n^2 little-endian doubles row-major, then a u32-length-prefixed
// UTF-8 JSON metadata document (dataset checksum, geometry, creation
// parameters, payload checksum). Round-trips bit-exactly.
void write_kernel(const std::string& path, const KernelMatrix& H);
KernelMatrix read_kernel(const std::string& path);

}  // namespace ntk
