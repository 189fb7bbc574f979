#include "ntk/kernel_matrix.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

namespace ntk {

const char* kernel_kind_name(KernelKind kind) {
    switch (kind) {
        case KernelKind::FcNtk: return "fc-ntk";
        case KernelKind::CntkVanilla: return "cntk-vanilla";
        case KernelKind::CntkGap: return "cntk-gap";
        case KernelKind::RandomFeature: return "random-feature";
    }
    throw std::invalid_argument("kernel_kind_name: unknown kind");
}

double max_asymmetry(const KernelMatrix& H) {
    double worst = 0.0;
    for (std::size_t i = 0; i < H.n; ++i)
        for (std::size_t j = i + 1; j < H.n; ++j)
            worst = std::max(worst, std::fabs(H.at(i, j) - H.at(j, i)));
    return worst;
}

double min_eigenvalue(const KernelMatrix& H) {
    if (H.n == 0) throw std::invalid_argument("min_eigenvalue: empty matrix");
    Eigen::MatrixXd M(H.n, H.n);
    for (std::size_t i = 0; i < H.n; ++i)
        for (std::size_t j = 0; j < H.n; ++j) M(i, j) = H.at(i, j);
    Eigen::MatrixXd S = 0.5 * (M + M.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(S, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("min_eigenvalue: eigensolver failed");
    return solver.eigenvalues()(0);
}

}  // namespace ntk
