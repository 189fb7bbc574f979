#include "ntk/kernel_regression.hpp"

#include <Eigen/Dense>

#include <cstdio>
#include <stdexcept>

namespace ntk {

std::vector<double> encode_labels(const std::vector<int>& labels, int k) {
    if (k < 1) throw std::invalid_argument("encode_labels: need at least one class");
    std::vector<double> Y(labels.size() * static_cast<std::size_t>(k), -0.1);
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] < 0 || labels[i] >= k)
            throw std::invalid_argument("encode_labels: label out of range");
        Y[i * k + labels[i]] = 0.9;
    }
    return Y;
}

FittedPredictor fit(const KernelMatrix& H, const std::vector<double>& Y, int k, double ridge) {
    if (k < 1) throw std::invalid_argument("fit: need at least one class column");
    if (ridge < 0.0) throw std::invalid_argument("fit: ridge must be nonnegative");
    if (Y.size() != H.n * static_cast<std::size_t>(k))
        throw std::invalid_argument("fit: label matrix size does not match the kernel");

    const Eigen::Index n = static_cast<Eigen::Index>(H.n);
    Eigen::MatrixXd A = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                                       Eigen::RowMajor>>(H.entries.data(), n, n);
    A.diagonal().array() += ridge;
    const Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                         Eigen::RowMajor>>
        Ymap(Y.data(), n, k);

    FittedPredictor pred;
    pred.n = H.n;
    pred.k = k;
    pred.ridge = ridge;
    pred.alpha.resize(Y.size());
    Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> alpha(
        pred.alpha.data(), n, k);

    Eigen::LLT<Eigen::MatrixXd> llt(A);
    if (llt.info() == Eigen::Success) {
        alpha = llt.solve(Ymap);
        return pred;
    }

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
    if (qr.rank() < n && ridge == 0.0)
        throw std::runtime_error(
            "fit: kernel matrix is rank deficient and no ridge was given "
            "(duplicate training points?)");
    std::fprintf(stderr,
                 "warning: kernel matrix is not positive definite; "
                 "falling back to a pivoted least-squares solve\n");
    alpha = qr.solve(Ymap);
    return pred;
}

std::vector<double> predict(const FittedPredictor& pred, std::span<const double> k_row) {
    if (k_row.size() != pred.n)
        throw std::invalid_argument("predict: kernel row length does not match training size");
    std::vector<double> scores(static_cast<std::size_t>(pred.k), 0.0);
    for (std::size_t i = 0; i < pred.n; ++i)
        for (int c = 0; c < pred.k; ++c) scores[c] += k_row[i] * pred.alpha[i * pred.k + c];
    return scores;
}

int classify(std::span<const double> scores) {
    if (scores.empty()) throw std::invalid_argument("classify: no scores");
    int best = 0;
    for (std::size_t c = 1; c < scores.size(); ++c)
        if (scores[c] > scores[best]) best = static_cast<int>(c);
    return best;
}

double accuracy(const std::vector<int>& predictions, const std::vector<int>& labels) {
    if (predictions.empty() || predictions.size() != labels.size())
        throw std::invalid_argument("accuracy: need matching, non-empty prediction and label lists");
    std::size_t hit = 0;
    for (std::size_t i = 0; i < predictions.size(); ++i)
        if (predictions[i] == labels[i]) ++hit;
    return static_cast<double>(hit) / static_cast<double>(predictions.size());
}

}  // namespace ntk
