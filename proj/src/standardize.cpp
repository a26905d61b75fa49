#include "imgep/standardize.hpp"

#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace imgep::features {

Eigen::VectorXd StandardizationStats::apply(const Eigen::VectorXd& v) const {
    Eigen::VectorXd out = ((v - mean).array() / std.array()).matrix();
    for (Eigen::Index i = 0; i < out.size(); ++i)
        if (degenerate[static_cast<std::size_t>(i)]) out[i] = 0.0;
    return out;
}

StandardizationStats fit_standardization(const Eigen::MatrixXd& data) {
    if (data.rows() < 1) throw std::invalid_argument("standardize: need at least one row");
    StandardizationStats s;
    s.mean = data.colwise().mean().transpose();
    const Eigen::MatrixXd centered = data.rowwise() - s.mean.transpose();
    s.std = (centered.array().square().colwise().sum() / static_cast<double>(data.rows())).sqrt().transpose();
    s.degenerate.resize(static_cast<std::size_t>(s.std.size()));
    for (Eigen::Index i = 0; i < s.std.size(); ++i) {
        s.degenerate[static_cast<std::size_t>(i)] = s.std[i] < kStdFloor;
        if (s.std[i] < kStdFloor) s.std[i] = kStdFloor;
    }
    return s;
}

Standardized standardize(const Eigen::MatrixXd& data) {
    Standardized out;
    out.stats = fit_standardization(data);
    out.data = (data.rowwise() - out.stats.mean.transpose()).array().rowwise() / out.stats.std.transpose().array();
    // Constant columns map to exact zeros rather than rounding noise / floor.
    for (Eigen::Index c = 0; c < out.data.cols(); ++c)
        if (out.stats.degenerate[static_cast<std::size_t>(c)]) out.data.col(c).setZero();
    return out;
}

Eigen::VectorXd PcaBasis::project(const Eigen::VectorXd& v) const { return components * standardization.apply(v); }

PcaBasis pca_fit(const Eigen::MatrixXd& data, int out_dims) {
    if (data.rows() < 5) throw std::invalid_argument("pca_fit: need at least 5 samples");
    if (out_dims < 1 || out_dims > data.cols()) throw std::invalid_argument("pca_fit: invalid out_dims");

    Standardized z = standardize(data);
    const Eigen::MatrixXd cov = (z.data.transpose() * z.data) / static_cast<double>(data.rows());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
    if (solver.info() != Eigen::Success) throw std::runtime_error("pca_fit: eigendecomposition failed");

    // Eigen returns ascending eigenvalues.
    const Eigen::VectorXd& values = solver.eigenvalues();
    const Eigen::MatrixXd& vectors = solver.eigenvectors();
    const Eigen::Index d = values.size();
    const double largest = std::max(values[d - 1], 0.0);

    PcaBasis basis;
    basis.standardization = std::move(z.stats);
    basis.components = Eigen::MatrixXd::Zero(out_dims, d);
    basis.explained_variance = Eigen::VectorXd::Zero(out_dims);
    for (int i = 0; i < out_dims; ++i) {
        const Eigen::Index src = d - 1 - i;
        if (largest <= 0.0 || values[src] <= 1e-12 * largest) break;
        Eigen::VectorXd dir = vectors.col(src);
        // Sign convention: largest-magnitude entry positive, so fits are reproducible.
        Eigen::Index arg = 0;
        dir.cwiseAbs().maxCoeff(&arg);
        if (dir[arg] < 0.0) dir = -dir;
        basis.components.row(i) = dir.transpose();
        basis.explained_variance[i] = values[src];
        basis.rank = i + 1;
    }
    return basis;
}

EvalEmbedding pca_project(const PcaBasis& basis, const Eigen::VectorXd& v) {
    if (basis.components.rows() != 4) throw std::invalid_argument("pca_project: basis must have 4 components");
    const Eigen::VectorXd p = basis.project(v);
    return {p[0], p[1], p[2], p[3]};
}

}  // namespace imgep::features
