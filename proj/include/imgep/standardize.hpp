#pragma once

#include <array>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace imgep::features {

inline constexpr double kStdFloor = 1e-12;

struct StandardizationStats {
    Eigen::VectorXd mean;
    Eigen::VectorXd std;  // floored at kStdFloor

    // Dimensions whose raw std was below the floor; these standardize to 0.
    std::vector<bool> degenerate;

    Eigen::VectorXd apply(const Eigen::VectorXd& v) const;
};

// Rows are samples. Population statistics, recomputed from scratch.
StandardizationStats fit_standardization(const Eigen::MatrixXd& data);

struct Standardized {
    Eigen::MatrixXd data;
    StandardizationStats stats;
};

Standardized standardize(const Eigen::MatrixXd& data);

// PCA on standardized data. Directions beyond the numerical rank are zero rows,
// so their projected coordinates are always 0.
struct PcaBasis {
    StandardizationStats standardization;
    Eigen::MatrixXd components;          // out_dims x d, rows ordered by variance
    Eigen::VectorXd explained_variance;  // out_dims, non-increasing
    int rank = 0;
    bool rank_deficient() const { return rank < components.rows(); }

    Eigen::VectorXd project(const Eigen::VectorXd& v) const;
};

// Requires at least 5 rows.
PcaBasis pca_fit(const Eigen::MatrixXd& data, int out_dims = 4);

using EvalEmbedding = std::array<double, 4>;

EvalEmbedding pca_project(const PcaBasis& basis, const Eigen::VectorXd& v);

}  // namespace imgep::features
