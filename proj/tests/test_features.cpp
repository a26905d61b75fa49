#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "imgep/errors.hpp"
#include "imgep/features.hpp"
#include "imgep/standardize.hpp"

using namespace imgep;
using namespace imgep::features;

namespace {

// Blob that stays well away from the borders of a 32x32 grid.
Grid2D blob() {
    Grid2D g(32, 32);
    for (int y = 8; y < 18; ++y)
        for (int x = 9; x < 16; ++x) g(x, y) = 0.2 + 0.05 * ((x * 7 + y * 3) % 11);
    g(10, 19) = 0.9;
    return g;
}

Grid2D rotate90(const Grid2D& g) {
    Grid2D r(g.height(), g.width());
    for (int y = 0; y < g.height(); ++y)
        for (int x = 0; x < g.width(); ++x) r(g.height() - 1 - y, x) = g(x, y);
    return r;
}

Grid2D transpose(const Grid2D& g) {
    Grid2D t(g.height(), g.width());
    for (int y = 0; y < g.height(); ++y)
        for (int x = 0; x < g.width(); ++x) t(y, x) = g(x, y);
    return t;
}

void check_close(const HuMoments& a, const HuMoments& b, double tol) {
    for (int i = 0; i < 7; ++i) CHECK(std::abs(a[i] - b[i]) <= tol * std::max(1.0, std::abs(a[i])));
}

}  // namespace

TEST_CASE("hu moments of empty grids are zero") {
    for (double v : hu_moments(Grid2D(16, 16))) CHECK(v == 0.0);
    Grid2D trace(16, 16);
    trace(3, 3) = 1e-159;
    for (double v : hu_moments(trace)) CHECK(v == 0.0);
    for (double v : hu_moments_raw(trace)) CHECK(v == 0.0);
}

TEST_CASE("hu moments are translation and rotation invariant") {
    const Grid2D g = blob();
    const HuMoments base = hu_moments_raw(g);
    CHECK(base[0] > 0.0);

    Grid2D shifted(32, 32);
    for (int y = 0; y < 32; ++y)
        for (int x = 0; x < 32; ++x)
            if (x + 3 < 32 && y + 5 < 32) shifted(x + 3, y + 5) = g(x, y);
    check_close(base, hu_moments_raw(shifted), 1e-6);

    const Grid2D r90 = rotate90(g);
    check_close(base, hu_moments_raw(r90), 1e-6);
    check_close(base, hu_moments_raw(rotate90(r90)), 1e-6);
}

TEST_CASE("hu moments against a hand-computed first invariant") {
    // Two unit masses at (0,0) and (2,0): mu20 = 2, mu02 = 0, m00 = 2.
    Grid2D g(8, 8);
    g(0, 0) = 1.0;
    g(2, 0) = 1.0;
    const HuMoments h = hu_moments_raw(g);
    // eta20 = mu20 / m00^2 = 0.5; h1 = eta20 + eta02, h2 = (eta20 - eta02)^2.
    CHECK(h[0] == doctest::Approx(0.5));
    CHECK(h[1] == doctest::Approx(0.25));
}

TEST_CASE("signed log") {
    CHECK(signed_log(0.0) == 0.0);
    CHECK(signed_log(1.0) == doctest::Approx(30.0));
    CHECK(signed_log(-1.0) == doctest::Approx(-30.0));
    CHECK(signed_log(1e-3) < signed_log(1e-2));
    CHECK(signed_log(-1e-3) > signed_log(-1e-2));
}

TEST_CASE("volume and mean pixel") {
    CHECK(volume(Grid2D(32, 32, 0.0)) == 0.0);
    CHECK(volume(Grid2D(32, 32, 1.0)) == 1.0);
    Grid2D g(32, 32);
    for (int i = 0; i < 256; ++i) g.values()[static_cast<std::size_t>(i * 4)] = 0.5;
    CHECK(volume(g) == 0.25);
    Grid2D at_eps(4, 4, kVolumeEpsilon);
    CHECK(volume(at_eps) == 0.0);

    CHECK(mean_pixel(Grid2D(8, 8, 0.0)) == 0.0);
    CHECK(mean_pixel(Grid2D(8, 8, 1.0)) == 1.0);
    Grid2D half(8, 8);
    for (int y = 0; y < 4; ++y)
        for (int x = 0; x < 8; ++x) half(x, y) = 1.0;
    CHECK(mean_pixel(half) == 0.5);

    // Raising a pixel never lowers the volume.
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(0.0, 2e-5);
    Grid2D r(16, 16);
    for (double& v : r.values()) v = u(rng);
    for (int i = 0; i < 200; ++i) {
        const double before = volume(r);
        r.values()[static_cast<std::size_t>(i % 256)] += u(rng);
        REQUIRE(volume(r) >= before);
    }
}

TEST_CASE("haralick on a constant image") {
    const HaralickVector h = haralick13(Grid2D(16, 16, 0.4));
    CHECK(h[0] == doctest::Approx(1.0));  // ASM
    CHECK(h[1] == 0.0);                    // contrast
    CHECK(h[8] == 0.0);                    // entropy
    for (double v : h) CHECK(std::isfinite(v));
}

TEST_CASE("glcm of a one-pixel checkerboard") {
    Grid2D g(16, 16);
    for (int y = 0; y < 16; ++y)
        for (int x = 0; x < 16; ++x) g(x, y) = (x + y) % 2 ? 1.0 : 0.0;
    const auto m = glcm(g, 1, 0);
    // Horizontal neighbours always pair levels 0 and 31, both directions.
    CHECK(m[0 * 32 + 31] == doctest::Approx(0.5));
    CHECK(m[31 * 32 + 0] == doctest::Approx(0.5));
    const HaralickVector h = haralick_from_glcm(m, 32);
    CHECK(h[1] == doctest::Approx(961.0));  // contrast
    CHECK(h[0] == doctest::Approx(0.5));    // ASM
    CHECK(h[2] == doctest::Approx(-1.0));   // perfectly anti-correlated
    CHECK(h[10] == doctest::Approx(0.0));   // difference entropy: one difference value
}

TEST_CASE("haralick features against hand values on a 2-level matrix") {
    // p = [[0.25, 0.25], [0.25, 0.25]]: independent uniform levels.
    const std::vector<double> m{1, 1, 1, 1};
    const HaralickVector h = haralick_from_glcm(m, 2);
    CHECK(h[0] == doctest::Approx(0.25));  // ASM
    CHECK(h[1] == doctest::Approx(0.5));   // contrast: (1)^2 * 0.5
    CHECK(h[2] == doctest::Approx(0.0));   // correlation
    CHECK(h[4] == doctest::Approx(0.75));  // IDM: 0.5 * 1 + 0.5 * 1/2
    CHECK(h[8] == doctest::Approx(2.0));   // entropy, bits
    CHECK(h[11] == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(h[12] == doctest::Approx(0.0).epsilon(1e-6));
}

TEST_CASE("haralick vector is invariant under transposition") {
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 10; ++trial) {
        Grid2D g(24, 17);
        for (double& v : g.values()) v = u(rng);
        const HaralickVector a = haralick13(g), b = haralick13(transpose(g));
        for (int i = 0; i < kHaralickCount; ++i) CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-9));
    }
}

TEST_CASE("tamura features") {
    CHECK(tamura_features(Grid2D(32, 32, 0.5)).contrast == 0.0);

    auto stripes = [](int width) {
        Grid2D g(64, 64);
        for (int y = 0; y < 64; ++y)
            for (int x = 0; x < 64; ++x) g(x, y) = (x / width) % 2 ? 1.0 : 0.0;
        return g;
    };
    CHECK(tamura_features(stripes(8)).coarseness > tamura_features(stripes(1)).coarseness);

    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Grid2D noise(64, 64);
    for (double& v : noise.values()) v = u(rng);
    CHECK(tamura_features(stripes(4)).directionality > tamura_features(noise).directionality);
    const Tamura t = tamura_features(noise);
    CHECK(t.directionality >= 0.0);
    CHECK(t.directionality <= 1.0);
}

TEST_CASE("behavior and constraint features") {
    const Grid2D g = blob();
    const BehaviorVector b = behavior(g);
    CHECK(b.mean_pixel == doctest::Approx(mean_pixel(g)));
    CHECK(b.volume == doctest::Approx(volume(g)));
    const auto arr = b.to_array();
    CHECK(BehaviorVector::from_array(arr).to_array() == arr);
    for (double v : arr) CHECK(std::isfinite(v));

    const ConstraintFeatures c = constraint_features(g);
    CHECK(c.get("volume") == c.volume);
    CHECK(c.get("tamura_directionality") == c.tamura_directionality);
    CHECK_THROWS_AS(c.get("area"), UnknownFeature);
    CHECK(ConstraintFeatures::names().size() == 5);
}

TEST_CASE("standardize") {
    Eigen::MatrixXd one(1, 3);
    one << 1, 2, 3;
    CHECK(standardize(one).data.isZero());

    std::mt19937_64 rng(5);
    std::normal_distribution<double> n(3.0, 2.0);
    Eigen::MatrixXd d(50, 4);
    for (int i = 0; i < 50; ++i)
        for (int j = 0; j < 4; ++j) d(i, j) = j == 2 ? 7.0 : n(rng);
    const Standardized s = standardize(d);
    CHECK(s.stats.degenerate[2]);
    CHECK(s.data.col(2).isZero());
    for (int j : {0, 1, 3}) {
        const double mean = s.data.col(j).mean();
        const double var = (s.data.col(j).array() - mean).square().mean();
        CHECK(std::abs(mean) < 1e-9);
        CHECK(std::abs(std::sqrt(var) - 1.0) < 1e-9);
    }
    const Standardized twice = standardize(s.data);
    CHECK((twice.data - s.data).cwiseAbs().maxCoeff() < 1e-9);
    CHECK((s.stats.apply(d.row(4).transpose()) - s.data.row(4).transpose()).norm() < 1e-12);
}

TEST_CASE("pca against an eigendecomposition oracle") {
    std::mt19937_64 rng(8);
    std::normal_distribution<double> n(0.0, 1.0);
    Eigen::MatrixXd d(60, 13);
    for (int i = 0; i < 60; ++i)
        for (int j = 0; j < 13; ++j) d(i, j) = n(rng) * (1.0 + j) + (j > 0 ? 0.5 * d(i, j - 1) : 0.0);

    const PcaBasis basis = pca_fit(d, 4);
    CHECK(basis.rank == 4);
    for (int i = 0; i + 1 < 4; ++i) CHECK(basis.explained_variance[i] >= basis.explained_variance[i + 1]);

    // Oracle: full covariance of the standardized data, eigenvalues sorted.
    const Eigen::MatrixXd z = standardize(d).data;
    const Eigen::MatrixXd cov = z.transpose() * z / static_cast<double>(z.rows());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
    for (int c = 0; c < 4; ++c) {
        const int oi = 12 - c;
        CHECK(basis.explained_variance[c] == doctest::Approx(es.eigenvalues()[oi]).epsilon(1e-6));
        const double dot = std::abs(basis.components.row(c).dot(es.eigenvectors().col(oi)));
        CHECK(dot == doctest::Approx(1.0).epsilon(1e-6));
    }

    // Projected coordinates: oracle projection up to sign, same pairwise distances.
    std::vector<EvalEmbedding> proj;
    for (int i = 0; i < 60; ++i) proj.push_back(pca_project(basis, d.row(i).transpose()));
    Eigen::MatrixXd oracle = z * es.eigenvectors().rightCols(4).rowwise().reverse();
    for (int i = 0; i < 60; i += 7)
        for (int j = 1; j < 60; j += 11) {
            double a = 0.0, b = 0.0;
            for (int c = 0; c < 4; ++c) {
                a += std::pow(proj[i][c] - proj[j][c], 2);
                b += std::pow(oracle(i, c) - oracle(j, c), 2);
            }
            CHECK(a == doctest::Approx(b).epsilon(1e-9));
        }

    // Reconstruction error is non-increasing in the number of components.
    double prev = std::numeric_limits<double>::infinity();
    for (int k = 1; k <= 6; ++k) {
        const PcaBasis b = pca_fit(d, k);
        const Eigen::MatrixXd rec = z * b.components.transpose() * b.components;
        const double err = (z - rec).squaredNorm();
        CHECK(err <= prev + 1e-9);
        prev = err;
    }
}

TEST_CASE("pca on rank-deficient data pads with zero directions") {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> n(0.0, 1.0);
    Eigen::MatrixXd d(30, 13);
    for (int i = 0; i < 30; ++i) {
        const double a = n(rng), b = n(rng);
        for (int j = 0; j < 13; ++j) d(i, j) = a * (j + 1) + b * (j % 3 - 1.0);
    }
    const PcaBasis basis = pca_fit(d, 4);
    CHECK(basis.rank == 2);
    CHECK(basis.rank_deficient());
    CHECK(basis.explained_variance[2] < 1e-9);
    CHECK(basis.explained_variance[3] < 1e-9);
    const EvalEmbedding e = pca_project(basis, d.row(3).transpose());
    CHECK(e[2] == 0.0);
    CHECK(e[3] == 0.0);
    CHECK_THROWS(pca_fit(d.topRows(4), 4));
}
