#include "imgep/features.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "imgep/errors.hpp"

namespace imgep::features {

HuMoments hu_moments_raw(const Grid2D& obs) {
    double m00 = 0.0, m10 = 0.0, m01 = 0.0;
    for (int y = 0; y < obs.height(); ++y)
        for (int x = 0; x < obs.width(); ++x) {
            const double v = obs(x, y);
            m00 += v;
            m10 += x * v;
            m01 += y * v;
        }
    // Near-empty grids: eta scales as m00^-(p+q)/2, so a trace of mass would blow up.
    if (!(m00 > kVolumeEpsilon)) return {};

    const double cx = m10 / m00;
    const double cy = m01 / m00;
    double mu[4][4] = {};
    for (int y = 0; y < obs.height(); ++y) {
        const double dy = y - cy;
        for (int x = 0; x < obs.width(); ++x) {
            const double v = obs(x, y);
            if (v == 0.0) continue;
            const double dx = x - cx;
            const double px[4] = {1.0, dx, dx * dx, dx * dx * dx};
            const double py[4] = {1.0, dy, dy * dy, dy * dy * dy};
            for (int p = 0; p <= 3; ++p)
                for (int q = 0; p + q <= 3; ++q) mu[p][q] += px[p] * py[q] * v;
        }
    }
    auto eta = [&](int p, int q) { return mu[p][q] / std::pow(m00, 1.0 + (p + q) / 2.0); };
    const double n20 = eta(2, 0), n02 = eta(0, 2), n11 = eta(1, 1);
    const double n30 = eta(3, 0), n03 = eta(0, 3), n21 = eta(2, 1), n12 = eta(1, 2);

    const double a = n30 + n12;
    const double b = n21 + n03;
    HuMoments h;
    h[0] = n20 + n02;
    h[1] = (n20 - n02) * (n20 - n02) + 4.0 * n11 * n11;
    h[2] = (n30 - 3.0 * n12) * (n30 - 3.0 * n12) + (3.0 * n21 - n03) * (3.0 * n21 - n03);
    h[3] = a * a + b * b;
    h[4] = (n30 - 3.0 * n12) * a * (a * a - 3.0 * b * b) + (3.0 * n21 - n03) * b * (3.0 * a * a - b * b);
    h[5] = (n20 - n02) * (a * a - b * b) + 4.0 * n11 * a * b;
    h[6] = (3.0 * n21 - n03) * a * (a * a - 3.0 * b * b) - (n30 - 3.0 * n12) * b * (3.0 * a * a - b * b);
    return h;
}

double signed_log(double h) {
    if (h == 0.0) return 0.0;
    return std::copysign(std::log10(1.0 + std::abs(h) * 1e30), h);
}

HuMoments hu_moments(const Grid2D& obs) {
    HuMoments h = hu_moments_raw(obs);
    for (double& v : h) v = signed_log(v);
    return h;
}

double volume(const Grid2D& obs, double eps) {
    const auto cells = obs.values();
    const auto count = std::count_if(cells.begin(), cells.end(), [eps](double v) { return v > eps; });
    return static_cast<double>(count) / static_cast<double>(cells.size());
}

double mean_pixel(const Grid2D& obs) {
    double sum = 0.0;
    for (double v : obs.values()) sum += v;
    return sum / static_cast<double>(obs.size());
}

// ---------------------------------------------------------------------------
// Haralick

namespace {

int quantize(double v, int levels) {
    const double c = std::clamp(v, 0.0, 1.0);
    return std::min(levels - 1, static_cast<int>(c * levels));
}

double entropy_term(double p) { return p > 0.0 ? -p * std::log2(p) : 0.0; }

}  // namespace

std::vector<double> glcm(const Grid2D& obs, int dx, int dy, int levels) {
    const int w = obs.width();
    const int h = obs.height();
    std::vector<int> q(obs.size());
    for (std::size_t i = 0; i < q.size(); ++i) q[i] = quantize(obs.values()[i], levels);

    std::vector<double> m(static_cast<std::size_t>(levels) * levels, 0.0);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            const int nx = ((x + dx) % w + w) % w;
            const int ny = ((y + dy) % h + h) % h;
            const int i = q[static_cast<std::size_t>(y) * w + x];
            const int j = q[static_cast<std::size_t>(ny) * w + nx];
            m[static_cast<std::size_t>(i) * levels + j] += 1.0;
            m[static_cast<std::size_t>(j) * levels + i] += 1.0;
        }
    const double total = 2.0 * static_cast<double>(obs.size());
    for (double& v : m) v /= total;
    return m;
}

HaralickVector haralick_from_glcm(const std::vector<double>& glcm_in, int levels) {
    if (glcm_in.size() != static_cast<std::size_t>(levels) * levels)
        throw std::invalid_argument("haralick_from_glcm: matrix size mismatch");
    double total = 0.0;
    for (double v : glcm_in) total += v;
    if (!(total > 0.0)) throw std::invalid_argument("haralick_from_glcm: empty matrix");
    auto p = [&](int i, int j) { return glcm_in[static_cast<std::size_t>(i) * levels + j] / total; };

    std::vector<double> px(levels, 0.0), py(levels, 0.0);
    std::vector<double> p_sum(2 * levels - 1, 0.0), p_diff(levels, 0.0);
    double asm_ = 0.0, contrast = 0.0, idm = 0.0, entropy = 0.0, sum_ij = 0.0;
    for (int i = 0; i < levels; ++i)
        for (int j = 0; j < levels; ++j) {
            const double v = p(i, j);
            if (v == 0.0) continue;
            px[i] += v;
            py[j] += v;
            p_sum[i + j] += v;
            p_diff[std::abs(i - j)] += v;
            asm_ += v * v;
            contrast += static_cast<double>((i - j) * (i - j)) * v;
            idm += v / (1.0 + (i - j) * (i - j));
            entropy += entropy_term(v);
            sum_ij += static_cast<double>(i) * j * v;
        }

    double mux = 0.0, muy = 0.0;
    for (int i = 0; i < levels; ++i) {
        mux += i * px[i];
        muy += i * py[i];
    }
    double varx = 0.0, vary = 0.0;
    for (int i = 0; i < levels; ++i) {
        varx += (i - mux) * (i - mux) * px[i];
        vary += (i - muy) * (i - muy) * py[i];
    }
    const double sdx = std::sqrt(varx);
    const double sdy = std::sqrt(vary);
    const double correlation = (sdx > 1e-12 && sdy > 1e-12) ? (sum_ij - mux * muy) / (sdx * sdy) : 1.0;

    double sum_average = 0.0, sum_entropy = 0.0;
    for (std::size_t k = 0; k < p_sum.size(); ++k) {
        sum_average += static_cast<double>(k) * p_sum[k];
        sum_entropy += entropy_term(p_sum[k]);
    }
    double sum_variance = 0.0;
    for (std::size_t k = 0; k < p_sum.size(); ++k)
        sum_variance += (static_cast<double>(k) - sum_average) * (static_cast<double>(k) - sum_average) * p_sum[k];

    double diff_mean = 0.0, diff_entropy = 0.0;
    for (int k = 0; k < levels; ++k) {
        diff_mean += k * p_diff[k];
        diff_entropy += entropy_term(p_diff[k]);
    }
    double diff_variance = 0.0;
    for (int k = 0; k < levels; ++k) diff_variance += (k - diff_mean) * (k - diff_mean) * p_diff[k];

    double hx = 0.0, hy = 0.0;
    for (int i = 0; i < levels; ++i) {
        hx += entropy_term(px[i]);
        hy += entropy_term(py[i]);
    }
    double hxy1 = 0.0, hxy2 = 0.0;
    for (int i = 0; i < levels; ++i)
        for (int j = 0; j < levels; ++j) {
            const double prod = px[i] * py[j];
            if (prod <= 0.0) continue;
            const double lg = std::log2(prod);
            hxy1 -= p(i, j) * lg;
            hxy2 -= prod * lg;
        }
    const double hmax = std::max(hx, hy);
    const double imc1 = hmax > 1e-12 ? (entropy - hxy1) / hmax : 0.0;
    const double imc2 = std::sqrt(std::max(0.0, 1.0 - std::exp(-2.0 * (hxy2 - entropy))));

    return {asm_,        contrast,    correlation,   varx,         idm,  sum_average, sum_variance,
            sum_entropy, entropy,     diff_variance, diff_entropy, imc1, imc2};
}

HaralickVector haralick13(const Grid2D& obs) {
    static constexpr int kOffsets[4][2] = {{1, 0}, {1, -1}, {0, -1}, {-1, -1}};
    HaralickVector mean{};
    for (const auto& off : kOffsets) {
        const HaralickVector f = haralick_from_glcm(glcm(obs, off[0], off[1]), kGrayLevels);
        for (int i = 0; i < kHaralickCount; ++i) mean[i] += f[i] / 4.0;
    }
    return mean;
}

// ---------------------------------------------------------------------------
// Tamura

namespace {

// Toroidal box mean over a size x size window covering [c - size/2, c + size/2 - 1].
Grid2D box_mean(const Grid2D& g, int size) {
    const int w = g.width();
    const int h = g.height();
    const int half = size / 2;
    Grid2D rows(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            double s = 0.0;
            for (int d = -half; d < size - half; ++d) s += g.wrapped(x + d, y);
            rows(x, y) = s / size;
        }
    Grid2D out(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            double s = 0.0;
            for (int d = -half; d < size - half; ++d) s += rows.wrapped(x, y + d);
            out(x, y) = s / size;
        }
    return out;
}

double tamura_coarseness(const Grid2D& g) {
    constexpr int kMinScale = 1;
    constexpr int kMaxScale = 5;
    const int w = g.width();
    const int h = g.height();
    std::vector<double> best_e(g.size(), -1.0);
    std::vector<double> best_size(g.size(), 0.0);
    for (int k = kMinScale; k <= kMaxScale; ++k) {
        const int size = 1 << k;
        const int half = size / 2;
        const Grid2D a = box_mean(g, size);
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x) {
                const double eh = std::abs(a.wrapped(x + half, y) - a.wrapped(x - half, y));
                const double ev = std::abs(a.wrapped(x, y + half) - a.wrapped(x, y - half));
                const double e = std::max(eh, ev);
                const std::size_t i = static_cast<std::size_t>(y) * w + x;
                // Strict comparison: ties keep the smaller scale.
                if (e > best_e[i] + 1e-12) {
                    best_e[i] = e;
                    best_size[i] = size;
                }
            }
    }
    double sum = 0.0;
    for (double s : best_size) sum += s;
    return sum / static_cast<double>(best_size.size());
}

double tamura_contrast(const Grid2D& g) {
    const double m = mean_pixel(g);
    double m2 = 0.0, m4 = 0.0;
    for (double v : g.values()) {
        const double d = (v - m) * (v - m);
        m2 += d;
        m4 += d * d;
    }
    m2 /= static_cast<double>(g.size());
    m4 /= static_cast<double>(g.size());
    if (m2 < 1e-24 || m4 <= 0.0) return 0.0;
    // sigma / (m4 / sigma^4)^(1/4) == sigma^2 / m4^(1/4)
    return m2 / std::pow(m4, 0.25);
}

double tamura_directionality(const Grid2D& g) {
    constexpr int kBins = 16;
    constexpr double kEdgeThreshold = 12.0 / 255.0;
    std::array<double, kBins> hist{};
    double total = 0.0;
    for (int y = 0; y < g.height(); ++y)
        for (int x = 0; x < g.width(); ++x) {
            double gh = 0.0, gv = 0.0;
            for (int d = -1; d <= 1; ++d) {
                gh += g.wrapped(x + 1, y + d) - g.wrapped(x - 1, y + d);
                gv += g.wrapped(x + d, y + 1) - g.wrapped(x + d, y - 1);
            }
            gh /= 3.0;
            gv /= 3.0;
            if (0.5 * (std::abs(gh) + std::abs(gv)) < kEdgeThreshold) continue;
            double theta = std::atan2(gv, gh);
            if (theta < 0.0) theta += std::numbers::pi;
            if (theta >= std::numbers::pi) theta -= std::numbers::pi;
            const int bin = std::min(kBins - 1, static_cast<int>(theta / std::numbers::pi * kBins));
            hist[bin] += 1.0;
            total += 1.0;
        }
    if (total == 0.0) return 0.0;

    const int peak = static_cast<int>(std::max_element(hist.begin(), hist.end()) - hist.begin());
    const double bin_width = std::numbers::pi / kBins;
    double spread = 0.0;
    for (int b = 0; b < kBins; ++b) {
        int steps = std::abs(b - peak);
        steps = std::min(steps, kBins - steps);
        const double d = steps * bin_width;
        spread += d * d * hist[b] / total;
    }
    const double max_d = std::numbers::pi / 2.0;
    return 1.0 - spread / (max_d * max_d);
}

}  // namespace

Tamura tamura_features(const Grid2D& obs) {
    return {tamura_coarseness(obs), tamura_contrast(obs), tamura_directionality(obs)};
}

// ---------------------------------------------------------------------------

std::array<double, kBehaviorDims> BehaviorVector::to_array() const {
    std::array<double, kBehaviorDims> out{};
    std::copy(hu.begin(), hu.end(), out.begin());
    out[7] = mean_pixel;
    out[8] = volume;
    return out;
}

BehaviorVector BehaviorVector::from_array(const std::array<double, kBehaviorDims>& values) {
    BehaviorVector b;
    std::copy(values.begin(), values.begin() + 7, b.hu.begin());
    b.mean_pixel = values[7];
    b.volume = values[8];
    return b;
}

BehaviorVector behavior(const Grid2D& obs) {
    return {hu_moments(obs), mean_pixel(obs), volume(obs)};
}

const std::array<std::string_view, 5>& ConstraintFeatures::names() {
    static constexpr std::array<std::string_view, 5> n = {"volume", "mean_pixel", "tamura_coarseness",
                                                          "tamura_contrast", "tamura_directionality"};
    return n;
}

double ConstraintFeatures::get(std::string_view name) const {
    if (name == "volume") return volume;
    if (name == "mean_pixel") return mean_pixel;
    if (name == "tamura_coarseness") return tamura_coarseness;
    if (name == "tamura_contrast") return tamura_contrast;
    if (name == "tamura_directionality") return tamura_directionality;
    throw UnknownFeature(std::string(name));
}

ConstraintFeatures constraint_features(const Grid2D& obs) {
    const Tamura t = tamura_features(obs);
    return {volume(obs), mean_pixel(obs), t.coarseness, t.contrast, t.directionality};
}

}  // namespace imgep::features
