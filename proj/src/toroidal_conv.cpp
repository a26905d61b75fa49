#include "imgep/toroidal_conv.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <stdexcept>
#include <utility>

namespace imgep {

namespace {

// FFTW's planner is not thread-safe; plan execution on caller arrays is.
struct PlanPair {
    fftw_plan forward = nullptr;
    fftw_plan inverse = nullptr;
};

std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

const PlanPair& plans_for(int width, int height) {
    static std::map<std::pair<int, int>, PlanPair> cache;
    std::lock_guard lock(planner_mutex());
    auto [it, inserted] = cache.try_emplace({width, height});
    if (inserted) {
        const std::size_t n_real = static_cast<std::size_t>(width) * height;
        const std::size_t n_complex = static_cast<std::size_t>(height) * (width / 2 + 1);
        double* in = fftw_alloc_real(n_real);
        fftw_complex* out = fftw_alloc_complex(n_complex);
        const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
        it->second.forward = fftw_plan_dft_r2c_2d(height, width, in, out, flags);
        it->second.inverse = fftw_plan_dft_c2r_2d(height, width, out, in, flags);
        fftw_free(in);
        fftw_free(out);
        if (!it->second.forward || !it->second.inverse) throw std::runtime_error("FFTW planning failed");
    }
    return it->second;
}

fftw_complex* as_fftw(std::complex<double>* p) { return reinterpret_cast<fftw_complex*>(p); }

}  // namespace

ToroidalConvolver::ToroidalConvolver(int width, int height, const std::vector<Grid2D>& kernels)
    : width_(width), height_(height) {
    if (width < 1 || height < 1) throw std::invalid_argument("ToroidalConvolver: dimensions must be >= 1");
    const std::size_t n_complex = static_cast<std::size_t>(height) * (width / 2 + 1);
    real_scratch_.resize(static_cast<std::size_t>(width) * height);
    field_spectrum_.resize(n_complex);
    product_.resize(n_complex);

    const PlanPair& plans = plans_for(width, height);
    for (const Grid2D& kernel : kernels) {
        if (kernel.width() != width || kernel.height() != height)
            throw std::invalid_argument("ToroidalConvolver: kernel dimensions must match the grid");
        std::vector<std::complex<double>> spectrum(n_complex);
        std::copy(kernel.values().begin(), kernel.values().end(), real_scratch_.begin());
        fftw_execute_dft_r2c(plans.forward, real_scratch_.data(), as_fftw(spectrum.data()));
        spectra_.push_back(std::move(spectrum));
    }
}

void ToroidalConvolver::convolve(const Grid2D& field, std::vector<Grid2D>& out) const {
    if (field.width() != width_ || field.height() != height_)
        throw std::invalid_argument("ToroidalConvolver: field dimensions must match the grid");
    const PlanPair& plans = plans_for(width_, height_);
    std::copy(field.values().begin(), field.values().end(), real_scratch_.begin());
    fftw_execute_dft_r2c(plans.forward, real_scratch_.data(), as_fftw(field_spectrum_.data()));

    const double scale = 1.0 / static_cast<double>(real_scratch_.size());
    out.resize(spectra_.size());
    for (std::size_t k = 0; k < spectra_.size(); ++k) {
        for (std::size_t i = 0; i < product_.size(); ++i) product_[i] = field_spectrum_[i] * spectra_[k][i];
        // c2r overwrites its input, which is why product_ is a scratch copy.
        fftw_execute_dft_c2r(plans.inverse, as_fftw(product_.data()), real_scratch_.data());
        if (out[k].width() != width_ || out[k].height() != height_) out[k] = Grid2D(width_, height_);
        auto dst = out[k].values();
        for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = real_scratch_[i] * scale;
    }
}

Grid2D convolve_direct(const Grid2D& field, const Grid2D& kernel) {
    if (field.width() != kernel.width() || field.height() != kernel.height())
        throw std::invalid_argument("convolve_direct: dimensions differ");
    const int w = field.width();
    const int h = field.height();
    Grid2D out(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            for (int dy = 0; dy < h; ++dy)
                for (int dx = 0; dx < w; ++dx) {
                    const double k = kernel(dx, dy);
                    if (k != 0.0) acc += k * field.wrapped(x - dx, y - dy);
                }
            out(x, y) = acc;
        }
    return out;
}

}  // namespace imgep
