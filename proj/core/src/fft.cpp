#include "sonarnet/fft.hpp"

#include "sonarnet/errors.hpp"

#include <fftw3.h>

#include <cstring>
#include <mutex>

namespace sonarnet {

namespace {

// FFTW planner state is global and not thread-safe.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

} // namespace

size_t next_pow2(size_t n) {
    size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

RealFft::RealFft(size_t n) : n_(n) {
    if (n == 0) throw ArgumentError("RealFft: size must be >= 1");
    real_ = fftw_alloc_real(n);
    spec_ = fftw_alloc_complex(n / 2 + 1);
    std::lock_guard lock(planner_mutex());
    fwd_ = fftw_plan_dft_r2c_1d(static_cast<int>(n), real_,
                                static_cast<fftw_complex*>(spec_), FFTW_ESTIMATE);
    bwd_ = fftw_plan_dft_c2r_1d(static_cast<int>(n),
                                static_cast<fftw_complex*>(spec_), real_, FFTW_ESTIMATE);
}

RealFft::~RealFft() { destroy(); }

void RealFft::destroy() noexcept {
    if (fwd_ || bwd_) {
        std::lock_guard lock(planner_mutex());
        if (fwd_) fftw_destroy_plan(static_cast<fftw_plan>(fwd_));
        if (bwd_) fftw_destroy_plan(static_cast<fftw_plan>(bwd_));
    }
    if (real_) fftw_free(real_);
    if (spec_) fftw_free(spec_);
    real_ = nullptr;
    spec_ = nullptr;
    fwd_ = nullptr;
    bwd_ = nullptr;
}

RealFft::RealFft(RealFft&& other) noexcept
    : n_(other.n_), real_(other.real_), spec_(other.spec_), fwd_(other.fwd_), bwd_(other.bwd_) {
    other.real_ = nullptr;
    other.spec_ = nullptr;
    other.fwd_ = nullptr;
    other.bwd_ = nullptr;
    other.n_ = 0;
}

RealFft& RealFft::operator=(RealFft&& other) noexcept {
    if (this != &other) {
        destroy();
        n_ = other.n_;
        real_ = other.real_;
        spec_ = other.spec_;
        fwd_ = other.fwd_;
        bwd_ = other.bwd_;
        other.real_ = nullptr;
        other.spec_ = nullptr;
        other.fwd_ = nullptr;
        other.bwd_ = nullptr;
        other.n_ = 0;
    }
    return *this;
}

void RealFft::forward(const double* in, std::complex<double>* out) {
    std::memcpy(real_, in, n_ * sizeof(double));
    fftw_execute(static_cast<fftw_plan>(fwd_));
    std::memcpy(out, spec_, (n_ / 2 + 1) * sizeof(std::complex<double>));
}

void RealFft::inverse(const std::complex<double>* in, double* out) {
    std::memcpy(spec_, in, (n_ / 2 + 1) * sizeof(std::complex<double>));
    fftw_execute(static_cast<fftw_plan>(bwd_));
    const double scale = 1.0 / static_cast<double>(n_);
    for (size_t i = 0; i < n_; ++i) out[i] = real_[i] * scale;
}

ComplexFft::ComplexFft(size_t n) : n_(n) {
    if (n == 0) throw ArgumentError("ComplexFft: size must be >= 1");
    buf_in_ = fftw_alloc_complex(n);
    buf_out_ = fftw_alloc_complex(n);
    std::lock_guard lock(planner_mutex());
    fwd_ = fftw_plan_dft_1d(static_cast<int>(n), static_cast<fftw_complex*>(buf_in_),
                            static_cast<fftw_complex*>(buf_out_), FFTW_FORWARD, FFTW_ESTIMATE);
    bwd_ = fftw_plan_dft_1d(static_cast<int>(n), static_cast<fftw_complex*>(buf_in_),
                            static_cast<fftw_complex*>(buf_out_), FFTW_BACKWARD, FFTW_ESTIMATE);
}

ComplexFft::~ComplexFft() { destroy(); }

void ComplexFft::destroy() noexcept {
    if (fwd_ || bwd_) {
        std::lock_guard lock(planner_mutex());
        if (fwd_) fftw_destroy_plan(static_cast<fftw_plan>(fwd_));
        if (bwd_) fftw_destroy_plan(static_cast<fftw_plan>(bwd_));
    }
    if (buf_in_) fftw_free(buf_in_);
    if (buf_out_) fftw_free(buf_out_);
    buf_in_ = nullptr;
    buf_out_ = nullptr;
    fwd_ = nullptr;
    bwd_ = nullptr;
}

ComplexFft::ComplexFft(ComplexFft&& other) noexcept
    : n_(other.n_), buf_in_(other.buf_in_), buf_out_(other.buf_out_),
      fwd_(other.fwd_), bwd_(other.bwd_) {
    other.buf_in_ = nullptr;
    other.buf_out_ = nullptr;
    other.fwd_ = nullptr;
    other.bwd_ = nullptr;
    other.n_ = 0;
}

ComplexFft& ComplexFft::operator=(ComplexFft&& other) noexcept {
    if (this != &other) {
        destroy();
        n_ = other.n_;
        buf_in_ = other.buf_in_;
        buf_out_ = other.buf_out_;
        fwd_ = other.fwd_;
        bwd_ = other.bwd_;
        other.buf_in_ = nullptr;
        other.buf_out_ = nullptr;
        other.fwd_ = nullptr;
        other.bwd_ = nullptr;
        other.n_ = 0;
    }
    return *this;
}

void ComplexFft::forward(const std::complex<double>* in, std::complex<double>* out) {
    std::memcpy(buf_in_, in, n_ * sizeof(std::complex<double>));
    fftw_execute(static_cast<fftw_plan>(fwd_));
    std::memcpy(out, buf_out_, n_ * sizeof(std::complex<double>));
}

void ComplexFft::inverse(const std::complex<double>* in, std::complex<double>* out) {
    std::memcpy(buf_in_, in, n_ * sizeof(std::complex<double>));
    fftw_execute(static_cast<fftw_plan>(bwd_));
    const double scale = 1.0 / static_cast<double>(n_);
    const auto* src = static_cast<const std::complex<double>*>(buf_out_);
    for (size_t i = 0; i < n_; ++i) out[i] = src[i] * scale;
}

} // namespace sonarnet
