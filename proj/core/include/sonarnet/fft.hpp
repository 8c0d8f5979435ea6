#pragma once

#include <complex>
#include <cstddef>

namespace sonarnet {

// Thin RAII wrappers around FFTW double-precision plans. Plan creation and
// destruction are serialized internally (FFTW requirement); execution is
// safe concurrently across distinct instances. Plans use FFTW_ESTIMATE so
// the chosen algorithm, and therefore the exact floating-point result, is
// reproducible run to run.
//
// Instances own aligned scratch buffers; the execute methods copy through
// them, so callers can pass ordinary vectors. One instance must not be used
// from two threads at once.

class RealFft {
public:
    explicit RealFft(size_t n);
    ~RealFft();

    RealFft(const RealFft&) = delete;
    RealFft& operator=(const RealFft&) = delete;
    RealFft(RealFft&& other) noexcept;
    RealFft& operator=(RealFft&& other) noexcept;

    size_t size() const { return n_; }
    size_t bins() const { return n_ / 2 + 1; }

    // in: n real samples, out: n/2+1 complex bins.
    void forward(const double* in, std::complex<double>* out);
    // in: n/2+1 complex bins, out: n real samples, scaled by 1/n.
    void inverse(const std::complex<double>* in, double* out);

private:
    void destroy() noexcept;

    size_t n_ = 0;
    double* real_ = nullptr;
    void* spec_ = nullptr; // fftw_complex[n/2+1]
    void* fwd_ = nullptr;  // fftw_plan
    void* bwd_ = nullptr;  // fftw_plan
};

class ComplexFft {
public:
    explicit ComplexFft(size_t n);
    ~ComplexFft();

    ComplexFft(const ComplexFft&) = delete;
    ComplexFft& operator=(const ComplexFft&) = delete;
    ComplexFft(ComplexFft&& other) noexcept;
    ComplexFft& operator=(ComplexFft&& other) noexcept;

    size_t size() const { return n_; }

    void forward(const std::complex<double>* in, std::complex<double>* out);
    // Scaled by 1/n.
    void inverse(const std::complex<double>* in, std::complex<double>* out);

private:
    void destroy() noexcept;

    size_t n_ = 0;
    void* buf_in_ = nullptr;
    void* buf_out_ = nullptr;
    void* fwd_ = nullptr;
    void* bwd_ = nullptr;
};

// Smallest power of two >= n (n >= 1).
size_t next_pow2(size_t n);

} // namespace sonarnet
