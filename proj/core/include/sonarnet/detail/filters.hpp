#pragma once

#include <algorithm>
#include <cstddef>
#include <span>

namespace sonarnet::detail {

// out[m] = sum_j rev_taps[j] * x[start + m*stride + j], indices outside
// [0, len) reading as zero. With rev_taps the reversed filter and
// start = -(K-1)/2 this is the group-delay-compensated convolution
// evaluated every stride-th sample: the shared inner loop of
// pdm_demodulate, decimate and the envelope smoother.
inline void strided_filter(const double* x, size_t len, std::span<const double> rev_taps,
                           long start, long stride, double* out, size_t out_len) {
    const long k = static_cast<long>(rev_taps.size());
    const long n_in = static_cast<long>(len);
    for (size_t m = 0; m < out_len; ++m) {
        const long s = start + static_cast<long>(m) * stride;
        const long lo = std::max<long>(0, s);
        const long hi = std::min<long>(n_in, s + k);
        const double* xs = x + lo;
        const double* h = rev_taps.data() + (lo - s);
        const long n = hi - lo;
        // Four fixed accumulator lanes: deterministic summation order that
        // still vectorizes under strict FP semantics.
        double a0 = 0.0, a1 = 0.0, a2 = 0.0, a3 = 0.0;
        long j = 0;
        for (; j + 4 <= n; j += 4) {
            a0 += h[j] * xs[j];
            a1 += h[j + 1] * xs[j + 1];
            a2 += h[j + 2] * xs[j + 2];
            a3 += h[j + 3] * xs[j + 3];
        }
        double acc = (a0 + a1) + (a2 + a3);
        for (; j < n; ++j) acc += h[j] * xs[j];
        out[m] = acc;
    }
}

} // namespace sonarnet::detail
