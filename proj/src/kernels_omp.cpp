// OpenMP kernels. Parallelism is over independent output elements only; the
// inner reductions keep the reference order.

#include <omp.h>

#include <algorithm>
#include <cmath>

#include "eegnet/kernels.hpp"

namespace eegnet::kernels {

namespace {

// Below this many multiply-adds the fork/join costs more than it saves.
constexpr std::size_t kParallelWork = 1 << 15;

bool go_parallel(std::size_t work) {
    return work >= kParallelWork && !omp_in_parallel() && omp_get_max_threads() > 1;
}

std::ptrdiff_t as_signed(std::size_t v) { return static_cast<std::ptrdiff_t>(v); }

}  // namespace

void conv1d_forward(const ConvGeometry& g, std::span<const double> x, std::span<const double> w,
                    std::span<const double> b, std::span<double> y) {
    const std::size_t lout = g.out_length();
    const std::ptrdiff_t n_out = as_signed(g.out_channels);
#pragma omp parallel for schedule(static) if (go_parallel(g.output_size() * g.in_channels * g.kernel))
    for (std::ptrdiff_t oo = 0; oo < n_out; ++oo) {
        const std::size_t o = static_cast<std::size_t>(oo);
        for (std::size_t i = 0; i < lout; ++i) {
            const std::ptrdiff_t base = as_signed(i * g.stride) - as_signed(g.padding);
            const std::size_t j0 = base < 0 ? static_cast<std::size_t>(-base) : 0;
            const std::size_t j1 =
                static_cast<std::size_t>(std::min<std::ptrdiff_t>(as_signed(g.kernel), std::max<std::ptrdiff_t>(as_signed(g.length) - base, 0)));
            double acc = b[o];
            for (std::size_t c = 0; c < g.in_channels; ++c) {
                const double* xc = x.data() + c * g.length;
                const double* wc = w.data() + (o * g.in_channels + c) * g.kernel;
                for (std::size_t j = j0; j < j1; ++j) acc += xc[base + as_signed(j)] * wc[j];
            }
            y[o * lout + i] = acc;
        }
    }
}

void conv1d_backward_input(const ConvGeometry& g, std::span<const double> dy, std::span<const double> w,
                           std::span<double> dx) {
    const std::size_t lout = g.out_length();
    const std::ptrdiff_t n_in = as_signed(g.in_channels);
    const std::ptrdiff_t s = as_signed(g.stride);
    const std::ptrdiff_t k = as_signed(g.kernel);
    // Gather form of the reference scatter: terms for dx[c][t] arrive in (o, i) order.
#pragma omp parallel for schedule(static) if (go_parallel(g.output_size() * g.in_channels * g.kernel))
    for (std::ptrdiff_t cc = 0; cc < n_in; ++cc) {
        const std::size_t c = static_cast<std::size_t>(cc);
        for (std::size_t t = 0; t < g.length; ++t) {
            const std::ptrdiff_t tp = as_signed(t + g.padding);
            // j = tp - i*s in [0, K)  <=>  (tp - K + 1)/s <= i <= tp/s
            const std::ptrdiff_t lo_num = tp - k + 1;
            const std::ptrdiff_t i0 = lo_num <= 0 ? 0 : (lo_num + s - 1) / s;
            const std::ptrdiff_t i1 = std::min<std::ptrdiff_t>(tp / s, as_signed(lout) - 1);
            double acc = 0.0;
            for (std::size_t o = 0; o < g.out_channels; ++o) {
                const double* dyo = dy.data() + o * lout;
                const double* wc = w.data() + (o * g.in_channels + c) * g.kernel;
                for (std::ptrdiff_t i = i0; i <= i1; ++i) acc += dyo[i] * wc[tp - i * s];
            }
            dx[c * g.length + t] = acc;
        }
    }
}

void conv1d_backward_params(const ConvGeometry& g, std::span<const double> x, std::span<const double> dy,
                            std::span<double> dw, std::span<double> db) {
    const std::size_t lout = g.out_length();
    const std::ptrdiff_t n_out = as_signed(g.out_channels);
#pragma omp parallel for schedule(static) if (go_parallel(g.output_size() * g.in_channels * g.kernel))
    for (std::ptrdiff_t oo = 0; oo < n_out; ++oo) {
        const std::size_t o = static_cast<std::size_t>(oo);
        const double* dyo = dy.data() + o * lout;
        double bsum = 0.0;
        for (std::size_t i = 0; i < lout; ++i) bsum += dyo[i];
        db[o] = bsum;
        for (std::size_t c = 0; c < g.in_channels; ++c) {
            const double* xc = x.data() + c * g.length;
            for (std::size_t j = 0; j < g.kernel; ++j) {
                // Valid i: 0 <= i*s + j - p < L.
                const std::ptrdiff_t off = as_signed(j) - as_signed(g.padding);
                const std::ptrdiff_t s = as_signed(g.stride);
                const std::ptrdiff_t i0 = off >= 0 ? 0 : (-off + s - 1) / s;
                const std::ptrdiff_t i1 = std::min<std::ptrdiff_t>(as_signed(lout) - 1,
                                                                   (as_signed(g.length) - 1 - off) < 0
                                                                       ? -1
                                                                       : (as_signed(g.length) - 1 - off) / s);
                double acc = 0.0;
                for (std::ptrdiff_t i = i0; i <= i1; ++i) acc += dyo[i] * xc[i * s + off];
                dw[(o * g.in_channels + c) * g.kernel + j] = acc;
            }
        }
    }
}

void matmul(std::size_t m, std::size_t k, std::size_t n, std::span<const double> a, std::span<const double> b,
            std::span<double> c) {
    const std::ptrdiff_t rows = as_signed(m);
#pragma omp parallel for schedule(static) if (go_parallel(m * k * n))
    for (std::ptrdiff_t ii = 0; ii < rows; ++ii) {
        const std::size_t i = static_cast<std::size_t>(ii);
        double* ci = c.data() + i * n;
        std::fill(ci, ci + n, 0.0);
        for (std::size_t p = 0; p < k; ++p) {
            const double aip = a[i * k + p];
            const double* bp = b.data() + p * n;
            for (std::size_t j = 0; j < n; ++j) ci[j] += aip * bp[j];
        }
    }
}

void relu(std::span<const double> x, std::span<double> y) {
    const std::ptrdiff_t n = as_signed(x.size());
#pragma omp parallel for schedule(static) if (go_parallel(x.size()))
    for (std::ptrdiff_t i = 0; i < n; ++i) y[i] = x[i] > 0.0 ? x[i] : 0.0;
}

void softmax_rows(std::size_t m, std::size_t cols, std::span<const double> x, std::span<double> y) {
    const std::ptrdiff_t rows = as_signed(m);
#pragma omp parallel for schedule(static) if (go_parallel(m * cols * 8))
    for (std::ptrdiff_t rr = 0; rr < rows; ++rr) {
        const std::size_t r = static_cast<std::size_t>(rr);
        const double* xr = x.data() + r * cols;
        double* yr = y.data() + r * cols;
        const double mx = *std::max_element(xr, xr + cols);
        double sum = 0.0;
        for (std::size_t c = 0; c < cols; ++c) {
            yr[c] = std::exp(xr[c] - mx);
            sum += yr[c];
        }
        for (std::size_t c = 0; c < cols; ++c) yr[c] /= sum;
    }
}

}  // namespace eegnet::kernels
