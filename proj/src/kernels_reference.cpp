// Serial kernels. These define the summation order the parallel versions
// must reproduce.

#include <algorithm>
#include <cmath>

#include "eegnet/kernels.hpp"

namespace eegnet::kernels::reference {

void conv1d_forward(const ConvGeometry& g, std::span<const double> x, std::span<const double> w,
                    std::span<const double> b, std::span<double> y) {
    const std::size_t lout = g.out_length();
    for (std::size_t o = 0; o < g.out_channels; ++o) {
        for (std::size_t i = 0; i < lout; ++i) {
            // Input index t = i*s + j - p must fall in [0, L).
            const std::ptrdiff_t base = static_cast<std::ptrdiff_t>(i * g.stride) - static_cast<std::ptrdiff_t>(g.padding);
            const std::size_t j0 = base < 0 ? static_cast<std::size_t>(-base) : 0;
            const std::size_t j1 = static_cast<std::size_t>(
                std::min<std::ptrdiff_t>(static_cast<std::ptrdiff_t>(g.kernel), std::max<std::ptrdiff_t>(static_cast<std::ptrdiff_t>(g.length) - base, 0)));
            double acc = b[o];
            for (std::size_t c = 0; c < g.in_channels; ++c) {
                const double* xc = x.data() + c * g.length;
                const double* wc = w.data() + (o * g.in_channels + c) * g.kernel;
                for (std::size_t j = j0; j < j1; ++j) acc += xc[base + static_cast<std::ptrdiff_t>(j)] * wc[j];
            }
            y[o * lout + i] = acc;
        }
    }
}

void conv1d_backward_input(const ConvGeometry& g, std::span<const double> dy, std::span<const double> w,
                           std::span<double> dx) {
    const std::size_t lout = g.out_length();
    std::fill(dx.begin(), dx.end(), 0.0);
    // Scatter order (o, i, c, j): each dx element receives terms ordered by (o, i).
    for (std::size_t o = 0; o < g.out_channels; ++o) {
        for (std::size_t i = 0; i < lout; ++i) {
            const double d = dy[o * lout + i];
            const std::ptrdiff_t base = static_cast<std::ptrdiff_t>(i * g.stride) - static_cast<std::ptrdiff_t>(g.padding);
            for (std::size_t c = 0; c < g.in_channels; ++c) {
                const double* wc = w.data() + (o * g.in_channels + c) * g.kernel;
                for (std::size_t j = 0; j < g.kernel; ++j) {
                    const std::ptrdiff_t t = base + static_cast<std::ptrdiff_t>(j);
                    if (t < 0 || t >= static_cast<std::ptrdiff_t>(g.length)) continue;
                    dx[c * g.length + static_cast<std::size_t>(t)] += d * wc[j];
                }
            }
        }
    }
}

void conv1d_backward_params(const ConvGeometry& g, std::span<const double> x, std::span<const double> dy,
                            std::span<double> dw, std::span<double> db) {
    const std::size_t lout = g.out_length();
    for (std::size_t o = 0; o < g.out_channels; ++o) {
        double bsum = 0.0;
        for (std::size_t i = 0; i < lout; ++i) bsum += dy[o * lout + i];
        db[o] = bsum;
        for (std::size_t c = 0; c < g.in_channels; ++c) {
            for (std::size_t j = 0; j < g.kernel; ++j) {
                double acc = 0.0;
                for (std::size_t i = 0; i < lout; ++i) {
                    const std::ptrdiff_t t = static_cast<std::ptrdiff_t>(i * g.stride + j) - static_cast<std::ptrdiff_t>(g.padding);
                    if (t < 0 || t >= static_cast<std::ptrdiff_t>(g.length)) continue;
                    acc += dy[o * lout + i] * x[c * g.length + static_cast<std::size_t>(t)];
                }
                dw[(o * g.in_channels + c) * g.kernel + j] = acc;
            }
        }
    }
}

void matmul(std::size_t m, std::size_t k, std::size_t n, std::span<const double> a, std::span<const double> b,
            std::span<double> c) {
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            double acc = 0.0;
            for (std::size_t p = 0; p < k; ++p) acc += a[i * k + p] * b[p * n + j];
            c[i * n + j] = acc;
        }
    }
}

void relu(std::span<const double> x, std::span<double> y) {
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[i] > 0.0 ? x[i] : 0.0;
}

void softmax_rows(std::size_t m, std::size_t cols, std::span<const double> x, std::span<double> y) {
    for (std::size_t r = 0; r < m; ++r) {
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

}  // namespace eegnet::kernels::reference
