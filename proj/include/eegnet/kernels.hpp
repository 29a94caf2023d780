#pragma once

#include <cstddef>
#include <span>

#include "eegnet/tensor.hpp"

namespace eegnet {

/// Shape arithmetic for a single-sample 1D convolution.
struct ConvGeometry {
    std::size_t in_channels = 1;
    std::size_t out_channels = 1;
    std::size_t length = 1;
    std::size_t kernel = 1;
    std::size_t stride = 1;
    std::size_t padding = 0;

    /// floor((L + 2p - K) / s) + 1, or 0 when the kernel does not fit.
    std::size_t out_length() const noexcept;
    std::size_t input_size() const noexcept { return in_channels * length; }
    std::size_t output_size() const noexcept { return out_channels * out_length(); }
    std::size_t weight_size() const noexcept { return out_channels * in_channels * kernel; }

    /// Throws ShapeError when out_length() < 1 or stride is 0.
    void validate() const;
};

// Raw kernels on row-major spans. Outputs are overwritten, never accumulated.
// Every output element is summed in the same order by both implementations,
// so the OpenMP versions are bit-identical to the serial reference for any
// thread count. Nothing here checks span lengths; callers own the shapes.
namespace kernels {

void conv1d_forward(const ConvGeometry& g, std::span<const double> x, std::span<const double> w,
                    std::span<const double> b, std::span<double> y);
void conv1d_backward_input(const ConvGeometry& g, std::span<const double> dy, std::span<const double> w,
                           std::span<double> dx);
void conv1d_backward_params(const ConvGeometry& g, std::span<const double> x, std::span<const double> dy,
                            std::span<double> dw, std::span<double> db);
void matmul(std::size_t m, std::size_t k, std::size_t n, std::span<const double> a, std::span<const double> b,
            std::span<double> c);
void relu(std::span<const double> x, std::span<double> y);
void softmax_rows(std::size_t m, std::size_t cols, std::span<const double> x, std::span<double> y);

namespace reference {

void conv1d_forward(const ConvGeometry& g, std::span<const double> x, std::span<const double> w,
                    std::span<const double> b, std::span<double> y);
void conv1d_backward_input(const ConvGeometry& g, std::span<const double> dy, std::span<const double> w,
                           std::span<double> dx);
void conv1d_backward_params(const ConvGeometry& g, std::span<const double> x, std::span<const double> dy,
                            std::span<double> dw, std::span<double> db);
void matmul(std::size_t m, std::size_t k, std::size_t n, std::span<const double> a, std::span<const double> b,
            std::span<double> c);
void relu(std::span<const double> x, std::span<double> y);
void softmax_rows(std::size_t m, std::size_t cols, std::span<const double> x, std::span<double> y);

}  // namespace reference
}  // namespace kernels

// Tensor-level operations. These validate shapes and dispatch to the
// OpenMP kernels.

/// input [C_in, L], kernels [C_out, C_in, K], bias [C_out] -> [C_out, L_out].
Tensor conv1d(const Tensor& input, const Tensor& kernels, const Tensor& bias, std::size_t stride,
              std::size_t padding);
/// [m, k] x [k, n] -> [m, n].
Tensor matmul(const Tensor& a, const Tensor& b);
Tensor relu(const Tensor& x);
/// Row-wise softmax of [m, C] with the row max subtracted first.
Tensor softmax_rows(const Tensor& x);

}  // namespace eegnet
