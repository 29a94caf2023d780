#pragma once

#include <optional>
#include <span>
#include <vector>

#include "eegnet/kernels.hpp"
#include "eegnet/tensor.hpp"

namespace eegnet {

// Single-sample layer primitives. Activations are [channels, length]
// tensors; dense layers see [features, 1].

struct ConvGrads {
    Tensor dx;
    Tensor dweight;
    Tensor dbias;
};

/// Gradients of y = conv1d(x, w, b) given dy.
ConvGrads conv1d_backward(const Tensor& x, const Tensor& weight, const Tensor& dy, std::size_t stride,
                          std::size_t padding);

/// Multiplies dy by the ReLU derivative recovered from the activated output.
Tensor relu_backward(const Tensor& dy, const Tensor& activated);

// Residual basic block.
//
//   h = relu(conv_a(x))            K=3, pad=1, stride s, N channels
//   y = relu(conv_b(h) + sc(x))    K=3, pad=1, stride 1
//
// sc is the identity when C_in == N and s == 1, otherwise a 1x1 projection
// with stride s. A block built without skip drops sc entirely.
//
// Parameter order in the span: conv_a.w, conv_a.b, conv_b.w, conv_b.b and,
// for projecting blocks, proj.w, proj.b.

constexpr std::size_t kBlockKernel = 3;
constexpr std::size_t kBlockPadding = 1;

bool block_needs_projection(std::size_t in_channels, std::size_t neurons, std::size_t stride);

struct BlockCache {
    Tensor x;
    Tensor hidden;
    Tensor y;
    std::size_t stride = 1;
    bool skip = true;
    std::vector<Shape> param_shapes;
};

struct BlockForward {
    Tensor y;
    BlockCache cache;
};

struct BlockBackward {
    Tensor dx;
    std::vector<Tensor> dparams;
};

BlockForward basic_block_forward(const Tensor& x, std::span<const Tensor> params, std::size_t stride,
                                 bool skip = true);

/// Throws ContractViolation when dy or params do not match the cache.
BlockBackward basic_block_backward(const Tensor& dy, const BlockCache& cache, std::span<const Tensor> params);

/// Non-overlapping average pooling over windows of `window`; a trailing
/// partial window is dropped.
Tensor avg_pool(const Tensor& x, std::size_t window);
Tensor avg_pool_backward(const Tensor& dy, const Shape& input_shape, std::size_t window);

/// [C, L] -> [C, 1] mean over positions.
Tensor global_avg_pool(const Tensor& x);
Tensor global_avg_pool_backward(const Tensor& dy, const Shape& input_shape);

/// y = W^T x + b for x [in, 1], W [in, out], b [out]; returns [out, 1].
Tensor dense_forward(const Tensor& x, const Tensor& weight, const Tensor& bias);

struct DenseGrads {
    Tensor dx;
    Tensor dweight;
    Tensor dbias;
};

DenseGrads dense_backward(const Tensor& x, const Tensor& weight, const Tensor& dy);

}  // namespace eegnet
