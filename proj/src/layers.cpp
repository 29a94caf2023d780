#include "eegnet/layers.hpp"

#include "eegnet/error.hpp"

namespace eegnet {

ConvGrads conv1d_backward(const Tensor& x, const Tensor& weight, const Tensor& dy, std::size_t stride,
                          std::size_t padding) {
    ConvGeometry g{x.dim(0), weight.dim(0), x.dim(1), weight.dim(2), stride, padding};
    g.validate();
    if (dy.shape() != Shape{g.out_channels, g.out_length()}) {
        throw ShapeError("conv1d_backward: dy shape " + shape_string(dy.shape()) + " does not match output");
    }
    ConvGrads grads{Tensor(x.shape()), Tensor(weight.shape()), Tensor({g.out_channels})};
    kernels::conv1d_backward_input(g, dy.values(), weight.values(), grads.dx.values());
    kernels::conv1d_backward_params(g, x.values(), dy.values(), grads.dweight.values(), grads.dbias.values());
    return grads;
}

Tensor relu_backward(const Tensor& dy, const Tensor& activated) {
    if (dy.shape() != activated.shape()) throw ShapeError("relu_backward: shape mismatch");
    Tensor dz(dy.shape());
    for (std::size_t i = 0; i < dz.size(); ++i) dz[i] = activated[i] > 0.0 ? dy[i] : 0.0;
    return dz;
}

bool block_needs_projection(std::size_t in_channels, std::size_t neurons, std::size_t stride) {
    return in_channels != neurons || stride != 1;
}

namespace {

std::size_t expected_block_params(const Tensor& x, std::span<const Tensor> params, std::size_t stride, bool skip) {
    if (params.size() < 4) throw ShapeError("basic block: expected at least 4 parameter tensors");
    const std::size_t n = params[0].dim(0);
    return (skip && block_needs_projection(x.dim(0), n, stride)) ? 6 : 4;
}

}  // namespace

BlockForward basic_block_forward(const Tensor& x, std::span<const Tensor> params, std::size_t stride, bool skip) {
    if (x.rank() != 2) throw ShapeError("basic block: input must be [C, L]");
    if (stride != 1 && stride != 2) throw ShapeError("basic block: stride must be 1 or 2");
    const std::size_t want = expected_block_params(x, params, stride, skip);
    if (params.size() != want) {
        throw ShapeError("basic block: expected " + std::to_string(want) + " parameter tensors, got " +
                         std::to_string(params.size()));
    }

    Tensor hidden = relu(conv1d(x, params[0], params[1], stride, kBlockPadding));
    Tensor z = conv1d(hidden, params[2], params[3], 1, kBlockPadding);
    if (skip) {
        if (want == 6) {
            const Tensor shortcut = conv1d(x, params[4], params[5], stride, 0);
            if (shortcut.shape() != z.shape()) throw ShapeError("basic block: projection shape mismatch");
            for (std::size_t i = 0; i < z.size(); ++i) z[i] += shortcut[i];
        } else {
            if (x.shape() != z.shape()) throw ShapeError("basic block: identity shortcut shape mismatch");
            for (std::size_t i = 0; i < z.size(); ++i) z[i] += x[i];
        }
    }
    Tensor y = relu(z);

    BlockCache cache{x, std::move(hidden), y, stride, skip, {}};
    for (const auto& p : params) cache.param_shapes.push_back(p.shape());
    return {std::move(y), std::move(cache)};
}

BlockBackward basic_block_backward(const Tensor& dy, const BlockCache& cache, std::span<const Tensor> params) {
    if (dy.shape() != cache.y.shape()) {
        throw ContractViolation("basic block backward: dy shape " + shape_string(dy.shape()) +
                                " does not match cached output " + shape_string(cache.y.shape()));
    }
    if (params.size() != cache.param_shapes.size()) {
        throw ContractViolation("basic block backward: parameter count differs from forward call");
    }
    for (std::size_t i = 0; i < params.size(); ++i) {
        if (params[i].shape() != cache.param_shapes[i]) {
            throw ContractViolation("basic block backward: parameter " + std::to_string(i) +
                                    " shape differs from forward call");
        }
    }

    const Tensor dz = relu_backward(dy, cache.y);
    ConvGrads gb = conv1d_backward(cache.hidden, params[2], dz, 1, kBlockPadding);
    const Tensor dh = relu_backward(gb.dx, cache.hidden);
    ConvGrads ga = conv1d_backward(cache.x, params[0], dh, cache.stride, kBlockPadding);

    BlockBackward out{std::move(ga.dx), {}};
    out.dparams.push_back(std::move(ga.dweight));
    out.dparams.push_back(std::move(ga.dbias));
    out.dparams.push_back(std::move(gb.dweight));
    out.dparams.push_back(std::move(gb.dbias));

    // The additive shortcut routes dz straight back to x as well.
    if (cache.skip) {
        if (params.size() == 6) {
            ConvGrads gp = conv1d_backward(cache.x, params[4], dz, cache.stride, 0);
            for (std::size_t i = 0; i < out.dx.size(); ++i) out.dx[i] += gp.dx[i];
            out.dparams.push_back(std::move(gp.dweight));
            out.dparams.push_back(std::move(gp.dbias));
        } else {
            for (std::size_t i = 0; i < out.dx.size(); ++i) out.dx[i] += dz[i];
        }
    }
    return out;
}

Tensor avg_pool(const Tensor& x, std::size_t window) {
    if (x.rank() != 2 || window == 0 || x.dim(1) < window) throw ShapeError("avg_pool: input shorter than window");
    const std::size_t c = x.dim(0), l = x.dim(1), lout = l / window;
    Tensor y({c, lout});
    for (std::size_t ch = 0; ch < c; ++ch) {
        for (std::size_t i = 0; i < lout; ++i) {
            double acc = 0.0;
            for (std::size_t j = 0; j < window; ++j) acc += x[ch * l + i * window + j];
            y[ch * lout + i] = acc / static_cast<double>(window);
        }
    }
    return y;
}

Tensor avg_pool_backward(const Tensor& dy, const Shape& input_shape, std::size_t window) {
    const std::size_t c = input_shape.at(0), l = input_shape.at(1), lout = l / window;
    if (dy.shape() != Shape{c, lout}) throw ShapeError("avg_pool_backward: dy shape mismatch");
    Tensor dx(input_shape, 0.0);
    const double scale = 1.0 / static_cast<double>(window);
    for (std::size_t ch = 0; ch < c; ++ch) {
        for (std::size_t i = 0; i < lout; ++i) {
            for (std::size_t j = 0; j < window; ++j) dx[ch * l + i * window + j] = dy[ch * lout + i] * scale;
        }
    }
    return dx;
}

Tensor global_avg_pool(const Tensor& x) {
    if (x.rank() != 2) throw ShapeError("global_avg_pool: input must be [C, L]");
    const std::size_t c = x.dim(0), l = x.dim(1);
    Tensor y({c, 1});
    for (std::size_t ch = 0; ch < c; ++ch) {
        double acc = 0.0;
        for (std::size_t i = 0; i < l; ++i) acc += x[ch * l + i];
        y[ch] = acc / static_cast<double>(l);
    }
    return y;
}

Tensor global_avg_pool_backward(const Tensor& dy, const Shape& input_shape) {
    const std::size_t c = input_shape.at(0), l = input_shape.at(1);
    if (dy.size() != c) throw ShapeError("global_avg_pool_backward: dy shape mismatch");
    Tensor dx(input_shape);
    for (std::size_t ch = 0; ch < c; ++ch) {
        const double share = dy[ch] / static_cast<double>(l);
        for (std::size_t i = 0; i < l; ++i) dx[ch * l + i] = share;
    }
    return dx;
}

Tensor dense_forward(const Tensor& x, const Tensor& weight, const Tensor& bias) {
    if (weight.rank() != 2 || x.size() != weight.dim(0) || bias.size() != weight.dim(1)) {
        throw ShapeError("dense: input " + shape_string(x.shape()) + " incompatible with weight " +
                         shape_string(weight.shape()));
    }
    Tensor y = matmul(x.reshaped({1, x.size()}), weight);
    for (std::size_t j = 0; j < y.size(); ++j) y[j] += bias[j];
    return y.reshaped({y.size(), 1});
}

DenseGrads dense_backward(const Tensor& x, const Tensor& weight, const Tensor& dy) {
    if (dy.size() != weight.dim(1) || x.size() != weight.dim(0)) throw ShapeError("dense_backward: shape mismatch");
    const std::size_t in = weight.dim(0), out = weight.dim(1);
    Tensor dweight = matmul(x.reshaped({in, 1}), dy.reshaped({1, out}));
    Tensor dx = matmul(weight, dy.reshaped({out, 1}));
    return {std::move(dx), std::move(dweight), dy.reshaped({out})};
}

}  // namespace eegnet
