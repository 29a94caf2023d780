#include "eegnet/error.hpp"
#include "eegnet/kernels.hpp"

namespace eegnet {

std::size_t ConvGeometry::out_length() const noexcept {
    if (stride == 0 || length + 2 * padding < kernel) return 0;
    return (length + 2 * padding - kernel) / stride + 1;
}

void ConvGeometry::validate() const {
    if (stride == 0) throw ShapeError("conv1d: stride must be positive");
    if (kernel == 0) throw ShapeError("conv1d: kernel size must be positive");
    if (out_length() < 1) {
        throw ShapeError("conv1d: kernel " + std::to_string(kernel) + " does not fit length " +
                         std::to_string(length) + " with padding " + std::to_string(padding));
    }
}

Tensor conv1d(const Tensor& input, const Tensor& kernels, const Tensor& bias, std::size_t stride,
              std::size_t padding) {
    if (input.rank() != 2) throw ShapeError("conv1d: input must be [C_in, L], got " + shape_string(input.shape()));
    if (kernels.rank() != 3) {
        throw ShapeError("conv1d: kernels must be [C_out, C_in, K], got " + shape_string(kernels.shape()));
    }
    if (kernels.dim(1) != input.dim(0)) {
        throw ShapeError("conv1d: kernel expects " + std::to_string(kernels.dim(1)) + " input channels, input has " +
                         std::to_string(input.dim(0)));
    }
    if (bias.size() != kernels.dim(0)) throw ShapeError("conv1d: bias length must equal C_out");

    ConvGeometry g{input.dim(0), kernels.dim(0), input.dim(1), kernels.dim(2), stride, padding};
    g.validate();
    Tensor out({g.out_channels, g.out_length()});
    kernels::conv1d_forward(g, input.values(), kernels.values(), bias.values(), out.values());
    return out;
}

Tensor matmul(const Tensor& a, const Tensor& b) {
    if (a.rank() != 2 || b.rank() != 2) throw ShapeError("matmul: operands must be rank 2");
    if (a.dim(1) != b.dim(0)) {
        throw ShapeError("matmul: inner dimensions differ, " + shape_string(a.shape()) + " x " +
                         shape_string(b.shape()));
    }
    Tensor c({a.dim(0), b.dim(1)});
    kernels::matmul(a.dim(0), a.dim(1), b.dim(1), a.values(), b.values(), c.values());
    return c;
}

Tensor relu(const Tensor& x) {
    Tensor y(x.shape());
    kernels::relu(x.values(), y.values());
    return y;
}

Tensor softmax_rows(const Tensor& x) {
    if (x.rank() != 2 || x.dim(1) < 2) throw ShapeError("softmax_rows: input must be [m, C] with C >= 2");
    Tensor y(x.shape());
    kernels::softmax_rows(x.dim(0), x.dim(1), x.values(), y.values());
    return y;
}

}  // namespace eegnet
