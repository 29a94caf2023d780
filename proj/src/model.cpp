#include "eegnet/model.hpp"

#include <omp.h>

#include <cmath>

#include "eegnet/error.hpp"
#include "eegnet/kernels.hpp"
#include "eegnet/layers.hpp"
#include "eegnet/rng.hpp"

namespace eegnet {

std::string to_string(LayerKind kind) {
    switch (kind) {
        case LayerKind::Conv: return "conv";
        case LayerKind::BasicBlock: return "basic_block";
        case LayerKind::AvgPool: return "avg_pool";
        case LayerKind::GlobalAvgPool: return "global_avg_pool";
        case LayerKind::Flatten: return "flatten";
        case LayerKind::Dense: return "dense";
    }
    return "unknown";
}

LayerKind layer_kind_from_string(const std::string& name) {
    for (auto k : {LayerKind::Conv, LayerKind::BasicBlock, LayerKind::AvgPool, LayerKind::GlobalAvgPool,
                   LayerKind::Flatten, LayerKind::Dense}) {
        if (to_string(k) == name) return k;
    }
    throw InvalidArgument("unknown layer kind '" + name + "'");
}

Model::Model(std::vector<LayerSpec> specs, std::size_t num_classes, std::size_t input_length)
    : specs_(std::move(specs)), num_classes_(num_classes), input_length_(input_length) {
    if (num_classes_ < 2) throw InvalidArgument("model needs at least 2 classes");
    if (input_length_ < 1) throw InvalidArgument("model input length must be positive");
    if (specs_.empty() || specs_.back().kind != LayerKind::Dense || specs_.back().relu ||
        specs_.back().neurons != output_units()) {
        throw InvalidArgument("model must end in a linear dense layer with " + std::to_string(output_units()) +
                              " units");
    }

    FeatureShape cur{1, input_length_};
    shapes_.push_back(cur);
    auto add_param = [&](std::size_t layer, const std::string& name, Shape shape) {
        names_.push_back("layer" + std::to_string(layer) + "." + name);
        params_.emplace_back(std::move(shape), 0.0);
    };
    auto fail = [&](std::size_t layer, const std::string& why) {
        throw InvalidArgument("layer " + std::to_string(layer) + " (" + to_string(specs_[layer].kind) + "): " + why +
                              " at input [" + std::to_string(cur.channels) + "," + std::to_string(cur.length) + "]");
    };

    for (std::size_t i = 0; i < specs_.size(); ++i) {
        const LayerSpec& s = specs_[i];
        Range range{params_.size(), params_.size()};
        switch (s.kind) {
            case LayerKind::Conv: {
                if (s.neurons == 0 || s.kernel_size == 0 || s.stride == 0) fail(i, "zero size");
                ConvGeometry g{cur.channels, s.neurons, cur.length, s.kernel_size, s.stride, s.padding};
                if (g.out_length() < 1) fail(i, "input too short");
                add_param(i, "weight", {s.neurons, cur.channels, s.kernel_size});
                add_param(i, "bias", {s.neurons});
                cur = {s.neurons, g.out_length()};
                break;
            }
            case LayerKind::BasicBlock: {
                if (s.neurons == 0) fail(i, "zero channels");
                if (s.stride != 1 && s.stride != 2) fail(i, "stride must be 1 or 2");
                ConvGeometry g{cur.channels, s.neurons, cur.length, kBlockKernel, s.stride, kBlockPadding};
                if (g.out_length() < 1) fail(i, "input too short");
                add_param(i, "conv_a.weight", {s.neurons, cur.channels, kBlockKernel});
                add_param(i, "conv_a.bias", {s.neurons});
                add_param(i, "conv_b.weight", {s.neurons, s.neurons, kBlockKernel});
                add_param(i, "conv_b.bias", {s.neurons});
                if (s.skip && block_needs_projection(cur.channels, s.neurons, s.stride)) {
                    add_param(i, "proj.weight", {s.neurons, cur.channels, 1});
                    add_param(i, "proj.bias", {s.neurons});
                }
                cur = {s.neurons, g.out_length()};
                break;
            }
            case LayerKind::AvgPool:
                if (s.kernel_size == 0 || cur.length < s.kernel_size) fail(i, "input shorter than pooling window");
                cur = {cur.channels, cur.length / s.kernel_size};
                break;
            case LayerKind::GlobalAvgPool:
                cur = {cur.channels, 1};
                break;
            case LayerKind::Flatten:
                cur = {cur.channels * cur.length, 1};
                break;
            case LayerKind::Dense:
                if (s.neurons == 0) fail(i, "zero units");
                if (cur.length != 1) fail(i, "dense input must be flat");
                add_param(i, "weight", {cur.channels, s.neurons});
                add_param(i, "bias", {s.neurons});
                cur = {s.neurons, 1};
                break;
        }
        range.end = params_.size();
        ranges_.push_back(range);
        shapes_.push_back(cur);
    }
}

std::size_t Model::parameter_count() const noexcept {
    std::size_t n = 0;
    for (const auto& p : params_) n += p.size();
    return n;
}

GradientSet GradientSet::zeros_like(const Model& model) {
    GradientSet g;
    g.grads.reserve(model.params().size());
    for (const auto& p : model.params()) g.grads.emplace_back(p.shape(), 0.0);
    return g;
}

bool GradientSet::all_finite() const noexcept {
    for (const auto& g : grads) {
        if (!g.all_finite()) return false;
    }
    return true;
}

void initialize_parameters(Model& model, std::uint64_t seed) {
    Rng rng(seed);
    const auto last = model.specs().size() - 1;
    for (std::size_t layer = 0; layer < model.specs().size(); ++layer) {
        const auto range = model.layer_params(layer);
        for (std::size_t p = range.begin; p < range.end; ++p) {
            Tensor& t = model.params()[p];
            // Weights are the rank>=2 tensors; biases stay zero.
            if (t.rank() < 2 || layer == last) {
                t.fill(0.0);
                continue;
            }
            // Conv weights are [out, in, K]; dense weights are [in, out].
            const std::size_t fan_in = t.rank() == 3 ? t.dim(1) * t.dim(2) : t.dim(0);
            const double std = std::sqrt(2.0 / static_cast<double>(fan_in));
            for (double& v : t.values()) v = std * rng.normal();
        }
    }
}

std::vector<LayerSpec> residual_specs(const ResidualConfig& config) {
    std::vector<LayerSpec> specs;
    specs.push_back({LayerKind::Conv, config.stem_channels, config.stem_stride, config.stem_kernel,
                     config.stem_kernel / 2, true, true});
    for (const auto& b : config.blocks) {
        specs.push_back({LayerKind::BasicBlock, b.neurons, b.stride, kBlockKernel, kBlockPadding, true, config.skip});
    }
    specs.push_back({LayerKind::GlobalAvgPool, 0, 1, 0, 0, false, true});
    return specs;
}

namespace {

std::size_t head_units(std::size_t num_classes) { return num_classes == 2 ? 1 : num_classes; }

}  // namespace

Model build_residual_model(const ResidualConfig& config, std::size_t num_classes, std::size_t input_length,
                           std::uint64_t seed) {
    if (num_classes < 2) throw InvalidArgument("num_classes must be >= 2");
    auto specs = residual_specs(config);
    specs.push_back({LayerKind::Dense, head_units(num_classes), 1, 0, 0, false, true});
    Model model(std::move(specs), num_classes, input_length);
    initialize_parameters(model, seed);
    return model;
}

Model build_proposed_model(std::size_t num_classes, std::size_t input_length, std::uint64_t seed) {
    if (input_length < 16) throw InvalidArgument("input_length must be >= 16, got " + std::to_string(input_length));
    return build_residual_model(ResidualConfig{}, num_classes, input_length, seed);
}

namespace {

std::span<const Tensor> layer_span(const Model& model, std::size_t layer) {
    const auto r = model.layer_params(layer);
    return std::span<const Tensor>(model.params()).subspan(r.begin, r.end - r.begin);
}

Tensor run_layer(const Model& model, std::size_t i, const Tensor& x, std::optional<Tensor>* hidden) {
    const LayerSpec& s = model.specs()[i];
    const auto params = layer_span(model, i);
    switch (s.kind) {
        case LayerKind::Conv: {
            Tensor z = conv1d(x, params[0], params[1], s.stride, s.padding);
            return s.relu ? relu(z) : z;
        }
        case LayerKind::BasicBlock: {
            auto fwd = basic_block_forward(x, params, s.stride, s.skip);
            if (hidden) *hidden = std::move(fwd.cache.hidden);
            return std::move(fwd.y);
        }
        case LayerKind::AvgPool:
            return avg_pool(x, s.kernel_size);
        case LayerKind::GlobalAvgPool:
            return global_avg_pool(x);
        case LayerKind::Flatten:
            return x.reshaped({x.size(), 1});
        case LayerKind::Dense: {
            Tensor z = dense_forward(x, params[0], params[1]);
            return s.relu ? relu(z) : z;
        }
    }
    throw InvalidArgument("unhandled layer kind");
}

Tensor as_input(const Model& model, std::span<const double> x) {
    if (x.size() != model.input_length()) {
        throw ShapeError("model expects " + std::to_string(model.input_length()) + " input values, got " +
                         std::to_string(x.size()));
    }
    return Tensor({1, x.size()}, std::vector<double>(x.begin(), x.end()));
}

}  // namespace

ForwardResult model_forward(const Model& model, const Tensor& x) {
    Tensor cur = as_input(model, x.values());
    ModelCache cache;
    cache.parameter_tensors = model.params().size();
    cache.layers.reserve(model.specs().size());
    for (std::size_t i = 0; i < model.specs().size(); ++i) {
        std::optional<Tensor> hidden;
        Tensor out = run_layer(model, i, cur, &hidden);
        cache.layers.push_back({std::move(cur), std::move(hidden), out});
        cur = std::move(out);
    }
    Tensor logits = cur.reshaped({cur.size()});
    return {std::move(logits), std::move(cache)};
}

Tensor model_logits(const Model& model, std::span<const double> x) {
    Tensor cur = as_input(model, x);
    for (std::size_t i = 0; i < model.specs().size(); ++i) cur = run_layer(model, i, cur, nullptr);
    return cur.reshaped({cur.size()});
}

Tensor forward_batch(const Model& model, const Tensor& x) {
    if (x.rank() != 2 || x.dim(1) != model.input_length()) {
        throw ShapeError("forward_batch: expected [m, " + std::to_string(model.input_length()) + "], got " +
                         shape_string(x.shape()));
    }
    const std::size_t m = x.dim(0), units = model.output_units();
    Tensor out({m, units});
    const auto rows = static_cast<std::ptrdiff_t>(m);
#pragma omp parallel for schedule(dynamic, 4)
    for (std::ptrdiff_t r = 0; r < rows; ++r) {
        const Tensor logits = model_logits(model, x.row(static_cast<std::size_t>(r)));
        std::copy(logits.data().begin(), logits.data().end(), out.row(static_cast<std::size_t>(r)).begin());
    }
    return out;
}

GradientSet model_backward(const Model& model, const ModelCache& cache, const Tensor& dlogits) {
    if (cache.layers.size() != model.specs().size() || cache.parameter_tensors != model.params().size()) {
        throw ContractViolation("model_backward: cache was produced by a different model");
    }
    if (dlogits.size() != model.output_units() || cache.layers.back().output.size() != model.output_units()) {
        throw ContractViolation("model_backward: dlogits has " + std::to_string(dlogits.size()) +
                                " entries, model emits " + std::to_string(model.output_units()));
    }

    GradientSet grads = GradientSet::zeros_like(model);
    Tensor dy = dlogits.reshaped(cache.layers.back().output.shape());

    for (std::size_t ii = model.specs().size(); ii-- > 0;) {
        const LayerSpec& s = model.specs()[ii];
        const ModelCache::Layer& lc = cache.layers[ii];
        const auto range = model.layer_params(ii);
        const auto params = layer_span(model, ii);
        if (lc.input.shape() != Shape{model.shape_before(ii).channels, model.shape_before(ii).length}) {
            throw ContractViolation("model_backward: cached activation shape mismatch at layer " + std::to_string(ii));
        }
        switch (s.kind) {
            case LayerKind::Conv: {
                const Tensor dz = s.relu ? relu_backward(dy, lc.output) : dy;
                ConvGrads g = conv1d_backward(lc.input, params[0], dz, s.stride, s.padding);
                grads.grads[range.begin] = std::move(g.dweight);
                grads.grads[range.begin + 1] = std::move(g.dbias);
                dy = std::move(g.dx);
                break;
            }
            case LayerKind::BasicBlock: {
                if (!lc.hidden) throw ContractViolation("model_backward: block cache lacks hidden activation");
                BlockCache bc{lc.input, *lc.hidden, lc.output, s.stride, s.skip, {}};
                for (const auto& p : params) bc.param_shapes.push_back(p.shape());
                BlockBackward g = basic_block_backward(dy, bc, params);
                for (std::size_t k = 0; k < g.dparams.size(); ++k) grads.grads[range.begin + k] = std::move(g.dparams[k]);
                dy = std::move(g.dx);
                break;
            }
            case LayerKind::AvgPool:
                dy = avg_pool_backward(dy, lc.input.shape(), s.kernel_size);
                break;
            case LayerKind::GlobalAvgPool:
                dy = global_avg_pool_backward(dy, lc.input.shape());
                break;
            case LayerKind::Flatten:
                dy = dy.reshaped(lc.input.shape());
                break;
            case LayerKind::Dense: {
                const Tensor dz = s.relu ? relu_backward(dy, lc.output) : dy;
                DenseGrads g = dense_backward(lc.input, params[0], dz);
                grads.grads[range.begin] = std::move(g.dweight);
                grads.grads[range.begin + 1] = std::move(g.dbias);
                dy = std::move(g.dx);
                break;
            }
        }
    }
    return grads;
}

}  // namespace eegnet
