#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "eegnet/tensor.hpp"

namespace eegnet {

enum class LayerKind {
    Conv,           // conv1d, optional ReLU (the residual model's stem is one of these)
    BasicBlock,     // residual unit, see layers.hpp
    AvgPool,        // non-overlapping window average
    GlobalAvgPool,  // [C, L] -> [C, 1]
    Flatten,        // [C, L] -> [C*L, 1]
    Dense,          // fully connected, optional ReLU
};

std::string to_string(LayerKind kind);
LayerKind layer_kind_from_string(const std::string& name);

struct LayerSpec {
    LayerKind kind = LayerKind::Conv;
    std::size_t neurons = 0;      // output channels (Conv, BasicBlock) or units (Dense)
    std::size_t stride = 1;       // Conv, BasicBlock
    std::size_t kernel_size = 0;  // Conv; pooling window for AvgPool
    std::size_t padding = 0;      // Conv
    bool relu = true;             // Conv, Dense
    bool skip = true;             // BasicBlock

    friend bool operator==(const LayerSpec&, const LayerSpec&) = default;
};

/// Output activation convention. Two-class models emit one logit read through
/// a sigmoid; everything else emits one logit per class read through softmax.
enum class OutputHead { Sigmoid, Softmax };

/// Activation shape between layers: [channels, length].
struct FeatureShape {
    std::size_t channels = 1;
    std::size_t length = 1;
    friend bool operator==(const FeatureShape&, const FeatureShape&) = default;
};

/// Ordered layer graph plus its parameters.
///
/// Parameters are stored flat, layer by layer, in the order each layer kind
/// declares them. `layer_params(i)` gives the half-open index range for layer i.
class Model {
public:
    /// Validates the shape chain and allocates zeroed parameters.
    Model(std::vector<LayerSpec> specs, std::size_t num_classes, std::size_t input_length);

    const std::vector<LayerSpec>& specs() const noexcept { return specs_; }
    std::size_t num_classes() const noexcept { return num_classes_; }
    std::size_t input_length() const noexcept { return input_length_; }
    OutputHead head() const noexcept { return num_classes_ == 2 ? OutputHead::Sigmoid : OutputHead::Softmax; }
    std::size_t output_units() const noexcept { return head() == OutputHead::Sigmoid ? 1 : num_classes_; }

    std::vector<Tensor>& params() noexcept { return params_; }
    const std::vector<Tensor>& params() const noexcept { return params_; }
    const std::vector<std::string>& param_names() const noexcept { return names_; }
    std::size_t parameter_count() const noexcept;

    struct Range {
        std::size_t begin = 0;
        std::size_t end = 0;
        friend bool operator==(const Range&, const Range&) = default;
    };
    Range layer_params(std::size_t layer) const { return ranges_.at(layer); }

    /// Shape entering layer i; index specs().size() is the final output shape.
    const FeatureShape& shape_before(std::size_t layer) const { return shapes_.at(layer); }

    friend bool operator==(const Model&, const Model&) = default;

private:
    std::vector<LayerSpec> specs_;
    std::size_t num_classes_;
    std::size_t input_length_;
    std::vector<FeatureShape> shapes_;
    std::vector<Range> ranges_;
    std::vector<std::string> names_;
    std::vector<Tensor> params_;
};

/// Per-parameter gradients, index-aligned with Model::params().
struct GradientSet {
    std::vector<Tensor> grads;

    static GradientSet zeros_like(const Model& model);
    bool all_finite() const noexcept;
};

/// He-normal weights (std = sqrt(2 / fan_in)), zero biases, and a zero
/// final layer, drawn in parameter order from one seeded stream.
void initialize_parameters(Model& model, std::uint64_t seed);

/// Residual topology: a conv stem, a chain of basic blocks, global average
/// pooling, and a dense head.
struct ResidualConfig {
    std::size_t stem_channels = 16;
    std::size_t stem_kernel = 7;
    std::size_t stem_stride = 2;
    struct Block {
        std::size_t neurons;
        std::size_t stride;
    };
    std::vector<Block> blocks = {{16, 1}, {32, 2}, {64, 2}, {64, 1}};
    bool skip = true;
};

std::vector<LayerSpec> residual_specs(const ResidualConfig& config);
Model build_residual_model(const ResidualConfig& config, std::size_t num_classes, std::size_t input_length,
                           std::uint64_t seed);

/// The fixed EEG classifier: stem conv(K=7, s=2, 16ch), blocks
/// (16,s1) (32,s2) (64,s2) (64,s1), global average pool, dense head.
Model build_proposed_model(std::size_t num_classes, std::size_t input_length, std::uint64_t seed);

/// Everything backward needs from one forward pass.
struct ModelCache {
    struct Layer {
        Tensor input;
        std::optional<Tensor> hidden;
        Tensor output;
    };
    std::vector<Layer> layers;
    std::size_t parameter_tensors = 0;
};

struct ForwardResult {
    Tensor logits;  // [output_units]
    ModelCache cache;
};

/// One sample: x holds input_length values (any shape with that many elements).
ForwardResult model_forward(const Model& model, const Tensor& x);

/// Logits only, no cache.
Tensor model_logits(const Model& model, std::span<const double> x);

/// Rows of x [m, input_length] -> logits [m, output_units]. Samples run in
/// parallel; each row is computed exactly as model_forward would.
Tensor forward_batch(const Model& model, const Tensor& x);

/// Throws ContractViolation if the cache does not come from this model.
GradientSet model_backward(const Model& model, const ModelCache& cache, const Tensor& dlogits);

}  // namespace eegnet
