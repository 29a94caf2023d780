#include "eegnet/baselines.hpp"

#include "eegnet/error.hpp"

namespace eegnet {

std::string to_string(BaselineKind kind) {
    switch (kind) {
        case BaselineKind::LeNet1D: return "lenet1d";
        case BaselineKind::SkiplessProposed: return "skipless";
    }
    return "unknown";
}

BaselineKind baseline_kind_from_string(const std::string& name) {
    if (name == "lenet1d") return BaselineKind::LeNet1D;
    if (name == "skipless") return BaselineKind::SkiplessProposed;
    throw InvalidArgument("unknown baseline '" + name + "'");
}

std::vector<LayerSpec> lenet1d_specs(std::size_t num_classes) {
    const std::size_t out = num_classes == 2 ? 1 : num_classes;
    return {
        {LayerKind::Conv, 6, 1, 5, 0, true, true},
        {LayerKind::AvgPool, 0, 1, 2, 0, false, true},
        {LayerKind::Conv, 16, 1, 5, 0, true, true},
        {LayerKind::AvgPool, 0, 1, 2, 0, false, true},
        {LayerKind::Flatten, 0, 1, 0, 0, false, true},
        {LayerKind::Dense, 120, 1, 0, 0, true, true},
        {LayerKind::Dense, 84, 1, 0, 0, true, true},
        {LayerKind::Dense, out, 1, 0, 0, false, true},
    };
}

Model build_baseline(BaselineKind kind, std::size_t num_classes, std::size_t input_length, std::uint64_t seed) {
    if (num_classes < 2) throw InvalidArgument("num_classes must be >= 2");
    if (input_length < 16) throw InvalidArgument("input_length must be >= 16, got " + std::to_string(input_length));
    switch (kind) {
        case BaselineKind::LeNet1D: {
            Model model(lenet1d_specs(num_classes), num_classes, input_length);
            initialize_parameters(model, seed);
            return model;
        }
        case BaselineKind::SkiplessProposed: {
            ResidualConfig config;
            config.skip = false;
            return build_residual_model(config, num_classes, input_length, seed);
        }
    }
    throw InvalidArgument("unhandled baseline kind");
}

}  // namespace eegnet
