#pragma once

#include <cstdint>
#include <string>

#include "eegnet/model.hpp"

namespace eegnet {

/// Comparison models for the loss-ablation experiment.
enum class BaselineKind {
    LeNet1D,           // conv5(6) pool2 conv5(16) pool2 flatten dense120 dense84 dense(C)
    SkiplessProposed,  // the residual model with every shortcut removed
};

std::string to_string(BaselineKind kind);
BaselineKind baseline_kind_from_string(const std::string& name);

std::vector<LayerSpec> lenet1d_specs(std::size_t num_classes);

Model build_baseline(BaselineKind kind, std::size_t num_classes, std::size_t input_length, std::uint64_t seed);

}  // namespace eegnet
