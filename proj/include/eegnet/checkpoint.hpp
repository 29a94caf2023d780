#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "eegnet/dataset.hpp"
#include "eegnet/model.hpp"
#include "eegnet/training.hpp"

namespace eegnet {

constexpr int kCheckpointVersion = 1;

struct TrainingMetadata {
    std::size_t best_epoch = 0;
    double best_val_loss = 0.0;
    double initial_val_loss = 0.0;
    TrainConfig config;
    std::string architecture = "proposed";
};

struct Checkpoint {
    Model model;
    Job job = Job::FiveClass;
    std::vector<std::string> class_names;
    std::optional<FeatureStats> stats;
    TrainingMetadata meta;
};

// File layout:
//
//   EEGNET-CHECKPOINT\n
//   <header byte count, decimal>\n
//   <JSON header>\n
//   payload
//
// The header carries format_version, the layer list, job, class names,
// training metadata and an ordered "arrays" list of {name, shape}. The
// payload holds those arrays in the same order, each as a little-endian
// uint64 element count followed by that many little-endian IEEE-754
// doubles. Feature statistics, when present, come first as stats.mean and
// stats.std, then the model parameters in layer order.

std::string serialize_checkpoint(const Checkpoint& ckpt);
/// Throws CheckpointError on a bad magic line, unsupported version,
/// truncation, trailing bytes, or arrays that do not fit the architecture.
Checkpoint parse_checkpoint(const std::string& bytes);

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace eegnet
