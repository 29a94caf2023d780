#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "eegnet/dataset.hpp"
#include "eegnet/error.hpp"
#include "eegnet/model.hpp"

namespace eegnet {

// ---------------------------------------------------------------- losses

/// Probabilities are clamped to [kProbClamp, 1 - kProbClamp] before the log.
constexpr double kProbClamp = 1e-12;

/// -(y log p + (1 - y) log(1 - p)); throws InvalidLabel unless y is 0 or 1.
double cross_entropy_binary(double p, int y);

/// Mean over rows of -log(p[row][label]) for probs [m, C].
double cross_entropy_multi(const Tensor& probs, std::span<const int> labels);

double sigmoid(double z);

/// Loss of one sample and its gradient w.r.t. the logits.
///
/// The gradient is the fused p - y form (sigmoid head) or softmax - one_hot
/// (softmax head). The clamp only bounds the reported loss.
struct SampleLoss {
    double loss = 0.0;
    Tensor dlogits;
};
SampleLoss sample_loss(OutputHead head, const Tensor& logits, int label);

/// Class probabilities for one logit row: [1 - p, p] for the sigmoid head.
std::vector<double> class_probabilities(OutputHead head, std::span<const double> logits);

/// Argmax of class_probabilities, ties to the lowest index. For the sigmoid
/// head this is class 1 iff p > 0.5.
int predict_class(OutputHead head, std::span<const double> logits);

// ------------------------------------------------------------- optimizer

struct AdamConfig {
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

struct OptimizerState {
    std::vector<Tensor> first_moment;
    std::vector<Tensor> second_moment;
    std::uint64_t step = 0;

    static OptimizerState fresh(const Model& model);
};

struct EpochRecord {
    std::size_t epoch = 0;  // 1-based
    double train_loss = 0.0;
    double val_loss = 0.0;
    friend bool operator==(const EpochRecord&, const EpochRecord&) = default;
};

struct TrainReport {
    std::vector<EpochRecord> records;
    std::size_t best_epoch = 0;
    double best_val_loss = 0.0;
    double initial_val_loss = 0.0;  // before any update
    friend bool operator==(const TrainReport&, const TrainReport&) = default;
};

/// Raised when a gradient or loss stops being finite. Carries the epochs
/// completed so far when thrown from fit().
class TrainingDiverged : public Error {
public:
    explicit TrainingDiverged(const std::string& what);
    TrainingDiverged(const std::string& what, TrainReport partial);

    const std::optional<TrainReport>& partial_report() const noexcept { return partial_; }

private:
    std::optional<TrainReport> partial_;
};

/// One bias-corrected Adam update. Throws TrainingDiverged naming the first
/// parameter with a non-finite gradient, before touching any weight.
void optimizer_step(Model& model, const GradientSet& grads, OptimizerState& state, double lr,
                    const AdamConfig& adam = {});

// -------------------------------------------------------------- training

struct TrainConfig {
    std::size_t epochs = 20;
    std::size_t batch_size = 64;
    double learning_rate = 1e-3;
    std::uint64_t seed = 0;
    Job job = Job::FiveClass;

    void validate() const;
};

struct FitResult {
    TrainReport report;
    Model best_model;  // weights after best_epoch
};

/// Mini-batch training. Each epoch visits the training set in an order drawn
/// from (seed, epoch), averages per-sample losses, and finishes with a full
/// validation pass. The model with the lowest validation loss is returned
/// (earliest epoch on ties); `model` ends holding the final weights.
///
/// Samples inside a batch are processed in parallel; per-sample gradients are
/// reduced in sample order, so results do not depend on the thread count.
FitResult fit(const Dataset& train, const Dataset& val, const TrainConfig& config, Model& model);

struct EvalResult {
    double loss = 0.0;
    std::vector<int> predictions;
    Tensor logits;  // [n, output_units]
};

/// Forward pass over every sample: mean loss and predicted classes.
EvalResult evaluate(const Model& model, const Dataset& data);

}  // namespace eegnet
