#include "eegnet/training.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "eegnet/kernels.hpp"
#include "eegnet/rng.hpp"

namespace eegnet {

double sigmoid(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

double cross_entropy_binary(double p, int y) {
    if (y != 0 && y != 1) throw InvalidLabel("binary cross-entropy label must be 0 or 1, got " + std::to_string(y));
    const double pc = std::clamp(p, kProbClamp, 1.0 - kProbClamp);
    return -(y * std::log(pc) + (1 - y) * std::log(1.0 - pc));
}

double cross_entropy_multi(const Tensor& probs, std::span<const int> labels) {
    if (probs.rank() != 2 || probs.dim(0) != labels.size()) {
        throw ShapeError("cross_entropy_multi: probs " + shape_string(probs.shape()) + " vs " +
                         std::to_string(labels.size()) + " labels");
    }
    const std::size_t classes = probs.dim(1);
    double total = 0.0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const int y = labels[i];
        if (y < 0 || static_cast<std::size_t>(y) >= classes) {
            throw InvalidLabel("label " + std::to_string(y) + " outside [0, " + std::to_string(classes) + ")");
        }
        // Only the true class carries a nonzero one-hot weight.
        total += -std::log(std::max(probs.at(i, static_cast<std::size_t>(y)), kProbClamp));
    }
    return total / static_cast<double>(labels.size());
}

SampleLoss sample_loss(OutputHead head, const Tensor& logits, int label) {
    if (head == OutputHead::Sigmoid) {
        if (logits.size() != 1) throw ShapeError("sigmoid head expects one logit");
        const double p = sigmoid(logits[0]);
        return {cross_entropy_binary(p, label), Tensor({1}, p - static_cast<double>(label))};
    }
    const std::size_t classes = logits.size();
    const Tensor probs = softmax_rows(logits.reshaped({1, classes}));
    const int y = label;
    const double loss = cross_entropy_multi(probs, std::span<const int>(&y, 1));
    Tensor d = probs.reshaped({classes});
    d[static_cast<std::size_t>(label)] -= 1.0;
    return {loss, std::move(d)};
}

std::vector<double> class_probabilities(OutputHead head, std::span<const double> logits) {
    if (head == OutputHead::Sigmoid) {
        const double p = sigmoid(logits[0]);
        return {1.0 - p, p};
    }
    std::vector<double> out(logits.size());
    kernels::softmax_rows(1, logits.size(), logits, out);
    return out;
}

int predict_class(OutputHead head, std::span<const double> logits) {
    if (head == OutputHead::Sigmoid) return sigmoid(logits[0]) > 0.5 ? 1 : 0;
    // max_element returns the first maximum.
    return static_cast<int>(std::max_element(logits.begin(), logits.end()) - logits.begin());
}

OptimizerState OptimizerState::fresh(const Model& model) {
    OptimizerState s;
    for (const auto& p : model.params()) {
        s.first_moment.emplace_back(p.shape(), 0.0);
        s.second_moment.emplace_back(p.shape(), 0.0);
    }
    return s;
}

TrainingDiverged::TrainingDiverged(const std::string& what) : Error(what) {}

TrainingDiverged::TrainingDiverged(const std::string& what, TrainReport partial)
    : Error(what), partial_(std::move(partial)) {}

void optimizer_step(Model& model, const GradientSet& grads, OptimizerState& state, double lr,
                    const AdamConfig& adam) {
    auto& params = model.params();
    if (grads.grads.size() != params.size() || state.first_moment.size() != params.size() ||
        state.second_moment.size() != params.size()) {
        throw ShapeError("optimizer_step: gradient or state set does not match the model");
    }
    for (std::size_t i = 0; i < params.size(); ++i) {
        if (grads.grads[i].shape() != params[i].shape()) {
            throw ShapeError("optimizer_step: gradient shape mismatch for " + model.param_names()[i]);
        }
        if (!grads.grads[i].all_finite()) {
            throw TrainingDiverged("non-finite gradient in parameter " + model.param_names()[i]);
        }
    }

    ++state.step;
    const double t = static_cast<double>(state.step);
    const double correction1 = 1.0 - std::pow(adam.beta1, t);
    const double correction2 = 1.0 - std::pow(adam.beta2, t);
    for (std::size_t i = 0; i < params.size(); ++i) {
        auto w = params[i].values();
        const auto g = grads.grads[i].values();
        auto m = state.first_moment[i].values();
        auto v = state.second_moment[i].values();
        for (std::size_t k = 0; k < w.size(); ++k) {
            m[k] = adam.beta1 * m[k] + (1.0 - adam.beta1) * g[k];
            v[k] = adam.beta2 * v[k] + (1.0 - adam.beta2) * g[k] * g[k];
            const double m_hat = m[k] / correction1;
            const double v_hat = v[k] / correction2;
            w[k] -= lr * m_hat / (std::sqrt(v_hat) + adam.epsilon);
        }
    }
}

void TrainConfig::validate() const {
    if (epochs < 1) throw InvalidArgument("epochs must be >= 1");
    if (batch_size < 1) throw InvalidArgument("batch size must be >= 1");
    if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) throw InvalidArgument("learning rate must be > 0");
}

namespace {

void check_compatible(const Model& model, const Dataset& d, const char* which) {
    if (d.empty()) throw InvalidArgument(std::string(which) + " dataset is empty");
    if (d.length != model.input_length()) {
        throw ShapeError(std::string(which) + " samples have " + std::to_string(d.length) + " values, model expects " +
                         std::to_string(model.input_length()));
    }
    if (d.num_classes() != model.num_classes()) {
        throw InvalidLabel(std::string(which) + " dataset has " + std::to_string(d.num_classes()) +
                           " classes, model has " + std::to_string(model.num_classes()));
    }
    for (int y : d.labels) {
        if (y < 0 || static_cast<std::size_t>(y) >= model.num_classes()) {
            throw InvalidLabel(std::string(which) + " label " + std::to_string(y) + " out of range");
        }
    }
}

// Mean-loss gradient over one batch. Per-sample work runs in parallel; the
// sum over samples is taken in batch order for every element.
double batch_step_gradients(const Model& model, const Dataset& data, std::span<const std::size_t> batch,
                            std::vector<GradientSet>& per_sample, GradientSet& total) {
    const std::size_t m = batch.size();
    const double scale = 1.0 / static_cast<double>(m);
    std::vector<double> losses(m, 0.0);
    per_sample.resize(std::max(per_sample.size(), m));
    const auto count = static_cast<std::ptrdiff_t>(m);
#pragma omp parallel for schedule(dynamic, 1)
    for (std::ptrdiff_t s = 0; s < count; ++s) {
        const std::size_t idx = batch[static_cast<std::size_t>(s)];
        const auto row = data.row(idx);
        ForwardResult fwd = model_forward(model, Tensor({row.size()}, std::vector<double>(row.begin(), row.end())));
        SampleLoss sl = sample_loss(model.head(), fwd.logits, data.labels[idx]);
        for (double& d : sl.dlogits.values()) d *= scale;
        losses[static_cast<std::size_t>(s)] = sl.loss;
        per_sample[static_cast<std::size_t>(s)] = model_backward(model, fwd.cache, sl.dlogits);
    }

    const auto tensors = static_cast<std::ptrdiff_t>(total.grads.size());
#pragma omp parallel for schedule(dynamic, 1)
    for (std::ptrdiff_t p = 0; p < tensors; ++p) {
        auto out = total.grads[static_cast<std::size_t>(p)].values();
        std::fill(out.begin(), out.end(), 0.0);
        for (std::size_t s = 0; s < m; ++s) {
            const auto g = per_sample[s].grads[static_cast<std::size_t>(p)].values();
            for (std::size_t k = 0; k < out.size(); ++k) out[k] += g[k];
        }
    }

    double sum = 0.0;
    for (double l : losses) sum += l;
    return sum;
}

}  // namespace

EvalResult evaluate(const Model& model, const Dataset& data) {
    check_compatible(model, data, "evaluation");
    EvalResult out{0.0, {}, forward_batch(model, data.feature_tensor())};
    double total = 0.0;
    for (std::size_t i = 0; i < data.size(); ++i) {
        const auto row = out.logits.row(i);
        const Tensor logits({row.size()}, std::vector<double>(row.begin(), row.end()));
        total += sample_loss(model.head(), logits, data.labels[i]).loss;
        out.predictions.push_back(predict_class(model.head(), row));
    }
    out.loss = total / static_cast<double>(data.size());
    return out;
}

FitResult fit(const Dataset& train, const Dataset& val, const TrainConfig& config, Model& model) {
    config.validate();
    check_compatible(model, train, "training");
    check_compatible(model, val, "validation");

    FitResult result{TrainReport{}, model};
    TrainReport& report = result.report;
    report.initial_val_loss = evaluate(model, val).loss;

    OptimizerState state = OptimizerState::fresh(model);
    GradientSet total = GradientSet::zeros_like(model);
    std::vector<GradientSet> per_sample;
    std::vector<std::size_t> order(train.size());

    for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        Rng rng(config.seed, epoch);
        rng.shuffle(std::span<std::size_t>(order));

        double loss_sum = 0.0;
        for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
            const std::size_t end = std::min(order.size(), start + config.batch_size);
            const auto batch = std::span<const std::size_t>(order).subspan(start, end - start);
            loss_sum += batch_step_gradients(model, train, batch, per_sample, total);
            if (!std::isfinite(loss_sum)) {
                throw TrainingDiverged("training loss became non-finite in epoch " + std::to_string(epoch), report);
            }
            try {
                optimizer_step(model, total, state, config.learning_rate);
            } catch (const TrainingDiverged& e) {
                throw TrainingDiverged(std::string(e.what()) + " in epoch " + std::to_string(epoch), report);
            }
        }

        const double val_loss = evaluate(model, val).loss;
        if (!std::isfinite(val_loss)) {
            throw TrainingDiverged("validation loss became non-finite in epoch " + std::to_string(epoch), report);
        }
        report.records.push_back({epoch, loss_sum / static_cast<double>(train.size()), val_loss});
        if (report.best_epoch == 0 || val_loss < report.best_val_loss) {
            report.best_epoch = epoch;
            report.best_val_loss = val_loss;
            result.best_model = model;
        }
    }
    return result;
}

}  // namespace eegnet
