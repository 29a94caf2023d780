#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "eegnet/dataset.hpp"
#include "eegnet/metrics.hpp"
#include "eegnet/training.hpp"

namespace eegnet::cli {

struct RunConfig {
    std::optional<std::filesystem::path> data;  // UCI CSV; unset means synthetic
    bool synthetic = false;
    std::size_t synthetic_per_class = 200;
    std::string architecture = "proposed";  // proposed | skipless | lenet1d
    TrainConfig train;
    std::filesystem::path out;

    void validate() const;
};

/// Files written by a successful train run.
struct TrainOutputs {
    std::filesystem::path checkpoint;  // model.ckpt
    std::filesystem::path losses;      // losses.csv: epoch,train_loss,val_loss
    std::filesystem::path report_text; // report.txt
    std::filesystem::path report_json; // report.json
    std::filesystem::path test_split;  // test.csv, raw values of the held-out rows

    static TrainOutputs in(const std::filesystem::path& dir);
};

struct TrainOutcome {
    TrainReport report;
    ClassificationReport test_report;
    TrainOutputs files;
};

/// load -> map labels -> split -> standardize -> build -> fit -> report.
/// On failure every file this call created is removed before rethrowing.
TrainOutcome cmd_train(const RunConfig& config, std::ostream& log);

struct EvalArgs {
    std::filesystem::path model;
    std::filesystem::path data;
    std::optional<Job> job;  // must match the checkpoint when given
    std::optional<std::filesystem::path> report_dir;
};

ClassificationReport cmd_eval(const EvalArgs& args, std::ostream& out);

/// Writes "id,class,p_0,...,p_{C-1}" per input row to `out`.
void cmd_predict(const std::filesystem::path& model, const std::filesystem::path& input, std::ostream& out);

/// Full command-line entry point. Returns the process exit code.
int run(int argc, const char* const* argv);

/// Shortest round-trip decimal form.
std::string format_double(double v);

}  // namespace eegnet::cli
