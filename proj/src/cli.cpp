#include "eegnet/cli.hpp"

#include <omp.h>

#include <charconv>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "eegnet/baselines.hpp"
#include "eegnet/checkpoint.hpp"
#include "eegnet/error.hpp"

namespace eegnet::cli {

namespace fs = std::filesystem;

std::string format_double(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

void RunConfig::validate() const {
    if (data && synthetic) throw InvalidArgument("--data and --synthetic are mutually exclusive");
    if (!data && !synthetic) throw InvalidArgument("a data source is required: --data <csv> or --synthetic");
    if (synthetic && synthetic_per_class < 1) throw InvalidArgument("--synthetic-per-class must be >= 1");
    if (out.empty()) throw InvalidArgument("--out is required");
    if (architecture != "proposed" && architecture != "skipless" && architecture != "lenet1d") {
        throw InvalidArgument("unknown architecture '" + architecture + "'");
    }
    train.validate();
}

TrainOutputs TrainOutputs::in(const fs::path& dir) {
    return {dir / "model.ckpt", dir / "losses.csv", dir / "report.txt", dir / "report.json", dir / "test.csv"};
}

namespace {

Model build_architecture(const std::string& name, std::size_t classes, std::uint64_t seed) {
    if (name == "proposed") return build_proposed_model(classes, kSegmentLength, seed);
    return build_baseline(baseline_kind_from_string(name), classes, kSegmentLength, seed);
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write '" + path.string() + "'");
    out << text;
    if (!out) throw Error("write failed for '" + path.string() + "'");
}

std::string losses_csv(const TrainReport& report) {
    std::string s = "epoch,train_loss,val_loss\n";
    for (const auto& r : report.records) {
        s += std::to_string(r.epoch) + "," + format_double(r.train_loss) + "," + format_double(r.val_loss) + "\n";
    }
    return s;
}

ClassificationReport report_for(const Model& model, const Dataset& data) {
    const EvalResult eval = evaluate(model, data);
    return classification_report(
        confusion_matrix(eval.predictions, data.labels, model.num_classes(), data.class_names));
}

void write_report(const ClassificationReport& report, const fs::path& text_path, const fs::path& json_path) {
    write_text(text_path, render_text(report));
    write_text(json_path, render_json(report).dump(2) + "\n");
}

// Removes the files a failed command created, and the output directory if
// the command created it.
class OutputGuard {
public:
    explicit OutputGuard(const fs::path& dir) : dir_(dir) {
        if (!fs::exists(dir_)) {
            fs::create_directories(dir_);
            created_dir_ = true;
        }
    }
    ~OutputGuard() {
        if (committed_) return;
        std::error_code ec;
        for (const auto& f : files_) fs::remove(f, ec);
        if (created_dir_ && fs::is_empty(dir_, ec)) fs::remove(dir_, ec);
    }
    OutputGuard(const OutputGuard&) = delete;
    OutputGuard& operator=(const OutputGuard&) = delete;

    const fs::path& track(const fs::path& file) {
        files_.push_back(file);
        return file;
    }
    void commit() { committed_ = true; }

private:
    fs::path dir_;
    bool created_dir_ = false;
    bool committed_ = false;
    std::vector<fs::path> files_;
};

}  // namespace

TrainOutcome cmd_train(const RunConfig& config, std::ostream& log) {
    config.validate();
    const Job job = config.train.job;

    Dataset raw = config.synthetic
                      ? synth_generate(config.train.seed, config.synthetic_per_class, num_classes(job))
                      : map_labels_for_job(load_csv(*config.data), job);
    if (raw.empty()) throw InvalidArgument("no samples left after mapping labels for the " + to_string(job) + " job");

    const Split parts = split(raw, SplitSpec{0.76, 0.12, 0.12, config.train.seed});
    const Standardized std_sets = standardize(parts.train, {parts.val, parts.test});
    const Dataset& train = std_sets.train;
    const Dataset& val = std_sets.others[0];
    const Dataset& test = std_sets.others[1];
    log << "samples: train " << train.size() << ", val " << val.size() << ", test " << test.size() << "\n";

    Model model = build_architecture(config.architecture, num_classes(job), config.train.seed);
    FitResult fitted = fit(train, val, config.train, model);
    log << "best epoch " << fitted.report.best_epoch << ", val loss " << format_double(fitted.report.best_val_loss)
        << "\n";

    TrainOutcome outcome{fitted.report, report_for(fitted.best_model, test), TrainOutputs::in(config.out)};
    const TrainOutputs& files = outcome.files;

    OutputGuard guard(config.out);
    Checkpoint ckpt{fitted.best_model, job, raw.class_names, train.stats, {}};
    ckpt.meta.best_epoch = fitted.report.best_epoch;
    ckpt.meta.best_val_loss = fitted.report.best_val_loss;
    ckpt.meta.initial_val_loss = fitted.report.initial_val_loss;
    ckpt.meta.config = config.train;
    ckpt.meta.architecture = config.architecture;
    save_checkpoint(ckpt, guard.track(files.checkpoint));
    write_text(guard.track(files.losses), losses_csv(fitted.report));
    guard.track(files.report_text);
    guard.track(files.report_json);
    write_report(outcome.test_report, files.report_text, files.report_json);
    write_csv(parts.test, guard.track(files.test_split));
    guard.commit();

    log << render_text(outcome.test_report);
    return outcome;
}

ClassificationReport cmd_eval(const EvalArgs& args, std::ostream& out) {
    const Checkpoint ckpt = load_checkpoint(args.model);
    if (args.job && *args.job != ckpt.job) {
        throw InvalidLabel("checkpoint was trained for the " + to_string(ckpt.job) + " job, not " +
                           to_string(*args.job));
    }
    Dataset data = map_labels_for_job(load_csv(args.data), ckpt.job);
    if (data.empty()) throw InvalidArgument("no samples in '" + args.data.string() + "' belong to the " +
                                            to_string(ckpt.job) + " job");
    if (ckpt.stats) data = apply_stats(data, *ckpt.stats);

    const ClassificationReport report = report_for(ckpt.model, data);
    if (args.report_dir) {
        OutputGuard guard(*args.report_dir);
        const TrainOutputs files = TrainOutputs::in(*args.report_dir);
        guard.track(files.report_text);
        guard.track(files.report_json);
        write_report(report, files.report_text, files.report_json);
        guard.commit();
    }
    out << render_text(report);
    return report;
}

void cmd_predict(const fs::path& model_path, const fs::path& input, std::ostream& out) {
    const Checkpoint ckpt = load_checkpoint(model_path);
    UnlabeledRows rows = load_unlabeled_csv(input);
    if (rows.length != ckpt.model.input_length()) throw ShapeError("input rows do not match the model input length");
    if (rows.ids.empty()) return;
    if (ckpt.stats) apply_stats_inplace(rows.features, rows.length, *ckpt.stats);

    const Tensor logits = forward_batch(ckpt.model, Tensor({rows.ids.size(), rows.length}, std::move(rows.features)));
    std::string text;
    for (std::size_t i = 0; i < rows.ids.size(); ++i) {
        const auto probs = class_probabilities(ckpt.model.head(), logits.row(i));
        text += rows.ids[i];
        text += ',';
        text += ckpt.class_names[static_cast<std::size_t>(predict_class(ckpt.model.head(), logits.row(i)))];
        for (double p : probs) {
            text += ',';
            text += format_double(p);
        }
        text += '\n';
    }
    out << text;
}

int run(int argc, const char* const* argv) {
    CLI::App app{"1D residual CNN for epileptic EEG segment classification"};
    app.require_subcommand(1);

    int threads = 0;
    app.add_option("--threads", threads, "OpenMP threads (0 = runtime default)");

    RunConfig rc;
    std::string data_path, job_name = "multi";
    auto* train = app.add_subcommand("train", "train a model and write checkpoint, loss log and test report");
    train->add_option("--data", data_path, "UCI epileptic seizure recognition CSV");
    train->add_flag("--synthetic", rc.synthetic, "use generated surrogate data instead of a CSV");
    train->add_option("--synthetic-per-class", rc.synthetic_per_class, "surrogate samples per class");
    train->add_option("--job", job_name, "binary | multi")->check(CLI::IsMember({"binary", "multi", "five"}));
    train->add_option("--epochs", rc.train.epochs, "training epochs")->check(CLI::PositiveNumber);
    train->add_option("--seed", rc.train.seed, "seed for split, shuffling and initialization");
    train->add_option("--batch-size", rc.train.batch_size, "mini-batch size")->check(CLI::PositiveNumber);
    train->add_option("--lr", rc.train.learning_rate, "Adam learning rate")->check(CLI::PositiveNumber);
    train->add_option("--arch", rc.architecture, "proposed | skipless | lenet1d")
        ->check(CLI::IsMember({"proposed", "skipless", "lenet1d"}));
    train->add_option("--out", rc.out, "output directory")->required();

    EvalArgs ea;
    std::string eval_job, report_dir;
    auto* eval = app.add_subcommand("eval", "evaluate a checkpoint on a labeled CSV");
    eval->add_option("--model", ea.model, "checkpoint file")->required();
    eval->add_option("--data", ea.data, "labeled CSV")->required();
    eval->add_option("--job", eval_job, "binary | multi (must match the checkpoint)")
        ->check(CLI::IsMember({"binary", "multi", "five"}));
    eval->add_option("--report-out", report_dir, "directory for report.txt and report.json");

    fs::path predict_model, predict_input;
    auto* predict = app.add_subcommand("predict", "print class and probabilities for unlabeled rows");
    predict->add_option("--model", predict_model, "checkpoint file")->required();
    predict->add_option("--input", predict_input, "CSV of identifier + 178 values per row")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }
    if (threads > 0) omp_set_num_threads(threads);

    try {
        if (*train) {
            if (!data_path.empty()) rc.data = data_path;
            rc.train.job = job_from_string(job_name);
            cmd_train(rc, std::cout);
        } else if (*eval) {
            if (!eval_job.empty()) ea.job = job_from_string(eval_job);
            if (!report_dir.empty()) ea.report_dir = report_dir;
            cmd_eval(ea, std::cout);
        } else if (*predict) {
            cmd_predict(predict_model, predict_input, std::cout);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

}  // namespace eegnet::cli
