#include "eegnet/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include "eegnet/error.hpp"
#include "json.hpp"

namespace eegnet {

namespace {

constexpr std::string_view kMagic = "EEGNET-CHECKPOINT\n";

using nlohmann::json;

void put_u64(std::string& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

std::uint64_t get_u64(const std::string& in, std::size_t& pos) {
    if (in.size() - pos < 8) throw CheckpointError("checkpoint truncated inside the weight payload");
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(in[pos + i])) << (8 * i);
    pos += 8;
    return v;
}

void put_array(std::string& out, std::span<const double> values) {
    put_u64(out, values.size());
    for (double v : values) put_u64(out, std::bit_cast<std::uint64_t>(v));
}

json layer_to_json(const LayerSpec& s) {
    return json{{"kind", to_string(s.kind)}, {"neurons", s.neurons}, {"stride", s.stride},
                {"kernel_size", s.kernel_size}, {"padding", s.padding}, {"relu", s.relu},
                {"skip", s.skip}};
}

LayerSpec layer_from_json(const json& j) {
    LayerSpec s;
    s.kind = layer_kind_from_string(j.at("kind").get<std::string>());
    s.neurons = j.at("neurons").get<std::size_t>();
    s.stride = j.at("stride").get<std::size_t>();
    s.kernel_size = j.at("kernel_size").get<std::size_t>();
    s.padding = j.at("padding").get<std::size_t>();
    s.relu = j.at("relu").get<bool>();
    s.skip = j.at("skip").get<bool>();
    return s;
}

}  // namespace

std::string serialize_checkpoint(const Checkpoint& ckpt) {
    const Model& model = ckpt.model;
    json header;
    header["format_version"] = kCheckpointVersion;
    header["job"] = to_string(ckpt.job);
    header["class_names"] = ckpt.class_names;
    json layers = json::array();
    for (const auto& s : model.specs()) layers.push_back(layer_to_json(s));
    header["architecture"] = {{"name", ckpt.meta.architecture},
                              {"num_classes", model.num_classes()},
                              {"input_length", model.input_length()},
                              {"layers", layers}};
    header["training"] = {{"best_epoch", ckpt.meta.best_epoch},
                          {"best_val_loss", ckpt.meta.best_val_loss},
                          {"initial_val_loss", ckpt.meta.initial_val_loss},
                          {"epochs", ckpt.meta.config.epochs},
                          {"batch_size", ckpt.meta.config.batch_size},
                          {"learning_rate", ckpt.meta.config.learning_rate},
                          {"seed", ckpt.meta.config.seed}};

    json arrays = json::array();
    std::string payload;
    if (ckpt.stats) {
        arrays.push_back({{"name", "stats.mean"}, {"shape", {ckpt.stats->mean.size()}}});
        put_array(payload, ckpt.stats->mean);
        arrays.push_back({{"name", "stats.std"}, {"shape", {ckpt.stats->std.size()}}});
        put_array(payload, ckpt.stats->std);
    }
    for (std::size_t i = 0; i < model.params().size(); ++i) {
        arrays.push_back({{"name", model.param_names()[i]}, {"shape", model.params()[i].shape()}});
        put_array(payload, model.params()[i].values());
    }
    header["arrays"] = arrays;

    const std::string text = header.dump(1);
    std::string out(kMagic);
    out += std::to_string(text.size());
    out += '\n';
    out += text;
    out += '\n';
    out += payload;
    return out;
}

Checkpoint parse_checkpoint(const std::string& bytes) {
    if (bytes.compare(0, kMagic.size(), kMagic) != 0) throw CheckpointError("not a checkpoint file (bad magic line)");
    std::size_t pos = kMagic.size();
    const auto nl = bytes.find('\n', pos);
    if (nl == std::string::npos) throw CheckpointError("checkpoint truncated before the header length");
    std::size_t header_len = 0;
    try {
        std::size_t used = 0;
        header_len = std::stoul(bytes.substr(pos, nl - pos), &used);
        if (used != nl - pos) throw std::invalid_argument("junk");
    } catch (const std::exception&) {
        throw CheckpointError("checkpoint header length is not a number");
    }
    pos = nl + 1;
    if (bytes.size() - pos < header_len + 1) throw CheckpointError("checkpoint truncated inside the header");

    json header;
    try {
        header = json::parse(bytes.substr(pos, header_len));
    } catch (const json::exception& e) {
        throw CheckpointError(std::string("checkpoint header is not valid JSON: ") + e.what());
    }
    pos += header_len + 1;

    try {
        const int version = header.at("format_version").get<int>();
        if (version != kCheckpointVersion) {
            throw CheckpointError("unsupported checkpoint format_version " + std::to_string(version) + " (expected " +
                                  std::to_string(kCheckpointVersion) + ")");
        }
        const auto& arch = header.at("architecture");
        std::vector<LayerSpec> specs;
        for (const auto& l : arch.at("layers")) specs.push_back(layer_from_json(l));
        Model model(std::move(specs), arch.at("num_classes").get<std::size_t>(),
                    arch.at("input_length").get<std::size_t>());

        Checkpoint ckpt{std::move(model), job_from_string(header.at("job").get<std::string>()),
                        header.at("class_names").get<std::vector<std::string>>(), std::nullopt, {}};
        if (ckpt.class_names.size() != ckpt.model.num_classes()) {
            throw CheckpointError("checkpoint class names do not match num_classes");
        }
        const auto& tr = header.at("training");
        ckpt.meta.best_epoch = tr.at("best_epoch").get<std::size_t>();
        ckpt.meta.best_val_loss = tr.at("best_val_loss").get<double>();
        ckpt.meta.initial_val_loss = tr.at("initial_val_loss").get<double>();
        ckpt.meta.config.epochs = tr.at("epochs").get<std::size_t>();
        ckpt.meta.config.batch_size = tr.at("batch_size").get<std::size_t>();
        ckpt.meta.config.learning_rate = tr.at("learning_rate").get<double>();
        ckpt.meta.config.seed = tr.at("seed").get<std::uint64_t>();
        ckpt.meta.config.job = ckpt.job;
        ckpt.meta.architecture = arch.at("name").get<std::string>();

        const auto& arrays = header.at("arrays");
        std::size_t a = 0;
        auto read_array = [&](const std::string& name, const Shape& shape) {
            if (a >= arrays.size()) throw CheckpointError("checkpoint lists fewer arrays than the architecture needs");
            const auto& entry = arrays[a++];
            if (entry.at("name").get<std::string>() != name || entry.at("shape").get<Shape>() != shape) {
                throw CheckpointError("checkpoint array '" + entry.at("name").get<std::string>() + "' " +
                                      shape_string(entry.at("shape").get<Shape>()) + " does not match expected '" +
                                      name + "' " + shape_string(shape));
            }
            const std::uint64_t count = get_u64(bytes, pos);
            if (count != shape_size(shape)) {
                throw CheckpointError("checkpoint array '" + name + "' has " + std::to_string(count) +
                                      " values, shape needs " + std::to_string(shape_size(shape)));
            }
            if ((bytes.size() - pos) / 8 < count) throw CheckpointError("checkpoint truncated inside array '" + name + "'");
            std::vector<double> values(count);
            for (auto& v : values) v = std::bit_cast<double>(get_u64(bytes, pos));
            return values;
        };

        if (!arrays.empty() && arrays[0].at("name").get<std::string>() == "stats.mean") {
            FeatureStats stats;
            stats.mean = read_array("stats.mean", {ckpt.model.input_length()});
            stats.std = read_array("stats.std", {ckpt.model.input_length()});
            ckpt.stats = std::move(stats);
        }
        for (std::size_t i = 0; i < ckpt.model.params().size(); ++i) {
            Tensor& p = ckpt.model.params()[i];
            p = Tensor(p.shape(), read_array(ckpt.model.param_names()[i], p.shape()));
        }
        if (a != arrays.size()) throw CheckpointError("checkpoint lists more arrays than the architecture uses");
        if (pos != bytes.size()) throw CheckpointError("checkpoint has trailing bytes after the payload");
        return ckpt;
    } catch (const CheckpointError&) {
        throw;
    } catch (const json::exception& e) {
        throw CheckpointError(std::string("checkpoint header is malformed: ") + e.what());
    } catch (const Error& e) {
        throw CheckpointError(std::string("checkpoint architecture is invalid: ") + e.what());
    }
}

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path) {
    const std::string bytes = serialize_checkpoint(ckpt);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw CheckpointError("cannot write checkpoint '" + path.string() + "'");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw CheckpointError("write failed for checkpoint '" + path.string() + "'");
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CheckpointError("cannot open checkpoint '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_checkpoint(buf.str());
}

}  // namespace eegnet
