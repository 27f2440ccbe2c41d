#include "tagsense/model_io.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>

#include <json.hpp>

namespace tagsense {

namespace {

constexpr int kFormatVersion = 1;

void require_finite(const std::vector<double>& values, const char* what) {
    for (const double v : values) {
        if (!std::isfinite(v)) {
            throw std::runtime_error(std::string("cannot save model: non-finite ") + what);
        }
    }
}

}  // namespace

std::pair<MaterialClass, std::vector<double>> classify(const ModelBundle& model,
                                                       const FeatureVector& features) {
    const FeatureVector scaled = apply_standardization(model.standardization, features);
    auto [index, probs] = predict(model.net, scaled.values);
    return {model.classes[static_cast<std::size_t>(index)], std::move(probs)};
}

void save_model(const ModelBundle& model, std::ostream& out) {
    if (static_cast<int>(model.classes.size()) != model.net.spec.output_dim) {
        throw std::runtime_error("model class list does not match network output_dim");
    }

    nlohmann::json doc;
    doc["format"] = "tagsense-model";
    doc["format_version"] = kFormatVersion;
    doc["spec"] = {{"input_dim", model.net.spec.input_dim},
                   {"hidden_layers", model.net.spec.hidden_layers},
                   {"output_dim", model.net.spec.output_dim},
                   {"seed", model.net.spec.seed}};

    nlohmann::json layers = nlohmann::json::array();
    for (const Layer& layer : model.net.layers) {
        require_finite(layer.weights, "weights");
        require_finite(layer.biases, "biases");
        layers.push_back({{"in_dim", layer.in_dim},
                          {"out_dim", layer.out_dim},
                          {"weights", layer.weights},
                          {"biases", layer.biases}});
    }
    doc["layers"] = std::move(layers);

    doc["standardization"] = {
        {"mode", std::string(to_string(model.standardization.mode))},
        {"mean", model.standardization.mean},
        {"stddev", model.standardization.stddev}};

    std::vector<std::string> class_names;
    class_names.reserve(model.classes.size());
    for (const MaterialClass c : model.classes) class_names.emplace_back(to_string(c));
    doc["classes"] = std::move(class_names);

    out << doc.dump(2) << '\n';
}

void save_model_file(const ModelBundle& model, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write model file: " + path.string());
    save_model(model, out);
}

ModelBundle load_model(std::istream& in) {
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error(std::string("malformed model file: ") + e.what());
    }

    if (doc.value("format", "") != "tagsense-model") {
        throw std::runtime_error("not a tagsense model file");
    }
    if (doc.value("format_version", -1) != kFormatVersion) {
        throw std::runtime_error("unsupported model format_version");
    }

    ModelBundle model;
    const auto& spec = doc.at("spec");
    model.net.spec.input_dim = spec.at("input_dim").get<int>();
    model.net.spec.hidden_layers = spec.at("hidden_layers").get<std::vector<int>>();
    model.net.spec.output_dim = spec.at("output_dim").get<int>();
    model.net.spec.seed = spec.at("seed").get<std::uint64_t>();
    validate(model.net.spec);

    for (const auto& jlayer : doc.at("layers")) {
        Layer layer;
        layer.in_dim = jlayer.at("in_dim").get<int>();
        layer.out_dim = jlayer.at("out_dim").get<int>();
        layer.weights = jlayer.at("weights").get<std::vector<double>>();
        layer.biases = jlayer.at("biases").get<std::vector<double>>();
        if (layer.weights.size() != static_cast<std::size_t>(layer.in_dim) *
                                        static_cast<std::size_t>(layer.out_dim) ||
            layer.biases.size() != static_cast<std::size_t>(layer.out_dim)) {
            throw std::runtime_error("layer shape mismatch in model file");
        }
        model.net.layers.push_back(std::move(layer));
    }

    // Cross-check the layer chain against the spec.
    std::vector<int> dims;
    dims.push_back(model.net.spec.input_dim);
    dims.insert(dims.end(), model.net.spec.hidden_layers.begin(),
                model.net.spec.hidden_layers.end());
    dims.push_back(model.net.spec.output_dim);
    if (model.net.layers.size() + 1 != dims.size()) {
        throw std::runtime_error("layer count does not match spec in model file");
    }
    for (std::size_t l = 0; l < model.net.layers.size(); ++l) {
        if (model.net.layers[l].in_dim != dims[l] ||
            model.net.layers[l].out_dim != dims[l + 1]) {
            throw std::runtime_error("layer dims do not match spec in model file");
        }
    }

    const auto& jstd = doc.at("standardization");
    model.standardization.mode = parse_feature_mode(jstd.at("mode").get<std::string>());
    model.standardization.mean = jstd.at("mean").get<std::vector<double>>();
    model.standardization.stddev = jstd.at("stddev").get<std::vector<double>>();
    const auto dim = static_cast<std::size_t>(feature_dim(model.standardization.mode));
    if (model.standardization.mean.size() != dim ||
        model.standardization.stddev.size() != dim ||
        dim != static_cast<std::size_t>(model.net.spec.input_dim)) {
        throw std::runtime_error("standardization shape mismatch in model file");
    }

    for (const auto& name : doc.at("classes")) {
        model.classes.push_back(parse_material_class(name.get<std::string>()));
    }
    if (static_cast<int>(model.classes.size()) != model.net.spec.output_dim) {
        throw std::runtime_error("class list does not match output_dim in model file");
    }
    return model;
}

ModelBundle load_model_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open model file: " + path.string());
    return load_model(in);
}

}  // namespace tagsense
