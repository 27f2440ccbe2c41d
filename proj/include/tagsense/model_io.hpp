#pragma once

#include <filesystem>
#include <iosfwd>
#include <vector>

#include "tagsense/features.hpp"
#include "tagsense/mlp.hpp"

namespace tagsense {

// Everything needed to classify raw feature vectors: the network, the
// standardization fitted on its training split, and the output class order.
struct ModelBundle {
    Network net;
    StandardizationParams standardization;
    std::vector<MaterialClass> classes;  // size == net output_dim
};

// Classifies an unstandardized feature vector.
std::pair<MaterialClass, std::vector<double>> classify(const ModelBundle& model,
                                                       const FeatureVector& features);

// JSON model file, format_version 1. Doubles are written in shortest
// round-trip form, so save -> load -> save is byte-identical and parameters
// survive bit-exactly. Non-finite parameters are a save error.
void save_model(const ModelBundle& model, std::ostream& out);
void save_model_file(const ModelBundle& model, const std::filesystem::path& path);
ModelBundle load_model(std::istream& in);
ModelBundle load_model_file(const std::filesystem::path& path);

}  // namespace tagsense
