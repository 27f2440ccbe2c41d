#include "tagsense/data_prep.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "tagsense/rng.hpp"

namespace tagsense {

namespace {

std::array<std::vector<std::size_t>, kNumMaterialClasses> group_by_class(
    const std::vector<LabeledSample>& samples) {
    std::array<std::vector<std::size_t>, kNumMaterialClasses> groups;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        groups[static_cast<std::size_t>(class_index(samples[i].label))].push_back(i);
    }
    return groups;
}

// Seeded uniform choice of k indices, returned in original order.
std::vector<std::size_t> sample_without_replacement(std::vector<std::size_t> pool,
                                                    std::size_t k, Rng& rng) {
    shuffle(pool, rng);
    pool.resize(k);
    std::sort(pool.begin(), pool.end());
    return pool;
}

}  // namespace

std::vector<LabeledSample> balance_classes(const std::vector<LabeledSample>& samples,
                                           const std::vector<MaterialClass>& classes,
                                           std::uint64_t seed) {
    if (classes.empty()) throw std::invalid_argument("class list is empty");
    const auto groups = group_by_class(samples);

    std::size_t min_count = SIZE_MAX;
    for (const MaterialClass c : classes) {
        const auto& group = groups[static_cast<std::size_t>(class_index(c))];
        if (group.empty()) {
            throw std::invalid_argument("no samples for class " +
                                        std::string(to_string(c)));
        }
        min_count = std::min(min_count, group.size());
    }

    std::vector<LabeledSample> balanced;
    balanced.reserve(min_count * classes.size());
    for (const MaterialClass c : classes) {
        const auto idx = static_cast<std::size_t>(class_index(c));
        Rng rng(derive_seed(seed, static_cast<std::uint64_t>(idx)));
        for (const std::size_t i :
             sample_without_replacement(groups[idx], min_count, rng)) {
            balanced.push_back(samples[i]);
        }
    }
    return balanced;
}

SplitDataset stratified_split(const std::vector<LabeledSample>& samples,
                              SplitFractions fractions, std::uint64_t seed) {
    const std::array<double, 3> f = {fractions.train, fractions.validation,
                                     fractions.test};
    for (const double v : f) {
        if (!(v > 0.0)) throw std::invalid_argument("split fractions must be positive");
    }
    if (std::abs(f[0] + f[1] + f[2] - 1.0) > 1e-9) {
        throw std::invalid_argument("split fractions must sum to 1");
    }

    SplitDataset out;
    out.fractions = fractions;
    out.seed = seed;

    const auto groups = group_by_class(samples);
    for (std::size_t cls = 0; cls < groups.size(); ++cls) {
        std::vector<std::size_t> indices = groups[cls];
        if (indices.empty()) continue;
        if (indices.size() < 3) {
            throw std::invalid_argument(
                "class " + std::string(to_string(material_class_from_index(
                               static_cast<int>(cls)))) +
                " has fewer than 3 samples; cannot populate all splits");
        }

        Rng rng(derive_seed(seed, static_cast<std::uint64_t>(cls)));
        shuffle(indices, rng);

        // Largest-remainder apportionment across the three splits.
        const double n = static_cast<double>(indices.size());
        std::array<std::size_t, 3> counts{};
        std::array<double, 3> remainders{};
        std::size_t assigned = 0;
        for (std::size_t j = 0; j < 3; ++j) {
            const double ideal = n * f[j];
            counts[j] = static_cast<std::size_t>(std::floor(ideal));
            remainders[j] = ideal - std::floor(ideal);
            assigned += counts[j];
        }
        std::array<std::size_t, 3> order = {0, 1, 2};
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return remainders[a] > remainders[b];
        });
        for (std::size_t leftover = indices.size() - assigned, j = 0; leftover > 0;
             --leftover, ++j) {
            ++counts[order[j % 3]];
        }

        std::size_t pos = 0;
        for (std::size_t j = 0; j < 3; ++j) {
            auto& dest = (j == 0) ? out.train : (j == 1) ? out.validation : out.test;
            for (std::size_t k = 0; k < counts[j]; ++k, ++pos) {
                dest.push_back(samples[indices[pos]]);
            }
        }
    }
    return out;
}

}  // namespace tagsense
