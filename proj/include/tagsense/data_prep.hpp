#pragma once

#include <cstdint>
#include <vector>

#include "tagsense/domain.hpp"

namespace tagsense {

// Downsamples every class (seeded, uniform, order-preserving) to the minimum
// per-class count. Every class in `classes` must be present in `samples`.
std::vector<LabeledSample> balance_classes(const std::vector<LabeledSample>& samples,
                                           const std::vector<MaterialClass>& classes,
                                           std::uint64_t seed);

struct SplitFractions {
    double train = 0.70;
    double validation = 0.15;
    double test = 0.15;
};

struct SplitDataset {
    std::vector<LabeledSample> train;
    std::vector<LabeledSample> validation;
    std::vector<LabeledSample> test;
    SplitFractions fractions;
    std::uint64_t seed = 0;
};

// Stratified split: each class is shuffled (seeded) and apportioned across
// train/validation/test by largest-remainder rounding. Fractions must be
// positive and sum to 1 (±1e-9); a class with fewer than 3 samples is an
// error.
SplitDataset stratified_split(const std::vector<LabeledSample>& samples,
                              SplitFractions fractions, std::uint64_t seed);

}  // namespace tagsense
