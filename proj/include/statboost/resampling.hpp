#ifndef STATBOOST_RESAMPLING_HPP
#define STATBOOST_RESAMPLING_HPP

#include <cstdint>
#include <vector>

#include "statboost/dataset.hpp"

namespace statboost {

enum class ResamplingScheme { KFold, Subsample, Bootstrap };

struct ResamplingPlan {
    ResamplingScheme scheme = ResamplingScheme::Subsample;
    int k = 5;               // kfold
    double fraction = 0.5;   // subsample
    int replications = 25;   // subsample / bootstrap count B
    std::uint64_t seed = 1;

    static ResamplingPlan kfold(int k, std::uint64_t seed) {
        return ResamplingPlan{ResamplingScheme::KFold, k, 0.0, 0, seed};
    }
    static ResamplingPlan subsample(double fraction, int b, std::uint64_t seed) {
        return ResamplingPlan{ResamplingScheme::Subsample, 0, fraction, b, seed};
    }
    static ResamplingPlan bootstrap(int b, std::uint64_t seed) {
        return ResamplingPlan{ResamplingScheme::Bootstrap, 0, 0.0, b, seed};
    }
};

struct FoldSplit {
    std::vector<std::size_t> train;  // multiset for bootstrap
    std::vector<std::size_t> test;
};

/// Deterministic train/test index splits for a dataset of the given size.
/// kfold: k disjoint test sets covering every index; subsample: B training
/// sets of floor(fraction*n) indices drawn without replacement, test is the
/// complement; bootstrap: B training multisets of size n drawn with
/// replacement, test is the out-of-bag set.
std::vector<FoldSplit> make_folds(std::size_t n, const ResamplingPlan& plan);

inline std::vector<FoldSplit> make_folds(const Dataset& d, const ResamplingPlan& plan) {
    return make_folds(static_cast<std::size_t>(d.rows()), plan);
}

/// B index sets of size floor(n/2) drawn without replacement; the resample
/// scheme behind stability selection.
std::vector<std::vector<std::size_t>> half_subsamples(std::size_t n, int B,
                                                      std::uint64_t seed);

inline std::vector<std::vector<std::size_t>> half_subsamples(const Dataset& d, int B,
                                                             std::uint64_t seed) {
    return half_subsamples(static_cast<std::size_t>(d.rows()), B, seed);
}

}  // namespace statboost

#endif  // STATBOOST_RESAMPLING_HPP
