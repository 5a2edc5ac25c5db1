#include "statboost/resampling.hpp"

#include <algorithm>
#include <numeric>

namespace statboost {

namespace {

// First m entries of a random permutation of 0..n-1 (partial Fisher-Yates),
// returned sorted.
std::vector<std::size_t> draw_without_replacement(std::size_t n, std::size_t m,
                                                  Rng& rng) {
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    for (std::size_t i = 0; i < m; ++i) {
        std::size_t j = i + rng.uniform_index(n - i);
        std::swap(idx[i], idx[j]);
    }
    idx.resize(m);
    std::sort(idx.begin(), idx.end());
    return idx;
}

void check_nonempty(const FoldSplit& f, const char* scheme, std::size_t fold) {
    if (f.train.empty() || f.test.empty())
        throw DataError(std::string(scheme) + " fold " + std::to_string(fold) +
                        " would leave an empty train or test set");
}

}  // namespace

std::vector<FoldSplit> make_folds(std::size_t n, const ResamplingPlan& plan) {
    std::vector<FoldSplit> folds;
    switch (plan.scheme) {
        case ResamplingScheme::KFold: {
            if (plan.k < 2) throw ConfigError("kfold requires k >= 2");
            std::size_t k = static_cast<std::size_t>(plan.k);
            if (k > n)
                throw DataError("kfold with k=" + std::to_string(k) +
                                " exceeds n=" + std::to_string(n));
            std::vector<std::size_t> perm(n);
            std::iota(perm.begin(), perm.end(), std::size_t{0});
            Rng rng(plan.seed);
            rng.shuffle(perm);
            // First n%k folds get the extra observation.
            std::size_t base = n / k, extra = n % k, pos = 0;
            for (std::size_t f = 0; f < k; ++f) {
                std::size_t size = base + (f < extra ? 1 : 0);
                FoldSplit split;
                split.test.assign(perm.begin() + static_cast<std::ptrdiff_t>(pos),
                                  perm.begin() + static_cast<std::ptrdiff_t>(pos + size));
                pos += size;
                std::sort(split.test.begin(), split.test.end());
                std::vector<bool> in_test(n, false);
                for (std::size_t i : split.test) in_test[i] = true;
                for (std::size_t i = 0; i < n; ++i)
                    if (!in_test[i]) split.train.push_back(i);
                check_nonempty(split, "kfold", f);
                folds.push_back(std::move(split));
            }
            break;
        }
        case ResamplingScheme::Subsample: {
            if (!(plan.fraction > 0.0 && plan.fraction < 1.0))
                throw ConfigError("subsample fraction must be in (0, 1)");
            if (plan.replications < 1)
                throw ConfigError("subsample requires B >= 1");
            std::size_t m = static_cast<std::size_t>(
                std::floor(plan.fraction * static_cast<double>(n)));
            for (int b = 0; b < plan.replications; ++b) {
                Rng rng(derive_seed(plan.seed, static_cast<std::uint64_t>(b)));
                FoldSplit split;
                split.train = draw_without_replacement(n, m, rng);
                std::vector<bool> in_train(n, false);
                for (std::size_t i : split.train) in_train[i] = true;
                for (std::size_t i = 0; i < n; ++i)
                    if (!in_train[i]) split.test.push_back(i);
                check_nonempty(split, "subsample", static_cast<std::size_t>(b));
                folds.push_back(std::move(split));
            }
            break;
        }
        case ResamplingScheme::Bootstrap: {
            if (plan.replications < 1)
                throw ConfigError("bootstrap requires B >= 1");
            for (int b = 0; b < plan.replications; ++b) {
                Rng rng(derive_seed(plan.seed, static_cast<std::uint64_t>(b)));
                FoldSplit split;
                std::vector<bool> drawn(n, false);
                for (std::size_t i = 0; i < n; ++i) {
                    std::size_t j = rng.uniform_index(n);
                    split.train.push_back(j);
                    drawn[j] = true;
                }
                std::sort(split.train.begin(), split.train.end());
                for (std::size_t i = 0; i < n; ++i)
                    if (!drawn[i]) split.test.push_back(i);
                check_nonempty(split, "bootstrap", static_cast<std::size_t>(b));
                folds.push_back(std::move(split));
            }
            break;
        }
    }
    return folds;
}

std::vector<std::vector<std::size_t>> half_subsamples(std::size_t n, int B,
                                                      std::uint64_t seed) {
    if (n < 2) throw DataError("half_subsamples requires n >= 2");
    if (B < 1) throw ConfigError("half_subsamples requires B >= 1");
    std::size_t m = n / 2;
    std::vector<std::vector<std::size_t>> sets;
    sets.reserve(static_cast<std::size_t>(B));
    for (int b = 0; b < B; ++b) {
        Rng rng(derive_seed(seed, static_cast<std::uint64_t>(b)));
        sets.push_back(draw_without_replacement(n, m, rng));
    }
    return sets;
}

}  // namespace statboost
