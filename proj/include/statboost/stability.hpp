#ifndef STATBOOST_STABILITY_HPP
#define STATBOOST_STABILITY_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "statboost/engine.hpp"

namespace statboost {

/// Upper bound for the expected number of false positives:
/// q^2 / ((2 pi_thr - 1) p). Requires pi_thr in (0.5, 1].
double pfer_bound(int q, double pi_thr, int p);

/// Threshold achieving a pre-specified PFER bound:
/// pi_thr = (q^2 / (pfer p) + 1) / 2. Errors when the target would need
/// pi_thr > 1; thresholds within 1e-3 of the degenerate 0.5 are clamped to
/// 0.5 and flagged loose.
struct ThresholdResult {
    double pi_thr = 0.0;
    bool loose = false;
};

ThresholdResult threshold_for_pfer(int q, int p, double pfer);

/// Selection frequencies over B half-subsample runs, each stopped once q
/// distinct base-learners were selected.
struct StabSelResult {
    std::vector<std::string> learner_names;
    std::vector<double> frequencies;  // multiples of 1/B in [0, 1]
    int q = 0;
    int B = 0;
    int p = 0;
    double pi_thr = 0.0;
    double pfer = 0.0;
    bool threshold_loose = false;
    std::string supplied;  // which of pi_thr / pfer the caller fixed
    std::uint64_t seed = 0;
};

struct StabSelControl {
    int q = 1;
    int B = 100;
    std::optional<double> pi_thr;  // exactly one of pi_thr / pfer
    std::optional<double> pfer;
    std::uint64_t seed = 1;
    int iteration_cap = 0;  // 0: default max(1000, ceil(10 q / nu))
    int jobs = 1;
};

/// Runs the gradient engine on B half-subsamples until q distinct
/// base-learners are selected in each, and aggregates selection frequencies.
/// The missing member of (pi_thr, PFER) is derived from the supplied one.
StabSelResult stabsel(const Dataset& d, const EngineConfig& cfg,
                      const StabSelControl& control);

/// Base-learners whose selection frequency reaches the threshold, plus the
/// implied PFER bound. Pure post-processing: never refits.
struct StableSet {
    std::vector<int> ids;
    double pfer = 0.0;
};

StableSet stable_set(const StabSelResult& r, double pi_thr);

}  // namespace statboost

#endif  // STATBOOST_STABILITY_HPP
