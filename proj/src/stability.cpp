#include "statboost/stability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "statboost/parallel.hpp"
#include "statboost/resampling.hpp"

namespace statboost {

double pfer_bound(int q, double pi_thr, int p) {
    if (q < 1) throw ConfigError("pfer_bound: q must be >= 1");
    if (p < q) throw ConfigError("pfer_bound: p must be >= q");
    if (!(pi_thr > 0.5 && pi_thr <= 1.0))
        throw ConfigError("pfer_bound: pi_thr must be in (0.5, 1]");
    return static_cast<double>(q) * static_cast<double>(q) /
           ((2.0 * pi_thr - 1.0) * static_cast<double>(p));
}

ThresholdResult threshold_for_pfer(int q, int p, double pfer) {
    if (q < 1) throw ConfigError("threshold_for_pfer: q must be >= 1");
    if (p < q) throw ConfigError("threshold_for_pfer: p must be >= q");
    if (!(pfer > 0.0)) throw ConfigError("threshold_for_pfer: pfer must be > 0");
    double t = (static_cast<double>(q) * static_cast<double>(q) /
                    (pfer * static_cast<double>(p)) +
                1.0) /
               2.0;
    if (t > 1.0)
        throw ConfigError("PFER target " + std::to_string(pfer) +
                          " unattainable at q=" + std::to_string(q) +
                          ", p=" + std::to_string(p) +
                          " (would need pi_thr=" + std::to_string(t) + " > 1)");
    if (t <= 0.5 + 1e-3) return ThresholdResult{0.5, true};
    return ThresholdResult{t, false};
}

StabSelResult stabsel(const Dataset& d, const EngineConfig& cfg,
                      const StabSelControl& control) {
    if (cfg.engine != "gradient")
        throw ConfigError("stability selection supports the gradient engine only");
    int p = static_cast<int>(cfg.learners.size());
    if (p == 0) throw ConfigError("stabsel: at least one base-learner is required");
    if (control.q < 1 || control.q > p)
        throw ConfigError("stabsel: q must be between 1 and the number of "
                          "base-learners (" +
                          std::to_string(p) + ")");
    if (control.B < 1) throw ConfigError("stabsel: B must be >= 1");
    if (control.pi_thr.has_value() == control.pfer.has_value())
        throw ConfigError("stabsel: supply exactly one of pi_thr and pfer");

    StabSelResult result;
    result.q = control.q;
    result.B = control.B;
    result.p = p;
    result.seed = control.seed;
    for (const auto& spec : cfg.learners) result.learner_names.push_back(spec.name());

    if (control.pi_thr) {
        result.pi_thr = *control.pi_thr;
        result.supplied = "pi_thr";
        result.pfer = pfer_bound(control.q, result.pi_thr, p);
    } else {
        result.supplied = "pfer";
        ThresholdResult t = threshold_for_pfer(control.q, p, *control.pfer);
        result.pi_thr = t.pi_thr;
        result.threshold_loose = t.loose;
        result.pfer = *control.pfer;
    }

    int cap = control.iteration_cap;
    if (cap <= 0)
        cap = std::max(1000, static_cast<int>(std::ceil(
                                 10.0 * static_cast<double>(control.q) / cfg.nu)));

    auto family = make_family(cfg.family);
    auto subsamples = half_subsamples(d, control.B, control.seed);

    std::vector<std::vector<bool>> selected(
        static_cast<std::size_t>(control.B),
        std::vector<bool>(static_cast<std::size_t>(p), false));
    parallel_for(static_cast<std::size_t>(control.B), control.jobs, [&](std::size_t b) {
        Dataset sub = d.subset(subsamples[b]);
        ModelFit fit;
        try {
            fit = fit_gradient_until_q(sub, family, cfg.learners, cfg.nu, control.q,
                                       cap, derive_seed(control.seed, b));
        } catch (const NumericError& e) {
            throw NumericError("stabsel subsample " + std::to_string(b) + ": " +
                               e.what());
        }
        for (const auto& rec : fit.history)
            selected[b][static_cast<std::size_t>(rec.selected)] = true;
    });

    result.frequencies.assign(static_cast<std::size_t>(p), 0.0);
    for (int b = 0; b < control.B; ++b)
        for (int j = 0; j < p; ++j)
            if (selected[static_cast<std::size_t>(b)][static_cast<std::size_t>(j)])
                result.frequencies[static_cast<std::size_t>(j)] += 1.0;
    for (auto& f : result.frequencies) f /= static_cast<double>(control.B);
    return result;
}

StableSet stable_set(const StabSelResult& r, double pi_thr) {
    if (!(pi_thr >= 0.5 && pi_thr <= 1.0))
        throw ConfigError("stable_set: pi_thr must be in [0.5, 1]");
    StableSet set;
    for (std::size_t j = 0; j < r.frequencies.size(); ++j)
        if (r.frequencies[j] >= pi_thr) set.ids.push_back(static_cast<int>(j));
    // Implied bound for the new threshold; undefined at exactly 0.5.
    set.pfer = pi_thr > 0.5 ? pfer_bound(r.q, pi_thr, r.p)
                            : std::numeric_limits<double>::infinity();
    return set;
}

}  // namespace statboost
