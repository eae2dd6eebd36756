#include "ocular/psycho/observer.hpp"

#include <cmath>
#include <stdexcept>

#include <gsl/gsl_cdf.h>

namespace ocular::psycho {

void SimulatedObserver::validate() const {
    if (!(detection_threshold_d > 0.0) || !(intercept_d > 0.0)) {
        throw std::invalid_argument("observer thresholds must be positive");
    }
    if (!(spread_d > 0.0)) {
        throw std::invalid_argument("observer spread must be positive");
    }
    if (!(lapse_rate >= 0.0 && lapse_rate <= kMaxLapse)) {
        throw std::invalid_argument("observer lapse rate must lie in [0, 0.06]");
    }
    if (!(weber_fraction >= 0.0)) {
        throw std::invalid_argument("observer Weber fraction must be non-negative");
    }
}

double effective_threshold(const TrialCondition& cond, const SimulatedObserver& obs) {
    return cond.experiment == Experiment::detection ? obs.detection_threshold_d
                                                    : obs.intercept_d + obs.weber_fraction * cond.offset_d;
}

double probability_correct(const TrialCondition& cond, const SimulatedObserver& obs) {
    obs.validate();
    if (cond.relative_d <= 0.0) {
        return 0.5;
    }
    const double scale = 0.5 - obs.lapse_rate;
    // Shift so that P = 0.75 exactly at the effective threshold.
    const double location =
        effective_threshold(cond, obs) - obs.spread_d * gsl_cdf_ugaussian_Pinv(0.25 / scale);
    return 0.5 + scale * gsl_cdf_ugaussian_P((cond.relative_d - location) / obs.spread_d);
}

Response simulate_response(const TrialCondition& cond, const SimulatedObserver& obs, Rng& rng) {
    const bool correct = uniform01(rng) < probability_correct(cond, obs);
    const Interval other = cond.interval_with_effect == Interval::first ? Interval::second : Interval::first;
    return {correct ? cond.interval_with_effect : other, correct};
}

std::vector<TrialResult> run_session(const SessionPlan& plan, const SimulatedObserver& obs, std::size_t replication) {
    obs.validate();
    Rng rng(obs.rng_seed);
    std::vector<TrialResult> out;
    out.reserve(plan.trials.size());
    for (std::size_t i = 0; i < plan.trials.size(); ++i) {
        const auto& c = plan.trials[i];
        out.push_back({i, c.absolute_d, c.offset_d, c.relative_d, simulate_response(c, obs, rng).correct, replication});
    }
    return out;
}

std::vector<TrialResult> simulate_experiment(Experiment experiment, const SimulatedObserver& obs, std::uint64_t seed,
                                             std::size_t replications, int trials_per_condition) {
    std::vector<TrialResult> all;
    for (std::size_t r = 0; r < replications; ++r) {
        const std::uint64_t plan_seed = derive_seed(seed, 2 * r);
        const SessionPlan plan = experiment == Experiment::detection
                                     ? plan_detection_session(plan_seed, trials_per_condition)
                                     : plan_discrimination_session(plan_seed, trials_per_condition);
        SimulatedObserver o = obs;
        o.rng_seed = derive_seed(seed ^ obs.rng_seed, 2 * r + 1);
        const auto results = run_session(plan, o, r);
        all.insert(all.end(), results.begin(), results.end());
    }
    return all;
}

}  // namespace ocular::psycho
