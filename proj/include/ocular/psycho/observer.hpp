#pragma once

#include <cstdint>
#include <vector>

#include "ocular/psycho/session.hpp"

namespace ocular::psycho {

/**
 * Generative 2AFC observer with a cumulative-Gaussian psychometric function
 *
 *   P(correct | x) = 0.5 + (0.5 - lapse) * Phi((x - location) / spread)
 *
 * where the location is placed so that P = 0.75 at the effective threshold:
 * `detection_threshold_d` for detection, `intercept_d + weber_fraction *
 * pedestal` for discrimination. A zero increment carries no signal and is
 * answered at chance.
 */
struct SimulatedObserver {
    double detection_threshold_d = 0.36;
    double spread_d = 0.15;
    double lapse_rate = 0.02;
    double weber_fraction = 0.11;
    double intercept_d = 0.38;
    std::uint64_t rng_seed = 0;

    void validate() const;
};

inline constexpr double kMaxLapse = 0.06;
inline constexpr double kGuessRate = 0.5;

/// 75%-correct threshold the observer applies to a condition.
double effective_threshold(const TrialCondition& cond, const SimulatedObserver& obs);

double probability_correct(const TrialCondition& cond, const SimulatedObserver& obs);

struct Response {
    Interval chosen = Interval::first;
    bool correct = false;
};

Response simulate_response(const TrialCondition& cond, const SimulatedObserver& obs, Rng& rng);

struct TrialResult {
    std::size_t trial_index = 0;
    double absolute_d = 0.0;
    double offset_d = 0.0;
    double relative_d = 0.0;
    bool correct = false;
    std::size_t replication = 0;
};

/// Runs every trial of the plan with a response stream seeded by obs.rng_seed.
std::vector<TrialResult> run_session(const SessionPlan& plan, const SimulatedObserver& obs,
                                     std::size_t replication = 0);

/// `replications` independent sessions; replication r uses plan and response
/// seeds derived from (seed, r), so results do not depend on execution order.
std::vector<TrialResult> simulate_experiment(Experiment experiment, const SimulatedObserver& obs, std::uint64_t seed,
                                             std::size_t replications,
                                             int trials_per_condition = kTrialsPerCondition);

}  // namespace ocular::psycho
