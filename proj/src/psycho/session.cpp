#include "ocular/psycho/session.hpp"

#include <stdexcept>
#include <string>

namespace ocular::psycho {

Experiment parse_experiment(std::string_view text) {
    if (text == "detection") return Experiment::detection;
    if (text == "discrimination") return Experiment::discrimination;
    throw std::invalid_argument("unknown experiment '" + std::string(text) + "' (expected detection|discrimination)");
}

std::string_view to_string(Experiment e) { return e == Experiment::detection ? "detection" : "discrimination"; }

double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

std::uint64_t uniform_below(Rng& rng, std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("uniform_below: empty range");
    const std::uint64_t limit = Rng::max() - Rng::max() % n;
    std::uint64_t x;
    do {
        x = rng();
    } while (x >= limit);
    return x % n;
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
    // splitmix64 finalizer over the combined words
    std::uint64_t x = base ^ (stream + 0x9E3779B97F4A7C15ULL + (base << 6) + (base >> 2));
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

namespace {

void randomize_and_shuffle(SessionPlan& plan) {
    Rng rng(plan.rng_seed);
    for (std::size_t i = plan.trials.size(); i > 1; --i) {
        std::swap(plan.trials[i - 1], plan.trials[uniform_below(rng, i)]);
    }
    for (auto& t : plan.trials) {
        t.interval_with_effect = uniform_below(rng, 2) == 0 ? Interval::first : Interval::second;
        t.orbit.clockwise = uniform_below(rng, 2) == 1;
        t.orbit.start_phase_deg = 360.0 * uniform01(rng);
    }
}

void check_repetitions(int trials_per_condition) {
    if (trials_per_condition <= 0) {
        throw std::invalid_argument("trials per condition must be positive");
    }
}

}  // namespace

SessionPlan plan_detection_session(std::uint64_t seed, int trials_per_condition) {
    check_repetitions(trials_per_condition);
    SessionPlan plan;
    plan.experiment = Experiment::detection;
    plan.rng_seed = seed;
    for (double absolute : kDetectionAbsoluteD) {
        for (double relative : kDetectionRelativeD) {
            TrialCondition c;
            c.experiment = Experiment::detection;
            c.absolute_d = absolute;
            c.relative_d = relative;
            plan.trials.insert(plan.trials.end(), static_cast<std::size_t>(trials_per_condition), c);
        }
    }
    randomize_and_shuffle(plan);
    return plan;
}

SessionPlan plan_discrimination_session(std::uint64_t seed, int trials_per_condition) {
    check_repetitions(trials_per_condition);
    SessionPlan plan;
    plan.experiment = Experiment::discrimination;
    plan.rng_seed = seed;
    for (double offset : kDiscriminationOffsetD) {
        const auto& steps = offset < 3.0 ? kDiscriminationStepsLow : kDiscriminationStepsHigh;
        for (double step : steps) {
            TrialCondition c;
            c.experiment = Experiment::discrimination;
            c.absolute_d = 0.0;
            c.offset_d = offset;
            c.relative_d = step;
            c.parallax_in_both_intervals = true;
            plan.trials.insert(plan.trials.end(), static_cast<std::size_t>(trials_per_condition), c);
        }
    }
    randomize_and_shuffle(plan);
    return plan;
}

}  // namespace ocular::psycho
