#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace ocular::psycho {

enum class Experiment { detection, discrimination };
enum class Interval { first, second };

Experiment parse_experiment(std::string_view text);
std::string_view to_string(Experiment e);

inline constexpr std::array<double, 3> kDetectionAbsoluteD{1.0, 2.0, 3.0};
inline constexpr std::array<double, 5> kDetectionRelativeD{0.0, 0.25, 0.5, 0.75, 1.0};
inline constexpr std::array<double, 3> kDiscriminationOffsetD{1.0, 2.0, 3.0};
inline constexpr std::array<double, 5> kDiscriminationStepsLow{0.0, 0.45, 0.9, 1.35, 1.8};   // offsets 1 and 2 D
inline constexpr std::array<double, 5> kDiscriminationStepsHigh{0.0, 0.7, 1.4, 2.1, 2.8};   // offset 3 D
inline constexpr int kTrialsPerCondition = 15;

/// Pursuit target parameters for one trial.
struct OrbitSetup {
    double radius_deg = 16.0;
    double rate_deg_s = 90.0;
    bool clockwise = false;
    double start_phase_deg = 0.0;
};

struct TrialCondition {
    Experiment experiment = Experiment::detection;
    double absolute_d = 0.0;  ///< back surface
    double offset_d = 0.0;    ///< pedestal, discrimination only
    double relative_d = 0.0;  ///< tested increment
    /// Detection: the interval rendered with ocular parallax.
    /// Discrimination: the interval whose front surface has the increment.
    Interval interval_with_effect = Interval::first;
    /// Discrimination renders ocular parallax in both intervals.
    bool parallax_in_both_intervals = false;
    OrbitSetup orbit;
};

struct SessionPlan {
    Experiment experiment = Experiment::detection;
    std::vector<TrialCondition> trials;
    std::uint64_t rng_seed = 0;
};

/// Deterministic engine used for every random draw in this module.
using Rng = std::mt19937_64;

/// Uniform double in [0, 1) with 53 random bits; identical on every platform.
double uniform01(Rng& rng);
/// Uniform integer in [0, n) by rejection; identical on every platform.
std::uint64_t uniform_below(Rng& rng, std::uint64_t n);
/// Derives an independent stream seed from a base seed and a stream index.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);

/// 3 x 5 grid of back distance and relative distance, `trials_per_condition`
/// repetitions each, shuffled by `seed`.
SessionPlan plan_detection_session(std::uint64_t seed, int trials_per_condition = kTrialsPerCondition);

/// Back surface at 0 D; pedestals 1, 2, 3 D with their step sets.
SessionPlan plan_discrimination_session(std::uint64_t seed, int trials_per_condition = kTrialsPerCondition);

}  // namespace ocular::psycho
