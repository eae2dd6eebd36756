#pragma once

#include <span>
#include <vector>

#include "ocular/psycho/observer.hpp"

namespace ocular::psycho {

struct LevelCount {
    double level = 0.0;  ///< stimulus increment, diopters
    std::size_t n_trials = 0;
    std::size_t n_correct = 0;
};

/// 2AFC cumulative Gaussian with guess rate fixed at 0.5.
struct PsychometricParams {
    double alpha = 0.0;  ///< location, diopters
    double beta = 1.0;   ///< spread, diopters
    double lapse = 0.0;
};

double psychometric(const PsychometricParams& p, double x);
/// Level where psychometric() equals 0.75.
double threshold75(const PsychometricParams& p);
double log_likelihood(const PsychometricParams& p, std::span<const LevelCount> data);

/// Parameter box searched by the fit, derived from the largest tested level:
/// alpha in [0, 2 x_max], beta in [x_max / 200, 2 x_max], lapse in [0, 0.06].
struct ParamBox {
    double alpha_lo, alpha_hi;
    double beta_lo, beta_hi;
    double lapse_lo, lapse_hi;
};
ParamBox fit_box(std::span<const LevelCount> data);

struct PsychometricFit {
    PsychometricParams params;
    double guess_rate = kGuessRate;
    double log_likelihood = 0.0;
    double threshold75 = 0.0;
    /// False for degenerate data (every level at or below chance, or every
    /// level perfect) and for thresholds beyond the largest tested level.
    bool reliable = true;
};

/// Rows sharing a level are pooled before fitting.
std::vector<LevelCount> pool_levels(std::span<const LevelCount> data);

/// Maximum-likelihood fit of (alpha, beta, lapse) inside fit_box().
/// Requires at least 3 distinct levels and 30 trials.
PsychometricFit fit_psychometric(std::span<const LevelCount> data);

struct LinearFit {
    double slope = 0.0;
    double intercept_d = 0.0;
};

struct PedestalThreshold {
    double pedestal_d = 0.0;
    double threshold_d = 0.0;
};

/// Ordinary least squares of threshold on pedestal.
LinearFit discrimination_linear_fit(std::span<const PedestalThreshold> points);

struct GroupFit {
    double group_d = 0.0;  ///< absolute_d (detection) or offset_d (discrimination)
    PsychometricFit fit;
};

struct SessionAnalysis {
    Experiment experiment = Experiment::detection;
    std::size_t replication = 0;
    std::vector<GroupFit> groups;
    double mean_threshold = 0.0;
    LinearFit linear;  ///< discrimination only
};

/// Fits one psychometric function per back distance (detection) or per
/// pedestal (discrimination) for each replication found in `results`.
std::vector<SessionAnalysis> analyze(std::span<const TrialResult> results);

double proportion_correct(std::span<const TrialResult> results);

/// Exact binomial test. One-tailed: P(X >= successes | p0). Two-tailed: sum
/// of the probabilities of all outcomes no more likely than the observed one.
double binomial_test(std::size_t successes, std::size_t trials, double p0 = 0.5, bool one_tailed = true);

}  // namespace ocular::psycho
