#include "ocular/psycho/fit.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <stdexcept>

#include <gsl/gsl_cdf.h>
#include <gsl/gsl_multimin.h>
#include <gsl/gsl_randist.h>

namespace ocular::psycho {

namespace {

// Upper tail of the standard normal, accurate far into the tail.
double normal_q(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

}  // namespace

double psychometric(const PsychometricParams& p, double x) {
    return 0.5 + (0.5 - p.lapse) * normal_q(-(x - p.alpha) / p.beta);
}

double threshold75(const PsychometricParams& p) {
    return p.alpha + p.beta * gsl_cdf_ugaussian_Pinv(0.25 / (0.5 - p.lapse));
}

double log_likelihood(const PsychometricParams& p, std::span<const LevelCount> data) {
    constexpr double kFloor = 1e-300;
    double ll = 0.0;
    for (const auto& d : data) {
        const double z = (d.level - p.alpha) / p.beta;
        const double hit = 0.5 + (0.5 - p.lapse) * normal_q(-z);
        const double miss = p.lapse + (0.5 - p.lapse) * normal_q(z);
        const auto wrong = d.n_trials - d.n_correct;
        if (d.n_correct > 0) ll += static_cast<double>(d.n_correct) * std::log(std::max(hit, kFloor));
        if (wrong > 0) ll += static_cast<double>(wrong) * std::log(std::max(miss, kFloor));
    }
    return ll;
}

ParamBox fit_box(std::span<const LevelCount> data) {
    double x_max = 0.0;
    for (const auto& d : data) x_max = std::max(x_max, d.level);
    if (!(x_max > 0.0)) {
        throw std::invalid_argument("fit needs at least one positive stimulus level");
    }
    return {0.0, 2.0 * x_max, x_max / 200.0, 2.0 * x_max, 0.0, kMaxLapse};
}

std::vector<LevelCount> pool_levels(std::span<const LevelCount> data) {
    std::map<double, LevelCount> pooled;
    for (const auto& d : data) {
        if (d.n_correct > d.n_trials) {
            throw std::invalid_argument("n_correct exceeds n_trials");
        }
        auto& slot = pooled[d.level];
        slot.level = d.level;
        slot.n_trials += d.n_trials;
        slot.n_correct += d.n_correct;
    }
    std::vector<LevelCount> out;
    for (const auto& [level, count] : pooled) {
        if (count.n_trials > 0) out.push_back(count);
    }
    return out;
}

namespace {

struct Problem {
    std::span<const LevelCount> data;
    ParamBox box;
    double penalty_scale = 1.0;

    PsychometricParams from_unit(const double* u) const {
        const auto lerp = [](double lo, double hi, double t) { return lo + std::clamp(t, 0.0, 1.0) * (hi - lo); };
        return {lerp(box.alpha_lo, box.alpha_hi, u[0]), lerp(box.beta_lo, box.beta_hi, u[1]),
                lerp(box.lapse_lo, box.lapse_hi, u[2])};
    }
};

// Negative log-likelihood over unit-cube coordinates. Points outside the cube
// are evaluated at their projection plus a quadratic penalty, so the simplex
// can sit exactly on a bound.
double objective(const gsl_vector* v, void* raw) {
    const auto& prob = *static_cast<const Problem*>(raw);
    double u[3];
    double outside = 0.0;
    for (std::size_t i = 0; i < 3; ++i) {
        u[i] = gsl_vector_get(v, i);
        const double c = std::clamp(u[i], 0.0, 1.0);
        outside += (u[i] - c) * (u[i] - c);
    }
    return -log_likelihood(prob.from_unit(u), prob.data) + prob.penalty_scale * outside;
}

struct SimplexDeleter {
    void operator()(gsl_multimin_fminimizer* m) const { gsl_multimin_fminimizer_free(m); }
};
struct VectorDeleter {
    void operator()(gsl_vector* v) const { gsl_vector_free(v); }
};

/// One Nelder-Mead descent from `start`; returns the best point found.
std::array<double, 3> descend(Problem& prob, const std::array<double, 3>& start, double step) {
    gsl_multimin_function fn{&objective, 3, &prob};
    std::unique_ptr<gsl_vector, VectorDeleter> x(gsl_vector_alloc(3));
    std::unique_ptr<gsl_vector, VectorDeleter> steps(gsl_vector_alloc(3));
    for (std::size_t i = 0; i < 3; ++i) {
        gsl_vector_set(x.get(), i, start[i]);
        gsl_vector_set(steps.get(), i, step);
    }
    std::unique_ptr<gsl_multimin_fminimizer, SimplexDeleter> nm(
        gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, 3));
    gsl_multimin_fminimizer_set(nm.get(), &fn, x.get(), steps.get());
    for (int iter = 0; iter < 5000; ++iter) {
        if (gsl_multimin_fminimizer_iterate(nm.get()) != GSL_SUCCESS) break;
        if (gsl_multimin_test_size(gsl_multimin_fminimizer_size(nm.get()), 1e-11) == GSL_SUCCESS) break;
    }
    const gsl_vector* best = gsl_multimin_fminimizer_x(nm.get());
    return {std::clamp(gsl_vector_get(best, 0), 0.0, 1.0), std::clamp(gsl_vector_get(best, 1), 0.0, 1.0),
            std::clamp(gsl_vector_get(best, 2), 0.0, 1.0)};
}

}  // namespace

PsychometricFit fit_psychometric(std::span<const LevelCount> raw) {
    const std::vector<LevelCount> data = pool_levels(raw);
    std::size_t total = 0;
    for (const auto& d : data) total += d.n_trials;
    if (data.size() < 3) {
        throw std::invalid_argument("psychometric fit needs at least 3 distinct stimulus levels");
    }
    if (total < 30) {
        throw std::invalid_argument("psychometric fit needs at least 30 trials");
    }

    Problem prob{data, fit_box(data)};

    // Coarse grid for the starting point.
    constexpr int kGrid = 30;
    constexpr int kLapseGrid = 7;
    std::array<double, 3> best{};
    double best_ll = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < kGrid; ++i) {
        for (int j = 0; j < kGrid; ++j) {
            for (int k = 0; k < kLapseGrid; ++k) {
                const std::array<double, 3> u{i / (kGrid - 1.0), j / (kGrid - 1.0), k / (kLapseGrid - 1.0)};
                const double ll = log_likelihood(prob.from_unit(u.data()), data);
                if (ll > best_ll) {
                    best_ll = ll;
                    best = u;
                }
            }
        }
    }
    prob.penalty_scale = 1.0 + std::fabs(best_ll);

    // Restart the simplex from its own optimum until it stops improving.
    double step = 0.05;
    for (int round = 0; round < 8; ++round) {
        const auto candidate = descend(prob, best, step);
        const double ll = log_likelihood(prob.from_unit(candidate.data()), data);
        const bool improved = ll > best_ll + 1e-12;
        if (ll >= best_ll) {
            best_ll = ll;
            best = candidate;
        }
        if (!improved && round > 0) break;
        step = 0.01;
    }

    PsychometricFit fit;
    fit.params = prob.from_unit(best.data());
    fit.log_likelihood = log_likelihood(fit.params, data);
    fit.threshold75 = threshold75(fit.params);

    const bool all_perfect = std::all_of(data.begin(), data.end(),
                                         [](const LevelCount& d) { return d.n_correct == d.n_trials; });
    const bool all_chance = std::all_of(data.begin(), data.end(),
                                        [](const LevelCount& d) { return 2 * d.n_correct <= d.n_trials; });
    const double x_max = data.back().level;
    fit.reliable = !all_perfect && !all_chance && std::isfinite(fit.threshold75) && fit.threshold75 <= x_max;
    return fit;
}

LinearFit discrimination_linear_fit(std::span<const PedestalThreshold> points) {
    const auto n = static_cast<double>(points.size());
    double sx = 0.0, sy = 0.0;
    for (const auto& p : points) {
        sx += p.pedestal_d;
        sy += p.threshold_d;
    }
    const double mx = sx / n;
    const double my = sy / n;
    double sxx = 0.0, sxy = 0.0;
    for (const auto& p : points) {
        sxx += (p.pedestal_d - mx) * (p.pedestal_d - mx);
        sxy += (p.pedestal_d - mx) * (p.threshold_d - my);
    }
    if (points.size() < 2 || sxx == 0.0) {
        throw std::invalid_argument("linear fit needs at least 2 distinct pedestals");
    }
    const double slope = sxy / sxx;
    return {slope, my - slope * mx};
}

std::vector<SessionAnalysis> analyze(std::span<const TrialResult> results) {
    // replication -> group -> level -> counts
    std::map<std::size_t, std::map<double, std::map<double, LevelCount>>> tally;
    const bool discrimination =
        std::any_of(results.begin(), results.end(), [](const TrialResult& r) { return r.offset_d != 0.0; });
    for (const auto& r : results) {
        auto& c = tally[r.replication][discrimination ? r.offset_d : r.absolute_d][r.relative_d];
        c.level = r.relative_d;
        ++c.n_trials;
        c.n_correct += r.correct ? 1 : 0;
    }

    std::vector<SessionAnalysis> out;
    for (const auto& [replication, groups] : tally) {
        SessionAnalysis a;
        a.experiment = discrimination ? Experiment::discrimination : Experiment::detection;
        a.replication = replication;
        std::vector<PedestalThreshold> points;
        double sum = 0.0;
        for (const auto& [group, levels] : groups) {
            std::vector<LevelCount> counts;
            for (const auto& [level, c] : levels) counts.push_back(c);
            GroupFit g{group, fit_psychometric(counts)};
            sum += g.fit.threshold75;
            points.push_back({group, g.fit.threshold75});
            a.groups.push_back(g);
        }
        a.mean_threshold = sum / static_cast<double>(a.groups.size());
        if (discrimination && points.size() >= 2) {
            a.linear = discrimination_linear_fit(points);
        }
        out.push_back(std::move(a));
    }
    return out;
}

double proportion_correct(std::span<const TrialResult> results) {
    if (results.empty()) {
        throw std::invalid_argument("proportion_correct: no responses");
    }
    const auto n = std::count_if(results.begin(), results.end(), [](const TrialResult& r) { return r.correct; });
    return static_cast<double>(n) / static_cast<double>(results.size());
}

double binomial_test(std::size_t successes, std::size_t trials, double p0, bool one_tailed) {
    if (trials == 0) throw std::invalid_argument("binomial_test: trials must be positive");
    if (successes > trials) throw std::invalid_argument("binomial_test: successes exceed trials");
    if (!(p0 > 0.0 && p0 < 1.0)) throw std::invalid_argument("binomial_test: p0 must lie in (0, 1)");
    const auto n = static_cast<unsigned>(trials);
    const auto k = static_cast<unsigned>(successes);
    if (one_tailed) {
        return k == 0 ? 1.0 : gsl_cdf_binomial_Q(k - 1, p0, n);
    }
    const double observed = gsl_ran_binomial_pdf(k, p0, n);
    double p = 0.0;
    for (unsigned i = 0; i <= n; ++i) {
        const double pi = gsl_ran_binomial_pdf(i, p0, n);
        if (pi <= observed * (1.0 + 1e-7)) p += pi;
    }
    return std::min(p, 1.0);
}

}  // namespace ocular::psycho
