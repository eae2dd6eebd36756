// Acceptance suite: one PASS/FAIL line per criterion, exit status 0 only if
// every primary criterion passes.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "ocular/eye_model.hpp"
#include "ocular/gaze_transform.hpp"
#include "ocular/perception_model.hpp"
#include "ocular/psycho/fit.hpp"
#include "ocular/psycho/observer.hpp"
#include "ocular/retina/render.hpp"
#include "ocular/retina/stimulus.hpp"
#include "ocular/service/session.hpp"

using namespace ocular;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Outcome {
    bool pass = false;
    std::string detail;
};

struct Criterion {
    int number;
    bool primary;
    const char* name;
    double runtime_limit_s;  // 0 means instant; checked against 0.1 s
    std::function<Outcome()> run;
};

std::string fmt(const char* format, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, format, args...);
    return buf;
}

double uniform(std::mt19937_64& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

GazeState random_gaze(std::mt19937_64& rng, RenderMode mode) {
    const double az = deg_to_rad(uniform(rng, -30, 30)), el = deg_to_rad(uniform(rng, -30, 30));
    const double r = uniform(rng, 0.3, 10.0);
    GazeState g;
    g.fixation = {r * std::cos(el) * std::sin(az), r * std::sin(el), -r * std::cos(el) * std::cos(az)};
    g.ipd = uniform(rng, 0.050, 0.075);
    g.mode = mode;
    return g;
}

DisplayGeometry random_geometry(std::mt19937_64& rng) {
    DisplayGeometry g;
    g.fov_left_deg = uniform(rng, 10, 60);
    g.fov_right_deg = uniform(rng, 10, 60);
    g.fov_top_deg = uniform(rng, 10, 60);
    g.fov_bottom_deg = uniform(rng, 10, 60);
    g.z_near = uniform(rng, 0.01, 0.5);
    g.z_far = uniform(rng, 10, 1000);
    g.image_distance = rng() % 2 ? kInf : uniform(rng, 0.5, 3.0);
    return g;
}

Outcome nc_derivation() {
    const double nc = nc_distance_mm(find_model("gullstrand-emsley", AccommodationState::relaxed));
    const double err = std::fabs(nc - 7.6916);
    return {err <= 1e-9, fmt("NC = %.10f mm, |error| = %.3g (tol 1e-9)", nc, err)};
}

Outcome matrix_reduction() {
    std::mt19937_64 rng(2);
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const DisplayGeometry geom = random_geometry(rng);
        const EyeSide side = i % 2 ? EyeSide::left : EyeSide::right;
        const bool conventional = i % 2 == 0;
        const GazeState g = random_gaze(rng, conventional ? RenderMode::conventional() : RenderMode::ocular(2.0));
        const auto ep = eye_and_projection(g, conventional ? 0.0076916 : 0.0, geom, side);

        // Standard stereo rendering: camera translated to the eye, symmetric-angle glFrustum.
        double view[4][4] = {{1, 0, 0, side == EyeSide::left ? g.ipd / 2 : -g.ipd / 2}, {0, 1, 0, 0}, {0, 0, 1, 0},
                             {0, 0, 0, 1}};
        const double n = geom.z_near, f = geom.z_far;
        const double l = -n * std::tan(deg_to_rad(geom.fov_left_deg)), r = n * std::tan(deg_to_rad(geom.fov_right_deg));
        const double b = -n * std::tan(deg_to_rad(geom.fov_bottom_deg)), t = n * std::tan(deg_to_rad(geom.fov_top_deg));
        double proj[4][4] = {{2 * n / (r - l), 0, (r + l) / (r - l), 0},
                             {0, 2 * n / (t - b), (t + b) / (t - b), 0},
                             {0, 0, -(f + n) / (f - n), -2 * f * n / (f - n)},
                             {0, 0, -1, 0}};
        for (int row = 0; row < 4; ++row) {
            for (int col = 0; col < 4; ++col) {
                worst = std::max(worst, std::fabs(ep.eye(row, col) - view[row][col]));
                worst = std::max(worst, std::fabs(ep.projection(row, col) - proj[row][col]));
            }
        }
    }
    return {worst <= 1e-12, fmt("1000 gaze states, max |entry difference| = %.3g (tol 1e-12)", worst)};
}

Outcome background_registration() {
    std::mt19937_64 rng(3);
    const DisplayGeometry geom;  // image at infinity
    double worst = 0.0;
    std::vector<Vec3> points;
    for (int i = 0; i < 100; ++i) {
        const Vec3 dir{uniform(rng, -0.3, 0.3), uniform(rng, -0.3, 0.3), -1.0};
        points.push_back((1e6 / dir.norm()) * dir);
    }
    for (int pair = 0; pair < 50; ++pair) {
        const GazeState a = random_gaze(rng, RenderMode::ocular());
        GazeState b = random_gaze(rng, RenderMode::ocular());
        b.ipd = a.ipd;
        for (const Vec3& p : points) {
            const Vec2 d = screen_displacement(Vec4::point(p), a, b, 0.0076916, geom, EyeSide::right);
            worst = std::max(worst, std::hypot(d.x, d.y));
        }
    }
    return {worst < 1e-5, fmt("50 gaze pairs x 100 points at 1e6 m, max |dNDC| = %.3g (tol 1e-5)", worst)};
}

Outcome display_crossover() {
    const double e = display_mar_crossover(AcuityModel{}, DisplaySpec{4.58});
    const bool pass = e > 2.0 && e < 3.0 && std::fabs(e - 2.712) <= 0.001;
    return {pass, fmt("crossover = %.6f deg, in (2, 3) and |e - 2.712| <= 0.001", e)};
}

Outcome tradeoff_curves() {
    const AcuityModel acuity;
    const double nc = 0.0076916;
    bool monotone = true;
    for (double dd : {1.0, 2.0, 3.0}) {
        double prev = -1.0;
        for (int i = 0; i <= 450; ++i) {
            const double e = 0.1 * i;
            const double p = parallax_angle({e, near_distance_for(dd, kCurveFarDistance), kCurveFarDistance, nc});
            monotone &= p >= prev;
            prev = p;
        }
    }
    double best_ratio = 0.0;
    for (int i = 0; i <= 300; ++i) {
        const double e = 10.0 + 0.1 * i;
        const double p = parallax_angle({e, near_distance_for(3.0, kCurveFarDistance), kCurveFarDistance, nc});
        best_ratio = std::max(best_ratio, p / mar(acuity, e));
    }
    const auto cross = detectability_crossover(acuity, 3.0, nc);
    const bool cross_ok = !cross || (*cross >= 32.0 && *cross <= 48.0);
    const std::string cross_text = cross ? fmt("%.3f deg", *cross) : std::string("none");
    return {monotone && best_ratio >= 0.92 && cross_ok,
            fmt("monotone in e: %s; max parallax/MAR for 3 D on [10, 40] deg = %.4f (>= 0.92); crossover(3 D) = %s "
                "(32-48 deg); far reference %.1f m",
                monotone ? "yes" : "no", best_ratio, cross_text.c_str(), kCurveFarDistance)};
}

Outcome pursuit_speed() {
    const double v = pursuit_retinal_speed(16.0, 90.0);
    return {std::fabs(v - 24.81) <= 0.01, fmt("speed = %.5f deg/s (24.81 +/- 0.01)", v)};
}

Outcome dioptric_linearity() {
    const double nc = 0.0076916;
    double worst = 0.0;
    for (int i = 0; i < 50; ++i) {
        const double e = 5.0 + 35.0 * i / 49.0;
        double sxy = 0.0, sxx = 0.0, pmax = 0.0;
        std::vector<double> dd(50), p(50);
        for (int j = 0; j < 50; ++j) {
            dd[j] = 4.0 * j / 49.0;
            p[j] = j == 0 ? 0.0
                          : parallax_angle({e, near_distance_for(dd[j], kCurveFarDistance), kCurveFarDistance, nc});
            sxy += dd[j] * p[j];
            sxx += dd[j] * dd[j];
            pmax = std::max(pmax, p[j]);
        }
        const double k = sxy / sxx;
        for (int j = 0; j < 50; ++j) worst = std::max(worst, std::fabs(p[j] - k * dd[j]) / pmax);
    }
    return {worst <= 0.01, fmt("max deviation from proportionality = %.3f%% of full scale (tol 1%%)", 100 * worst)};
}

Outcome occlusion_stimulus() {
    const double nc = 0.0076916;
    const DisplayGeometry geom = retina::stimulus_geometry();
    const retina::Resolution res{800, 800};
    std::size_t centered_back = 0;
    std::size_t min_revealed = std::numeric_limits<std::size_t>::max();
    for (double abs_d : {1.0, 2.0, 3.0}) {
        for (double rel : {0.0, 0.25, 0.5, 0.75, 1.0}) {
            const auto scene = retina::make_detection_stimulus(abs_d, rel, 1);
            for (auto mode : {RenderMode::conventional(), RenderMode::ocular(), RenderMode::reversed()}) {
                GazeState g;
                g.mode = mode;
                g.fixation = fixation_from_angles(EyeSide::right, g.ipd, 0, 0, 1.0 / abs_d);
                centered_back += retina::render(scene, g, nc, geom, res, EyeSide::right).visible_samples[0];
            }
            if (rel >= 0.25) {
                GazeState g;
                g.fixation = fixation_from_angles(EyeSide::right, g.ipd, 15, 0, 1.0 / abs_d);
                min_revealed = std::min(
                    min_revealed, retina::render(scene, g, nc, geom, res, EyeSide::right).visible_pixels[0]);
            }
        }
    }
    return {centered_back == 0 && min_revealed > 0,
            fmt("back-surface samples at centered gaze (3 modes, 15 conditions) = %zu; fewest revealed pixels at 15 deg "
                "= %zu",
                centered_back, min_revealed)};
}

Outcome pipeline_round_trip() {
    using namespace psycho;
    const SimulatedObserver obs;
    const auto large = analyze(simulate_experiment(Experiment::detection, obs, 11, 1, 10000));
    double worst_large = 0.0;
    for (const auto& g : large.front().groups) worst_large = std::max(worst_large, std::fabs(g.fit.threshold75 - 0.36));
    const double mean_large = large.front().mean_threshold;

    std::vector<double> thresholds;
    for (const auto& a : analyze(simulate_experiment(Experiment::detection, obs, 7, 200))) {
        thresholds.push_back(a.mean_threshold);
    }
    std::sort(thresholds.begin(), thresholds.end());
    const double median = 0.5 * (thresholds[99] + thresholds[100]);
    const bool pass = worst_large <= 0.02 && std::fabs(mean_large - 0.36) <= 0.02 && std::fabs(median - 0.36) <= 0.08;
    return {pass, fmt("1e4 trials/level: threshold75 = %.4f D (worst group off by %.4f, tol 0.02); 200 sessions of 15 "
                      "trials/level: median = %.4f D (tol 0.08)",
                      mean_large, worst_large, median)};
}

Outcome weber_recovery() {
    using namespace psycho;
    const auto a = analyze(simulate_experiment(Experiment::discrimination, SimulatedObserver{}, 3, 1, 10000));
    const auto& lf = a.front().linear;
    const bool pass = std::fabs(lf.slope - 0.11) <= 0.03 && std::fabs(lf.intercept_d - 0.38) <= 0.05;
    return {pass, fmt("slope = %.4f (0.11 +/- 0.03), intercept = %.4f D (0.38 +/- 0.05)", lf.slope, lf.intercept_d)};
}

Outcome reversal_property() {
    std::mt19937_64 rng(11);
    const double nc = 0.0076916;
    double worst = 0.0;
    for (int i = 0; i < 500; ++i) {
        const EyeSide side = i % 2 ? EyeSide::left : EyeSide::right;
        DisplayGeometry geom;
        GazeState a;
        a.ipd = uniform(rng, 0.05, 0.075);
        const double dist = uniform(rng, 0.3, 3.0);
        a.fixation = fixation_from_angles(side, a.ipd, 0, 0, dist);
        const double ecc = uniform(rng, 0, 20), dir = deg_to_rad(uniform(rng, 0, 360));
        GazeState b = a;
        b.fixation = fixation_from_angles(side, a.ipd, ecc * std::cos(dir), ecc * std::sin(dir), dist);
        const Vec4 p = Vec4::point(rotation_center(side, a.ipd) + Vec3{0, 0, -uniform(rng, 0.25, 2.0)});
        a.mode = b.mode = RenderMode::ocular();
        const Vec2 fwd = screen_displacement(p, a, b, nc, geom, side);
        a.mode = b.mode = RenderMode::reversed();
        const Vec2 rev = screen_displacement(p, a, b, nc, geom, side);
        worst = std::max({worst, std::fabs(rev.x + fwd.x), std::fabs(rev.y + fwd.y)});
    }
    return {worst <= 1e-6, fmt("500 cases, max |reversed + ocular| = %.3g NDC (tol 1e-6)", worst)};
}

Outcome protocol_round_trip() {
    service::Session session;
    const double nc = nc_distance_m(default_model());
    const DisplayGeometry geom = retina::stimulus_geometry();
    double worst = 0.0;
    std::vector<std::string> conventional;
    int id = 0;
    for (const char* mode : {"ocular", "conventional"}) {
        session.handle({{"v", 1}, {"type", "set_mode"}, {"payload", {{"mode", mode}}}});
        for (int step = 0; step <= 10; ++step) {
            const double az = -20.0 + 4.0 * step, el = 1.5 * step - 7.5;
            session.handle({{"v", 1}, {"type", "set_gaze"},
                            {"payload", {{"azimuth_deg", az}, {"elevation_deg", el}, {"depth_d", 1.0}}}});
            const auto reply = session.handle({{"v", 1}, {"type", "request_frame"}, {"id", ++id},
                                               {"payload", {{"resolution", {128, 128}}}}});
            GazeState g = session.state().gaze;
            for (EyeSide side : {EyeSide::left, EyeSide::right}) {
                const auto ep = eye_and_projection(g, nc, geom, side);
                const auto& n = reply["telemetry"]["nodal_points"][std::string(to_string(side))];
                worst = std::max({worst, std::fabs(n[0].get<double>() - ep.nodal.x),
                                  std::fabs(n[1].get<double>() - ep.nodal.y), std::fabs(n[2].get<double>() - ep.nodal.z)});
            }
            if (std::string(mode) == "conventional") conventional.push_back(reply["data"]);
        }
    }
    const bool identical = std::all_of(conventional.begin(), conventional.end(),
                                       [&](const std::string& f) { return f == conventional.front(); });
    return {worst <= 1e-9 && identical,
            fmt("22-step drag trace: max telemetry |error| = %.3g (tol 1e-9); conventional frames identical: %s",
                worst, identical ? "yes" : "no")};
}

}  // namespace

int main() {
    const std::vector<Criterion> criteria{
        {1, true, "NC derivation", 0, nc_derivation},
        {2, true, "Matrix reduction", 1, matrix_reduction},
        {3, true, "Background registration", 1, background_registration},
        {4, true, "Display/MAR crossover", 0, display_crossover},
        {5, true, "Parallax vs acuity curves", 1, tradeoff_curves},
        {6, true, "Pursuit speed", 0, pursuit_speed},
        {7, true, "Dioptric linearity", 1, dioptric_linearity},
        {8, true, "Occlusion stimulus", 5, occlusion_stimulus},
        {9, true, "Pipeline round-trip", 30, pipeline_round_trip},
        {10, true, "Weber recovery", 30, weber_recovery},
        {11, true, "Reversal property", 1, reversal_property},
        {12, false, "Protocol round-trip", 10, protocol_round_trip},
    };

    int primary_failures = 0;
    for (const auto& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const double limit = c.runtime_limit_s > 0 ? c.runtime_limit_s : 0.1;
        const bool in_time = secs < limit;
        const bool pass = o.pass && in_time;
        if (c.primary && !pass) ++primary_failures;
        std::printf("%s %2d %-11s %-26s %s [%.3f s, limit %.1f s]\n", pass ? "PASS" : "FAIL", c.number,
                    c.primary ? "[primary]" : "[secondary]", c.name, o.detail.c_str(), secs, limit);
    }
    std::printf("%s: %d primary criteria failed\n", primary_failures == 0 ? "OK" : "FAILED", primary_failures);
    return primary_failures == 0 ? 0 : 1;
}
