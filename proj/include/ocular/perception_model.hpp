#pragma once

#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace ocular {

/// Linear minimum-angle-of-resolution model: omega(e) = m * e + omega0.
struct AcuityModel {
    double m = 0.022;            ///< degrees MAR per degree of eccentricity
    double omega0 = 1.0 / 60.0;  ///< foveal MAR in degrees (20/20 vision)

    void validate() const;
};

struct DisplaySpec {
    double pixel_pitch_arcmin = 4.58;

    double pitch_deg() const { return pixel_pitch_arcmin / 60.0; }
    void validate() const;
};

/// Two on-axis points at distances d_near <= d_far from the center of
/// rotation, observed with the eye rotated by `eccentricity_deg`.
struct ParallaxQuery {
    double eccentricity_deg = 0.0;
    double d_near = 1.0;
    double d_far = std::numeric_limits<double>::infinity();
    double nc = 0.0076916;  ///< meters

    void validate() const;
};

/// Far reference distance used for the parallax-vs-acuity curves: the
/// nearest back-surface distance of the detection experiment (1 D).
inline constexpr double kCurveFarDistance = 1.0;

/// Near distance at `delta_d` diopters in front of `d_far` (which may be infinite).
double near_distance_for(double delta_d, double d_far);

double mar(const AcuityModel& model, double eccentricity_deg);

/// Angular separation in degrees of the two query points as seen from the
/// rotated nodal point. Throws std::invalid_argument if d_near <= NC.
double parallax_angle(const ParallaxQuery& q);

/// Largest eccentricity in (0, 90) degrees where parallax reaches the MAR.
/// Scans at 0.1 degree, then bisects to 0.001 degree.
std::optional<double> detectability_crossover(const AcuityModel& model, double delta_d, double nc,
                                              double d_far = kCurveFarDistance);

/// Eccentricity where the MAR grows to the display pixel pitch.
/// Throws std::domain_error when the display out-resolves the fovea.
double display_mar_crossover(const AcuityModel& model, const DisplaySpec& display);

/// Angular speed of the line of sight when pursuing a target that circles
/// the view axis at `orbit_radius_deg` with `angular_rate_deg_s`.
double pursuit_retinal_speed(double orbit_radius_deg, double angular_rate_deg_s);

struct TradeoffRow {
    double eccentricity_deg = 0.0;
    std::vector<double> parallax_deg;  ///< one entry per requested delta_d
    double mar_deg = 0.0;
    double display_mar_deg = 0.0;
};

struct TradeoffTable {
    std::vector<double> delta_d;
    std::vector<TradeoffRow> rows;

    /// Header plus one newline-terminated row per eccentricity.
    std::string to_csv() const;
};

/// Rows for e = 0, step, 2 step, ... up to and including max_ecc_deg.
TradeoffTable tradeoff_table(const AcuityModel& model, const DisplaySpec& display, std::span<const double> delta_d,
                             double max_ecc_deg, double step_deg, double nc, double d_far = kCurveFarDistance);

}  // namespace ocular
