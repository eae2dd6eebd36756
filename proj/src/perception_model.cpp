#include "ocular/perception_model.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "ocular/linalg.hpp"

namespace ocular {

void AcuityModel::validate() const {
    if (!(m >= 0.0) || !(omega0 > 0.0)) {
        throw std::invalid_argument("acuity model requires m >= 0 and omega0 > 0");
    }
}

void DisplaySpec::validate() const {
    if (!(pixel_pitch_arcmin > 0.0)) {
        throw std::invalid_argument("pixel pitch must be positive");
    }
}

void ParallaxQuery::validate() const {
    if (!(d_near > 0.0 && d_near <= d_far)) {
        throw std::invalid_argument("parallax query requires 0 < d_near <= d_far");
    }
    if (!(eccentricity_deg >= 0.0 && eccentricity_deg < 90.0)) {
        throw std::invalid_argument("eccentricity must lie in [0, 90) degrees");
    }
    if (!(nc >= 0.0)) {
        throw std::invalid_argument("NC must be non-negative");
    }
    if (d_near <= nc) {
        throw std::invalid_argument("d_near must exceed NC");
    }
}

double near_distance_for(double delta_d, double d_far) {
    const double far_d = std::isinf(d_far) ? 0.0 : 1.0 / d_far;
    return 1.0 / (far_d + delta_d);
}

double mar(const AcuityModel& model, double eccentricity_deg) { return model.omega0 + model.m * eccentricity_deg; }

double parallax_angle(const ParallaxQuery& q) {
    q.validate();
    const double e = deg_to_rad(q.eccentricity_deg);
    const double lateral = q.nc * std::sin(e);
    const double forward = q.nc * std::cos(e);
    const double near_term = std::atan(lateral / (q.d_near - forward));
    const double far_term = std::isinf(q.d_far) ? 0.0 : std::atan(lateral / (q.d_far - forward));
    return rad_to_deg(near_term - far_term);
}

std::optional<double> detectability_crossover(const AcuityModel& model, double delta_d, double nc, double d_far) {
    model.validate();
    if (!(delta_d > 0.0)) {
        throw std::invalid_argument("delta_d must be positive");
    }
    const double d_near = near_distance_for(delta_d, d_far);
    const auto margin = [&](double e) {
        return parallax_angle({e, d_near, d_far, nc}) - mar(model, e);
    };

    constexpr double kScanStep = 0.1;
    constexpr double kResolution = 0.001;
    constexpr int kSteps = 899;  // last sample at 89.9 degrees

    std::optional<double> last_above;
    for (int i = 1; i <= kSteps; ++i) {
        const double e = i * kScanStep;
        if (margin(e) >= 0.0) {
            last_above = e;
        }
    }
    if (!last_above) {
        return std::nullopt;
    }
    double lo = *last_above;
    double hi = lo + kScanStep;
    if (hi >= 90.0 || margin(hi) >= 0.0) {
        return lo;
    }
    while (hi - lo > kResolution) {
        const double mid = 0.5 * (lo + hi);
        (margin(mid) >= 0.0 ? lo : hi) = mid;
    }
    return lo;
}

double display_mar_crossover(const AcuityModel& model, const DisplaySpec& display) {
    model.validate();
    display.validate();
    const double pitch = display.pitch_deg();
    if (pitch < model.omega0) {
        throw std::domain_error("display pixel pitch is finer than the foveal MAR");
    }
    if (model.m == 0.0) {
        if (pitch == model.omega0) return 0.0;
        throw std::domain_error("flat acuity model never reaches the display pitch");
    }
    return (pitch - model.omega0) / model.m;
}

double pursuit_retinal_speed(double orbit_radius_deg, double angular_rate_deg_s) {
    if (!(orbit_radius_deg >= 0.0 && orbit_radius_deg < 90.0)) {
        throw std::invalid_argument("orbit radius must lie in [0, 90) degrees");
    }
    return angular_rate_deg_s * std::sin(deg_to_rad(orbit_radius_deg));
}

TradeoffTable tradeoff_table(const AcuityModel& model, const DisplaySpec& display, std::span<const double> delta_d,
                             double max_ecc_deg, double step_deg, double nc, double d_far) {
    model.validate();
    display.validate();
    if (!(step_deg > 0.0) || !(max_ecc_deg >= 0.0 && max_ecc_deg < 90.0)) {
        throw std::invalid_argument("tradeoff table needs step > 0 and 0 <= max eccentricity < 90");
    }
    for (double dd : delta_d) {
        if (!(dd >= 0.0)) throw std::invalid_argument("delta_d values must be non-negative");
    }

    TradeoffTable table;
    table.delta_d.assign(delta_d.begin(), delta_d.end());
    // Integer stepping keeps the last row exactly at max_ecc_deg.
    const auto count = static_cast<long>(std::floor(max_ecc_deg / step_deg + 1e-9));
    for (long i = 0; i <= count; ++i) {
        TradeoffRow row;
        row.eccentricity_deg = std::min(i * step_deg, max_ecc_deg);
        for (double dd : delta_d) {
            row.parallax_deg.push_back(
                dd == 0.0 ? 0.0 : parallax_angle({row.eccentricity_deg, near_distance_for(dd, d_far), d_far, nc}));
        }
        row.mar_deg = mar(model, row.eccentricity_deg);
        row.display_mar_deg = display.pitch_deg();
        table.rows.push_back(std::move(row));
    }
    return table;
}

namespace {

std::string format_number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

}  // namespace

std::string TradeoffTable::to_csv() const {
    std::string out = "eccentricity_deg";
    for (double dd : delta_d) {
        out += ",parallax_" + format_number(dd) + "D_deg";
    }
    out += ",mar_deg,display_mar_deg\n";
    for (const auto& row : rows) {
        out += format_number(row.eccentricity_deg);
        for (double p : row.parallax_deg) {
            out += ',' + format_number(p);
        }
        out += ',' + format_number(row.mar_deg) + ',' + format_number(row.display_mar_deg) + '\n';
    }
    return out;
}

}  // namespace ocular
