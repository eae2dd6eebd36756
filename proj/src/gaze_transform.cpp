#include "ocular/gaze_transform.hpp"

#include <cmath>
#include <stdexcept>

namespace ocular {

EyeSide parse_eye_side(std::string_view text) {
    if (text == "left" || text == "l") return EyeSide::left;
    if (text == "right" || text == "r") return EyeSide::right;
    throw std::invalid_argument("unknown eye '" + std::string(text) + "' (expected left|right)");
}

std::string_view to_string(EyeSide side) { return side == EyeSide::left ? "left" : "right"; }

void RenderMode::validate() const {
    if (!(gain > 0.0) || !std::isfinite(gain)) {
        throw std::invalid_argument("render mode gain must be positive and finite");
    }
}

RenderMode parse_render_mode(std::string_view name, double gain) {
    RenderMode mode;
    if (name == "conventional") {
        mode = RenderMode::conventional();
    } else if (name == "ocular" || name == "ocular-parallax" || name == "amplified") {
        mode = RenderMode::ocular(gain);
    } else if (name == "reversed") {
        mode = RenderMode::reversed();
        mode.gain = gain;
    } else {
        throw std::invalid_argument("unknown render mode '" + std::string(name) +
                                    "' (expected conventional|ocular|reversed|amplified)");
    }
    mode.validate();
    return mode;
}

std::string to_string(const RenderMode& mode) {
    switch (mode.kind) {
        case RenderMode::Kind::conventional:
            return "conventional";
        case RenderMode::Kind::ocular_parallax:
            return "ocular";
        case RenderMode::Kind::reversed_ocular_parallax:
            return "reversed";
    }
    return "unknown";
}

void GazeState::validate() const {
    if (!(ipd > 0.0) || !std::isfinite(ipd)) {
        throw std::invalid_argument("ipd must be positive");
    }
    if (!(fixation.z < 0.0) || !std::isfinite(fixation.norm())) {
        throw std::invalid_argument("fixation must be finite and in front of the viewer (z < 0)");
    }
    mode.validate();
}

Vec3 fixation_from_angles(EyeSide side, double ipd, double azimuth_deg, double elevation_deg, double distance_m) {
    if (!(distance_m > 0.0)) {
        throw std::invalid_argument("fixation distance must be positive");
    }
    const double az = deg_to_rad(azimuth_deg);
    const double el = deg_to_rad(elevation_deg);
    const Vec3 dir{std::cos(el) * std::sin(az), std::sin(el), -std::cos(el) * std::cos(az)};
    return rotation_center(side, ipd) + distance_m * dir;
}

Vec3 per_eye_fixation(const GazeState& state, EyeSide side) {
    const Vec3 f = state.fixation + Vec3{eye_sign(side) * state.ipd / 2.0, 0.0, 0.0};
    if (f.norm() == 0.0) {
        throw std::invalid_argument("fixation coincides with the eye's center of rotation");
    }
    return f;
}

Vec3 nodal_point(Vec3 fixation_from_eye, double nc, const RenderMode& mode) {
    const double len = fixation_from_eye.norm();
    if (len == 0.0) {
        throw std::invalid_argument("nodal_point: zero-length fixation vector");
    }
    if (nc < 0.0) {
        throw std::invalid_argument("nodal_point: NC must be non-negative");
    }
    if (mode.kind == RenderMode::Kind::conventional || nc == 0.0) {
        return {};
    }
    Vec3 n = (mode.gain * nc / len) * fixation_from_eye;
    if (mode.kind == RenderMode::Kind::reversed_ocular_parallax) {
        n.x = -n.x;
        n.y = -n.y;
    }
    return n;
}

NodalPair nodal_points(const GazeState& state, double nc) {
    return {nodal_point(per_eye_fixation(state, EyeSide::left), nc, state.mode),
            nodal_point(per_eye_fixation(state, EyeSide::right), nc, state.mode)};
}

Mat4 eye_matrix(Vec3 nodal, double ipd, EyeSide side) {
    // Product of the two translations, written out so that n = 0 yields the
    // conventional stereo matrix bit for bit.
    return Mat4::translation({eye_sign(side) * ipd / 2.0 - nodal.x, 0.0 - nodal.y, 0.0 - nodal.z});
}

void DisplayGeometry::validate() const {
    const auto angle_ok = [](double a) { return a > 0.0 && a < 90.0; };
    if (!angle_ok(fov_left_deg) || !angle_ok(fov_right_deg) || !angle_ok(fov_top_deg) ||
        !angle_ok(fov_bottom_deg)) {
        throw std::invalid_argument("display half-angles must lie in (0, 90) degrees");
    }
    if (!(z_near > 0.0 && z_near < z_far)) {
        throw std::invalid_argument("display clip planes must satisfy 0 < z_near < z_far");
    }
    if (!(image_distance >= z_near)) {
        throw std::invalid_argument("virtual image distance must be >= z_near (or infinite)");
    }
}

Frustum projection_frustum(const DisplayGeometry& geom, Vec3 nodal) {
    geom.validate();
    const double d = geom.image_distance;
    const double forward = std::fabs(nodal.z);
    if (!(d + forward > 0.0)) {
        throw std::invalid_argument("projection_frustum: d + n_z must be positive");
    }
    const double near_plane = geom.z_near + forward;
    // n / d and f / d vanish when d is infinite.
    const double shrink = 1.0 + forward / d;
    const double shift_x = nodal.x / d;
    const double shift_y = nodal.y / d;
    const auto bound = [&](double alpha_deg, double shift) {
        return near_plane * (std::tan(deg_to_rad(alpha_deg)) + shift) / shrink;
    };

    Frustum f;
    f.l = bound(-geom.fov_left_deg, shift_x);
    f.r = bound(geom.fov_right_deg, shift_x);
    f.b = bound(-geom.fov_bottom_deg, shift_y);
    f.t = bound(geom.fov_top_deg, shift_y);
    f.z_near = near_plane;
    f.z_far = geom.z_far;
    return f;
}

Mat4 projection_matrix(const Frustum& f) {
    if (f.r == f.l || f.t == f.b || f.z_far == f.z_near) {
        throw std::invalid_argument("projection_matrix: degenerate frustum");
    }
    Mat4 p;
    p(0, 0) = 2.0 * f.z_near / (f.r - f.l);
    p(0, 2) = (f.r + f.l) / (f.r - f.l);
    p(1, 1) = 2.0 * f.z_near / (f.t - f.b);
    p(1, 2) = (f.t + f.b) / (f.t - f.b);
    p(2, 2) = -(f.z_far + f.z_near) / (f.z_far - f.z_near);
    p(2, 3) = -2.0 * f.z_far * f.z_near / (f.z_far - f.z_near);
    p(3, 2) = -1.0;
    return p;
}

EyeProjection eye_and_projection(const GazeState& state, double nc, const DisplayGeometry& geom, EyeSide side) {
    state.validate();
    EyeProjection out;
    out.nodal = nodal_point(per_eye_fixation(state, side), nc, state.mode);
    out.eye = eye_matrix(out.nodal, state.ipd, side);
    out.frustum = projection_frustum(geom, out.nodal);
    out.projection = projection_matrix(out.frustum);
    return out;
}

EyeProjection eye_and_projection(const GazeState& state, const SchematicEyeModel& model, const DisplayGeometry& geom,
                                 EyeSide side) {
    model.validate();
    return eye_and_projection(state, nc_distance_m(model), geom, side);
}

Vec2 project_to_ndc(const EyeProjection& ep, Vec4 point, const Mat4& view_model) {
    const Vec4 eye = ep.eye * (view_model * point);
    const bool in_front = point.w == 0.0 ? eye.z < 0.0 : eye.z <= -ep.frustum.z_near * eye.w;
    if (!in_front) {
        throw std::domain_error("point lies behind the near plane");
    }
    const Vec4 clip = ep.projection * eye;
    return {clip.x / clip.w, clip.y / clip.w};
}

Vec2 screen_displacement(Vec4 p, const GazeState& gaze_a, const GazeState& gaze_b, double nc,
                         const DisplayGeometry& geom, EyeSide side) {
    const Vec2 a = project_to_ndc(eye_and_projection(gaze_a, nc, geom, side), p);
    const Vec2 b = project_to_ndc(eye_and_projection(gaze_b, nc, geom, side), p);
    return b - a;
}

Vec2 screen_displacement(Vec3 p, const GazeState& gaze_a, const GazeState& gaze_b, const SchematicEyeModel& model,
                         const DisplayGeometry& geom, EyeSide side) {
    model.validate();
    return screen_displacement(Vec4::point(p), gaze_a, gaze_b, nc_distance_m(model), geom, side);
}

}  // namespace ocular
