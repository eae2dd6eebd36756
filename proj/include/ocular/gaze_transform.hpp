#pragma once

#include <limits>
#include <string>
#include <string_view>

#include "ocular/eye_model.hpp"
#include "ocular/linalg.hpp"

// Head space is right-handed: x to the viewer's right, y up, the viewer looks
// down -z. The origin sits midway between the two eyes' centers of rotation,
// so the left eye rotates about (-ipd/2, 0, 0) and the right about (+ipd/2, 0, 0).

namespace ocular {

enum class EyeSide { left, right };

EyeSide parse_eye_side(std::string_view text);
std::string_view to_string(EyeSide side);

/// +1 for the left eye, -1 for the right eye: the sign of the ipd/2 shift
/// that re-expresses a head-space point relative to that eye's rotation center.
constexpr double eye_sign(EyeSide side) { return side == EyeSide::left ? 1.0 : -1.0; }

/// Center of rotation of one eye in head space.
constexpr Vec3 rotation_center(EyeSide side, double ipd) { return {-eye_sign(side) * ipd / 2.0, 0.0, 0.0}; }

struct RenderMode {
    enum class Kind { conventional, ocular_parallax, reversed_ocular_parallax };

    Kind kind = Kind::ocular_parallax;
    /// Scales the nodal offset. 1 is physically faithful, larger values amplify.
    double gain = 1.0;

    static constexpr RenderMode conventional() { return {Kind::conventional, 1.0}; }
    static constexpr RenderMode ocular(double gain = 1.0) { return {Kind::ocular_parallax, gain}; }
    static constexpr RenderMode reversed() { return {Kind::reversed_ocular_parallax, 1.0}; }

    void validate() const;
    friend constexpr bool operator==(const RenderMode&, const RenderMode&) = default;
};

/// Accepts "conventional", "ocular", "reversed" and "amplified" (ocular with
/// the given gain). The gain is ignored for conventional mode.
RenderMode parse_render_mode(std::string_view name, double gain = 1.0);
std::string to_string(const RenderMode& mode);

/// Per-frame gaze input: the tracked fixation point F in head space.
struct GazeState {
    Vec3 fixation{0.0, 0.0, -1.0};
    double ipd = 0.064;
    RenderMode mode{};

    /// Requires ipd > 0, fixation in front of the viewer (z < 0).
    void validate() const;
};

/// Builds a fixation point for `side` from angles measured at that eye's
/// center of rotation. Positive azimuth looks right, positive elevation up.
Vec3 fixation_from_angles(EyeSide side, double ipd, double azimuth_deg, double elevation_deg, double distance_m);

struct NodalPair {
    Vec3 left;
    Vec3 right;
};

/// Display parameters of the conventional stereo frustum. Half-angles are
/// positive magnitudes in degrees; left and bottom are negated internally.
struct DisplayGeometry {
    double fov_left_deg = 20.0;
    double fov_right_deg = 20.0;
    double fov_top_deg = 20.0;
    double fov_bottom_deg = 20.0;
    /// Virtual image distance, meters. Infinity selects the analytic limit.
    double image_distance = std::numeric_limits<double>::infinity();
    double z_near = 0.05;
    double z_far = 100.0;

    void validate() const;
};

/// Near-plane bounds of an off-axis perspective frustum.
struct Frustum {
    double l = 0.0;
    double r = 0.0;
    double b = 0.0;
    double t = 0.0;
    double z_near = 0.0;
    double z_far = 0.0;
};

/// Fixation relative to the eye's center of rotation:
/// F + (ipd/2, 0, 0) for the left eye, F - (ipd/2, 0, 0) for the right.
/// Throws std::invalid_argument if the result has zero length.
Vec3 per_eye_fixation(const GazeState& state, EyeSide side);

/// Nodal point relative to the center of rotation, along the line of sight.
/// Reversed mode negates the lateral (x, y) components. `nc` is in meters;
/// nc = 0 degenerates to the conventional zero offset.
Vec3 nodal_point(Vec3 fixation_from_eye, double nc, const RenderMode& mode);

NodalPair nodal_points(const GazeState& state, double nc);

/// View-to-eye transform: T(-n) * T(+-ipd/2 along x).
Mat4 eye_matrix(Vec3 nodal, double ipd, EyeSide side);

/// Off-axis frustum through the fixed display window for a projection center
/// displaced by `nodal` from the center of rotation.
///
/// The nodal point's forward offset enters as a positive scalar
/// f = |nodal.z|, so that both the near plane and the virtual image distance
/// are positive distances along the view axis:
///
///   {l, r} = (z_near + f) / (d + f) * (d tan(alpha_{l,r}) + n_x)
///   {b, t} = (z_near + f) / (d + f) * (d tan(alpha_{b,t}) + n_y)
///
/// evaluated as (z_near + f) (tan(alpha) + n_x / d) / (1 + f / d), which is
/// exact at n = 0 and reduces to (z_near + f) tan(alpha) at d = infinity.
/// The bounds lie at distance z_near + f from the projection center, which
/// is the near plane of the returned frustum.
Frustum projection_frustum(const DisplayGeometry& geom, Vec3 nodal);

/// Right-handed perspective matrix with clip z in [-1, 1] and row 4 = (0, 0, -1, 0).
/// Throws std::invalid_argument for a degenerate frustum.
Mat4 projection_matrix(const Frustum& f);

struct EyeProjection {
    Mat4 eye;
    Mat4 projection;
    Vec3 nodal;
    Frustum frustum;
};

EyeProjection eye_and_projection(const GazeState& state, double nc, const DisplayGeometry& geom, EyeSide side);
EyeProjection eye_and_projection(const GazeState& state, const SchematicEyeModel& model, const DisplayGeometry& geom,
                                 EyeSide side);

/// Normalized device coordinates of a homogeneous head-space point.
/// `view_model` is the V * M product applied before the eye matrix.
/// Throws std::domain_error if the point lies behind the near plane.
Vec2 project_to_ndc(const EyeProjection& ep, Vec4 point, const Mat4& view_model = Mat4::identity());

/// NDC of `p` under gaze_b minus NDC under gaze_a.
Vec2 screen_displacement(Vec4 p, const GazeState& gaze_a, const GazeState& gaze_b, double nc,
                         const DisplayGeometry& geom, EyeSide side);
Vec2 screen_displacement(Vec3 p, const GazeState& gaze_a, const GazeState& gaze_b, const SchematicEyeModel& model,
                         const DisplayGeometry& geom, EyeSide side);

}  // namespace ocular
