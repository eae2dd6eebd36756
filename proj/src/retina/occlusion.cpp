#include "ocular/retina/occlusion.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ocular::retina {

Circle projected_disc(const SceneObject& disc, const Vec3& scene_origin, const EyeProjection& ep, EyeSide side,
                      double ipd) {
    const double tan_az = std::tan(deg_to_rad(disc.azimuth_deg));
    const double tan_el = std::tan(deg_to_rad(disc.elevation_deg));
    const double tan_half = std::tan(deg_to_rad(disc.angular_size_deg / 2.0));
    if (disc.at_infinity()) {
        return {{tan_az, tan_el}, tan_half};
    }
    const Vec3 camera = rotation_center(side, ipd) + ep.nodal;
    const double depth = disc.depth_m();
    const double distance = camera.z - (scene_origin.z - depth);
    if (!(distance > 0.0)) {
        throw std::domain_error("disc lies behind the projection center");
    }
    return {{(scene_origin.x + depth * tan_az - camera.x) / distance,
             (scene_origin.y + depth * tan_el - camera.y) / distance},
            depth * tan_half / distance};
}

double circle_overlap_area(const Circle& a, const Circle& b) {
    const double d = (a.center - b.center).norm();
    const double r0 = a.radius;
    const double r1 = b.radius;
    if (d >= r0 + r1) {
        return 0.0;
    }
    if (d <= std::fabs(r0 - r1)) {
        const double r = std::min(r0, r1);
        return kPi * r * r;
    }
    const double c0 = std::clamp((d * d + r0 * r0 - r1 * r1) / (2.0 * d * r0), -1.0, 1.0);
    const double c1 = std::clamp((d * d + r1 * r1 - r0 * r0) / (2.0 * d * r1), -1.0, 1.0);
    const double k = (-d + r0 + r1) * (d + r0 - r1) * (d - r0 + r1) * (d + r0 + r1);
    return r0 * r0 * std::acos(c0) + r1 * r1 * std::acos(c1) - 0.5 * std::sqrt(std::max(k, 0.0));
}

double occlusion_reveal_fraction(const SceneObject& front, const SceneObject& back, const GazeState& gaze_a,
                                 const GazeState& gaze_b, double nc, const DisplayGeometry& geom, EyeSide side,
                                 Scene::Anchor anchor) {
    front.validate();
    back.validate();
    if (front.kind != SceneObject::Kind::disc || back.kind != SceneObject::Kind::disc) {
        throw std::invalid_argument("occlusion_reveal_fraction expects two discs");
    }
    if (front.azimuth_deg != back.azimuth_deg || front.elevation_deg != back.elevation_deg) {
        throw std::invalid_argument("occlusion_reveal_fraction expects coaxial discs");
    }
    if (front.depth_d < back.depth_d) {
        throw std::invalid_argument("front disc lies behind the back disc");
    }

    const auto outlines = [&](const GazeState& gaze) {
        Scene probe;
        probe.anchor = anchor;
        const Vec3 origin = scene_origin(probe, side, gaze.ipd);
        const EyeProjection ep = eye_and_projection(gaze, nc, geom, side);
        return std::pair{projected_disc(front, origin, ep, side, gaze.ipd),
                         projected_disc(back, origin, ep, side, gaze.ipd)};
    };

    const auto [front_a, back_a] = outlines(gaze_a);
    const double slack = 1e-12 * front_a.radius;
    if ((back_a.center - front_a.center).norm() + back_a.radius > front_a.radius + slack) {
        throw std::invalid_argument("front disc does not fully occlude the back disc under gaze_a");
    }

    const auto [front_b, back_b] = outlines(gaze_b);
    const double back_area = kPi * back_b.radius * back_b.radius;
    const double hidden = circle_overlap_area(front_b, back_b);
    return std::clamp(1.0 - hidden / back_area, 0.0, 1.0);
}

}  // namespace ocular::retina
