#pragma once

#include "ocular/gaze_transform.hpp"
#include "ocular/retina/scene.hpp"

namespace ocular::retina {

struct Circle {
    Vec2 center;
    double radius = 0.0;
};

/// Outline of a disc in view-tangent space as seen from the projection center
/// for `gaze`. Frontoparallel discs project to exact circles there.
Circle projected_disc(const SceneObject& disc, const Vec3& scene_origin, const EyeProjection& ep, EyeSide side,
                      double ipd);

/// Area of the intersection of two circles.
double circle_overlap_area(const Circle& a, const Circle& b);

/**
 * Fraction of the back disc's projected area left uncovered by the front disc
 * under gaze_b. Both discs must share a lateral position and the front one
 * must fully cover the back one under gaze_a; otherwise std::invalid_argument.
 */
double occlusion_reveal_fraction(const SceneObject& front, const SceneObject& back, const GazeState& gaze_a,
                                 const GazeState& gaze_b, double nc, const DisplayGeometry& geom, EyeSide side,
                                 Scene::Anchor anchor = Scene::Anchor::eye);

}  // namespace ocular::retina
