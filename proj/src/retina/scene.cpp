#include "ocular/retina/scene.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace ocular::retina {

double diopters_to_meters(double d) {
    if (!(d >= 0.0)) throw std::invalid_argument("diopters must be non-negative");
    return d == 0.0 ? std::numeric_limits<double>::infinity() : 1.0 / d;
}

double meters_to_diopters(double m) {
    if (!(m > 0.0)) throw std::invalid_argument("distance must be positive");
    return std::isinf(m) ? 0.0 : 1.0 / m;
}

double SceneObject::depth_m() const { return diopters_to_meters(depth_d); }

void SceneObject::validate() const {
    if (!(depth_d >= 0.0) || !std::isfinite(depth_d)) {
        throw std::invalid_argument("object '" + name + "': depth must be finite and >= 0 D");
    }
    if (!(angular_size_deg > 0.0 && angular_size_deg < 180.0)) {
        throw std::invalid_argument("object '" + name + "': angular size must lie in (0, 180) degrees");
    }
    if (!(std::fabs(azimuth_deg) < 90.0 && std::fabs(elevation_deg) < 90.0)) {
        throw std::invalid_argument("object '" + name + "': lateral position must lie within +-90 degrees");
    }
    if (const auto* noise = std::get_if<NoiseTexture>(&texture); noise && noise->cells <= 0) {
        throw std::invalid_argument("object '" + name + "': noise cells must be positive");
    }
    if (const auto* img = std::get_if<ImageTexture>(&texture);
        img && (!img->image || img->image->width <= 0 || img->image->height <= 0)) {
        throw std::invalid_argument("object '" + name + "': image texture not loaded");
    }
}

void Scene::validate() const {
    for (const auto& obj : objects) {
        obj.validate();
    }
    if (!(background.cell_deg > 0.0)) {
        throw std::invalid_argument("background cell size must be positive");
    }
    if (std::holds_alternative<ImageTexture>(background.texture)) {
        throw std::invalid_argument("background supports solid or noise textures only");
    }
}

Vec3 scene_origin(const Scene& scene, EyeSide side, double ipd) {
    return scene.anchor == Scene::Anchor::eye ? rotation_center(side, ipd) : Vec3{};
}

Vec3 orbit_fixation(const FixationOrbit& orbit, double time_s, EyeSide side, double ipd, double distance_m) {
    if (!(distance_m > 0.0)) throw std::invalid_argument("orbit distance must be positive");
    const double direction = orbit.clockwise ? -1.0 : 1.0;
    const double phi = deg_to_rad(orbit.phase_deg + direction * orbit.rate_deg_s * time_s);
    const double r = deg_to_rad(orbit.radius_deg);
    const Vec3 dir{std::sin(r) * std::cos(phi), std::sin(r) * std::sin(phi), -std::cos(r)};
    return rotation_center(side, ipd) + distance_m * dir;
}

}  // namespace ocular::retina
