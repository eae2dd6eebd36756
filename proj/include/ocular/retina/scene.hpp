#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "ocular/gaze_transform.hpp"

namespace ocular::retina {

using Rgb = std::array<std::uint8_t, 3>;

struct RgbImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> data;  ///< row-major RGB, top row first

    Rgb at(int x, int y) const {
        const auto i = 3 * (static_cast<std::size_t>(y) * width + x);
        return {data[i], data[i + 1], data[i + 2]};
    }
};

struct SolidTexture {
    Rgb color{128, 128, 128};
};

/// Gray-level white noise on a `cells` x `cells` grid across the object.
struct NoiseTexture {
    std::uint64_t seed = 0;
    int cells = 64;
};

struct ImageTexture {
    std::string path;
    std::shared_ptr<const RgbImage> image;
};

using Texture = std::variant<SolidTexture, NoiseTexture, ImageTexture>;

/// Frontoparallel planar object. Depth is stored in diopters; 0 D places the
/// object at optical infinity. Sizes are visual angles at the anchor, so the
/// physical half-extent is depth_m * tan(angular_size / 2).
struct SceneObject {
    enum class Kind { disc, quad };

    std::string name;
    Kind kind = Kind::disc;
    double depth_d = 1.0;
    double angular_size_deg = 2.0;
    double azimuth_deg = 0.0;
    double elevation_deg = 0.0;
    Texture texture = SolidTexture{};

    bool at_infinity() const { return depth_d == 0.0; }
    double depth_m() const;
    void validate() const;
};

/// Solid color, or white noise on the plane at infinity with cells of
/// `cell_deg` visual angle (at the view axis).
struct Background {
    Texture texture = SolidTexture{{32, 32, 32}};
    double cell_deg = 0.5;
};

/// Pursuit target circling the view axis. Descriptive: it drives gaze, it is
/// not drawn.
struct FixationOrbit {
    double radius_deg = 16.0;
    double rate_deg_s = 90.0;
    bool clockwise = false;
    double phase_deg = 0.0;
};

struct Scene {
    /// Where object positions are measured from. `eye` anchors the scene at
    /// the rendered eye's center of rotation (monocular stimuli); `head` at
    /// the head-space origin.
    enum class Anchor { eye, head };

    Anchor anchor = Anchor::eye;
    std::vector<SceneObject> objects;
    Background background{};
    std::optional<FixationOrbit> fixation_orbit;

    void validate() const;
};

double diopters_to_meters(double d);
double meters_to_diopters(double m);

/// Head-space origin of the scene for the given eye.
Vec3 scene_origin(const Scene& scene, EyeSide side, double ipd);

/// Fixation point on the orbit `time_s` seconds after its start phase, at
/// `distance_m` from the rendered eye's center of rotation.
Vec3 orbit_fixation(const FixationOrbit& orbit, double time_s, EyeSide side, double ipd, double distance_m);

}  // namespace ocular::retina
