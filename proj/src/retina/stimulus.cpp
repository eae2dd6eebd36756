#include "ocular/retina/stimulus.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace ocular::retina {

Scene make_two_disc_stimulus(double back_d, double front_d, std::uint64_t seed) {
    if (!(back_d >= 0.0 && front_d >= back_d)) {
        throw std::invalid_argument("two-disc stimulus requires 0 <= back_d <= front_d");
    }
    Scene scene;
    scene.anchor = Scene::Anchor::eye;
    scene.background = Background{SolidTexture{{32, 32, 32}}, 0.5};

    SceneObject back;
    back.name = "back";
    back.kind = SceneObject::Kind::disc;
    back.depth_d = back_d;
    back.angular_size_deg = kStimulusSizeDeg;
    back.texture = SolidTexture{kBackSurfaceColor};

    SceneObject front = back;
    front.name = "front";
    front.depth_d = front_d;
    front.texture = NoiseTexture{seed, 64};

    scene.objects = {back, front};
    scene.fixation_orbit = FixationOrbit{};
    return scene;
}

Scene make_detection_stimulus(double absolute_d, double relative_d, std::uint64_t seed) {
    if (absolute_d != 1.0 && absolute_d != 2.0 && absolute_d != 3.0) {
        throw std::invalid_argument("detection stimulus: absolute distance must be 1, 2 or 3 D");
    }
    if (!(relative_d >= 0.0)) {
        throw std::invalid_argument("detection stimulus: relative distance must be >= 0 D");
    }
    return make_two_disc_stimulus(absolute_d, absolute_d + relative_d, seed);
}

Scene make_discrimination_stimulus(double front_d, std::uint64_t seed) {
    return make_two_disc_stimulus(0.0, front_d, seed);
}

Scene default_scene() { return make_detection_stimulus(1.0, 0.5, 1); }

DisplayGeometry stimulus_geometry() {
    DisplayGeometry g;
    g.fov_left_deg = g.fov_right_deg = g.fov_top_deg = g.fov_bottom_deg = 20.0;
    g.image_distance = std::numeric_limits<double>::infinity();
    g.z_near = 0.05;
    g.z_far = 100.0;
    return g;
}

}  // namespace ocular::retina
