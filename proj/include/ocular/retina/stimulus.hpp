#pragma once

#include <cstdint>

#include "ocular/retina/scene.hpp"

namespace ocular::retina {

inline constexpr double kStimulusSizeDeg = 2.0;
inline constexpr Rgb kBackSurfaceColor{255, 0, 0};

/// Solid red back disc behind a white-noise front disc, both 2 degrees,
/// coaxial on the rendered eye's axis, with the 16 degree pursuit orbit.
/// Object 0 is the back disc, object 1 the front disc.
Scene make_two_disc_stimulus(double back_d, double front_d, std::uint64_t seed);

/// Detection stimulus: back at `absolute_d` (1, 2 or 3 D), front at
/// absolute_d + relative_d.
Scene make_detection_stimulus(double absolute_d, double relative_d, std::uint64_t seed);

/// Discrimination stimulus interval: back at 0 D, front at `front_d`.
Scene make_discrimination_stimulus(double front_d, std::uint64_t seed);

/// Scene used when no scene is given: a detection stimulus at 1 D back,
/// 0.5 D relative, seed 1.
Scene default_scene();

/// Display window used by the stimulus renderers: +-20 degrees, image at infinity.
DisplayGeometry stimulus_geometry();

}  // namespace ocular::retina
