#pragma once

#include <cstddef>
#include <vector>

#include "ocular/gaze_transform.hpp"
#include "ocular/perception_model.hpp"
#include "ocular/retina/scene.hpp"

namespace ocular::retina {

struct Resolution {
    int width = 800;
    int height = 800;
};

/// View tangents (x / -z, y / -z) spanned by the image.
struct ViewWindow {
    double left = -1.0;
    double right = 1.0;
    double bottom = -1.0;
    double top = 1.0;
};

struct RetinalImage {
    RgbImage pixels;
    ViewWindow window;
    GazeState gaze;
    /// View tangent of the fixation point seen from the projection center.
    Vec2 fixation_tangent;

    int width() const { return pixels.width; }
    int height() const { return pixels.height; }
    /// Horizontal and vertical extent in degrees.
    double fov_x_deg() const;
    double fov_y_deg() const;
};

struct RenderResult {
    RetinalImage image;
    /// Indexed like Scene::objects: supersamples where each object is on top.
    std::vector<std::size_t> visible_samples;
    /// Pixels with at least one supersample showing the object.
    std::vector<std::size_t> visible_pixels;
};

/// Supersamples per pixel, on a regular 2 x 2 grid.
inline constexpr int kSupersampleGrid = 2;

/**
 * Rasterizes the scene through the gaze-dependent eye and projection
 * transforms. Each supersample's ray is intersected with the frontoparallel
 * object planes, painted back to front.
 */
RenderResult render(const Scene& scene, const GazeState& gaze, double nc, const DisplayGeometry& geom,
                    Resolution resolution, EyeSide side);
RenderResult render(const Scene& scene, const GazeState& gaze, const SchematicEyeModel& model,
                    const DisplayGeometry& geom, Resolution resolution, EyeSide side);

/// Spatially varying Gaussian blur with sigma = MAR(e) / 2, e being each
/// pixel's angular distance from the fixation point. Applied as a horizontal
/// then a vertical pass.
RetinalImage foveate(const RetinalImage& img, const AcuityModel& acuity);

/// Counts pixels exactly equal to `color`.
std::size_t count_pixels(const RgbImage& img, Rgb color);

}  // namespace ocular::retina
