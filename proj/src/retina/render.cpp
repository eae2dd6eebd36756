#include "ocular/retina/render.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace ocular::retina {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

std::uint8_t noise_value(std::uint64_t seed, std::int64_t i, std::int64_t j) {
    std::uint64_t h = splitmix64(seed);
    h = splitmix64(h ^ static_cast<std::uint64_t>(i));
    h = splitmix64(h ^ static_cast<std::uint64_t>(j));
    return static_cast<std::uint8_t>(h >> 56);
}

int texel(double coord, int n) {
    const int i = static_cast<int>(std::floor(coord * n));
    return std::clamp(i, 0, n - 1);
}

/// Texture lookup with object-local coordinates u, v in [-1, 1], v up.
Rgb sample_texture(const Texture& tex, double u, double v) {
    const double s = 0.5 * (u + 1.0);
    const double t = 0.5 * (1.0 - v);
    if (const auto* solid = std::get_if<SolidTexture>(&tex)) {
        return solid->color;
    }
    if (const auto* noise = std::get_if<NoiseTexture>(&tex)) {
        const auto g = noise_value(noise->seed, texel(s, noise->cells), texel(t, noise->cells));
        return {g, g, g};
    }
    const auto& img = *std::get<ImageTexture>(tex).image;
    return img.at(texel(s, img.width), texel(t, img.height));
}

struct PreparedObject {
    std::size_t index = 0;
    const SceneObject* object = nullptr;
    bool infinite = false;
    double distance = 0.0;  // along the view axis from the projection center
    Vec2 center;            // plane coordinates (finite) or view tangents (infinite)
    double half = 0.0;

    bool covers(double u, double v) const {
        return object->kind == SceneObject::Kind::disc ? u * u + v * v <= 1.0
                                                       : std::fabs(u) <= 1.0 && std::fabs(v) <= 1.0;
    }
};

}  // namespace

double RetinalImage::fov_x_deg() const { return rad_to_deg(std::atan(window.right) - std::atan(window.left)); }
double RetinalImage::fov_y_deg() const { return rad_to_deg(std::atan(window.top) - std::atan(window.bottom)); }

RenderResult render(const Scene& scene, const GazeState& gaze, double nc, const DisplayGeometry& geom,
                    Resolution resolution, EyeSide side) {
    scene.validate();
    if (resolution.width <= 0 || resolution.height <= 0) {
        throw std::invalid_argument("render resolution must be positive");
    }
    const EyeProjection ep = eye_and_projection(gaze, nc, geom, side);
    const Vec3 origin = scene_origin(scene, side, gaze.ipd);
    const Vec3 camera = rotation_center(side, gaze.ipd) + ep.nodal;

    std::vector<PreparedObject> prepared;
    for (std::size_t i = 0; i < scene.objects.size(); ++i) {
        const auto& obj = scene.objects[i];
        PreparedObject p;
        p.index = i;
        p.object = &obj;
        p.infinite = obj.at_infinity();
        const double tan_az = std::tan(deg_to_rad(obj.azimuth_deg));
        const double tan_el = std::tan(deg_to_rad(obj.elevation_deg));
        const double tan_half = std::tan(deg_to_rad(obj.angular_size_deg / 2.0));
        if (p.infinite) {
            p.center = {tan_az, tan_el};
            p.half = tan_half;
        } else {
            const double depth = obj.depth_m();
            p.distance = camera.z - (origin.z - depth);
            if (p.distance < ep.frustum.z_near || p.distance > ep.frustum.z_far) {
                continue;  // clipped
            }
            p.center = {origin.x + depth * tan_az, origin.y + depth * tan_el};
            p.half = depth * tan_half;
        }
        prepared.push_back(p);
    }
    // Painter's order: farthest first, so 0 D objects come before finite ones.
    std::stable_sort(prepared.begin(), prepared.end(), [](const PreparedObject& a, const PreparedObject& b) {
        return a.object->depth_d < b.object->depth_d;
    });

    const Mat4& proj = ep.projection;
    const double bg_cell = std::tan(deg_to_rad(scene.background.cell_deg));

    RenderResult out;
    out.visible_samples.assign(scene.objects.size(), 0);
    out.visible_pixels.assign(scene.objects.size(), 0);
    RgbImage& img = out.image.pixels;
    img.width = resolution.width;
    img.height = resolution.height;
    img.data.assign(static_cast<std::size_t>(img.width) * img.height * 3, 0);

    std::vector<std::uint8_t> seen(scene.objects.size());
    constexpr int kSamples = kSupersampleGrid * kSupersampleGrid;
    for (int py = 0; py < img.height; ++py) {
        for (int px = 0; px < img.width; ++px) {
            std::fill(seen.begin(), seen.end(), 0);
            std::array<int, 3> sum{};
            for (int sy = 0; sy < kSupersampleGrid; ++sy) {
                for (int sx = 0; sx < kSupersampleGrid; ++sx) {
                    const double ndc_x = -1.0 + 2.0 * (px + (sx + 0.5) / kSupersampleGrid) / img.width;
                    const double ndc_y = 1.0 - 2.0 * (py + (sy + 0.5) / kSupersampleGrid) / img.height;
                    const double tx = (ndc_x + proj(0, 2)) / proj(0, 0);
                    const double ty = (ndc_y + proj(1, 2)) / proj(1, 1);

                    const PreparedObject* top = nullptr;
                    double top_u = 0.0;
                    double top_v = 0.0;
                    for (const auto& p : prepared) {
                        double u, v;
                        if (p.infinite) {
                            u = (tx - p.center.x) / p.half;
                            v = (ty - p.center.y) / p.half;
                        } else {
                            u = (camera.x + p.distance * tx - p.center.x) / p.half;
                            v = (camera.y + p.distance * ty - p.center.y) / p.half;
                        }
                        if (p.covers(u, v)) {
                            top = &p;
                            top_u = u;
                            top_v = v;
                        }
                    }
                    Rgb color;
                    if (top) {
                        color = sample_texture(top->object->texture, top_u, top_v);
                        ++out.visible_samples[top->index];
                        seen[top->index] = 1;
                    } else if (const auto* noise = std::get_if<NoiseTexture>(&scene.background.texture)) {
                        const auto g = noise_value(noise->seed, static_cast<std::int64_t>(std::floor(tx / bg_cell)),
                                                   static_cast<std::int64_t>(std::floor(ty / bg_cell)));
                        color = {g, g, g};
                    } else {
                        color = std::get<SolidTexture>(scene.background.texture).color;
                    }
                    for (int c = 0; c < 3; ++c) sum[c] += color[c];
                }
            }
            const auto base = 3 * (static_cast<std::size_t>(py) * img.width + px);
            for (int c = 0; c < 3; ++c) {
                img.data[base + c] = static_cast<std::uint8_t>((sum[c] + kSamples / 2) / kSamples);
            }
            for (std::size_t i = 0; i < seen.size(); ++i) out.visible_pixels[i] += seen[i];
        }
    }

    const Frustum& f = ep.frustum;
    out.image.window = {f.l / f.z_near, f.r / f.z_near, f.b / f.z_near, f.t / f.z_near};
    out.image.gaze = gaze;
    const Vec3 to_fixation = gaze.fixation - camera;
    out.image.fixation_tangent = {to_fixation.x / -to_fixation.z, to_fixation.y / -to_fixation.z};
    return out;
}

RenderResult render(const Scene& scene, const GazeState& gaze, const SchematicEyeModel& model,
                    const DisplayGeometry& geom, Resolution resolution, EyeSide side) {
    model.validate();
    return render(scene, gaze, nc_distance_m(model), geom, resolution, side);
}

namespace {

/// Angle in radians between view directions with tangents a and b.
double angle_between(Vec2 a, Vec2 b) {
    const Vec3 da{a.x, a.y, -1.0};
    const Vec3 db{b.x, b.y, -1.0};
    const Vec3 cross{da.y * db.z - da.z * db.y, da.z * db.x - da.x * db.z, da.x * db.y - da.y * db.x};
    return std::atan2(cross.norm(), da.dot(db));
}

void blur_pass(const std::vector<float>& src, std::vector<float>& dst, int width, int height,
               const std::vector<double>& sigma_px, bool horizontal) {
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            const std::size_t idx = static_cast<std::size_t>(y) * width + x;
            const double sigma = sigma_px[idx];
            const int radius = static_cast<int>(std::ceil(3.0 * sigma));
            std::array<double, 3> acc{};
            double wsum = 0.0;
            for (int k = -radius; k <= radius; ++k) {
                const double w = sigma > 0.0 ? std::exp(-0.5 * (k * k) / (sigma * sigma)) : 1.0;
                const int sx = horizontal ? std::clamp(x + k, 0, width - 1) : x;
                const int sy = horizontal ? y : std::clamp(y + k, 0, height - 1);
                const std::size_t s = 3 * (static_cast<std::size_t>(sy) * width + sx);
                for (int c = 0; c < 3; ++c) acc[c] += w * src[s + c];
                wsum += w;
            }
            for (int c = 0; c < 3; ++c) dst[3 * idx + c] = static_cast<float>(acc[c] / wsum);
        }
    }
}

}  // namespace

RetinalImage foveate(const RetinalImage& img, const AcuityModel& acuity) {
    acuity.validate();
    const int w = img.width();
    const int h = img.height();
    const ViewWindow& win = img.window;
    const Vec2 fix = img.fixation_tangent;
    if (fix.x < win.left || fix.x > win.right || fix.y < win.bottom || fix.y > win.top) {
        throw std::invalid_argument("foveate: fixation lies outside the image");
    }
    // Angular pixel pitch on the view axis; sigma is converted with this single
    // scale so that a flat acuity model blurs uniformly in pixels.
    const double pitch_deg = rad_to_deg(std::atan((win.right - win.left) / w));

    std::vector<double> sigma(static_cast<std::size_t>(w) * h);
    for (int y = 0; y < h; ++y) {
        const double ty = win.top - (y + 0.5) * (win.top - win.bottom) / h;
        for (int x = 0; x < w; ++x) {
            const double tx = win.left + (x + 0.5) * (win.right - win.left) / w;
            const double ecc = rad_to_deg(angle_between({tx, ty}, fix));
            sigma[static_cast<std::size_t>(y) * w + x] = 0.5 * mar(acuity, ecc) / pitch_deg;
        }
    }

    std::vector<float> a(img.pixels.data.begin(), img.pixels.data.end());
    std::vector<float> b(a.size());
    blur_pass(a, b, w, h, sigma, true);
    blur_pass(b, a, w, h, sigma, false);

    RetinalImage out = img;
    for (std::size_t i = 0; i < a.size(); ++i) {
        out.pixels.data[i] = static_cast<std::uint8_t>(std::clamp(std::lround(a[i]), 0L, 255L));
    }
    return out;
}

std::size_t count_pixels(const RgbImage& img, Rgb color) {
    std::size_t n = 0;
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            n += img.at(x, y) == color ? 1 : 0;
        }
    }
    return n;
}

}  // namespace ocular::retina
