#include "ocular/retina/scene_io.hpp"

#include <fstream>
#include <stdexcept>

#include "ocular/retina/image_io.hpp"

namespace ocular::retina {

using nlohmann::json;

namespace {

Rgb parse_color(const json& j) {
    if (!j.is_array() || j.size() != 3) {
        throw std::invalid_argument("color must be an [r, g, b] array");
    }
    Rgb c;
    for (std::size_t i = 0; i < 3; ++i) {
        const int v = j.at(i).get<int>();
        if (v < 0 || v > 255) throw std::invalid_argument("color components must lie in [0, 255]");
        c[i] = static_cast<std::uint8_t>(v);
    }
    return c;
}

Texture parse_texture(const json& j, const std::filesystem::path& base_dir) {
    const auto type = j.at("type").get<std::string>();
    if (type == "solid") {
        return SolidTexture{parse_color(j.at("color"))};
    }
    if (type == "noise") {
        return NoiseTexture{j.value("seed", std::uint64_t{0}), j.value("cells", 64)};
    }
    if (type == "image") {
        ImageTexture tex;
        tex.path = j.at("path").get<std::string>();
        const std::filesystem::path p = base_dir / tex.path;
        tex.image = std::make_shared<const RgbImage>(read_ppm(p));
        return tex;
    }
    throw std::invalid_argument("unknown texture type '" + type + "'");
}

json texture_to_json(const Texture& tex) {
    if (const auto* solid = std::get_if<SolidTexture>(&tex)) {
        return {{"type", "solid"}, {"color", {solid->color[0], solid->color[1], solid->color[2]}}};
    }
    if (const auto* noise = std::get_if<NoiseTexture>(&tex)) {
        return {{"type", "noise"}, {"seed", noise->seed}, {"cells", noise->cells}};
    }
    return {{"type", "image"}, {"path", std::get<ImageTexture>(tex).path}};
}

}  // namespace

Scene scene_from_json(const json& doc, const std::filesystem::path& base_dir) {
    try {
        if (doc.value("version", 0) != kSceneSchemaVersion) {
            throw std::invalid_argument("scene document must declare \"version\": 1");
        }
        Scene scene;
        const auto anchor = doc.value("anchor", std::string("eye"));
        if (anchor == "eye") {
            scene.anchor = Scene::Anchor::eye;
        } else if (anchor == "head") {
            scene.anchor = Scene::Anchor::head;
        } else {
            throw std::invalid_argument("anchor must be \"eye\" or \"head\"");
        }
        if (doc.contains("background")) {
            const auto& bg = doc.at("background");
            scene.background.texture = parse_texture(bg, base_dir);
            scene.background.cell_deg = bg.value("cell_deg", 0.5);
        }
        for (const auto& o : doc.value("objects", json::array())) {
            SceneObject obj;
            obj.name = o.value("name", std::string{});
            const auto kind = o.value("kind", std::string("disc"));
            if (kind == "disc") {
                obj.kind = SceneObject::Kind::disc;
            } else if (kind == "quad" || kind == "textured_quad") {
                obj.kind = SceneObject::Kind::quad;
            } else {
                throw std::invalid_argument("unknown object kind '" + kind + "'");
            }
            if (o.contains("depth_d")) {
                obj.depth_d = o.at("depth_d").get<double>();
            } else if (o.contains("depth_m")) {
                obj.depth_d = meters_to_diopters(o.at("depth_m").get<double>());
            } else {
                throw std::invalid_argument("object needs depth_d or depth_m");
            }
            obj.angular_size_deg = o.at("angular_size_deg").get<double>();
            if (o.contains("position_deg")) {
                obj.azimuth_deg = o.at("position_deg").at(0).get<double>();
                obj.elevation_deg = o.at("position_deg").at(1).get<double>();
            }
            obj.texture = o.contains("texture") ? parse_texture(o.at("texture"), base_dir) : SolidTexture{};
            scene.objects.push_back(std::move(obj));
        }
        if (doc.contains("fixation_orbit")) {
            const auto& f = doc.at("fixation_orbit");
            FixationOrbit orbit;
            orbit.radius_deg = f.value("radius_deg", orbit.radius_deg);
            orbit.rate_deg_s = f.value("rate_deg_s", orbit.rate_deg_s);
            orbit.clockwise = f.value("clockwise", orbit.clockwise);
            orbit.phase_deg = f.value("phase_deg", orbit.phase_deg);
            scene.fixation_orbit = orbit;
        }
        scene.validate();
        return scene;
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("scene document: ") + e.what());
    }
}

json scene_to_json(const Scene& scene) {
    json doc;
    doc["version"] = kSceneSchemaVersion;
    doc["anchor"] = scene.anchor == Scene::Anchor::eye ? "eye" : "head";
    doc["background"] = texture_to_json(scene.background.texture);
    doc["background"]["cell_deg"] = scene.background.cell_deg;
    doc["objects"] = json::array();
    for (const auto& o : scene.objects) {
        doc["objects"].push_back({{"name", o.name},
                                  {"kind", o.kind == SceneObject::Kind::disc ? "disc" : "quad"},
                                  {"depth_d", o.depth_d},
                                  {"angular_size_deg", o.angular_size_deg},
                                  {"position_deg", {o.azimuth_deg, o.elevation_deg}},
                                  {"texture", texture_to_json(o.texture)}});
    }
    if (scene.fixation_orbit) {
        const auto& f = *scene.fixation_orbit;
        doc["fixation_orbit"] = {{"radius_deg", f.radius_deg},
                                 {"rate_deg_s", f.rate_deg_s},
                                 {"clockwise", f.clockwise},
                                 {"phase_deg", f.phase_deg}};
    }
    return doc;
}

Scene load_scene(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open scene file " + path.string());
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument("scene file " + path.string() + ": " + e.what());
    }
    return scene_from_json(doc, path.parent_path());
}

}  // namespace ocular::retina
