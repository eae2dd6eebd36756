#include "ocular/service/session.hpp"

#include <cmath>
#include <stdexcept>

#include <boost/beast/core/detail/base64.hpp>

#include "ocular/retina/image_io.hpp"
#include "ocular/retina/scene_io.hpp"
#include "ocular/retina/stimulus.hpp"

namespace ocular::service {

using nlohmann::json;

namespace {

json vec_json(Vec3 v) { return json::array({v.x, v.y, v.z}); }

json frustum_json(const Frustum& f) {
    return {{"l", f.l}, {"r", f.r}, {"b", f.b}, {"t", f.t}, {"z_near", f.z_near}, {"z_far", f.z_far}};
}

Vec4 object_anchor_point(const retina::SceneObject& obj, Vec3 origin) {
    const double tx = std::tan(deg_to_rad(obj.azimuth_deg));
    const double ty = std::tan(deg_to_rad(obj.elevation_deg));
    if (obj.at_infinity()) {
        return Vec4::direction({tx, ty, -1.0});
    }
    const double depth = obj.depth_m();
    return Vec4::point(origin + depth * Vec3{tx, ty, -1.0});
}

std::string base64(const std::string& bytes) {
    namespace b64 = boost::beast::detail::base64;
    std::string out(b64::encoded_size(bytes.size()), '\0');
    out.resize(b64::encode(out.data(), bytes.data(), bytes.size()));
    return out;
}

json error_reply(const json& request, const std::string& message) {
    json reply{{"v", kProtocolVersion}, {"type", "error"}, {"message", message}};
    if (request.is_object() && request.contains("id")) reply["id"] = request["id"];
    return reply;
}

}  // namespace

SessionState default_session_state() {
    SessionState s;
    s.scene = retina::default_scene();
    s.eye_model = default_model();
    s.display = retina::stimulus_geometry();
    s.eye = EyeSide::right;
    s.gaze.ipd = 0.064;
    s.gaze.mode = RenderMode::ocular();
    s.gaze.fixation = fixation_from_angles(s.eye, s.gaze.ipd, 0.0, 0.0, 1.0);
    return s;
}

Session::Session() : Session(default_session_state()) {}

Session::Session(SessionState initial) : state_(std::move(initial)) {}

GazeState centered_gaze(const GazeState& gaze, EyeSide side) {
    GazeState centered = gaze;
    const double distance = per_eye_fixation(gaze, side).norm();
    centered.fixation = fixation_from_angles(side, gaze.ipd, 0.0, 0.0, distance);
    return centered;
}

json Session::telemetry() const {
    const double nc = nc_distance_m(state_.eye_model);
    json t;
    json nodal, frusta;
    for (EyeSide side : {EyeSide::left, EyeSide::right}) {
        const auto ep = eye_and_projection(state_.gaze, nc, state_.display, side);
        nodal[std::string(to_string(side))] = vec_json(ep.nodal);
        frusta[std::string(to_string(side))] = frustum_json(ep.frustum);
    }
    t["eye"] = to_string(state_.eye);
    t["nodal_points"] = nodal;
    t["frusta"] = frusta;

    const auto current = eye_and_projection(state_.gaze, nc, state_.display, state_.eye);
    const auto baseline = eye_and_projection(centered_gaze(state_.gaze, state_.eye), nc, state_.display, state_.eye);
    const Vec3 origin = retina::scene_origin(state_.scene, state_.eye, state_.gaze.ipd);
    json displacements = json::array();
    for (std::size_t i = 0; i < state_.scene.objects.size(); ++i) {
        const auto& obj = state_.scene.objects[i];
        json entry{{"index", i}, {"name", obj.name}};
        try {
            const Vec4 p = object_anchor_point(obj, origin);
            const Vec2 d = project_to_ndc(current, p) - project_to_ndc(baseline, p);
            entry["ndc"] = json::array({d.x, d.y});
        } catch (const std::domain_error&) {
            entry["ndc"] = nullptr;  // behind the near plane
        }
        displacements.push_back(entry);
    }
    t["displacements"] = displacements;
    t["state"] = {{"fixation", vec_json(state_.gaze.fixation)},
                  {"ipd", state_.gaze.ipd},
                  {"mode", to_string(state_.gaze.mode)},
                  {"gain", state_.gaze.mode.gain},
                  {"eye_model", state_.eye_model.name},
                  {"eye_state", to_string(state_.eye_model.state)}};
    return t;
}

json Session::set_gaze(const json& payload) {
    GazeState next = state_.gaze;
    if (payload.contains("fixation")) {
        const auto& f = payload.at("fixation");
        if (!f.is_array() || f.size() != 3) throw std::invalid_argument("fixation must be [x, y, z]");
        next.fixation = {f[0].get<double>(), f[1].get<double>(), f[2].get<double>()};
    } else {
        double distance;
        if (payload.contains("distance_m")) {
            distance = payload.at("distance_m").get<double>();
        } else if (payload.contains("depth_d")) {
            const double d = payload.at("depth_d").get<double>();
            if (!(d > 0.0)) throw std::invalid_argument("depth_d must be positive");
            distance = 1.0 / d;
        } else {
            distance = per_eye_fixation(state_.gaze, state_.eye).norm();
        }
        next.fixation = fixation_from_angles(state_.eye, next.ipd, payload.value("azimuth_deg", 0.0),
                                             payload.value("elevation_deg", 0.0), distance);
    }
    next.validate();
    per_eye_fixation(next, EyeSide::left);
    per_eye_fixation(next, EyeSide::right);
    state_.gaze = next;
    return {};
}

json Session::render_frame(const json& request) {
    if (!request.contains("id")) throw std::invalid_argument("request_frame needs an id");
    // Frame options normally live in the payload; top-level keys are accepted too.
    const json& opts = request.contains("payload") ? request.at("payload") : request;
    retina::Resolution res = state_.resolution;
    if (opts.contains("resolution")) {
        const auto& r = opts.at("resolution");
        res = {r.at(0).get<int>(), r.at(1).get<int>()};
    }
    if (res.width <= 0 || res.height <= 0 || res.width > kMaxFrameSide || res.height > kMaxFrameSide) {
        throw std::invalid_argument("resolution must lie within 1..1024 per side");
    }
    auto result = retina::render(state_.scene, state_.gaze, state_.eye_model, state_.display, res, state_.eye);
    if (opts.value("foveate", false)) {
        result.image = retina::foveate(result.image, AcuityModel{});
    }
    state_.resolution = res;
    ++state_.frame_counter;
    return {{"v", kProtocolVersion},
            {"type", "frame"},
            {"id", request.at("id")},
            {"frame", state_.frame_counter},
            {"width", res.width},
            {"height", res.height},
            {"format", "ppm"},
            {"encoding", "base64"},
            {"data", base64(retina::encode_ppm(result.image.pixels))},
            {"telemetry", telemetry()}};
}

json Session::handle(const json& request) {
    try {
        if (!request.is_object()) throw std::invalid_argument("message must be a JSON object");
        if (request.value("v", 0) != kProtocolVersion) throw std::invalid_argument("unsupported protocol version");
        const auto type = request.value("type", std::string{});
        const json payload = request.value("payload", json::object());

        if (type == "request_frame") {
            return render_frame(request);
        }
        if (type == "set_gaze") {
            set_gaze(payload);
        } else if (type == "set_mode") {
            state_.gaze.mode = parse_render_mode(payload.at("mode").get<std::string>(), payload.value("gain", 1.0));
        } else if (type == "set_eye_model") {
            state_.eye_model = find_model(payload.at("name").get<std::string>(),
                                          parse_accommodation(payload.value("state", std::string("relaxed"))));
        } else if (type == "set_ipd") {
            GazeState next = state_.gaze;
            // Keep the eye-relative fixation direction when the ipd changes.
            const Vec3 relative = per_eye_fixation(next, state_.eye);
            next.ipd = payload.at("ipd").get<double>();
            next.fixation = rotation_center(state_.eye, next.ipd) + relative;
            next.validate();
            state_.gaze = next;
        } else if (type == "set_scene") {
            state_.scene = payload.contains("scene") ? retina::scene_from_json(payload.at("scene"))
                                                     : retina::default_scene();
        } else {
            throw std::invalid_argument("unknown message type '" + type + "'");
        }
        json reply{{"v", kProtocolVersion}, {"type", "telemetry"}, {"telemetry", telemetry()}};
        if (request.contains("id")) reply["id"] = request["id"];
        return reply;
    } catch (const json::exception& e) {
        return error_reply(request, std::string("malformed payload: ") + e.what());
    } catch (const std::exception& e) {
        return error_reply(request, e.what());
    }
}

std::string Session::handle_text(const std::string& text) {
    json request;
    try {
        request = json::parse(text);
    } catch (const json::parse_error& e) {
        return error_reply(json(), std::string("invalid JSON: ") + e.what()).dump();
    }
    return handle(request).dump();
}

}  // namespace ocular::service
