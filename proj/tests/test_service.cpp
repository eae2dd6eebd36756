#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include <boost/asio/connect.hpp>
#include <boost/asio/ip/tcp.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>
#include <nlohmann/json.hpp>

#include "ocular/retina/image_io.hpp"
#include "ocular/retina/render.hpp"
#include "ocular/retina/scene_io.hpp"
#include "ocular/retina/stimulus.hpp"
#include "ocular/service/cli.hpp"
#include "ocular/service/server.hpp"
#include "ocular/service/session.hpp"

using namespace ocular;
using nlohmann::json;

namespace {

std::string decode_base64(const std::string& in) {
    static const std::string alphabet = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
    std::string out;
    unsigned buffer = 0;
    int bits = 0;
    for (char c : in) {
        if (c == '=') break;
        const auto v = alphabet.find(c);
        REQUIRE(v != std::string::npos);
        buffer = (buffer << 6) | static_cast<unsigned>(v);
        bits += 6;
        if (bits >= 8) {
            bits -= 8;
            out.push_back(static_cast<char>((buffer >> bits) & 0xff));
        }
    }
    return out;
}

json msg(const std::string& type, json payload = json::object()) {
    return {{"v", 1}, {"type", type}, {"payload", std::move(payload)}};
}

json frame_request(int id, json extra = json::object()) {
    json r{{"v", 1}, {"type", "request_frame"}, {"id", id}};
    r.update(extra);
    return r;
}

// Expected telemetry for a gaze, straight from gaze_transform.
void check_telemetry(const json& t, const GazeState& gaze, EyeSide side) {
    const double nc = nc_distance_m(default_model());
    const DisplayGeometry geom = retina::stimulus_geometry();
    for (EyeSide s : {EyeSide::left, EyeSide::right}) {
        const auto ep = eye_and_projection(gaze, nc, geom, s);
        const auto& n = t["nodal_points"][std::string(to_string(s))];
        CHECK(std::fabs(n[0].get<double>() - ep.nodal.x) <= 1e-9);
        CHECK(std::fabs(n[1].get<double>() - ep.nodal.y) <= 1e-9);
        CHECK(std::fabs(n[2].get<double>() - ep.nodal.z) <= 1e-9);
        const auto& f = t["frusta"][std::string(to_string(s))];
        CHECK(std::fabs(f["l"].get<double>() - ep.frustum.l) <= 1e-9);
        CHECK(std::fabs(f["t"].get<double>() - ep.frustum.t) <= 1e-9);
        CHECK(std::fabs(f["z_near"].get<double>() - ep.frustum.z_near) <= 1e-9);
    }
    const auto scene = retina::default_scene();
    GazeState centered = gaze;
    centered.fixation = fixation_from_angles(side, gaze.ipd, 0, 0, per_eye_fixation(gaze, side).norm());
    const Vec3 c = rotation_center(side, gaze.ipd);
    for (std::size_t i = 0; i < scene.objects.size(); ++i) {
        const Vec4 p = Vec4::point(c + Vec3{0, 0, -scene.objects[i].depth_m()});
        const Vec2 d = screen_displacement(p, centered, gaze, nc, geom, side);
        const auto& got = t["displacements"][i]["ndc"];
        CHECK(std::fabs(got[0].get<double>() - d.x) <= 1e-9);
        CHECK(std::fabs(got[1].get<double>() - d.y) <= 1e-9);
    }
}

struct CliRun {
    int code;
    std::string out, err;
};

CliRun run_cli(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = cli::dispatch(args, out, err);
    return {code, out.str(), err.str()};
}

std::filesystem::path temp_dir() {
    auto dir = std::filesystem::temp_directory_path() / "ocular_service_test";
    std::filesystem::create_directories(dir);
    return dir;
}

}  // namespace

TEST_CASE("first frame shows the default scene") {
    service::Session session;
    const json reply = session.handle(frame_request(7));
    REQUIRE(reply["type"] == "frame");
    CHECK(reply["v"] == 1);
    CHECK(reply["id"] == 7);
    CHECK(reply["frame"] == 1);
    CHECK(reply["width"] == 512);

    const auto state = service::default_session_state();
    const auto direct = retina::render(retina::default_scene(), state.gaze, default_model(),
                                       retina::stimulus_geometry(), {512, 512}, EyeSide::right);
    CHECK(decode_base64(reply["data"].get<std::string>()) == retina::encode_ppm(direct.image.pixels));
    check_telemetry(reply["telemetry"], state.gaze, EyeSide::right);
}

TEST_CASE("every frame request gets one frame with its id") {
    service::Session session;
    std::uint64_t last = 0;
    for (int id : {3, 1, 99, 42}) {
        const json reply = session.handle(frame_request(id, {{"resolution", {64, 48}}}));
        REQUIRE(reply["type"] == "frame");
        CHECK(reply["id"] == id);
        CHECK(reply["frame"].get<std::uint64_t>() > last);
        last = reply["frame"].get<std::uint64_t>();
        const auto img = retina::decode_ppm(decode_base64(reply["data"].get<std::string>()));
        CHECK(img.width == 64);
        CHECK(img.height == 48);
    }
    CHECK(session.state().frame_counter == 4);
}

TEST_CASE("conventional frames ignore gaze") {
    service::Session session;
    CHECK(session.handle(msg("set_mode", {{"mode", "conventional"}}))["type"] == "telemetry");
    session.handle(msg("set_gaze", {{"azimuth_deg", -12}, {"elevation_deg", 4}, {"depth_d", 2}}));
    const json a = session.handle(frame_request(1, {{"resolution", {200, 200}}}));
    session.handle(msg("set_gaze", {{"fixation", {0.3, -0.2, -0.8}}}));
    const json b = session.handle(frame_request(2, {{"resolution", {200, 200}}}));
    CHECK(a["data"] == b["data"]);
    for (const auto& d : b["telemetry"]["displacements"]) {
        CHECK(d["ndc"][0] == 0.0);
        CHECK(d["ndc"][1] == 0.0);
    }
}

TEST_CASE("reversed mode negates telemetry displacement") {
    service::Session session;
    const json gaze = {{"azimuth_deg", 14}, {"elevation_deg", -6}, {"distance_m", 1.0}};
    session.handle(msg("set_gaze", gaze));
    const json fwd = session.handle(msg("set_mode", {{"mode", "ocular"}}))["telemetry"]["displacements"];
    const json rev = session.handle(msg("set_mode", {{"mode", "reversed"}}))["telemetry"]["displacements"];
    for (std::size_t i = 0; i < fwd.size(); ++i) {
        CHECK(std::fabs(rev[i]["ndc"][0].get<double>() + fwd[i]["ndc"][0].get<double>()) <= 1e-6);
        CHECK(std::fabs(rev[i]["ndc"][1].get<double>() + fwd[i]["ndc"][1].get<double>()) <= 1e-6);
        CHECK(std::fabs(fwd[i]["ndc"][0].get<double>()) > 0.0);
    }
}

TEST_CASE("centered cursor gives zero displacement") {
    service::Session session;
    const json t = session.handle(msg("set_gaze", {{"azimuth_deg", 0}, {"elevation_deg", 0}, {"depth_d", 1.5}}));
    for (const auto& d : t["telemetry"]["displacements"]) {
        CHECK(d["ndc"][0] == 0.0);
        CHECK(d["ndc"][1] == 0.0);
    }
}

TEST_CASE("state updates are reflected in telemetry") {
    service::Session session;
    json t = session.handle(msg("set_eye_model", {{"name", "emsley"}}))["telemetry"];
    CHECK(t["state"]["eye_model"] == "emsley");
    session.handle(msg("set_eye_model", {{"name", "gullstrand-emsley"}}));
    t = session.handle(msg("set_ipd", {{"ipd", 0.07}}))["telemetry"];
    CHECK(t["state"]["ipd"] == 0.07);
    t = session.handle(msg("set_mode", {{"mode", "amplified"}, {"gain", 3.0}}))["telemetry"];
    CHECK(t["state"]["gain"] == 3.0);
    session.handle(msg("set_mode", {{"mode", "ocular"}}));
    session.handle(msg("set_gaze", {{"fixation", {0.2, 0.1, -1.2}}}));
    GazeState g;
    g.fixation = {0.2, 0.1, -1.2};
    g.ipd = 0.07;
    check_telemetry(session.telemetry(), g, EyeSide::right);

    json scene = retina::scene_to_json(retina::make_detection_stimulus(3.0, 1.0, 5));
    t = session.handle(msg("set_scene", {{"scene", scene}}))["telemetry"];
    CHECK(t["displacements"].size() == 2);
}

TEST_CASE("malformed messages produce errors and the session continues") {
    service::Session session;
    CHECK(json::parse(session.handle_text("{not json"))["type"] == "error");
    CHECK(session.handle({{"type", "set_mode"}})["type"] == "error");
    CHECK(session.handle({{"v", 2}, {"type", "set_mode"}})["type"] == "error");
    CHECK(session.handle(msg("teleport"))["type"] == "error");
    CHECK(session.handle(msg("set_mode", {{"mode", "sideways"}}))["type"] == "error");
    CHECK(session.handle(msg("set_gaze", {{"fixation", {0, 0}}}))["type"] == "error");
    CHECK(session.handle(msg("set_gaze", {{"fixation", {0, 0, 1}}}))["type"] == "error");
    CHECK(session.handle(msg("set_ipd", {{"ipd", "wide"}}))["type"] == "error");
    CHECK(session.handle(msg("set_scene", {{"scene", {{"version", 9}}}}))["type"] == "error");
    CHECK(session.handle({{"v", 1}, {"type", "request_frame"}})["type"] == "error");

    const json failed = session.handle(frame_request(5, {{"resolution", {2048, 2048}}}));
    CHECK(failed["type"] == "error");
    CHECK(failed["id"] == 5);
    CHECK(session.state().frame_counter == 0);

    const json ok = session.handle(frame_request(6, {{"resolution", {32, 32}}}));
    CHECK(ok["type"] == "frame");
    CHECK(ok["frame"] == 1);
}

TEST_CASE("identical message sequences give identical replies") {
    const std::vector<json> script{msg("set_mode", {{"mode", "ocular"}, {"gain", 2}}),
                                   msg("set_gaze", {{"azimuth_deg", 9}, {"elevation_deg", 3}}),
                                   frame_request(1, {{"resolution", {80, 80}}, {"foveate", true}}),
                                   msg("set_ipd", {{"ipd", 0.06}}),
                                   frame_request(2, {{"resolution", {80, 80}}})};
    service::Session a, b;
    for (const auto& m : script) CHECK(a.handle(m).dump() == b.handle(m).dump());
}

TEST_CASE("websocket clients replay a drag trace") {
    service::Server server(0, service::default_session_state());
    std::thread runner([&] { server.run(); });

    namespace beast = boost::beast;
    namespace websocket = beast::websocket;
    using tcp = boost::asio::ip::tcp;

    auto client = [&](int client_id) {
        boost::asio::io_context ioc;
        tcp::resolver resolver(ioc);
        websocket::stream<tcp::socket> ws(ioc);
        boost::asio::connect(ws.next_layer(), resolver.resolve("127.0.0.1", std::to_string(server.port())));
        ws.handshake("127.0.0.1", "/");
        ws.read_message_max(64 << 20);
        auto call = [&](const json& request) {
            ws.write(boost::asio::buffer(request.dump()));
            beast::flat_buffer buffer;
            ws.read(buffer);
            return json::parse(beast::buffers_to_string(buffer.data()));
        };

        const GazeState base = service::default_session_state().gaze;
        std::vector<std::string> conventional_frames;
        int id = client_id * 1000;
        for (const char* mode : {"ocular", "conventional"}) {
            call(msg("set_mode", {{"mode", mode}}));
            for (int step = 0; step <= 8; ++step) {
                const double az = -16.0 + 4.0 * step, el = 0.5 * step;
                const json t = call(msg("set_gaze", {{"azimuth_deg", az}, {"elevation_deg", el}, {"depth_d", 1.0}}));
                REQUIRE(t["type"] == "telemetry");
                const json f = call(frame_request(++id, {{"payload", {{"resolution", {96, 96}}}}}));
                REQUIRE(f["type"] == "frame");
                CHECK(f["id"] == id);
                GazeState g = base;
                g.mode = parse_render_mode(mode);
                g.fixation = fixation_from_angles(EyeSide::right, g.ipd, az, el, 1.0);
                check_telemetry(f["telemetry"], g, EyeSide::right);
                if (std::string(mode) == "conventional") conventional_frames.push_back(f["data"]);
            }
        }
        for (const auto& frame : conventional_frames) CHECK(frame == conventional_frames.front());
        CHECK(call(json("garbage"))["type"] == "error");
        ws.close(websocket::close_code::normal);
    };

    std::thread second(client, 2);
    client(1);
    second.join();
    server.stop();
    runner.join();
}

TEST_CASE("cli usage errors") {
    CliRun r = run_cli({"frobnicate"});
    CHECK(r.code == 2);
    CHECK(r.err.find("unknown command") != std::string::npos);
    CHECK(r.err.find("Usage") != std::string::npos);
    CHECK(run_cli({}).code == 2);
    CHECK(run_cli({"matrices", "--bogus"}).code == 2);
    CHECK(run_cli({"matrices", "--fixation", "0,0"}).code == 2);
    CHECK(run_cli({"matrices", "--ipd", "abc"}).code == 2);
    CHECK(run_cli({"matrices", "--mode", "sideways"}).code == 2);
    CHECK(run_cli({"render"}).code == 2);
    CHECK(run_cli({"render", "--out", "x.ppm", "--res", "800"}).code == 2);
    CHECK(run_cli({"simulate-experiment", "--experiment", "detection", "--observer", "{bad"}).code == 2);
    CHECK(run_cli({"fit", "--in", "/nonexistent/results.csv"}).code == 1);
    r = run_cli({"--help"});
    CHECK(r.code == 0);
    CHECK(r.out.find("matrices") != std::string::npos);
}

TEST_CASE("cli matrices") {
    CliRun r = run_cli({"matrices", "--fixation", "0,0,-2", "--ipd", "0.064", "--mode", "conventional"});
    REQUIRE(r.code == 0);
    const json doc = json::parse(r.out);
    for (const char* side : {"left", "right"}) {
        CHECK(doc[side]["nodal_point"] == json::array({0.0, 0.0, 0.0}));
        CHECK(doc[side]["eye_matrix"].size() == 16);
        CHECK(doc[side]["projection_matrix"].size() == 16);
    }
    CHECK(doc["left"]["eye_matrix"][3] == 0.032);
    CHECK(doc["right"]["eye_matrix"][3] == -0.032);

    r = run_cli({"matrices", "--fixation", "0.3,0.1,-1", "--mode", "ocular", "--fov", "40,40,35,35", "--near", "0.1",
                 "--far", "50", "--image-distance", "2"});
    REQUIRE(r.code == 0);
    const json ocular_doc = json::parse(r.out);
    GazeState g;
    g.fixation = {0.3, 0.1, -1.0};
    DisplayGeometry geom{40, 40, 35, 35, 2.0, 0.1, 50.0};
    const auto ep = eye_and_projection(g, default_model(), geom, EyeSide::left);
    for (int i = 0; i < 16; ++i) {
        CHECK(ocular_doc["left"]["projection_matrix"][i].get<double>() == ep.projection(i / 4, i % 4));
        CHECK(ocular_doc["left"]["eye_matrix"][i].get<double>() == ep.eye(i / 4, i % 4));
    }
}

TEST_CASE("cli analysis, rendering and experiment round trip") {
    CliRun r = run_cli({"analyze", "curves", "--delta-d", "3", "--max-ecc", "40"});
    REQUIRE(r.code == 0);
    std::istringstream csv(r.out);
    std::string line, last;
    while (std::getline(csv, line)) last = line;
    CHECK(last.substr(last.rfind(',', last.rfind(',') - 1) + 1, 8) == "0.896666");

    r = run_cli({"analyze", "crossover", "--delta-d", "3"});
    REQUIRE(r.code == 0);
    const json cross = json::parse(r.out);
    CHECK(cross["display_mar_crossover_deg"].get<double>() == doctest::Approx(2.7121212).epsilon(1e-6));

    const auto dir = temp_dir();
    const auto centered = (dir / "centered.ppm").string();
    REQUIRE(run_cli({"render", "--gaze-deg", "0,0,1", "--mode", "ocular", "--res", "400x400", "--out", centered})
                .code == 0);
    CHECK(retina::count_pixels(retina::read_ppm(centered), {255, 0, 0}) == 0);
    const auto eccentric = (dir / "eccentric.ppm").string();
    REQUIRE(run_cli({"render", "--gaze-deg", "15,0,1", "--res", "800x800", "--foveate", "--out", eccentric}).code ==
            0);
    CHECK(retina::read_ppm(eccentric).width == 800);

    const auto scene = dir / "scene.json";
    std::ofstream(scene) << retina::scene_to_json(retina::make_detection_stimulus(2.0, 1.0, 4)).dump();
    const auto head = (dir / "head.ppm").string();
    const auto before = retina::read_ppm(centered);
    REQUIRE(run_cli({"render", "--scene", scene.string(), "--gaze", "0,0,-1", "--res", "400x400", "--out", head})
                .code == 0);
    CHECK(retina::read_ppm(head).data != before.data);

    const auto results = (dir / "results.csv").string();
    const auto fits = (dir / "fits.json").string();
    REQUIRE(run_cli({"simulate-experiment", "--experiment", "detection", "--observer", R"({"threshold":0.36})",
                     "--seed", "7", "--replications", "3", "--out", results})
                .code == 0);
    REQUIRE(run_cli({"fit", "--in", results, "--out", fits}).code == 0);
    std::ifstream in(fits);
    const json doc = json::parse(in);
    CHECK(doc["replications"].size() == 3);
    CHECK(doc["experiment"] == "detection");
    std::filesystem::remove_all(dir);
}
