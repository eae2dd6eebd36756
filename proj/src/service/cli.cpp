#include "ocular/service/cli.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "ocular/eye_model.hpp"
#include "ocular/gaze_transform.hpp"
#include "ocular/perception_model.hpp"
#include "ocular/psycho/fit.hpp"
#include "ocular/psycho/observer.hpp"
#include "ocular/psycho/results_io.hpp"
#include "ocular/retina/image_io.hpp"
#include "ocular/retina/render.hpp"
#include "ocular/retina/scene_io.hpp"
#include "ocular/retina/stimulus.hpp"
#include "ocular/service/server.hpp"

namespace ocular::cli {

using nlohmann::json;

namespace {

/// Bad flag values; reported like parse errors.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

double parse_number(std::string_view text) {
    if (text == "inf" || text == "infinity") return std::numeric_limits<double>::infinity();
    double value = 0.0;
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc{} || ptr != end) throw UsageError("not a number: '" + std::string(text) + "'");
    return value;
}

std::vector<double> parse_list(const std::string& text, std::size_t expected, const std::string& flag) {
    std::vector<double> values;
    std::string_view rest = text;
    while (true) {
        const auto comma = rest.find(',');
        values.push_back(parse_number(rest.substr(0, comma)));
        if (comma == std::string_view::npos) break;
        rest.remove_prefix(comma + 1);
    }
    if (expected != 0 && values.size() != expected) {
        throw UsageError(flag + " expects " + std::to_string(expected) + " comma-separated values");
    }
    return values;
}

retina::Resolution parse_resolution(const std::string& text) {
    const auto x = text.find('x');
    if (x == std::string::npos) throw UsageError("--res expects WIDTHxHEIGHT");
    const double w = parse_number(std::string_view(text).substr(0, x));
    const double h = parse_number(std::string_view(text).substr(x + 1));
    if (w < 1 || h < 1 || w != std::floor(w) || h != std::floor(h)) throw UsageError("--res must be positive integers");
    return {static_cast<int>(w), static_cast<int>(h)};
}

struct GeometryFlags {
    std::string fov = "20,20,20,20";
    double near = 0.05;
    double far = 100.0;
    std::string image_distance = "inf";

    void add(CLI::App* app) {
        app->add_option("--fov", fov, "Half-angles left,right,top,bottom in degrees")->capture_default_str();
        app->add_option("--near", near, "Near clip distance, m")->capture_default_str();
        app->add_option("--far", far, "Far clip distance, m")->capture_default_str();
        app->add_option("--image-distance", image_distance, "Virtual image distance, m or inf")
            ->capture_default_str();
    }

    DisplayGeometry build() const {
        const auto f = parse_list(fov, 4, "--fov");
        DisplayGeometry g;
        g.fov_left_deg = f[0];
        g.fov_right_deg = f[1];
        g.fov_top_deg = f[2];
        g.fov_bottom_deg = f[3];
        g.z_near = near;
        g.z_far = far;
        g.image_distance = parse_number(image_distance);
        g.validate();
        return g;
    }
};

struct EyeFlags {
    std::string model = "gullstrand-emsley";
    std::string state = "relaxed";

    void add(CLI::App* app) {
        app->add_option("--eye-model", model, "Schematic eye model")->capture_default_str();
        app->add_option("--eye-state", state, "relaxed or accommodated")->capture_default_str();
    }

    SchematicEyeModel build() const { return find_model(model, parse_accommodation(state)); }
};

json vec_json(Vec3 v) { return json::array({v.x, v.y, v.z}); }

json mat_json(const Mat4& m) {
    json a = json::array();
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) a.push_back(m(r, c));
    return a;
}

/// Writes to `path`, or to `out` when the path is empty or "-".
void emit(const std::string& path, const std::string& content, std::ostream& out) {
    if (path.empty() || path == "-") {
        out << content;
        return;
    }
    std::ofstream file(path, std::ios::binary);
    if (!file) throw std::runtime_error("cannot open '" + path + "' for writing");
    file << content;
    if (!file) throw std::runtime_error("failed writing '" + path + "'");
}

std::string read_file(const std::string& path) {
    std::ifstream file(path, std::ios::binary);
    if (!file) throw std::runtime_error("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << file.rdbuf();
    return ss.str();
}

}  // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Gaze-contingent ocular parallax engine", "ocular"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all", "Show help for all subcommands");

    // matrices
    auto* matrices = app.add_subcommand("matrices", "Eye and projection matrices for both eyes as JSON");
    std::string m_fixation = "0,0,-1";
    double m_ipd = 0.064;
    std::string m_mode = "ocular";
    double m_gain = 1.0;
    GeometryFlags m_geom;
    EyeFlags m_eye;
    matrices->add_option("--fixation", m_fixation, "Head-space fixation point x,y,z in m")->capture_default_str();
    matrices->add_option("--ipd", m_ipd, "Interpupillary distance, m")->capture_default_str();
    matrices->add_option("--mode", m_mode, "conventional, ocular, amplified or reversed")->capture_default_str();
    matrices->add_option("--gain", m_gain, "Nodal offset gain for ocular/amplified")->capture_default_str();
    m_geom.add(matrices);
    m_eye.add(matrices);

    // analyze
    auto* analyze = app.add_subcommand("analyze", "Parallax and acuity analysis");
    analyze->require_subcommand(1);
    auto* curves = analyze->add_subcommand("curves", "Parallax, MAR and display MAR against eccentricity as CSV");
    auto* crossover = analyze->add_subcommand("crossover", "Detectability and display crossovers as JSON");
    std::string a_delta = "1,2,3";
    double a_max_ecc = 40.0;
    double a_step = 0.5;
    double a_pitch = DisplaySpec{}.pixel_pitch_arcmin;
    std::string a_far = std::to_string(kCurveFarDistance);
    std::string a_out;
    EyeFlags a_eye;
    for (auto* sub : {curves, crossover}) {
        sub->add_option("--delta-d", a_delta, "Relative depths in diopters")->capture_default_str();
        sub->add_option("--pixel-pitch", a_pitch, "Display pixel pitch, arcmin")->capture_default_str();
        sub->add_option("--far-distance", a_far, "Far reference distance, m or inf")->capture_default_str();
        sub->add_option("--out", a_out, "Output path (stdout when omitted)");
        a_eye.add(sub);
    }
    curves->add_option("--max-ecc", a_max_ecc, "Largest eccentricity, degrees")->capture_default_str();
    curves->add_option("--step", a_step, "Eccentricity step, degrees")->capture_default_str();

    // render
    auto* render = app.add_subcommand("render", "Render the retinal image of a scene to PPM");
    std::string r_scene;
    std::string r_gaze;
    std::string r_gaze_deg;
    std::string r_mode = "ocular";
    double r_gain = 1.0;
    std::string r_res = "800x800";
    bool r_foveate = false;
    std::string r_out;
    std::string r_eye = "right";
    double r_ipd = 0.064;
    GeometryFlags r_geom;
    EyeFlags r_eye_model;
    render->add_option("--scene", r_scene, "Scene document (built-in two-disc stimulus when omitted)");
    auto* gaze_opt = render->add_option("--gaze", r_gaze, "Head-space fixation point x,y,z in m");
    render->add_option("--gaze-deg", r_gaze_deg, "Eye-relative fixation azimuth,elevation,distance_m")
        ->excludes(gaze_opt);
    render->add_option("--mode", r_mode, "conventional, ocular, amplified or reversed")->capture_default_str();
    render->add_option("--gain", r_gain, "Nodal offset gain")->capture_default_str();
    render->add_option("--res", r_res, "WIDTHxHEIGHT")->capture_default_str();
    render->add_flag("--foveate", r_foveate, "Apply the eccentricity-dependent acuity blur");
    render->add_option("--out", r_out, "Output PPM path")->required();
    render->add_option("--eye", r_eye, "left or right")->capture_default_str();
    render->add_option("--ipd", r_ipd, "Interpupillary distance, m")->capture_default_str();
    r_geom.add(render);
    r_eye_model.add(render);

    // simulate-experiment
    auto* simulate = app.add_subcommand("simulate-experiment", "Simulate forced-choice sessions to CSV");
    std::string s_experiment;
    std::string s_observer = "{}";
    std::uint64_t s_seed = 1;
    int s_replications = 1;
    int s_tpc = psycho::kTrialsPerCondition;
    std::string s_out;
    simulate->add_option("--experiment", s_experiment, "detection or discrimination")->required();
    simulate->add_option("--observer", s_observer, "Observer parameters as JSON")->capture_default_str();
    simulate->add_option("--seed", s_seed, "Base seed")->capture_default_str();
    simulate->add_option("--replications", s_replications, "Independent sessions")->capture_default_str();
    simulate->add_option("--trials-per-condition", s_tpc, "Trials per condition")->capture_default_str();
    simulate->add_option("--out", s_out, "Output CSV (stdout when omitted)");

    // fit
    auto* fit = app.add_subcommand("fit", "Fit psychometric functions to a results CSV");
    std::string f_in;
    std::string f_out;
    fit->add_option("--in", f_in, "Results CSV")->required();
    fit->add_option("--out", f_out, "Output JSON (stdout when omitted)");

    // serve
    auto* serve = app.add_subcommand("serve", "WebSocket session server for the viewer");
    int v_port = service::kDefaultPort;
    std::string v_scene;
    std::string v_eye = "right";
    serve->add_option("--port", v_port, "TCP port")->capture_default_str()->check(CLI::Range(0, 65535));
    serve->add_option("--scene", v_scene, "Initial scene document");
    serve->add_option("--eye", v_eye, "Rendered eye")->capture_default_str();

    if (!args.empty() && !args.front().starts_with('-') && !app.get_subcommand_no_throw(args.front())) {
        err << "ocular: unknown command '" << args.front() << "'\n\n" << app.help();
        return 2;
    }

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "ocular: " << e.what() << "\n\n" << app.help();
        return 2;
    }

    try {
        if (*matrices) {
            GazeState gaze;
            const auto f = parse_list(m_fixation, 3, "--fixation");
            gaze.fixation = {f[0], f[1], f[2]};
            gaze.ipd = m_ipd;
            gaze.mode = parse_render_mode(m_mode, m_gain);
            gaze.validate();
            const auto model = m_eye.build();
            const auto geom = m_geom.build();
            json doc{{"mode", to_string(gaze.mode)},
                     {"eye_model", model.name},
                     {"eye_state", std::string(to_string(model.state))},
                     {"nc_m", nc_distance_m(model)}};
            for (EyeSide side : {EyeSide::left, EyeSide::right}) {
                const auto ep = eye_and_projection(gaze, model, geom, side);
                doc[std::string(to_string(side))] = {
                    {"eye_matrix", mat_json(ep.eye)},
                    {"projection_matrix", mat_json(ep.projection)},
                    {"nodal_point", vec_json(ep.nodal)},
                    {"frustum",
                     {{"l", ep.frustum.l},
                      {"r", ep.frustum.r},
                      {"b", ep.frustum.b},
                      {"t", ep.frustum.t},
                      {"z_near", ep.frustum.z_near},
                      {"z_far", ep.frustum.z_far}}}};
            }
            out << doc.dump(2) << '\n';
            return 0;
        }
        if (*curves || *crossover) {
            const auto delta = parse_list(a_delta, 0, "--delta-d");
            const double nc = nc_distance_m(a_eye.build());
            const double d_far = parse_number(a_far);
            DisplaySpec display;
            display.pixel_pitch_arcmin = a_pitch;
            const AcuityModel acuity;
            if (*curves) {
                emit(a_out, tradeoff_table(acuity, display, delta, a_max_ecc, a_step, nc, d_far).to_csv(), out);
                return 0;
            }
            json doc{{"nc_m", nc}, {"far_distance_m", std::isinf(d_far) ? json("inf") : json(d_far)}};
            try {
                doc["display_mar_crossover_deg"] = display_mar_crossover(acuity, display);
            } catch (const std::domain_error&) {
                doc["display_mar_crossover_deg"] = nullptr;
            }
            json rows = json::array();
            for (double dd : delta) {
                const auto e = detectability_crossover(acuity, dd, nc, d_far);
                rows.push_back({{"delta_d", dd}, {"crossover_deg", e ? json(*e) : json(nullptr)}});
            }
            doc["detectability"] = rows;
            emit(a_out, doc.dump(2) + "\n", out);
            return 0;
        }
        if (*render) {
            const auto scene = r_scene.empty() ? retina::default_scene() : retina::load_scene(r_scene);
            const auto side = parse_eye_side(r_eye);
            GazeState gaze;
            gaze.ipd = r_ipd;
            gaze.mode = parse_render_mode(r_mode, r_gain);
            if (!r_gaze.empty()) {
                const auto f = parse_list(r_gaze, 3, "--gaze");
                gaze.fixation = {f[0], f[1], f[2]};
            } else {
                const auto g = r_gaze_deg.empty() ? std::vector<double>{0.0, 0.0, 1.0}
                                                  : parse_list(r_gaze_deg, 3, "--gaze-deg");
                gaze.fixation = fixation_from_angles(side, r_ipd, g[0], g[1], g[2]);
            }
            gaze.validate();
            const auto res = parse_resolution(r_res);
            auto result = retina::render(scene, gaze, r_eye_model.build(), r_geom.build(), res, side);
            if (r_foveate) result.image = retina::foveate(result.image, AcuityModel{});
            retina::write_ppm(r_out, result.image.pixels);
            return 0;
        }
        if (*simulate) {
            if (s_replications < 1) throw UsageError("--replications must be at least 1");
            if (s_tpc < 1) throw UsageError("--trials-per-condition must be at least 1");
            json observer_doc;
            try {
                observer_doc = json::parse(s_observer);
            } catch (const json::parse_error& e) {
                throw UsageError(std::string("--observer is not valid JSON: ") + e.what());
            }
            const auto observer = psycho::observer_from_json(observer_doc);
            const auto results = psycho::simulate_experiment(psycho::parse_experiment(s_experiment), observer,
                                                             s_seed, s_replications, s_tpc);
            std::ostringstream csv;
            psycho::write_results_csv(csv, results);
            emit(s_out, csv.str(), out);
            return 0;
        }
        if (*fit) {
            std::istringstream in(read_file(f_in));
            const auto results = psycho::read_results_csv(in);
            const auto analyses = psycho::analyze(results);
            emit(f_out, psycho::analyses_to_json(analyses).dump(2) + "\n", out);
            return 0;
        }
        if (*serve) {
            auto state = service::default_session_state();
            if (!v_scene.empty()) state.scene = retina::load_scene(v_scene);
            state.eye = parse_eye_side(v_eye);
            state.gaze.fixation = fixation_from_angles(state.eye, state.gaze.ipd, 0.0, 0.0, 1.0);
            service::Server server(static_cast<std::uint16_t>(v_port), std::move(state));
            out << "listening on ws://localhost:" << server.port() << "/" << std::endl;
            server.run(true);
            return 0;
        }
    } catch (const UsageError& e) {
        err << "ocular: " << e.what() << '\n';
        return 2;
    } catch (const std::invalid_argument& e) {
        err << "ocular: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        err << "ocular: " << e.what() << '\n';
        return 1;
    }
    return 2;
}

int dispatch(int argc, const char* const* argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return dispatch(args, std::cout, std::cerr);
}

}  // namespace ocular::cli
