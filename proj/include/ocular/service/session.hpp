#pragma once

#include <cstdint>
#include <string>

#include <nlohmann/json.hpp>

#include "ocular/gaze_transform.hpp"
#include "ocular/retina/render.hpp"
#include "ocular/retina/scene.hpp"

namespace ocular::service {

inline constexpr int kProtocolVersion = 1;
inline constexpr int kMaxFrameSide = 1024;

/// Mutable per-connection state of the interactive protocol.
struct SessionState {
    retina::Scene scene;
    GazeState gaze;
    SchematicEyeModel eye_model;
    DisplayGeometry display;
    retina::Resolution resolution{512, 512};
    EyeSide eye = EyeSide::right;
    std::uint64_t frame_counter = 0;
};

SessionState default_session_state();

/**
 * Request/reply protocol engine; one instance per client connection.
 * Every request produces exactly one reply: `set_*` requests answer with a
 * `telemetry` message, `request_frame` with a `frame` message carrying the
 * request id, and anything malformed with an `error` message. The session
 * survives errors. See docs/protocol.md.
 */
class Session {
public:
    Session();
    explicit Session(SessionState initial);

    nlohmann::json handle(const nlohmann::json& request);
    /// Parses `text` as JSON first; parse failures become error replies.
    std::string handle_text(const std::string& text);

    const SessionState& state() const { return state_; }

    /// Nodal points, frusta and per-object NDC displacement relative to a
    /// straight-ahead gaze at the same fixation distance.
    nlohmann::json telemetry() const;

private:
    nlohmann::json set_gaze(const nlohmann::json& payload);
    nlohmann::json render_frame(const nlohmann::json& request);

    SessionState state_;
};

/// Gaze straight along `side`'s axis at the current fixation distance.
GazeState centered_gaze(const GazeState& gaze, EyeSide side);

}  // namespace ocular::service
