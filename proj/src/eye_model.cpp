#include "ocular/eye_model.hpp"

#include <stdexcept>

namespace ocular {

void SchematicEyeModel::validate() const {
    if (!(vn_mm > 0.0 && vn_mm <= vnp_mm && vnp_mm < vc_mm)) {
        throw std::invalid_argument("eye model '" + name + "': requires 0 < VN <= VN' < VC");
    }
}

const std::vector<SchematicEyeModel>& builtin_models() {
    using enum AccommodationState;
    static const std::vector<SchematicEyeModel> models = {
        {"gullstrand1", 7.078, 7.331, kDefaultCenterOfRotationMm, relaxed},
        {"gullstrand1", 6.533, 6.847, kDefaultCenterOfRotationMm, accommodated},
        {"gullstrand-emsley", 7.062, 7.363, kDefaultCenterOfRotationMm, relaxed},
        {"gullstrand-emsley", 6.562, 6.909, kDefaultCenterOfRotationMm, accommodated},
        {"emsley", 5.556, 5.556, kDefaultCenterOfRotationMm, relaxed},
    };
    return models;
}

SchematicEyeModel find_model(std::string_view name, AccommodationState state) {
    for (const auto& m : builtin_models()) {
        if (m.name == name && m.state == state) {
            return m;
        }
    }
    throw std::invalid_argument("unknown eye model '" + std::string(name) + "' (" +
                                std::string(to_string(state)) + ")");
}

AccommodationState parse_accommodation(std::string_view text) {
    if (text == "relaxed") return AccommodationState::relaxed;
    if (text == "accommodated" || text == "acc") return AccommodationState::accommodated;
    throw std::invalid_argument("unknown accommodation state '" + std::string(text) + "'");
}

std::string_view to_string(AccommodationState state) {
    return state == AccommodationState::relaxed ? "relaxed" : "accommodated";
}

double nc_distance_mm(const SchematicEyeModel& model) { return model.vc_mm - model.vn_mm; }

double nc_distance_m(const SchematicEyeModel& model) { return nc_distance_mm(model) * 1e-3; }

}  // namespace ocular
