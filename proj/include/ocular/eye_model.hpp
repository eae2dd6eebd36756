#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace ocular {

enum class AccommodationState { relaxed, accommodated };

/**
 * Cardinal-point distances of a schematic eye, measured from the anterior
 * vertex of the cornea (V). All distances are in millimeters.
 *
 * The front nodal point N is the eye's center of projection; C is the center
 * of rotation. Their separation NC is the lever arm of ocular parallax.
 */
struct SchematicEyeModel {
    std::string name;
    double vn_mm = 0.0;   ///< V to front nodal point N
    double vnp_mm = 0.0;  ///< V to rear nodal point N'
    double vc_mm = 0.0;   ///< V to center of rotation C
    AccommodationState state = AccommodationState::relaxed;

    /// Throws std::invalid_argument unless 0 < VN <= VN' < VC.
    void validate() const;
};

/// Average center-of-rotation depth behind the cornea for emmetropes (Fry).
inline constexpr double kDefaultCenterOfRotationMm = 14.7536;

/// The five models of the standard table, in table order:
/// Gullstrand 1 (relaxed, accommodated), Gullstrand-Emsley (relaxed,
/// accommodated), Emsley reduced (relaxed only).
const std::vector<SchematicEyeModel>& builtin_models();

/// Looks a model up by CLI name ("gullstrand1", "gullstrand-emsley",
/// "emsley") and state. Throws std::invalid_argument for unknown names or
/// for an accommodated Emsley reduced eye, which has no published variant.
SchematicEyeModel find_model(std::string_view name, AccommodationState state = AccommodationState::relaxed);

AccommodationState parse_accommodation(std::string_view text);
std::string_view to_string(AccommodationState state);

/// The model every experiment uses unless told otherwise.
inline SchematicEyeModel default_model() { return find_model("gullstrand-emsley"); }

/// NC = VC - VN, millimeters.
double nc_distance_mm(const SchematicEyeModel& model);

/// NC in meters. This is the single mm -> m conversion point for geometry.
double nc_distance_m(const SchematicEyeModel& model);

}  // namespace ocular
