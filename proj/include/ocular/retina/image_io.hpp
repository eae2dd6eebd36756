#pragma once

#include <filesystem>
#include <string>

#include "ocular/retina/scene.hpp"

namespace ocular::retina {

/// Binary PPM (P6, maxval 255).
std::string encode_ppm(const RgbImage& img);
RgbImage decode_ppm(const std::string& bytes);

void write_ppm(const std::filesystem::path& path, const RgbImage& img);
RgbImage read_ppm(const std::filesystem::path& path);

}  // namespace ocular::retina
