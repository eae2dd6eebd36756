#include "ocular/retina/image_io.hpp"

#include <cctype>
#include <fstream>
#include <iterator>
#include <sstream>
#include <stdexcept>

namespace ocular::retina {

std::string encode_ppm(const RgbImage& img) {
    std::string out = "P6\n" + std::to_string(img.width) + " " + std::to_string(img.height) + "\n255\n";
    out.append(img.data.begin(), img.data.end());
    return out;
}

namespace {

// Reads one header token, skipping whitespace and '#' comments.
std::string next_token(const std::string& bytes, std::size_t& pos) {
    while (pos < bytes.size()) {
        if (bytes[pos] == '#') {
            while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
        } else if (std::isspace(static_cast<unsigned char>(bytes[pos]))) {
            ++pos;
        } else {
            break;
        }
    }
    const std::size_t start = pos;
    while (pos < bytes.size() && !std::isspace(static_cast<unsigned char>(bytes[pos]))) ++pos;
    return bytes.substr(start, pos - start);
}

}  // namespace

RgbImage decode_ppm(const std::string& bytes) {
    std::size_t pos = 0;
    if (next_token(bytes, pos) != "P6") {
        throw std::invalid_argument("not a binary PPM (P6) image");
    }
    RgbImage img;
    try {
        img.width = std::stoi(next_token(bytes, pos));
        img.height = std::stoi(next_token(bytes, pos));
        if (std::stoi(next_token(bytes, pos)) != 255) {
            throw std::invalid_argument("only maxval 255 PPM images are supported");
        }
    } catch (const std::logic_error& e) {
        throw std::invalid_argument(std::string("malformed PPM header: ") + e.what());
    }
    ++pos;  // single whitespace byte after maxval
    const auto n = static_cast<std::size_t>(img.width) * img.height * 3;
    if (img.width <= 0 || img.height <= 0 || bytes.size() < pos + n) {
        throw std::invalid_argument("truncated PPM image");
    }
    img.data.assign(bytes.begin() + static_cast<std::ptrdiff_t>(pos),
                    bytes.begin() + static_cast<std::ptrdiff_t>(pos + n));
    return img;
}

void write_ppm(const std::filesystem::path& path, const RgbImage& img) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    const std::string bytes = encode_ppm(img);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

RgbImage read_ppm(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return decode_ppm(bytes);
}

}  // namespace ocular::retina
