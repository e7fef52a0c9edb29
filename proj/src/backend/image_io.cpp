#include "latentprobe/image_io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iterator>
#include <string>

namespace latentprobe {

namespace {

constexpr const char* kModule = "cli";

std::uint8_t to_byte(double v) {
    // nearbyint honours the default round-to-nearest-even mode
    return static_cast<std::uint8_t>(std::nearbyint(std::clamp(v, 0.0, 1.0) * 255.0));
}

class HeaderReader {
public:
    explicit HeaderReader(const std::vector<std::uint8_t>& bytes) : bytes_(bytes) {}

    std::size_t next_number() {
        skip_space_and_comments();
        const std::size_t start = pos_;
        std::size_t value = 0;
        while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
            value = value * 10 + static_cast<std::size_t>(bytes_[pos_] - '0');
            ++pos_;
        }
        if (pos_ == start) {
            throw FormatError(kModule, "expected a number in PNM header", pos_);
        }
        return value;
    }

    // exactly one whitespace byte separates the header from the raster
    std::size_t raster_start() {
        if (pos_ >= bytes_.size() || !std::isspace(bytes_[pos_])) {
            throw FormatError(kModule, "missing whitespace after PNM header", pos_);
        }
        return pos_ + 1;
    }

private:
    void skip_space_and_comments() {
        while (pos_ < bytes_.size()) {
            if (std::isspace(bytes_[pos_])) {
                ++pos_;
            } else if (bytes_[pos_] == '#') {
                while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
            } else {
                break;
            }
        }
    }

    const std::vector<std::uint8_t>& bytes_;
    std::size_t pos_ = 2;
};

}  // namespace

std::vector<std::uint8_t> encode_pnm(const ImageTensor& image) {
    const auto [c, h, w] = image.shape();
    if (c != 1 && c != 3) {
        throw ConfigError(kModule, "cannot export a " + std::to_string(c) + "-channel tensor as a pixmap");
    }
    const std::string header = "P6\n" + std::to_string(w) + " " + std::to_string(h) + "\n255\n";
    std::vector<std::uint8_t> out(header.begin(), header.end());
    out.reserve(header.size() + h * w * 3);
    const auto values = image.values();
    const std::size_t plane = h * w;
    for (std::size_t p = 0; p < plane; ++p) {
        for (std::size_t ch = 0; ch < 3; ++ch) {
            out.push_back(to_byte(values[(c == 1 ? 0 : ch) * plane + p]));
        }
    }
    return out;
}

void write_pnm(const std::filesystem::path& path, const ImageTensor& image) {
    const auto bytes = encode_pnm(image);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw ConfigError(kModule, "cannot write " + path.string());
    }
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

ImageTensor decode_pnm(const std::vector<std::uint8_t>& bytes) {
    if (bytes.size() < 2 || bytes[0] != 'P' || (bytes[1] != '6' && bytes[1] != '5')) {
        throw FormatError(kModule, "not a binary P5/P6 image", 0);
    }
    const std::size_t channels = bytes[1] == '6' ? 3 : 1;
    HeaderReader header(bytes);
    const std::size_t w = header.next_number();
    const std::size_t h = header.next_number();
    const std::size_t maxval = header.next_number();
    if (w == 0 || h == 0 || maxval == 0 || maxval > 255) {
        throw FormatError(kModule, "unsupported PNM dimensions or maxval", 2);
    }
    const std::size_t start = header.raster_start();
    const std::size_t plane = w * h;
    if (bytes.size() - start != plane * channels) {
        throw FormatError(kModule, "PNM raster has " + std::to_string(bytes.size() - start) + " bytes, expected " +
                                       std::to_string(plane * channels),
                          start);
    }
    std::vector<double> values(plane * channels);
    for (std::size_t p = 0; p < plane; ++p) {
        for (std::size_t ch = 0; ch < channels; ++ch) {
            values[ch * plane + p] = static_cast<double>(bytes[start + p * channels + ch]) / static_cast<double>(maxval);
        }
    }
    return ImageTensor({channels, h, w}, std::move(values));
}

ImageTensor read_pnm(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ConfigError(kModule, "cannot open " + path.string());
    }
    const std::vector<std::uint8_t> bytes{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
    try {
        return decode_pnm(bytes);
    } catch (const FormatError& e) {
        throw FormatError(kModule, path.string() + ": " + e.what(), e.offset());
    }
}

}  // namespace latentprobe
