#include "latentprobe/latent_io.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>

#include <nlohmann/json.hpp>

namespace latentprobe {

namespace {

constexpr const char* kModule = "latent-core";
constexpr std::uint32_t kVersion = 1;
constexpr std::size_t kHeaderSize = 16;

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    for (int shift = 0; shift < 32; shift += 8) {
        out.push_back(static_cast<std::uint8_t>(v >> shift));
    }
}

std::uint32_t get_u32(std::span<const std::uint8_t> bytes, std::size_t offset) {
    std::uint32_t v = 0;
    for (int k = 3; k >= 0; --k) {
        v = (v << 8) | bytes[offset + static_cast<std::size_t>(k)];
    }
    return v;
}

std::string prefixed(std::string_view source, const std::string& message) {
    return source.empty() ? message : std::string(source) + ": " + message;
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ConfigError(kModule, "cannot open " + path.string());
    }
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw ConfigError(kModule, "cannot write " + path.string());
    }
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) {
        throw ConfigError(kModule, "write failed for " + path.string());
    }
}

RawVectors decode_json(std::span<const std::uint8_t> bytes, std::string_view source) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(bytes.begin(), bytes.end());
    } catch (const nlohmann::json::parse_error& e) {
        throw FormatError(kModule, prefixed(source, std::string("invalid JSON latent file: ") + e.what()), e.byte);
    }
    if (!j.is_object() || !j.contains("dim") || !j.contains("vectors")) {
        throw FormatError(kModule, prefixed(source, "JSON latent file needs \"dim\" and \"vectors\""), 0);
    }
    RawVectors raw;
    raw.dim = j.at("dim").get<std::size_t>();
    if (raw.dim == 0) {
        throw FormatError(kModule, prefixed(source, "dim must be >= 1"), 0);
    }
    for (const auto& row : j.at("vectors")) {
        auto values = row.get<std::vector<double>>();
        if (values.size() != raw.dim) {
            throw FormatError(kModule,
                              prefixed(source, "vector " + std::to_string(raw.rows.size()) + " has length " +
                                                   std::to_string(values.size()) + ", expected " +
                                                   std::to_string(raw.dim)),
                              0);
        }
        raw.rows.push_back(std::move(values));
    }
    return raw;
}

std::string encode_json(const RawVectors& data) {
    nlohmann::json j;
    j["dim"] = data.dim;
    j["vectors"] = nlohmann::json::array();
    for (const auto& row : data.rows) {
        std::vector<double> rounded(row.size());
        for (std::size_t i = 0; i < row.size(); ++i) {
            rounded[i] = static_cast<double>(static_cast<float>(row[i]));
        }
        j["vectors"].push_back(rounded);
    }
    return j.dump() + "\n";
}

void check_writable(const RawVectors& data) {
    if (data.rows.empty()) {
        throw ConfigError(kModule, "refusing to write an empty vector set");
    }
    if (data.dim == 0) {
        throw ConfigError(kModule, "dimension must be >= 1");
    }
    for (std::size_t r = 0; r < data.rows.size(); ++r) {
        if (data.rows[r].size() != data.dim) {
            throw DimensionError(kModule, "vector " + std::to_string(r) + " has length " +
                                              std::to_string(data.rows[r].size()) + ", expected " +
                                              std::to_string(data.dim));
        }
        for (double v : data.rows[r]) {
            if (!std::isfinite(static_cast<float>(v))) {
                throw ConfigError(kModule, "value not representable as finite f32 in vector " + std::to_string(r));
            }
        }
    }
}

template <class Vec>
RawVectors to_raw(std::span<const Vec> vectors) {
    RawVectors raw;
    raw.dim = vectors.empty() ? 0 : vectors.front().size();
    for (const auto& v : vectors) {
        raw.rows.push_back(v.values());
    }
    return raw;
}

template <class Vec>
std::vector<Vec> from_raw(const RawVectors& raw) {
    std::vector<Vec> out;
    out.reserve(raw.rows.size());
    for (const auto& row : raw.rows) {
        out.emplace_back(row);
    }
    return out;
}

}  // namespace

std::vector<std::uint8_t> encode_lvec(const RawVectors& data) {
    check_writable(data);
    std::vector<std::uint8_t> out;
    out.reserve(kHeaderSize + data.rows.size() * data.dim * 4);
    for (char c : {'L', 'V', 'E', 'C'}) out.push_back(static_cast<std::uint8_t>(c));
    put_u32(out, kVersion);
    put_u32(out, static_cast<std::uint32_t>(data.dim));
    put_u32(out, static_cast<std::uint32_t>(data.rows.size()));
    for (const auto& row : data.rows) {
        for (double v : row) {
            put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
        }
    }
    return out;
}

RawVectors decode_lvec(std::span<const std::uint8_t> bytes, std::string_view source) {
    if (bytes.size() < 4) {
        throw FormatError(kModule, prefixed(source, "truncated header"), bytes.size());
    }
    if (std::memcmp(bytes.data(), "LVEC", 4) != 0) {
        throw FormatError(kModule, prefixed(source, "bad magic, expected \"LVEC\""), 0);
    }
    if (bytes.size() < kHeaderSize) {
        throw FormatError(kModule, prefixed(source, "truncated header"), bytes.size());
    }
    const std::uint32_t version = get_u32(bytes, 4);
    if (version != kVersion) {
        throw FormatError(kModule, prefixed(source, "unsupported version " + std::to_string(version)), 4);
    }
    RawVectors raw;
    raw.dim = get_u32(bytes, 8);
    const std::uint64_t count = get_u32(bytes, 12);
    if (raw.dim == 0) {
        throw FormatError(kModule, prefixed(source, "dim must be >= 1"), 8);
    }
    const std::uint64_t expected = count * raw.dim * 4;
    const std::uint64_t actual = bytes.size() - kHeaderSize;
    if (actual < expected) {
        throw FormatError(kModule,
                          prefixed(source, "header count " + std::to_string(count) + " needs " +
                                               std::to_string(expected) + " payload bytes, file has " +
                                               std::to_string(actual)),
                          bytes.size());
    }
    if (actual > expected) {
        throw FormatError(kModule,
                          prefixed(source, "header count " + std::to_string(count) +
                                               " disagrees with payload length " + std::to_string(actual)),
                          kHeaderSize + expected);
    }
    raw.rows.reserve(count);
    std::size_t offset = kHeaderSize;
    for (std::uint64_t r = 0; r < count; ++r) {
        std::vector<double> row(raw.dim);
        for (auto& v : row) {
            const float f = std::bit_cast<float>(get_u32(bytes, offset));
            if (!std::isfinite(f)) {
                throw FormatError(kModule, prefixed(source, "non-finite value"), offset);
            }
            v = f;
            offset += 4;
        }
        raw.rows.push_back(std::move(row));
    }
    return raw;
}

RawVectors read_vectors(const std::filesystem::path& path) {
    const auto bytes = read_file(path);
    std::size_t first = 0;
    while (first < bytes.size() && std::isspace(bytes[first])) {
        ++first;
    }
    const auto source = path.string();
    if (first < bytes.size() && bytes[first] == '{') {
        try {
            return decode_json(bytes, source);
        } catch (const nlohmann::json::exception& e) {
            throw FormatError(kModule, prefixed(source, e.what()), 0);
        }
    }
    return decode_lvec(bytes, source);
}

void write_vectors(const std::filesystem::path& path, const RawVectors& data, LatentFormat format) {
    if (format == LatentFormat::json) {
        check_writable(data);
        const auto text = encode_json(data);
        write_file(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
        return;
    }
    write_file(path, encode_lvec(data));
}

std::vector<LatentVector> read_latents(const std::filesystem::path& path) {
    return from_raw<LatentVector>(read_vectors(path));
}

void write_latents(const std::filesystem::path& path, std::span<const LatentVector> vectors, LatentFormat format) {
    write_vectors(path, to_raw(vectors), format);
}

std::vector<Embedding> read_embeddings(const std::filesystem::path& path) {
    return from_raw<Embedding>(read_vectors(path));
}

void write_embeddings(const std::filesystem::path& path, std::span<const Embedding> vectors, LatentFormat format) {
    write_vectors(path, to_raw(vectors), format);
}

}  // namespace latentprobe
