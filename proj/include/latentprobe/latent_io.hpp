#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "latentprobe/vector.hpp"

namespace latentprobe {

// Binary layout (little-endian):
//   "LVEC" | u32 version=1 | u32 dim | u32 count | count*dim f32
// JSON alternative: {"dim": D, "vectors": [[...], ...]}

enum class LatentFormat { binary, json };

struct RawVectors {
    std::size_t dim = 0;
    std::vector<std::vector<double>> rows;
};

std::vector<std::uint8_t> encode_lvec(const RawVectors& data);
/// `source` (e.g. a path) prefixes error messages.
RawVectors decode_lvec(std::span<const std::uint8_t> bytes, std::string_view source = {});

/// Accepts either the binary layout or the JSON alternative (detected by a leading '{').
RawVectors read_vectors(const std::filesystem::path& path);
void write_vectors(const std::filesystem::path& path, const RawVectors& data,
                   LatentFormat format = LatentFormat::binary);

std::vector<LatentVector> read_latents(const std::filesystem::path& path);
void write_latents(const std::filesystem::path& path, std::span<const LatentVector> vectors,
                   LatentFormat format = LatentFormat::binary);

std::vector<Embedding> read_embeddings(const std::filesystem::path& path);
void write_embeddings(const std::filesystem::path& path, std::span<const Embedding> vectors,
                      LatentFormat format = LatentFormat::binary);

}  // namespace latentprobe
