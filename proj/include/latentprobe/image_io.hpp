#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "latentprobe/backend.hpp"

namespace latentprobe {

/// Binary P6 pixmap. Values are clamped to [0, 1] and mapped to [0, 255] with
/// round-half-to-even. One-channel tensors are written as gray RGB; (c, h, w)
/// with c not in {1, 3} is rejected.
std::vector<std::uint8_t> encode_pnm(const ImageTensor& image);
void write_pnm(const std::filesystem::path& path, const ImageTensor& image);

/// Reads P6 (3 channels) or P5 (1 channel) into a normalized tensor.
ImageTensor read_pnm(const std::filesystem::path& path);
ImageTensor decode_pnm(const std::vector<std::uint8_t>& bytes);

}  // namespace latentprobe
