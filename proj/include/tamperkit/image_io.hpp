#pragma once

#include "tamperkit/imaging.hpp"

#include <filesystem>
#include <vector>

namespace tamperkit {

/// Decode a PNG or JPEG file (format sniffed from magic bytes) to RGB.
ImageBuf read_image(const std::filesystem::path& path);

/// Decode a single-channel PNG mask. Throws SchemaError when any pixel is
/// neither 0 nor 255.
BinaryMask read_mask_png(const std::filesystem::path& path);

void write_png(const ImageBuf& image, const std::filesystem::path& path);
void write_png(const BinaryMask& mask, const std::filesystem::path& path);

/// In-memory PNG encode of an RGB image (used for annotator payloads).
std::vector<uint8_t> encode_png(const ImageBuf& image);
ImageBuf decode_png(const std::vector<uint8_t>& bytes);

/// Baseline JPEG with 4:2:0 chroma subsampling at the given quality.
std::vector<uint8_t> encode_jpeg(const ImageBuf& image, int quality);
ImageBuf decode_jpeg(const std::vector<uint8_t>& bytes);

/// Identity string of the linked JPEG codec, recorded in perturbed
/// manifests so a lossy run can be reproduced.
std::string jpeg_codec_id();

} // namespace tamperkit
