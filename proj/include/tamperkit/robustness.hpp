#pragma once

#include "tamperkit/imaging.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace tamperkit {

enum class DistortionKind { Identity, JpegQuality, Resize };

/// One distortion from the robustness grid: JPEG recompression at a given
/// quality, bilinear downscale by a factor, or identity.
struct Distortion {
    DistortionKind kind = DistortionKind::Identity;
    double parameter = 0.0; // quality in [1,100] or factor in (0,1]

    static Distortion identity() { return {DistortionKind::Identity, 0.0}; }
    static Distortion jpeg(int quality);
    static Distortion resize(double factor);

    /// Parses "identity", "jpeg:75" or "resize:0.5".
    static Distortion parse(const std::string& text);
    std::string describe() const;

    friend bool operator==(const Distortion&, const Distortion&) = default;
};

/// The distortion grid evaluated in the robustness protocol, identity first.
std::vector<Distortion> robustness_grid();

/// JPEG: encode at the given quality (baseline, 4:2:0) then decode.
/// Resize: bilinear downscale, output dims round(f*W) x round(f*H), min 1.
ImageBuf apply(const ImageBuf& image, const Distortion& d);

/// Masks resize with nearest neighbour so values stay binary; JPEG and
/// identity leave them untouched.
BinaryMask apply_mask(const BinaryMask& mask, const Distortion& d);

/// Box rescaled with the same rounding the image resize uses.
BBox rescale_box(const BBox& box, int in_w, int in_h, int out_w, int out_h);

struct PerturbSummary {
    size_t processed = 0;
    size_t failed = 0;
    std::vector<std::pair<std::string, std::string>> failures; // id, message
    std::string codec_id; // set for JPEG distortions
};

/// Applies one distortion to every record of a manifest, writing distorted
/// images/masks and a new manifest next to manifest_out. Per-record codec
/// failures are collected, not fatal.
PerturbSummary perturb_corpus(const std::filesystem::path& manifest_in,
                              const std::filesystem::path& manifest_out, const Distortion& d);

} // namespace tamperkit
