#pragma once

#include "tamperkit/dataset.hpp"
#include "tamperkit/poisson.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace tamperkit {

/// A transcribed text region of a source image, read from the image's
/// `<stem>.words.json` sidecar.
struct SourceWord {
    std::string text;
    BBox box;
};

struct SourceImage {
    std::filesystem::path path;
    std::vector<SourceWord> words; // empty when no sidecar exists
};

/// Scans a directory for PNG/JPEG images and their word sidecars,
/// sorted by filename for determinism.
std::vector<SourceImage> scan_sources(const std::filesystem::path& dir);

enum class ForgeMethod { CopyMove, Splicing, Mixed };

struct ForgeOptions {
    int tampered = 0;
    int authentic = 0;
    ForgeMethod method = ForgeMethod::Mixed;
    bool blend = true;
    uint64_t seed = 0;
    SplitRatios ratios{1.0, 0.0, 0.0};
    PoissonOptions solver;
};

struct ForgeSummary {
    size_t forged = 0;
    size_t authentic = 0;
    std::vector<std::string> blend_fallbacks; // ids pasted hard after a failed solve
    std::vector<std::pair<std::string, std::string>> failures;
};

/// Forges a corpus out of annotated source images: copy-move and splicing
/// of transcribed word boxes, pixel-exact rectangle masks, and a manifest
/// at out_dir/manifest.jsonl. Tampered records take the pasted word's
/// transcription as gt_ocr; authentic records are copied through untouched.
ForgeSummary forge_corpus(const std::filesystem::path& sources_dir,
                          const std::filesystem::path& out_dir, const ForgeOptions& opts);

} // namespace tamperkit
