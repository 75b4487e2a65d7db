#pragma once

#include "tamperkit/imaging.hpp"
#include "tamperkit/robustness.hpp"

#include <json.hpp>

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace tamperkit {

enum class Split { Train, Test, CD };
enum class Method { CopyMove, Splicing, DiffUTE, Authentic };

std::string to_string(Split s);
std::string to_string(Method m);
Split split_from_string(const std::string& s);
Method method_from_string(const std::string& s);

/// One dataset sample. Paths are relative to the manifest's directory.
/// Authentic records have no mask, no gt_ocr, and the fixed authentic
/// sentence as description; tampered records carry all three.
struct TamperRecord {
    std::string id;
    std::string image_path;
    std::optional<std::string> mask_path;
    Split split = Split::Train;
    Method method = Method::Authentic;
    bool blend = false;
    std::vector<std::string> language_tags; // subset of {"en", "ch"}
    std::optional<std::string> gt_ocr;
    std::string description;
    std::vector<BBox> boxes;
    std::optional<Distortion> distortion;
    std::optional<std::string> distortion_codec;
    nlohmann::json extra = nlohmann::json::object(); // unknown fields, preserved

    bool tampered() const { return method != Method::Authentic; }
};

/// JSONL round trip. Reading validates structure per line (SchemaError with
/// the line number) and keeps unknown fields; writing emits sorted keys and
/// checks that every referenced file exists next to the manifest.
std::vector<TamperRecord> read_manifest(const std::filesystem::path& path);
void write_manifest(const std::vector<TamperRecord>& records,
                    const std::filesystem::path& path);

nlohmann::json record_to_json(const TamperRecord& record);
TamperRecord record_from_json(const nlohmann::json& j);

struct CorpusStats {
    std::map<Split, std::map<Method, size_t>> counts;
    size_t total = 0;
    size_t tampered = 0;
    size_t authentic = 0;
    /// Mean over tampered images of foreground pixels / (W*H); absent when
    /// the corpus has no tampered record.
    std::optional<double> forged_area;
    std::map<Split, std::optional<double>> forged_area_per_split;
};

/// Reads every tampered record's mask to compute the forged-area ratio.
CorpusStats compute_stats(const std::vector<TamperRecord>& records,
                          const std::filesystem::path& root);

nlohmann::json stats_to_json(const CorpusStats& stats);

struct SplitRatios {
    double train = 1.0;
    double test = 0.0;
    double cd = 0.0;
};

/// Deterministic seeded shuffle, stratified by method so each split keeps
/// method proportions within one record. Generative-edit imports never land
/// in the cross-domain split; their share folds into train/test.
void split_assign(std::vector<TamperRecord>& records, const SplitRatios& ratios,
                  uint64_t seed);

} // namespace tamperkit
