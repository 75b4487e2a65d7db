#include "tamperkit/dataset.hpp"

#include "tamperkit/annotator.hpp"
#include "tamperkit/errors.hpp"
#include "tamperkit/image_io.hpp"
#include "tamperkit/parallel.hpp"
#include "tamperkit/rng.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>
#include <thread>

namespace tamperkit {

std::string to_string(Split s) {
    switch (s) {
    case Split::Train: return "train";
    case Split::Test: return "test";
    case Split::CD: return "cd";
    }
    return "train";
}

std::string to_string(Method m) {
    switch (m) {
    case Method::CopyMove: return "copy_move";
    case Method::Splicing: return "splicing";
    case Method::DiffUTE: return "diffute";
    case Method::Authentic: return "authentic";
    }
    return "authentic";
}

Split split_from_string(const std::string& s) {
    if (s == "train") return Split::Train;
    if (s == "test") return Split::Test;
    if (s == "cd") return Split::CD;
    throw SchemaError("unknown split '" + s + "'");
}

Method method_from_string(const std::string& s) {
    if (s == "copy_move") return Method::CopyMove;
    if (s == "splicing") return Method::Splicing;
    if (s == "diffute") return Method::DiffUTE;
    if (s == "authentic") return Method::Authentic;
    throw SchemaError("unknown method '" + s + "'");
}

namespace {

const char* const kKnownKeys[] = {"id",        "image_path", "mask_path",
                                  "split",     "method",     "blend",
                                  "language_tags", "gt_ocr", "description",
                                  "boxes",     "distortion"};

bool is_known_key(const std::string& key) {
    for (const char* k : kKnownKeys) {
        if (key == k) return true;
    }
    return false;
}

nlohmann::json distortion_to_json(const TamperRecord& record) {
    const Distortion& d = *record.distortion;
    nlohmann::json j;
    switch (d.kind) {
    case DistortionKind::Identity:
        j["kind"] = "identity";
        break;
    case DistortionKind::JpegQuality:
        j["kind"] = "jpeg_quality";
        j["quality"] = static_cast<int>(d.parameter);
        break;
    case DistortionKind::Resize:
        j["kind"] = "resize";
        j["factor"] = d.parameter;
        break;
    }
    if (record.distortion_codec) j["codec"] = *record.distortion_codec;
    return j;
}

void distortion_from_json(const nlohmann::json& j, TamperRecord& record) {
    if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string()) {
        throw SchemaError("distortion must be an object with a 'kind' string");
    }
    const std::string kind = j["kind"].get<std::string>();
    Distortion d;
    if (kind == "identity") {
        d = Distortion::identity();
    } else if (kind == "jpeg_quality") {
        d = Distortion::jpeg(j.at("quality").get<int>());
    } else if (kind == "resize") {
        d = Distortion::resize(j.at("factor").get<double>());
    } else {
        throw SchemaError("unknown distortion kind '" + kind + "'");
    }
    record.distortion = d;
    if (j.contains("codec") && j["codec"].is_string()) {
        record.distortion_codec = j["codec"].get<std::string>();
    }
}

void validate_record(const TamperRecord& r) {
    if (r.id.empty()) throw SchemaError("record has an empty id");
    if (r.image_path.empty()) throw SchemaError("record " + r.id + " has an empty image_path");

    const bool authentic = r.method == Method::Authentic;
    if (authentic != !r.mask_path.has_value()) {
        throw SchemaError("record " + r.id + ": mask_path must be " +
                          (authentic ? "absent for authentic" : "present for tampered") +
                          " records");
    }
    if (authentic != !r.gt_ocr.has_value()) {
        throw SchemaError("record " + r.id + ": gt_ocr must be " +
                          (authentic ? "absent for authentic" : "present for tampered") +
                          " records");
    }
    if (authentic) {
        if (r.description != authentic_annotation()) {
            throw SchemaError("record " + r.id +
                              ": authentic description must be the fixed sentence");
        }
        if (!r.boxes.empty()) {
            throw SchemaError("record " + r.id + ": authentic records carry no boxes");
        }
    } else {
        if (r.gt_ocr->empty()) {
            throw SchemaError("record " + r.id + ": tampered record with empty gt_ocr");
        }
        if (r.mask_path->empty()) {
            throw SchemaError("record " + r.id + ": tampered record with empty mask_path");
        }
        if (r.description == authentic_annotation()) {
            throw SchemaError("record " + r.id +
                              ": tampered record carries the authentic sentence");
        }
    }
    for (const BBox& b : r.boxes) {
        if (!b.valid()) {
            throw SchemaError("record " + r.id + ": invalid box");
        }
    }
    for (const std::string& tag : r.language_tags) {
        if (tag != "en" && tag != "ch") {
            throw SchemaError("record " + r.id + ": unknown language tag '" + tag + "'");
        }
    }
}

} // namespace

nlohmann::json record_to_json(const TamperRecord& record) {
    nlohmann::json j = record.extra.is_object() ? record.extra : nlohmann::json::object();
    j["id"] = record.id;
    j["image_path"] = record.image_path;
    if (record.mask_path) j["mask_path"] = *record.mask_path;
    j["split"] = to_string(record.split);
    j["method"] = to_string(record.method);
    j["blend"] = record.blend;
    j["language_tags"] = record.language_tags;
    if (record.gt_ocr) j["gt_ocr"] = *record.gt_ocr;
    j["description"] = record.description;
    nlohmann::json boxes = nlohmann::json::array();
    for (const BBox& b : record.boxes) {
        boxes.push_back({b.x_min, b.y_min, b.x_max, b.y_max});
    }
    j["boxes"] = boxes;
    if (record.distortion) j["distortion"] = distortion_to_json(record);
    return j;
}

TamperRecord record_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw SchemaError("record line is not a JSON object");
    TamperRecord r;
    try {
        r.id = j.at("id").get<std::string>();
        r.image_path = j.at("image_path").get<std::string>();
        if (j.contains("mask_path")) r.mask_path = j["mask_path"].get<std::string>();
        r.split = split_from_string(j.at("split").get<std::string>());
        r.method = method_from_string(j.at("method").get<std::string>());
        r.blend = j.value("blend", false);
        if (j.contains("language_tags")) {
            r.language_tags = j["language_tags"].get<std::vector<std::string>>();
        }
        if (j.contains("gt_ocr")) r.gt_ocr = j["gt_ocr"].get<std::string>();
        r.description = j.value("description", std::string());
        if (j.contains("boxes")) {
            for (const nlohmann::json& b : j["boxes"]) {
                if (!b.is_array() || b.size() != 4) {
                    throw SchemaError("box must be [x_min, y_min, x_max, y_max]");
                }
                r.boxes.push_back(
                    {b[0].get<int>(), b[1].get<int>(), b[2].get<int>(), b[3].get<int>()});
            }
        }
        if (j.contains("distortion")) distortion_from_json(j["distortion"], r);
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError(std::string("record field error: ") + e.what());
    }
    for (const auto& [key, value] : j.items()) {
        if (!is_known_key(key)) r.extra[key] = value;
    }
    validate_record(r);
    return r;
}

std::vector<TamperRecord> read_manifest(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open manifest " + path.string() + ": " + std::strerror(errno));
    std::vector<TamperRecord> records;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
        if (j.is_discarded()) {
            throw SchemaError(path.string(), line_no, "invalid JSON");
        }
        try {
            records.push_back(record_from_json(j));
        } catch (const SchemaError& e) {
            throw SchemaError(path.string(), line_no, e.what());
        }
    }
    return records;
}

void write_manifest(const std::vector<TamperRecord>& records,
                    const std::filesystem::path& path) {
    const std::filesystem::path root =
        path.has_parent_path() ? path.parent_path() : std::filesystem::path(".");
    for (const TamperRecord& r : records) {
        validate_record(r);
        if (!std::filesystem::exists(root / r.image_path)) {
            throw SchemaError("record " + r.id + ": image file " + r.image_path +
                              " does not exist under " + root.string());
        }
        if (r.mask_path && !std::filesystem::exists(root / *r.mask_path)) {
            throw SchemaError("record " + r.id + ": mask file " + *r.mask_path +
                              " does not exist under " + root.string());
        }
    }
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot open manifest " + path.string() + " for writing");
    for (const TamperRecord& r : records) {
        out << record_to_json(r).dump() << '\n';
    }
    if (!out) throw IoError("write failed for manifest " + path.string());
}

CorpusStats compute_stats(const std::vector<TamperRecord>& records,
                          const std::filesystem::path& root) {
    CorpusStats stats;
    stats.total = records.size();

    std::vector<double> ratios(records.size(), -1.0);
    parallel_for(records.size(), std::thread::hardware_concurrency(), [&](size_t i) {
        const TamperRecord& r = records[i];
        if (!r.tampered()) return;
        const BinaryMask mask = read_mask_png(root / *r.mask_path);
        ratios[i] = static_cast<double>(mask.foreground_area()) /
                    static_cast<double>(mask.pixel_count());
    });

    std::map<Split, std::pair<double, size_t>> split_area;
    double area_sum = 0.0;
    for (size_t i = 0; i < records.size(); ++i) {
        const TamperRecord& r = records[i];
        ++stats.counts[r.split][r.method];
        if (r.tampered()) {
            ++stats.tampered;
            area_sum += ratios[i];
            split_area[r.split].first += ratios[i];
            ++split_area[r.split].second;
        } else {
            ++stats.authentic;
        }
    }
    if (stats.tampered > 0) {
        stats.forged_area = area_sum / static_cast<double>(stats.tampered);
    }
    for (const auto& [split, acc] : split_area) {
        stats.forged_area_per_split[split] =
            acc.second > 0 ? std::optional<double>(acc.first / static_cast<double>(acc.second))
                           : std::nullopt;
    }
    return stats;
}

nlohmann::json stats_to_json(const CorpusStats& stats) {
    nlohmann::json counts = nlohmann::json::object();
    for (const auto& [split, by_method] : stats.counts) {
        nlohmann::json methods = nlohmann::json::object();
        for (const auto& [method, n] : by_method) {
            methods[to_string(method)] = n;
        }
        counts[to_string(split)] = methods;
    }
    nlohmann::json per_split = nlohmann::json::object();
    for (const auto& [split, area] : stats.forged_area_per_split) {
        per_split[to_string(split)] = area ? nlohmann::json(*area) : nlohmann::json(nullptr);
    }
    return {{"total", stats.total},
            {"tampered", stats.tampered},
            {"authentic", stats.authentic},
            {"counts", counts},
            {"forged_area", stats.forged_area ? nlohmann::json(*stats.forged_area)
                                              : nlohmann::json(nullptr)},
            {"forged_area_per_split", per_split}};
}

namespace {

// Fisher-Yates with an explicit generator so the assignment is identical
// across platforms and standard library versions.
void deterministic_shuffle(std::vector<size_t>& items, uint64_t seed) {
    uint64_t state = seed;
    for (size_t i = items.size(); i > 1; --i) {
        state = splitmix64(state);
        const size_t j = static_cast<size_t>(state % i);
        std::swap(items[i - 1], items[j]);
    }
}

// Largest-remainder apportionment of n into quotas proportional to ratios.
std::vector<size_t> apportion(size_t n, const std::vector<double>& ratios) {
    const double sum = std::accumulate(ratios.begin(), ratios.end(), 0.0);
    std::vector<size_t> quotas(ratios.size(), 0);
    if (sum <= 0.0) {
        quotas[0] = n;
        return quotas;
    }
    std::vector<double> remainders(ratios.size(), 0.0);
    size_t assigned = 0;
    for (size_t k = 0; k < ratios.size(); ++k) {
        const double exact = static_cast<double>(n) * ratios[k] / sum;
        quotas[k] = static_cast<size_t>(std::floor(exact));
        remainders[k] = exact - std::floor(exact);
        assigned += quotas[k];
    }
    while (assigned < n) {
        size_t best = 0;
        for (size_t k = 1; k < ratios.size(); ++k) {
            if (remainders[k] > remainders[best]) best = k;
        }
        ++quotas[best];
        remainders[best] = -1.0;
        ++assigned;
    }
    return quotas;
}

} // namespace

void split_assign(std::vector<TamperRecord>& records, const SplitRatios& ratios,
                  uint64_t seed) {
    const double sum = ratios.train + ratios.test + ratios.cd;
    if (sum <= 0.0 || std::fabs(sum - 1.0) > 1e-9) {
        throw SchemaError("split ratios must sum to 1");
    }

    const Method methods[] = {Method::CopyMove, Method::Splicing, Method::DiffUTE,
                              Method::Authentic};
    uint64_t stream = 0;
    for (Method m : methods) {
        std::vector<size_t> indices;
        for (size_t i = 0; i < records.size(); ++i) {
            if (records[i].method == m) indices.push_back(i);
        }
        ++stream;
        if (indices.empty()) continue;
        deterministic_shuffle(indices, splitmix64(seed ^ (stream * 0x51ed2701a9f3cc5full)));

        std::vector<size_t> quotas;
        std::vector<Split> targets;
        if (m == Method::DiffUTE) {
            // Generative-edit imports stay out of the cross-domain split.
            quotas = apportion(indices.size(), {ratios.train, ratios.test});
            targets = {Split::Train, Split::Test};
        } else {
            quotas = apportion(indices.size(), {ratios.train, ratios.test, ratios.cd});
            targets = {Split::Train, Split::Test, Split::CD};
        }
        size_t cursor = 0;
        for (size_t k = 0; k < targets.size(); ++k) {
            for (size_t q = 0; q < quotas[k]; ++q) {
                records[indices[cursor++]].split = targets[k];
            }
        }
    }
}

} // namespace tamperkit
