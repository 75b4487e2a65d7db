#pragma once

#include "tamperkit/dataset.hpp"
#include "tamperkit/imaging.hpp"

#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace tamperkit {

/// Levenshtein distance over Unicode scalar values, unit costs.
size_t edit_distance(std::string_view a, std::string_view b);

/// OCR accuracy: 1 - ED(pred, gt) / max(|pred|, |gt|), clamped to [0,1].
/// Two empty strings score 1.
double acc_ocr(std::string_view pred, std::string_view gt);

/// Pretrained word vectors plus the stopword set used when vectorizing.
/// Lookup is case-folded. File format: one "word v1 .. vd" entry per line,
/// an optional "count dim" header line is auto-detected.
struct WordVectorTable {
    size_t dimension = 0;
    std::unordered_map<std::string, std::vector<float>> entries;
    std::unordered_set<std::string> stopwords;

    static WordVectorTable load(const std::filesystem::path& vectors_path,
                                const std::filesystem::path& stopwords_path = {});

    const std::vector<float>* lookup(std::string_view word) const;
    bool is_stopword(std::string_view word) const;
};

/// The built-in English stopword list, used when no file is supplied.
const std::unordered_set<std::string>& default_stopwords();

/// Mean of the word vectors surviving stopword/OOV (and optionally quoted
/// span) removal. Zero contributing words marks the vector degenerate.
struct ParagraphVector {
    std::vector<double> components;
    size_t contributing_words = 0;
    bool degenerate() const { return contributing_words == 0; }
};

ParagraphVector paragraph_vector(std::string_view paragraph, const WordVectorTable& table,
                                 bool strip_quoted);

/// Cosine similarity; 0 when either vector is degenerate or zero.
double cosine(const ParagraphVector& a, const ParagraphVector& b);

/// Forgery classification: tampered iff the output's edit distance to the
/// fixed authentic sentence exceeds max_edit.
bool classify_tampered(std::string_view output, size_t max_edit = 3);

struct SampleScore {
    std::string id;
    double acc_ocr = 0.0;
    double sim_para = 0.0;
    double final_score = 0.0;
    bool classified_tampered = false;
    bool gt_tampered = false;
    bool sim_degenerate = false;
    bool correct() const { return classified_tampered == gt_tampered; }
};

/// Scoring policy shared by every path: misclassification zeroes both
/// components, otherwise final = 0.3*acc + 0.7*sim.
SampleScore finalize_score(bool classified_tampered, bool gt_tampered, double acc, double sim,
                           bool sim_degenerate = false);

/// Full per-sample pipeline: classify prediction vs ground truth; on match
/// with a tampered record, OCR accuracy comes from the quoted span of the
/// prediction's first sentence and the paragraph similarity from both texts
/// with quoted spans stripped; correct authentic samples score 1/1.
SampleScore score_sample(const std::string& pred_text, const TamperRecord& gt,
                         const WordVectorTable& table, size_t classify_max_edit = 3);

/// Aggregate means, all on the 0..100 scale.
struct AggregateReport {
    double mean_acc_ocr = 0.0;
    double mean_sim_para = 0.0;
    double mean_final = 0.0;
    double classification_accuracy = 0.0;
    size_t sample_count = 0;
    // Same means over tampered-ground-truth samples only.
    double tampered_mean_acc_ocr = 0.0;
    double tampered_mean_sim_para = 0.0;
    double tampered_mean_final = 0.0;
    size_t tampered_count = 0;
};

AggregateReport aggregate(const std::vector<SampleScore>& scores);

struct DetectionPRF {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    size_t true_positives = 0;
};

/// Greedy one-to-one matching in descending IoU order; pairs below the
/// threshold never match. Both sides empty scores 1/1/1, one side empty 0.
DetectionPRF detection_prf(const std::vector<BBox>& preds, const std::vector<BBox>& gts,
                           double iou_thresh = 0.5);

// ---- corpus-level pipeline entries ----

struct Prediction {
    std::string id;
    std::string output_text;
};

std::vector<Prediction> read_predictions(const std::filesystem::path& jsonl_path);

struct ScoreRun {
    std::vector<SampleScore> rows;
    AggregateReport totals;
    std::vector<std::string> missing_predictions; // manifest ids with no prediction
    std::vector<std::string> unknown_ids;         // prediction ids not in the manifest
    std::vector<std::pair<std::string, std::string>> failures; // id, message
};

ScoreRun score_corpus(const std::filesystem::path& predictions_jsonl,
                      const std::filesystem::path& manifest_path, const WordVectorTable& table,
                      size_t classify_max_edit = 3);

nlohmann::json score_report_json(const ScoreRun& run);
void write_score_csv(const ScoreRun& run, const std::filesystem::path& path);

struct BoxPrediction {
    std::string id;
    std::vector<BBox> boxes;
};

std::vector<BoxPrediction> read_box_predictions(const std::filesystem::path& jsonl_path);

struct DetectionEval {
    DetectionPRF totals; // micro-averaged over the corpus
    std::vector<std::pair<std::string, DetectionPRF>> per_image;
    std::vector<std::string> missing_predictions;
    std::vector<std::string> unknown_ids;
};

DetectionEval detect_eval_corpus(const std::filesystem::path& predictions_jsonl,
                                 const std::filesystem::path& manifest_path,
                                 double iou_thresh = 0.5);

nlohmann::json detection_report_json(const DetectionEval& eval, double iou_thresh);

} // namespace tamperkit
