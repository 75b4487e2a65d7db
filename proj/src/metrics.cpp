#include "tamperkit/metrics.hpp"

#include "tamperkit/annotator.hpp"
#include "tamperkit/errors.hpp"
#include "tamperkit/parallel.hpp"
#include "tamperkit/textutil.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

namespace tamperkit {

size_t edit_distance(std::string_view a, std::string_view b) {
    const std::u32string ua = text::utf8_decode(a);
    const std::u32string ub = text::utf8_decode(b);
    const size_t n = ua.size();
    const size_t m = ub.size();
    if (n == 0) return m;
    if (m == 0) return n;

    std::vector<size_t> prev(m + 1), cur(m + 1);
    for (size_t j = 0; j <= m; ++j) prev[j] = j;
    for (size_t i = 1; i <= n; ++i) {
        cur[0] = i;
        for (size_t j = 1; j <= m; ++j) {
            const size_t sub = prev[j - 1] + (ua[i - 1] == ub[j - 1] ? 0 : 1);
            cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
        }
        std::swap(prev, cur);
    }
    return prev[m];
}

double acc_ocr(std::string_view pred, std::string_view gt) {
    const size_t lp = text::utf8_decode(pred).size();
    const size_t lg = text::utf8_decode(gt).size();
    const size_t longest = std::max(lp, lg);
    if (longest == 0) return 1.0;
    const double ratio = 1.0 - static_cast<double>(edit_distance(pred, gt)) /
                                   static_cast<double>(longest);
    return std::clamp(ratio, 0.0, 1.0);
}

const std::unordered_set<std::string>& default_stopwords() {
    static const std::unordered_set<std::string> words = {
        "a",       "about",   "above",  "after",   "again",  "against", "all",    "am",
        "an",      "and",     "any",    "are",     "aren",   "as",      "at",     "be",
        "because", "been",    "before", "being",   "below",  "between", "both",   "but",
        "by",      "can",     "cannot", "could",   "did",    "do",      "does",   "doing",
        "don",     "down",    "during", "each",    "few",    "for",     "from",   "further",
        "had",     "has",     "have",   "having",  "he",     "her",     "here",   "hers",
        "herself", "him",     "himself","his",     "how",    "i",       "if",     "in",
        "into",    "is",      "it",     "its",     "itself", "just",    "may",    "me",
        "might",   "more",    "most",   "my",      "myself", "no",      "nor",    "not",
        "now",     "of",      "off",    "on",      "once",   "only",    "or",     "other",
        "our",     "ours",    "ourselves", "out",  "over",   "own",     "s",      "same",
        "she",     "should",  "so",     "some",    "such",   "t",       "than",   "that",
        "the",     "their",   "theirs", "them",    "themselves", "then", "there", "these",
        "they",    "this",    "those",  "through", "to",     "too",     "under",  "until",
        "up",      "very",    "was",    "we",      "were",   "what",    "when",   "where",
        "which",   "while",   "who",    "whom",    "why",    "will",    "with",   "would",
        "you",     "your",    "yours",  "yourself","yourselves"};
    return words;
}

WordVectorTable WordVectorTable::load(const std::filesystem::path& vectors_path,
                                      const std::filesystem::path& stopwords_path) {
    std::ifstream in(vectors_path);
    if (!in) {
        throw IoError("cannot open word vectors " + vectors_path.string() + ": " +
                      std::strerror(errno));
    }

    WordVectorTable table;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string word;
        row >> word;
        if (word.empty()) continue;

        std::vector<float> values;
        double v = 0.0;
        while (row >> v) values.push_back(static_cast<float>(v));
        if (!row.eof()) {
            throw SchemaError(vectors_path.string(), line_no, "non-numeric vector component");
        }

        // "count dim" header: two integer-looking fields on the first line.
        if (line_no == 1 && values.size() == 1 && word.find_first_not_of("0123456789") ==
                                                      std::string::npos) {
            continue;
        }
        if (values.empty()) {
            throw SchemaError(vectors_path.string(), line_no, "entry has no components");
        }
        if (table.dimension == 0) {
            table.dimension = values.size();
        } else if (values.size() != table.dimension) {
            throw SchemaError(vectors_path.string(), line_no,
                              "dimension " + std::to_string(values.size()) +
                                  " does not match table dimension " +
                                  std::to_string(table.dimension));
        }
        table.entries.emplace(text::casefold(word), std::move(values));
    }
    if (table.entries.empty()) {
        throw SchemaError(vectors_path.string(), line_no, "no vector entries found");
    }

    if (stopwords_path.empty()) {
        table.stopwords = default_stopwords();
    } else {
        std::ifstream stops(stopwords_path);
        if (!stops) {
            throw IoError("cannot open stopwords " + stopwords_path.string() + ": " +
                          std::strerror(errno));
        }
        std::string w;
        while (std::getline(stops, w)) {
            while (!w.empty() && (w.back() == '\r' || w.back() == ' ')) w.pop_back();
            if (!w.empty()) table.stopwords.insert(text::casefold(w));
        }
    }
    return table;
}

const std::vector<float>* WordVectorTable::lookup(std::string_view word) const {
    const auto it = entries.find(text::casefold(word));
    return it == entries.end() ? nullptr : &it->second;
}

bool WordVectorTable::is_stopword(std::string_view word) const {
    return stopwords.count(text::casefold(word)) > 0;
}

ParagraphVector paragraph_vector(std::string_view paragraph, const WordVectorTable& table,
                                 bool strip_quoted) {
    const std::string body =
        strip_quoted ? text::remove_quoted_spans(paragraph) : std::string(paragraph);

    ParagraphVector out;
    out.components.assign(table.dimension, 0.0);
    for (const std::string& token : text::tokenize_words(body)) {
        if (table.is_stopword(token)) continue;
        const std::vector<float>* vec = table.lookup(token);
        if (!vec) continue;
        for (size_t d = 0; d < table.dimension; ++d) out.components[d] += (*vec)[d];
        ++out.contributing_words;
    }
    if (out.contributing_words > 0) {
        for (double& c : out.components) c /= static_cast<double>(out.contributing_words);
    } else {
        std::fill(out.components.begin(), out.components.end(), 0.0);
    }
    return out;
}

double cosine(const ParagraphVector& a, const ParagraphVector& b) {
    if (a.components.size() != b.components.size()) {
        throw DimensionError("cosine of vectors with dimensions " +
                             std::to_string(a.components.size()) + " and " +
                             std::to_string(b.components.size()));
    }
    if (a.degenerate() || b.degenerate()) return 0.0;
    double dot = 0.0;
    double na = 0.0;
    double nb = 0.0;
    for (size_t d = 0; d < a.components.size(); ++d) {
        dot += a.components[d] * b.components[d];
        na += a.components[d] * a.components[d];
        nb += b.components[d] * b.components[d];
    }
    if (na == 0.0 || nb == 0.0) return 0.0;
    return dot / (std::sqrt(na) * std::sqrt(nb));
}

bool classify_tampered(std::string_view output, size_t max_edit) {
    return edit_distance(output, authentic_annotation()) > max_edit;
}

SampleScore finalize_score(bool classified_tampered, bool gt_tampered, double acc, double sim,
                           bool sim_degenerate) {
    SampleScore s;
    s.classified_tampered = classified_tampered;
    s.gt_tampered = gt_tampered;
    s.sim_degenerate = sim_degenerate;
    if (classified_tampered != gt_tampered) {
        // The gist is opposite: similarity is zeroed, and no valid quoted
        // OCR can exist in a wrong-class answer.
        s.acc_ocr = 0.0;
        s.sim_para = 0.0;
        s.final_score = 0.0;
        return s;
    }
    s.acc_ocr = acc;
    s.sim_para = sim;
    s.final_score = 0.3 * acc + 0.7 * sim;
    return s;
}

SampleScore score_sample(const std::string& pred_text, const TamperRecord& gt,
                         const WordVectorTable& table, size_t classify_max_edit) {
    const bool gt_tampered = gt.tampered();
    if (gt_tampered) {
        if (!gt.gt_ocr || gt.gt_ocr->empty()) {
            throw MissingGroundTruth("record " + gt.id + " has no ground-truth OCR");
        }
        if (gt.description.empty()) {
            throw MissingGroundTruth("record " + gt.id + " has no description annotation");
        }
    }

    const bool classified = classify_tampered(pred_text, classify_max_edit);
    double acc = 0.0;
    double sim = 0.0;
    bool degenerate = false;
    if (classified == gt_tampered) {
        if (gt_tampered) {
            const std::string quoted =
                text::first_quoted_span(text::split_first_sentence(pred_text).first);
            acc = acc_ocr(quoted, *gt.gt_ocr);
            const ParagraphVector vp = paragraph_vector(pred_text, table, true);
            const ParagraphVector vg = paragraph_vector(gt.description, table, true);
            sim = cosine(vp, vg);
            degenerate = vp.degenerate() || vg.degenerate();
        } else {
            // Both sides are the fixed authentic sentence.
            acc = 1.0;
            sim = 1.0;
        }
    }
    SampleScore s = finalize_score(classified, gt_tampered, acc, sim, degenerate);
    s.id = gt.id;
    return s;
}

AggregateReport aggregate(const std::vector<SampleScore>& scores) {
    if (scores.empty()) throw EmptyInput("aggregate over an empty score list");

    AggregateReport r;
    r.sample_count = scores.size();
    size_t correct = 0;
    for (const SampleScore& s : scores) {
        r.mean_acc_ocr += s.acc_ocr;
        r.mean_sim_para += s.sim_para;
        r.mean_final += s.final_score;
        if (s.correct()) ++correct;
        if (s.gt_tampered) {
            r.tampered_mean_acc_ocr += s.acc_ocr;
            r.tampered_mean_sim_para += s.sim_para;
            r.tampered_mean_final += s.final_score;
            ++r.tampered_count;
        }
    }
    const double n = static_cast<double>(scores.size());
    r.mean_acc_ocr = r.mean_acc_ocr / n * 100.0;
    r.mean_sim_para = r.mean_sim_para / n * 100.0;
    r.mean_final = r.mean_final / n * 100.0;
    r.classification_accuracy = static_cast<double>(correct) / n * 100.0;
    if (r.tampered_count > 0) {
        const double t = static_cast<double>(r.tampered_count);
        r.tampered_mean_acc_ocr = r.tampered_mean_acc_ocr / t * 100.0;
        r.tampered_mean_sim_para = r.tampered_mean_sim_para / t * 100.0;
        r.tampered_mean_final = r.tampered_mean_final / t * 100.0;
    }
    return r;
}

DetectionPRF detection_prf(const std::vector<BBox>& preds, const std::vector<BBox>& gts,
                           double iou_thresh) {
    DetectionPRF out;
    if (preds.empty() && gts.empty()) {
        out.precision = out.recall = out.f1 = 1.0;
        return out;
    }
    if (preds.empty() || gts.empty()) {
        return out; // all zero
    }

    struct Pair {
        double iou;
        size_t pred;
        size_t gt;
    };
    std::vector<Pair> pairs;
    for (size_t p = 0; p < preds.size(); ++p) {
        for (size_t g = 0; g < gts.size(); ++g) {
            const double v = iou(preds[p], gts[g]);
            if (v >= iou_thresh) pairs.push_back({v, p, g});
        }
    }
    std::sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) {
        if (a.iou != b.iou) return a.iou > b.iou;
        if (a.pred != b.pred) return a.pred < b.pred;
        return a.gt < b.gt;
    });

    std::vector<bool> pred_used(preds.size(), false), gt_used(gts.size(), false);
    for (const Pair& pr : pairs) {
        if (pred_used[pr.pred] || gt_used[pr.gt]) continue;
        pred_used[pr.pred] = true;
        gt_used[pr.gt] = true;
        ++out.true_positives;
    }
    out.precision = static_cast<double>(out.true_positives) / static_cast<double>(preds.size());
    out.recall = static_cast<double>(out.true_positives) / static_cast<double>(gts.size());
    if (out.precision + out.recall > 0.0) {
        out.f1 = 2.0 * out.precision * out.recall / (out.precision + out.recall);
    }
    return out;
}

// ---- corpus-level entries ----

namespace {

nlohmann::json parse_jsonl_line(const std::filesystem::path& path, size_t line_no,
                                const std::string& line) {
    nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
        throw SchemaError(path.string(), line_no, "not a JSON object");
    }
    return j;
}

template <typename RowFn>
void for_each_jsonl(const std::filesystem::path& path, RowFn&& fn) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string() + ": " + std::strerror(errno));
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        fn(line_no, parse_jsonl_line(path, line_no, line));
    }
}

} // namespace

std::vector<Prediction> read_predictions(const std::filesystem::path& jsonl_path) {
    std::vector<Prediction> preds;
    for_each_jsonl(jsonl_path, [&](size_t line_no, const nlohmann::json& j) {
        if (!j.contains("id") || !j["id"].is_string()) {
            throw SchemaError(jsonl_path.string(), line_no, "missing string field 'id'");
        }
        if (!j.contains("output_text") || !j["output_text"].is_string()) {
            throw SchemaError(jsonl_path.string(), line_no,
                              "missing string field 'output_text'");
        }
        preds.push_back({j["id"].get<std::string>(), j["output_text"].get<std::string>()});
    });
    return preds;
}

ScoreRun score_corpus(const std::filesystem::path& predictions_jsonl,
                      const std::filesystem::path& manifest_path, const WordVectorTable& table,
                      size_t classify_max_edit) {
    const std::vector<TamperRecord> records = read_manifest(manifest_path);
    const std::vector<Prediction> preds = read_predictions(predictions_jsonl);

    std::unordered_map<std::string, const Prediction*> by_id;
    for (const Prediction& p : preds) by_id[p.id] = &p;

    std::unordered_set<std::string> record_ids;
    ScoreRun run;
    struct Slot {
        const TamperRecord* record = nullptr;
        const Prediction* pred = nullptr;
    };
    std::vector<Slot> slots;
    for (const TamperRecord& rec : records) {
        record_ids.insert(rec.id);
        const auto it = by_id.find(rec.id);
        if (it == by_id.end()) {
            run.missing_predictions.push_back(rec.id);
        } else {
            slots.push_back({&rec, it->second});
        }
    }
    for (const Prediction& p : preds) {
        if (!record_ids.count(p.id)) run.unknown_ids.push_back(p.id);
    }

    std::vector<std::optional<SampleScore>> results(slots.size());
    std::vector<std::pair<std::string, std::string>> failures(slots.size());
    parallel_for(slots.size(), std::thread::hardware_concurrency(), [&](size_t i) {
        try {
            results[i] = score_sample(slots[i].pred->output_text, *slots[i].record, table,
                                      classify_max_edit);
        } catch (const Error& e) {
            failures[i] = {slots[i].record->id, e.what()};
        }
    });
    for (size_t i = 0; i < slots.size(); ++i) {
        if (results[i]) {
            run.rows.push_back(std::move(*results[i]));
        } else {
            run.failures.push_back(std::move(failures[i]));
        }
    }
    if (!run.rows.empty()) run.totals = aggregate(run.rows);
    return run;
}

nlohmann::json score_report_json(const ScoreRun& run) {
    nlohmann::json samples = nlohmann::json::array();
    for (const SampleScore& s : run.rows) {
        samples.push_back({{"id", s.id},
                           {"acc_ocr", s.acc_ocr},
                           {"sim_para", s.sim_para},
                           {"final", s.final_score},
                           {"classified_tampered", s.classified_tampered},
                           {"gt_tampered", s.gt_tampered},
                           {"correct", s.correct()},
                           {"sim_degenerate", s.sim_degenerate}});
    }
    nlohmann::json aggregate_block;
    if (!run.rows.empty()) {
        aggregate_block = {{"mean_acc_ocr", run.totals.mean_acc_ocr},
                           {"mean_sim_para", run.totals.mean_sim_para},
                           {"mean_final", run.totals.mean_final},
                           {"classification_accuracy", run.totals.classification_accuracy},
                           {"sample_count", run.totals.sample_count}};
        nlohmann::json tampered_block;
        if (run.totals.tampered_count > 0) {
            tampered_block = {{"mean_acc_ocr", run.totals.tampered_mean_acc_ocr},
                              {"mean_sim_para", run.totals.tampered_mean_sim_para},
                              {"mean_final", run.totals.tampered_mean_final},
                              {"sample_count", run.totals.tampered_count}};
        } else {
            tampered_block = {{"sample_count", 0}};
        }
        aggregate_block["tampered_only"] = tampered_block;
    }
    nlohmann::json report = {{"samples", samples}, {"aggregate", aggregate_block}};
    if (!run.missing_predictions.empty()) report["missing_predictions"] = run.missing_predictions;
    if (!run.unknown_ids.empty()) report["unknown_ids"] = run.unknown_ids;
    if (!run.failures.empty()) {
        nlohmann::json fails = nlohmann::json::array();
        for (const auto& [id, msg] : run.failures) {
            fails.push_back({{"id", id}, {"error", msg}});
        }
        report["failures"] = fails;
    }
    return report;
}

void write_score_csv(const ScoreRun& run, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << "id,acc_ocr,sim_para,final,classified_tampered,gt_tampered,correct\n";
    for (const SampleScore& s : run.rows) {
        out << s.id << ',' << s.acc_ocr << ',' << s.sim_para << ',' << s.final_score << ','
            << (s.classified_tampered ? 1 : 0) << ',' << (s.gt_tampered ? 1 : 0) << ','
            << (s.correct() ? 1 : 0) << '\n';
    }
    if (!out) throw IoError("write failed for " + path.string());
}

std::vector<BoxPrediction> read_box_predictions(const std::filesystem::path& jsonl_path) {
    std::vector<BoxPrediction> preds;
    for_each_jsonl(jsonl_path, [&](size_t line_no, const nlohmann::json& j) {
        if (!j.contains("id") || !j["id"].is_string()) {
            throw SchemaError(jsonl_path.string(), line_no, "missing string field 'id'");
        }
        BoxPrediction bp;
        bp.id = j["id"].get<std::string>();
        if (j.contains("boxes")) {
            if (!j["boxes"].is_array()) {
                throw SchemaError(jsonl_path.string(), line_no, "'boxes' must be an array");
            }
            for (const nlohmann::json& b : j["boxes"]) {
                if (!b.is_array() || b.size() != 4) {
                    throw SchemaError(jsonl_path.string(), line_no,
                                      "each box must be [x_min, y_min, x_max, y_max]");
                }
                bp.boxes.push_back(
                    {b[0].get<int>(), b[1].get<int>(), b[2].get<int>(), b[3].get<int>()});
            }
        }
        preds.push_back(std::move(bp));
    });
    return preds;
}

DetectionEval detect_eval_corpus(const std::filesystem::path& predictions_jsonl,
                                 const std::filesystem::path& manifest_path,
                                 double iou_thresh) {
    const std::vector<TamperRecord> records = read_manifest(manifest_path);
    const std::vector<BoxPrediction> preds = read_box_predictions(predictions_jsonl);

    std::unordered_map<std::string, const BoxPrediction*> by_id;
    for (const BoxPrediction& p : preds) by_id[p.id] = &p;
    std::unordered_set<std::string> record_ids;

    DetectionEval eval;
    size_t total_tp = 0;
    size_t total_preds = 0;
    size_t total_gts = 0;
    for (const TamperRecord& rec : records) {
        record_ids.insert(rec.id);
        const auto it = by_id.find(rec.id);
        const std::vector<BBox> pred_boxes = it == by_id.end() ? std::vector<BBox>{}
                                                               : it->second->boxes;
        if (it == by_id.end()) eval.missing_predictions.push_back(rec.id);
        const DetectionPRF prf = detection_prf(pred_boxes, rec.boxes, iou_thresh);
        eval.per_image.emplace_back(rec.id, prf);
        total_tp += prf.true_positives;
        total_preds += pred_boxes.size();
        total_gts += rec.boxes.size();
    }
    for (const BoxPrediction& p : preds) {
        if (!record_ids.count(p.id)) eval.unknown_ids.push_back(p.id);
    }

    if (total_preds == 0 && total_gts == 0) {
        eval.totals.precision = eval.totals.recall = eval.totals.f1 = 1.0;
    } else if (total_preds > 0 && total_gts > 0) {
        eval.totals.true_positives = total_tp;
        eval.totals.precision = static_cast<double>(total_tp) / static_cast<double>(total_preds);
        eval.totals.recall = static_cast<double>(total_tp) / static_cast<double>(total_gts);
        if (eval.totals.precision + eval.totals.recall > 0.0) {
            eval.totals.f1 = 2.0 * eval.totals.precision * eval.totals.recall /
                             (eval.totals.precision + eval.totals.recall);
        }
    }
    return eval;
}

nlohmann::json detection_report_json(const DetectionEval& eval, double iou_thresh) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& [id, prf] : eval.per_image) {
        rows.push_back({{"id", id},
                        {"precision", prf.precision},
                        {"recall", prf.recall},
                        {"f1", prf.f1},
                        {"true_positives", prf.true_positives}});
    }
    nlohmann::json report = {{"iou_threshold", iou_thresh},
                             {"precision", eval.totals.precision},
                             {"recall", eval.totals.recall},
                             {"f1", eval.totals.f1},
                             {"per_image", rows}};
    if (!eval.missing_predictions.empty()) report["missing_predictions"] = eval.missing_predictions;
    if (!eval.unknown_ids.empty()) report["unknown_ids"] = eval.unknown_ids;
    return report;
}

} // namespace tamperkit
