#include "tamperkit/annotator.hpp"
#include "tamperkit/config.hpp"
#include "tamperkit/dataset.hpp"
#include "tamperkit/errors.hpp"
#include "tamperkit/forge.hpp"
#include "tamperkit/metrics.hpp"
#include "tamperkit/prompts.hpp"
#include "tamperkit/robustness.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>

namespace {

using namespace tamperkit;

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitPartial = 2;

void write_text(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot open " + path + " for writing");
    out << content;
    if (!out) throw IoError("write failed for " + path);
}

void emit(const std::string& out_path, const nlohmann::json& j) {
    write_text(out_path, j.dump(2) + "\n");
}

BBox parse_box_flag(const std::string& s) {
    BBox box;
    if (std::sscanf(s.c_str(), "%d,%d,%d,%d", &box.x_min, &box.y_min, &box.x_max,
                    &box.y_max) != 4) {
        throw SchemaError("cannot parse box '" + s + "', expected x_min,y_min,x_max,y_max");
    }
    return box;
}

std::pair<int, int> parse_size_flag(const std::string& s) {
    int w = 0;
    int h = 0;
    if (std::sscanf(s.c_str(), "%dx%d", &w, &h) != 2 || w < 1 || h < 1) {
        throw SchemaError("cannot parse size '" + s + "', expected WxH");
    }
    return {w, h};
}

SplitRatios parse_ratios_flag(const std::string& s) {
    SplitRatios r;
    if (std::sscanf(s.c_str(), "%lf,%lf,%lf", &r.train, &r.test, &r.cd) != 3) {
        throw SchemaError("cannot parse split ratios '" + s + "', expected train,test,cd");
    }
    return r;
}

void print_failures(const std::vector<std::pair<std::string, std::string>>& failures) {
    for (const auto& [id, msg] : failures) {
        std::cout << "  failed " << id << ": " << msg << "\n";
    }
}

struct CommonFlags {
    std::string config_path;

    Config load() const {
        Config cfg;
        if (!config_path.empty()) cfg = load_config(config_path);
        return cfg;
    }
};

int run_forge(const CommonFlags& common, const std::string& src, const std::string& out,
              int tampered, int authentic, const std::string& method, bool blend,
              uint64_t seed, const std::string& ratios) {
    Config cfg = common.load();
    ForgeOptions opts;
    opts.tampered = tampered;
    opts.authentic = authentic;
    opts.seed = seed;
    opts.blend = blend;
    opts.solver.tol = cfg.solver_tol;
    opts.solver.max_iters = cfg.solver_max_iters;
    if (!ratios.empty()) opts.ratios = parse_ratios_flag(ratios);
    if (method == "copy-move") opts.method = ForgeMethod::CopyMove;
    else if (method == "splicing") opts.method = ForgeMethod::Splicing;
    else if (method == "mixed") opts.method = ForgeMethod::Mixed;
    else throw SchemaError("unknown method '" + method + "'");

    const ForgeSummary summary = forge_corpus(src, out, opts);
    std::cout << "forged " << summary.forged << " tampered and " << summary.authentic
              << " authentic records into " << out << "\n";
    if (!summary.blend_fallbacks.empty()) {
        std::cout << "blend fell back to hard paste for " << summary.blend_fallbacks.size()
                  << " record(s):";
        for (const std::string& id : summary.blend_fallbacks) std::cout << ' ' << id;
        std::cout << "\n";
    }
    print_failures(summary.failures);
    return summary.failures.empty() ? kExitOk : kExitPartial;
}

int run_render_prompt(const std::string& kind, const std::string& mode, const std::string& box,
                      const std::string& size, const std::string& question,
                      const std::string& out_path) {
    std::string text;
    if (kind == "annotation") {
        text = build_annotation_query().text;
    } else if (kind == "inference") {
        if (mode == "fine-tuned") text = build_inference_query(InferenceMode::FineTuned);
        else if (mode == "zero-shot") text = build_inference_query(InferenceMode::ZeroShot);
        else throw SchemaError("unknown inference mode '" + mode + "'");
    } else if (kind == "grounding") {
        const auto [w, h] = parse_size_flag(size);
        const BBox b = parse_box_flag(box);
        text = question.empty() ? build_grounding_prompt(b, w, h).text
                                : build_grounded_query(b, w, h, question);
    } else {
        throw SchemaError("unknown prompt kind '" + kind + "'");
    }
    if (out_path.empty()) {
        std::cout << text << "\n";
    } else {
        write_text(out_path, text);
    }
    return kExitOk;
}

int run_annotate(const CommonFlags& common, const std::string& manifest,
                 const std::string& out, const std::string& fixtures,
                 const std::string& endpoint, const std::string& model) {
    Config cfg = common.load();
    if (!fixtures.empty()) cfg.fixtures_dir = fixtures;
    if (!endpoint.empty()) cfg.endpoint = endpoint;
    if (!model.empty()) cfg.model_id = model;

    std::unique_ptr<AnnotatorClient> client;
    if (!cfg.fixtures_dir.empty()) {
        client = std::make_unique<MockAnnotatorClient>(cfg.fixtures_dir);
    } else if (!cfg.endpoint.empty()) {
        HttpClientOptions http;
        http.endpoint = cfg.endpoint;
        http.model_id = cfg.model_id;
        http.api_key_env = cfg.api_key_env;
        http.temperature = cfg.temperature;
        client = std::make_unique<HttpAnnotatorClient>(http);
    } else {
        throw SchemaError("annotate needs --fixtures (mock) or an endpoint (config/--endpoint)");
    }

    AnnotateOptions opts;
    opts.model_id = cfg.model_id;
    opts.temperature = cfg.temperature;
    opts.max_retries = cfg.max_retries;
    opts.concurrency = cfg.concurrency;

    const AnnotateRun run = annotate_corpus(manifest, out, *client, opts);
    std::cout << "annotated " << run.succeeded << "/" << run.attempted
              << " tampered records -> " << out << "\n";
    print_failures(run.failures);
    return run.failures.empty() ? kExitOk : kExitPartial;
}

int run_filter(const CommonFlags& common, const std::string& responses,
               const std::string& manifest, const std::string& out,
               const std::string& manifest_out, double threshold_flag, bool has_threshold) {
    Config cfg = common.load();
    const double threshold = has_threshold ? threshold_flag : cfg.filter_threshold;
    const FilterRun run = filter_corpus(responses, manifest, out,
                                        manifest_out.empty() ? std::filesystem::path{}
                                                             : std::filesystem::path(manifest_out),
                                        threshold);
    std::cout << "kept " << run.kept << " / rejected " << run.rejected << " of "
              << run.evaluated << " responses (threshold " << threshold << ")\n";
    if (!run.missing_responses.empty()) {
        std::cout << run.missing_responses.size() << " tampered record(s) had no response\n";
    }
    return run.missing_responses.empty() ? kExitOk : kExitPartial;
}

int run_score(const CommonFlags& common, const std::string& pred, const std::string& manifest,
              const std::string& out, const std::string& csv, const std::string& vectors,
              const std::string& stopwords) {
    Config cfg = common.load();
    if (!vectors.empty()) cfg.word_vectors = vectors;
    if (!stopwords.empty()) cfg.stopwords = stopwords;
    if (cfg.word_vectors.empty()) {
        throw SchemaError("score needs a word-vector file (--vectors or config)");
    }
    const WordVectorTable table = WordVectorTable::load(
        cfg.word_vectors,
        cfg.stopwords.empty() ? std::filesystem::path{} : std::filesystem::path(cfg.stopwords));

    const ScoreRun run =
        score_corpus(pred, manifest, table, static_cast<size_t>(cfg.classify_max_edit));
    if (!out.empty()) emit(out, score_report_json(run));
    if (!csv.empty()) write_score_csv(run, csv);

    if (!run.rows.empty()) {
        std::cout << "scored " << run.rows.size() << " samples: acc_ocr "
                  << run.totals.mean_acc_ocr << ", sim_para " << run.totals.mean_sim_para
                  << ", final " << run.totals.mean_final << ", cls_acc "
                  << run.totals.classification_accuracy << "\n";
    } else {
        std::cout << "no samples scored\n";
    }
    if (!run.missing_predictions.empty()) {
        std::cout << run.missing_predictions.size() << " record(s) without predictions\n";
    }
    if (!run.unknown_ids.empty()) {
        std::cout << run.unknown_ids.size() << " prediction(s) with unknown ids\n";
    }
    print_failures(run.failures);
    const bool partial = !run.missing_predictions.empty() || !run.unknown_ids.empty() ||
                         !run.failures.empty();
    return partial ? kExitPartial : kExitOk;
}

int run_perturb(const std::string& manifest, const std::string& out,
                const std::string& distortion) {
    const Distortion d = Distortion::parse(distortion);
    const PerturbSummary summary = perturb_corpus(manifest, out, d);
    std::cout << "perturbed " << summary.processed << " record(s) with " << d.describe();
    if (!summary.codec_id.empty()) std::cout << " (" << summary.codec_id << ")";
    std::cout << " -> " << out << "\n";
    print_failures(summary.failures);
    return summary.failed == 0 ? kExitOk : kExitPartial;
}

int run_stats(const std::string& manifest, const std::string& out_path) {
    const std::vector<TamperRecord> records = read_manifest(manifest);
    const std::filesystem::path root = std::filesystem::path(manifest).has_parent_path()
                                           ? std::filesystem::path(manifest).parent_path()
                                           : std::filesystem::path(".");
    const CorpusStats stats = compute_stats(records, root);
    const nlohmann::json j = stats_to_json(stats);
    std::cout << "records " << stats.total << " (" << stats.tampered << " tampered, "
              << stats.authentic << " authentic)";
    if (stats.forged_area) std::cout << ", forged area " << *stats.forged_area;
    std::cout << "\n";
    if (!out_path.empty()) {
        emit(out_path, j);
    } else {
        std::cout << j.dump(2) << "\n";
    }
    return kExitOk;
}

int run_detect_eval(const CommonFlags& common, const std::string& pred,
                    const std::string& manifest, const std::string& out, double iou_flag,
                    bool has_iou) {
    Config cfg = common.load();
    const double thresh = has_iou ? iou_flag : cfg.iou_threshold;
    if (!(thresh > 0.0) || thresh > 1.0) {
        throw SchemaError("iou threshold must be in (0,1]");
    }
    const DetectionEval eval = detect_eval_corpus(pred, manifest, thresh);
    if (!out.empty()) emit(out, detection_report_json(eval, thresh));
    std::cout << "detection P " << eval.totals.precision << ", R " << eval.totals.recall
              << ", F1 " << eval.totals.f1 << " at IoU " << thresh << "\n";
    if (!eval.missing_predictions.empty()) {
        std::cout << eval.missing_predictions.size() << " record(s) without predictions\n";
    }
    const bool partial = !eval.missing_predictions.empty() || !eval.unknown_ids.empty();
    return partial ? kExitPartial : kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"tamperkit - tampered-text corpus forging, prompting and scoring"};
    app.require_subcommand(1);

    CommonFlags common;

    // forge
    auto* forge = app.add_subcommand("forge", "synthesize a tampered/authentic corpus");
    std::string forge_src, forge_out, forge_method = "mixed", forge_ratios;
    int forge_tampered = 0, forge_authentic = 0;
    bool forge_blend = true;
    uint64_t forge_seed = 0;
    forge->add_option("--src", forge_src, "directory of source images + .words.json sidecars")
        ->required();
    forge->add_option("--out", forge_out, "output corpus directory")->required();
    forge->add_option("--tampered", forge_tampered, "number of tampered records");
    forge->add_option("--authentic", forge_authentic, "number of authentic records");
    forge->add_option("--method", forge_method, "copy-move | splicing | mixed");
    forge->add_flag("--blend,!--no-blend", forge_blend, "poisson-blend pasted regions");
    forge->add_option("--seed", forge_seed, "deterministic run seed");
    forge->add_option("--split-ratios", forge_ratios, "train,test,cd ratios (default 1,0,0)");
    forge->add_option("--config", common.config_path, "config file");

    // render-prompt
    auto* render = app.add_subcommand("render-prompt", "print one of the pipeline prompts");
    std::string render_kind, render_mode = "fine-tuned", render_box, render_size;
    std::string render_question, render_out;
    render->add_option("kind", render_kind, "annotation | inference | grounding")->required();
    render->add_option("--mode", render_mode, "inference mode: fine-tuned | zero-shot");
    render->add_option("--box", render_box, "grounding box x_min,y_min,x_max,y_max");
    render->add_option("--size", render_size, "image size WxH for grounding");
    render->add_option("--question", render_question, "question appended after the grounding prompt");
    render->add_option("--out", render_out, "write to file instead of stdout");

    // annotate
    auto* annotate = app.add_subcommand("annotate", "query the annotator for tampered records");
    std::string ann_manifest, ann_out, ann_fixtures, ann_endpoint, ann_model;
    annotate->add_option("--manifest", ann_manifest, "input manifest")->required();
    annotate->add_option("--out", ann_out, "responses JSONL")->required();
    annotate->add_option("--fixtures", ann_fixtures, "mock fixtures directory");
    annotate->add_option("--endpoint", ann_endpoint, "chat-completions endpoint URL");
    annotate->add_option("--model", ann_model, "model id");
    annotate->add_option("--config", common.config_path, "config file");

    // filter
    auto* filter = app.add_subcommand("filter", "gate responses by OCR accuracy");
    std::string fil_responses, fil_manifest, fil_out, fil_manifest_out;
    double fil_threshold = 0.8;
    filter->add_option("--responses", fil_responses, "responses JSONL")->required();
    filter->add_option("--manifest", fil_manifest, "manifest with gt_ocr")->required();
    filter->add_option("--out", fil_out, "decisions JSONL")->required();
    filter->add_option("--manifest-out", fil_manifest_out,
                       "write filtered manifest (same directory layout)");
    auto* fil_thresh_opt = filter->add_option("--threshold", fil_threshold,
                                              "keep threshold (default 0.8)");
    filter->add_option("--config", common.config_path, "config file");

    // score
    auto* score = app.add_subcommand("score", "score predictions against a manifest");
    std::string sc_pred, sc_manifest, sc_out, sc_csv, sc_vectors, sc_stopwords;
    score->add_option("--pred", sc_pred, "predictions JSONL {id, output_text}")->required();
    score->add_option("--manifest", sc_manifest, "ground-truth manifest")->required();
    score->add_option("--out", sc_out, "report JSON");
    score->add_option("--csv", sc_csv, "per-sample CSV");
    score->add_option("--vectors", sc_vectors, "word-vector file");
    score->add_option("--stopwords", sc_stopwords, "stopword file (default: built-in list)");
    score->add_option("--config", common.config_path, "config file");

    // perturb
    auto* perturb = app.add_subcommand("perturb", "apply one distortion to a corpus");
    std::string pert_manifest, pert_out, pert_distortion;
    perturb->add_option("--manifest", pert_manifest, "input manifest")->required();
    perturb->add_option("--out", pert_out, "output manifest path")->required();
    perturb->add_option("--distortion", pert_distortion,
                        "identity | jpeg:<1..100> | resize:<0..1]")
        ->required();

    // stats
    auto* stats = app.add_subcommand("stats", "corpus statistics");
    std::string st_manifest, st_out;
    stats->add_option("--manifest", st_manifest, "manifest")->required();
    stats->add_option("--out", st_out, "stats JSON (default: stdout)");

    // detect-eval
    auto* detect = app.add_subcommand("detect-eval", "box detection precision/recall/F1");
    std::string det_pred, det_manifest, det_out;
    double det_iou = 0.5;
    detect->add_option("--pred", det_pred, "box predictions JSONL {id, boxes}")->required();
    detect->add_option("--manifest", det_manifest, "ground-truth manifest")->required();
    detect->add_option("--out", det_out, "report JSON");
    auto* det_iou_opt = detect->add_option("--iou", det_iou, "IoU threshold (default 0.5)");
    detect->add_option("--config", common.config_path, "config file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitValidation;
    }

    try {
        if (app.got_subcommand(forge)) {
            return run_forge(common, forge_src, forge_out, forge_tampered, forge_authentic,
                             forge_method, forge_blend, forge_seed, forge_ratios);
        }
        if (app.got_subcommand(render)) {
            return run_render_prompt(render_kind, render_mode, render_box, render_size,
                                     render_question, render_out);
        }
        if (app.got_subcommand(annotate)) {
            return run_annotate(common, ann_manifest, ann_out, ann_fixtures, ann_endpoint,
                                ann_model);
        }
        if (app.got_subcommand(filter)) {
            return run_filter(common, fil_responses, fil_manifest, fil_out, fil_manifest_out,
                              fil_threshold, fil_thresh_opt->count() > 0);
        }
        if (app.got_subcommand(score)) {
            return run_score(common, sc_pred, sc_manifest, sc_out, sc_csv, sc_vectors,
                             sc_stopwords);
        }
        if (app.got_subcommand(perturb)) {
            return run_perturb(pert_manifest, pert_out, pert_distortion);
        }
        if (app.got_subcommand(stats)) {
            return run_stats(st_manifest, st_out);
        }
        if (app.got_subcommand(detect)) {
            return run_detect_eval(common, det_pred, det_manifest, det_out, det_iou,
                                   det_iou_opt->count() > 0);
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    }
    return kExitValidation;
}
