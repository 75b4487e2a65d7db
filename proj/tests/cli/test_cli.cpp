#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "pipeline_fixtures.hpp"

#include "tamperkit/annotator.hpp"
#include "tamperkit/dataset.hpp"
#include "tamperkit/image_io.hpp"

#include <fstream>

using namespace tamperkit;
using pipeline::run_cli;

namespace {

const std::string kFixtures = TAMPERKIT_FIXTURES_DIR;

nlohmann::json load_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    REQUIRE_MESSAGE(in.good(), "cannot open " << path.string());
    return nlohmann::json::parse(in);
}

} // namespace

TEST_CASE("render-prompt grounding prints the formatted auxiliary prompt") {
    const pipeline::CliResult r =
        run_cli("render-prompt grounding --box 500,250,1500,750 --size 2000x1000");
    CHECK(r.exit_code == 0);
    CHECK(r.output == "The suspected tampered text <box>[[250, 250, 750, 750]]</box>\n");
}

TEST_CASE("render-prompt annotation matches the embedded golden text") {
    const auto dir = pipeline::fresh_dir("tamperkit_cli_render");
    const pipeline::CliResult r =
        run_cli("render-prompt annotation --out " + (dir / "query.txt").string());
    CHECK(r.exit_code == 0);

    std::ifstream got_file(dir / "query.txt", std::ios::binary);
    const std::string got((std::istreambuf_iterator<char>(got_file)),
                          std::istreambuf_iterator<char>());
    std::ifstream want_file(kFixtures + "/annotation_query_v1.txt", std::ios::binary);
    const std::string want((std::istreambuf_iterator<char>(want_file)),
                           std::istreambuf_iterator<char>());
    CHECK(got == want);
}

TEST_CASE("render-prompt inference modes") {
    CHECK(run_cli("render-prompt inference --mode fine-tuned").output ==
          "What is the tampered text in this image, why?\n");
    const pipeline::CliResult zero = run_cli("render-prompt inference --mode zero-shot");
    CHECK(zero.output.rfind("Does this image have tampered text on it?", 0) == 0);
    CHECK(run_cli("render-prompt inference --mode bogus").exit_code == 1);
}

TEST_CASE("score on the shipped ten-sample fixture reproduces the golden report") {
    const auto dir = pipeline::fresh_dir("tamperkit_cli_score10");
    const pipeline::CliResult r = run_cli(
        "score --pred " + kFixtures + "/score10/preds.jsonl --manifest " + kFixtures +
        "/score10/manifest.jsonl --vectors " + kFixtures + "/wordvecs_16d.txt --out " +
        (dir / "report.json").string() + " --csv " + (dir / "report.csv").string());
    CHECK(r.exit_code == 0);

    const nlohmann::json got = load_json(dir / "report.json");
    const nlohmann::json want = load_json(kFixtures + "/score10/report_golden.json");
    CHECK(got == want);

    std::ifstream csv(dir / "report.csv");
    std::string header;
    std::getline(csv, header);
    CHECK(header == "id,acc_ocr,sim_para,final,classified_tampered,gt_tampered,correct");
    size_t rows = 0;
    for (std::string line; std::getline(csv, line);) {
        if (!line.empty()) ++rows;
    }
    CHECK(rows == 10);
}

TEST_CASE("forge then stats conserves the requested counts") {
    const auto src = pipeline::fresh_dir("tamperkit_cli_forge_src");
    pipeline::make_source_corpus(src);
    const auto corpus = pipeline::fresh_dir("tamperkit_cli_forge_out");

    const pipeline::CliResult forged =
        run_cli("forge --src " + src.string() + " --out " + corpus.string() +
                " --tampered 6 --authentic 4 --method mixed --blend --seed 11");
    CHECK(forged.exit_code == 0);

    const auto stats_out = corpus / "stats.json";
    const pipeline::CliResult stats = run_cli(
        "stats --manifest " + (corpus / "manifest.jsonl").string() + " --out " +
        stats_out.string());
    CHECK(stats.exit_code == 0);
    const nlohmann::json j = load_json(stats_out);
    CHECK(j["tampered"] == 6);
    CHECK(j["authentic"] == 4);
    CHECK(j["total"] == 10);
    CHECK(j["forged_area"].is_number());

    // Forged masks are rectangle-exact, so each record carries one box.
    for (const TamperRecord& rec : read_manifest(corpus / "manifest.jsonl")) {
        if (rec.tampered()) CHECK(rec.boxes.size() == 1);
    }

    // Single-method runs conserve counts per method too.
    const auto cm_corpus = pipeline::fresh_dir("tamperkit_cli_forge_cm");
    CHECK(run_cli("forge --src " + src.string() + " --out " + cm_corpus.string() +
                  " --tampered 3 --authentic 0 --method copy-move --blend --seed 2")
              .exit_code == 0);
    size_t copy_moves = 0;
    for (const TamperRecord& rec : read_manifest(cm_corpus / "manifest.jsonl")) {
        CHECK(rec.method == Method::CopyMove);
        ++copy_moves;
    }
    CHECK(copy_moves == 3);
}

TEST_CASE("forge is deterministic for a fixed seed") {
    const auto src = pipeline::fresh_dir("tamperkit_cli_det_src");
    pipeline::make_source_corpus(src);
    const auto a = pipeline::fresh_dir("tamperkit_cli_det_a");
    const auto b = pipeline::fresh_dir("tamperkit_cli_det_b");
    const std::string args = " --tampered 4 --authentic 2 --method mixed --seed 99";
    CHECK(run_cli("forge --src " + src.string() + " --out " + a.string() + args).exit_code == 0);
    CHECK(run_cli("forge --src " + src.string() + " --out " + b.string() + args).exit_code == 0);

    const std::vector<TamperRecord> ra = read_manifest(a / "manifest.jsonl");
    const std::vector<TamperRecord> rb = read_manifest(b / "manifest.jsonl");
    REQUIRE(ra.size() == rb.size());
    for (size_t i = 0; i < ra.size(); ++i) {
        CHECK(ra[i].id == rb[i].id);
        CHECK(ra[i].gt_ocr == rb[i].gt_ocr);
        CHECK(ra[i].boxes == rb[i].boxes);
        const ImageBuf ia = read_image(a / ra[i].image_path);
        const ImageBuf ib = read_image(b / rb[i].image_path);
        CHECK(ia.data == ib.data);
    }
}

TEST_CASE("mock annotate, filter and score run end to end") {
    const auto src = pipeline::fresh_dir("tamperkit_cli_e2e_src");
    pipeline::make_source_corpus(src);
    const auto corpus = pipeline::fresh_dir("tamperkit_cli_e2e_corpus");
    REQUIRE(run_cli("forge --src " + src.string() + " --out " + corpus.string() +
                    " --tampered 5 --authentic 3 --method mixed --seed 3")
                .exit_code == 0);

    const auto fixtures = pipeline::fresh_dir("tamperkit_cli_e2e_fixtures");
    pipeline::write_mock_fixtures(corpus / "manifest.jsonl", fixtures);

    const auto responses = corpus / "responses.jsonl";
    const pipeline::CliResult annotate =
        run_cli("annotate --manifest " + (corpus / "manifest.jsonl").string() +
                " --fixtures " + fixtures.string() + " --out " + responses.string());
    CHECK(annotate.exit_code == 0);

    const pipeline::CliResult filter = run_cli(
        "filter --responses " + responses.string() + " --manifest " +
        (corpus / "manifest.jsonl").string() + " --out " + (corpus / "decisions.jsonl").string() +
        " --manifest-out " + (corpus / "manifest.filtered.jsonl").string());
    CHECK(filter.exit_code == 0);

    // Record index 4 got a scrambled OCR reply and must be gone.
    const std::vector<TamperRecord> filtered =
        read_manifest(corpus / "manifest.filtered.jsonl");
    size_t tampered = 0;
    for (const TamperRecord& rec : filtered) {
        if (rec.tampered()) {
            ++tampered;
            CHECK(rec.description.find("\"" + *rec.gt_ocr + "\"") != std::string::npos);
        }
    }
    CHECK(tampered == 4);

    const auto preds = corpus / "preds.jsonl";
    pipeline::write_predictions(corpus / "manifest.filtered.jsonl", preds);
    const pipeline::CliResult score =
        run_cli("score --pred " + preds.string() + " --manifest " +
                (corpus / "manifest.filtered.jsonl").string() + " --vectors " + kFixtures +
                "/wordvecs_16d.txt --out " + (corpus / "report.json").string());
    CHECK(score.exit_code == 0);
    CHECK(load_json(corpus / "report.json")["aggregate"]["sample_count"] == 7);
}

TEST_CASE("annotate without a client configuration fails fast") {
    const pipeline::CliResult r = run_cli("annotate --manifest nope.jsonl --out x.jsonl");
    CHECK(r.exit_code == 1);
    CHECK(r.output.find("error:") != std::string::npos);
}

TEST_CASE("perturb rejects invalid distortion parameters") {
    const auto dir = pipeline::fresh_dir("tamperkit_cli_perturb_bad");
    const pipeline::CliResult bad = run_cli(
        "perturb --manifest missing.jsonl --out " + (dir / "m.jsonl").string() +
        " --distortion jpeg:0");
    CHECK(bad.exit_code == 1);
}

TEST_CASE("score reports partial failure for missing predictions") {
    const auto dir = pipeline::fresh_dir("tamperkit_cli_partial");
    std::ofstream preds(dir / "preds.jsonl");
    preds << nlohmann::json{{"id", "t01"},
                            {"output_text", authentic_annotation()}}.dump()
          << "\n";
    preds.close();
    const pipeline::CliResult r = run_cli(
        "score --pred " + (dir / "preds.jsonl").string() + " --manifest " + kFixtures +
        "/score10/manifest.jsonl --vectors " + kFixtures + "/wordvecs_16d.txt --out " +
        (dir / "report.json").string());
    CHECK(r.exit_code == 2);
    const nlohmann::json report = load_json(dir / "report.json");
    CHECK(report["missing_predictions"].size() == 9);
}

TEST_CASE("detect-eval scores ground-truth boxes perfectly") {
    const auto dir = pipeline::fresh_dir("tamperkit_cli_detect");
    std::ofstream preds(dir / "boxes.jsonl");
    for (const TamperRecord& rec :
         read_manifest(std::filesystem::path(kFixtures) / "score10/manifest.jsonl")) {
        nlohmann::json boxes = nlohmann::json::array();
        for (const BBox& b : rec.boxes) boxes.push_back({b.x_min, b.y_min, b.x_max, b.y_max});
        preds << nlohmann::json{{"id", rec.id}, {"boxes", boxes}}.dump() << "\n";
    }
    preds.close();

    const pipeline::CliResult r = run_cli(
        "detect-eval --pred " + (dir / "boxes.jsonl").string() + " --manifest " + kFixtures +
        "/score10/manifest.jsonl --iou 0.5 --out " + (dir / "det.json").string());
    CHECK(r.exit_code == 0);
    const nlohmann::json report = load_json(dir / "det.json");
    CHECK(report["precision"] == 1.0);
    CHECK(report["recall"] == 1.0);
    CHECK(report["f1"] == 1.0);
}

TEST_CASE("config file drives the score subcommand") {
    const auto dir = pipeline::fresh_dir("tamperkit_cli_config");
    {
        std::ofstream cfg(dir / "tk.conf");
        cfg << "[scoring]\n";
        cfg << "word_vectors = " << kFixtures << "/wordvecs_16d.txt\n";
        cfg << "classify_max_edit = 3\n";
    }
    const pipeline::CliResult r = run_cli(
        "score --pred " + kFixtures + "/score10/preds.jsonl --manifest " + kFixtures +
        "/score10/manifest.jsonl --config " + (dir / "tk.conf").string() + " --out " +
        (dir / "report.json").string());
    CHECK(r.exit_code == 0);
    CHECK(load_json(dir / "report.json") ==
          load_json(kFixtures + "/score10/report_golden.json"));

    const pipeline::CliResult bad =
        run_cli("score --pred x --manifest y --config " + (dir / "missing.conf").string());
    CHECK(bad.exit_code == 1);
}

TEST_CASE("unknown flags and subcommands exit with a validation error") {
    CHECK(run_cli("frobnicate").exit_code == 1);
    CHECK(run_cli("score --bogus-flag 1").exit_code == 1);
    CHECK(run_cli("--help").exit_code == 0);
}
