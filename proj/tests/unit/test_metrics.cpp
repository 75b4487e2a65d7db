#include "tamperkit/metrics.hpp"

#include "tamperkit/annotator.hpp"
#include "tamperkit/rng.hpp"
#include "helpers.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <fstream>

using namespace tamperkit;

namespace {

// Three-dimensional toy table with hand-chosen vectors.
WordVectorTable toy_table() {
    WordVectorTable t;
    t.dimension = 3;
    t.entries["font"] = {1.0f, 2.0f, 2.0f};
    t.entries["edge"] = {2.0f, 1.0f, 2.0f};
    t.entries["texture"] = {0.0f, 1.0f, 0.0f};
    t.entries["blurry"] = {1.0f, 0.0f, 0.0f};
    t.entries["tampered"] = {0.5f, 0.5f, 1.0f};
    t.entries["text"] = {1.0f, 1.0f, 0.0f};
    t.entries["different"] = {0.25f, 0.5f, 0.75f};
    t.stopwords = default_stopwords();
    return t;
}

TamperRecord tampered_record(const std::string& ocr, const std::string& description) {
    TamperRecord r;
    r.id = "t0";
    r.image_path = "images/t0.png";
    r.mask_path = "masks/t0.png";
    r.method = Method::CopyMove;
    r.gt_ocr = ocr;
    r.description = description;
    r.boxes = {BBox{1, 1, 5, 5}};
    return r;
}

TamperRecord authentic_record() {
    TamperRecord r;
    r.id = "a0";
    r.image_path = "images/a0.png";
    r.method = Method::Authentic;
    r.description = authentic_annotation();
    return r;
}

} // namespace

TEST_CASE("edit distance textbook cases") {
    CHECK(edit_distance("", "abc") == 3);
    CHECK(edit_distance("kitten", "sitting") == oracle::levenshtein_full_matrix("kitten", "sitting"));
    CHECK(edit_distance("kitten", "sitting") == 3);
    CHECK(edit_distance("same string", "same string") == 0);
}

TEST_CASE("edit distance agrees with the full-matrix oracle on random strings") {
    SplitMix rng(99);
    const std::string alphabet = "abcdeXYZ01 ";
    for (int round = 0; round < 60; ++round) {
        std::string a;
        std::string b;
        const size_t la = rng.below(12);
        const size_t lb = rng.below(12);
        for (size_t i = 0; i < la; ++i) a.push_back(alphabet[rng.below(alphabet.size())]);
        for (size_t i = 0; i < lb; ++i) b.push_back(alphabet[rng.below(alphabet.size())]);
        CHECK(edit_distance(a, b) == oracle::levenshtein_full_matrix(a, b));
        CHECK(edit_distance(a, b) == edit_distance(b, a));
    }
}

TEST_CASE("edit distance counts Unicode scalars, not bytes") {
    // Two three-byte characters, one substitution apart.
    CHECK(edit_distance("\xe6\x96\x87", "\xe5\xad\x97") == 1);
    CHECK(edit_distance("", "\xe6\x96\x87\xe5\xad\x97") == 2);
}

TEST_CASE("acc_ocr examples") {
    CHECK(acc_ocr("INVOICE", "INVOICE") == 1.0);
    CHECK(acc_ocr("", "ABCD") == 0.0);
    CHECK(acc_ocr("", "") == 1.0);
    // ED("INV0ICE","INVOICE") = 1 per the DP oracle, max length 7.
    CHECK(oracle::levenshtein_full_matrix("INV0ICE", "INVOICE") == 1);
    CHECK(acc_ocr("INV0ICE", "INVOICE") == doctest::Approx(6.0 / 7.0));
}

TEST_CASE("acc_ocr is symmetric and bounded") {
    SplitMix rng(3);
    const std::string alphabet = "abcXYZ09";
    for (int round = 0; round < 40; ++round) {
        std::string a;
        std::string b;
        for (size_t i = rng.below(9); i > 0; --i) a.push_back(alphabet[rng.below(8)]);
        for (size_t i = rng.below(9); i > 0; --i) b.push_back(alphabet[rng.below(8)]);
        const double v = acc_ocr(a, b);
        CHECK(v == acc_ocr(b, a));
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
        CHECK(acc_ocr(a, a) == 1.0);
    }
}

TEST_CASE("word vector file loading") {
    const auto dir = testkit::fresh_temp_dir("tamperkit_wordvec_test");
    {
        std::ofstream out(dir / "vecs.txt");
        out << "3 4\n";
        out << "Font 1 2 2 0\n";
        out << "edge 2 1 2 0\n";
        out << "texture 0 1 0 1\n";
    }
    const WordVectorTable table = WordVectorTable::load(dir / "vecs.txt");
    CHECK(table.dimension == 4);
    CHECK(table.entries.size() == 3);
    REQUIRE(table.lookup("FONT") != nullptr); // case-folded lookup
    CHECK((*table.lookup("font"))[1] == 2.0f);
    CHECK(table.is_stopword("the"));

    {
        std::ofstream out(dir / "bad.txt");
        out << "font 1 2\n";
        out << "edge 1 2 3\n";
    }
    CHECK_THROWS_AS(WordVectorTable::load(dir / "bad.txt"), SchemaError);
    CHECK_THROWS_AS(WordVectorTable::load(dir / "missing.txt"), IoError);

    {
        std::ofstream out(dir / "stops.txt");
        out << "FONT\nzzz\n";
    }
    const WordVectorTable custom = WordVectorTable::load(dir / "vecs.txt", dir / "stops.txt");
    CHECK(custom.is_stopword("font"));
    CHECK_FALSE(custom.is_stopword("the"));
}

TEST_CASE("paragraph vector averaging") {
    const WordVectorTable table = toy_table();

    const ParagraphVector stopword_only = paragraph_vector("the of and is", table, false);
    CHECK(stopword_only.degenerate());
    for (double c : stopword_only.components) CHECK(c == 0.0);

    const ParagraphVector single = paragraph_vector("font", table, false);
    CHECK(single.contributing_words == 1);
    CHECK(single.components == std::vector<double>{1.0, 2.0, 2.0});

    // Hand average of font (1,2,2) and edge (2,1,2).
    const ParagraphVector pair = paragraph_vector("font edge", table, false);
    CHECK(pair.contributing_words == 2);
    CHECK(pair.components == std::vector<double>{1.5, 1.5, 2.0});

    // OOV tokens drop out.
    const ParagraphVector oov = paragraph_vector("font qqqq", table, false);
    CHECK(oov.contributing_words == 1);

    // Quoted spans drop out before tokenizing.
    const ParagraphVector stripped =
        paragraph_vector("the \"font edge\" texture", table, true);
    CHECK(stripped.contributing_words == 1);
    CHECK(stripped.components == std::vector<double>{0.0, 1.0, 0.0});
}

TEST_CASE("cosine similarity") {
    ParagraphVector a;
    a.components = {1.0, 2.0, 2.0};
    a.contributing_words = 1;
    ParagraphVector b;
    b.components = {2.0, 1.0, 2.0};
    b.contributing_words = 1;

    CHECK(cosine(a, a) == doctest::Approx(1.0));
    CHECK(cosine(a, b) == doctest::Approx(8.0 / 9.0));

    ParagraphVector x;
    x.components = {1.0, 0.0, 0.0};
    x.contributing_words = 1;
    ParagraphVector y;
    y.components = {0.0, 1.0, 0.0};
    y.contributing_words = 1;
    CHECK(cosine(x, y) == 0.0);

    // Positive scaling of either side is irrelevant.
    ParagraphVector scaled = b;
    for (double& c : scaled.components) c *= 37.5;
    CHECK(cosine(a, scaled) == doctest::Approx(cosine(a, b)));

    ParagraphVector degenerate;
    degenerate.components = {0.0, 0.0, 0.0};
    CHECK(cosine(a, degenerate) == 0.0);

    ParagraphVector wrong;
    wrong.components = {1.0, 2.0};
    wrong.contributing_words = 1;
    CHECK_THROWS_AS(cosine(a, wrong), DimensionError);
}

TEST_CASE("classification rule around the authentic sentence") {
    const std::string authentic = authentic_annotation();
    CHECK_FALSE(classify_tampered(authentic));
    CHECK_FALSE(classify_tampered(authentic.substr(0, authentic.size() - 1))); // drop period

    const std::string tampered_reply =
        "Yes, the text \"LOT\" is tampered, the font looks unnatural.";
    CHECK(oracle::levenshtein_full_matrix(tampered_reply, authentic) > 3);
    CHECK(classify_tampered(tampered_reply));

    // Up to three trailing whitespace characters keep the verdict.
    CHECK_FALSE(classify_tampered(authentic + " "));
    CHECK_FALSE(classify_tampered(authentic + "  "));
    CHECK_FALSE(classify_tampered(authentic + "   "));
    CHECK(classify_tampered(authentic + "    "));
}

TEST_CASE("finalize_score implements the weighted sum with zeroing") {
    SplitMix rng(123);
    for (int round = 0; round < 50; ++round) {
        const double acc = static_cast<double>(rng.below(10001)) / 10000.0;
        const double sim = static_cast<double>(rng.below(10001)) / 10000.0;
        const SampleScore matched = finalize_score(true, true, acc, sim);
        CHECK(matched.final_score == doctest::Approx(0.3 * acc + 0.7 * sim).epsilon(1e-12));
        CHECK(matched.acc_ocr == acc);
        CHECK(matched.sim_para == sim);

        const SampleScore mismatched = finalize_score(false, true, acc, sim);
        CHECK(mismatched.sim_para == 0.0);
        CHECK(mismatched.acc_ocr == 0.0);
        CHECK(mismatched.final_score == 0.0);
    }
}

TEST_CASE("score_sample end to end") {
    const WordVectorTable table = toy_table();
    const std::string description =
        "The tampered text is \"INVOICE\". The font of the tampered text looks blurry.";
    const TamperRecord rec = tampered_record("INVOICE", description);

    SUBCASE("perfect prediction scores 1") {
        const SampleScore s = score_sample(description, rec, table);
        CHECK(s.classified_tampered);
        CHECK(s.acc_ocr == 1.0);
        CHECK(s.sim_para == doctest::Approx(1.0));
        CHECK(s.final_score == doctest::Approx(1.0));
    }

    SUBCASE("authentic answer on a tampered record scores 0") {
        const SampleScore s = score_sample(authentic_annotation(), rec, table);
        CHECK_FALSE(s.classified_tampered);
        CHECK(s.final_score == 0.0);
        CHECK(s.sim_para == 0.0);
        CHECK(s.acc_ocr == 0.0);
    }

    SUBCASE("correct authentic sample scores acc=sim=1") {
        const SampleScore s = score_sample(authentic_annotation(), authentic_record(), table);
        CHECK(s.acc_ocr == 1.0);
        CHECK(s.sim_para == 1.0);
        CHECK(s.final_score == doctest::Approx(1.0));
    }

    SUBCASE("quoted content in the body does not move the paragraph score") {
        const std::string variant =
            "The tampered text is \"INVOICE\". The font of the \"zzz qqq\" tampered text "
            "looks blurry.";
        const std::string baseline =
            "The tampered text is \"INVOICE\". The font of the \"edge texture\" tampered "
            "text looks blurry.";
        const SampleScore a = score_sample(variant, rec, table);
        const SampleScore b = score_sample(baseline, rec, table);
        CHECK(a.sim_para == doctest::Approx(b.sim_para));
    }

    SUBCASE("missing ground truth is rejected") {
        TamperRecord broken = rec;
        broken.description.clear();
        CHECK_THROWS_AS(score_sample(description, broken, table), MissingGroundTruth);
    }

    SUBCASE("monotone in accuracy with similarity fixed") {
        // Same paragraph, increasingly wrong quoted OCR.
        const std::string good = description;
        const std::string mid =
            "The tampered text is \"INVOIXE\". The font of the tampered text looks blurry.";
        const std::string bad =
            "The tampered text is \"INXXIXE\". The font of the tampered text looks blurry.";
        const double f1 = score_sample(good, rec, table).final_score;
        const double f2 = score_sample(mid, rec, table).final_score;
        const double f3 = score_sample(bad, rec, table).final_score;
        CHECK(f1 >= f2);
        CHECK(f2 >= f3);
    }
}

TEST_CASE("aggregate means on the percent scale") {
    CHECK_THROWS_AS(aggregate({}), EmptyInput);

    SampleScore one = finalize_score(true, true, 0.9, 0.8);
    one.id = "x";
    const AggregateReport single = aggregate({one});
    CHECK(single.mean_acc_ocr == doctest::Approx(90.0));
    CHECK(single.mean_sim_para == doctest::Approx(80.0));
    CHECK(single.mean_final == doctest::Approx(100.0 * (0.3 * 0.9 + 0.7 * 0.8)));
    CHECK(single.classification_accuracy == 100.0);

    const SampleScore full = finalize_score(true, true, 1.0, 1.0);
    const SampleScore zero = finalize_score(false, true, 0.0, 0.0);
    const AggregateReport pair = aggregate({full, zero});
    CHECK(pair.mean_final == doctest::Approx(50.0));
    CHECK(pair.classification_accuracy == doctest::Approx(50.0));
}

TEST_CASE("aggregate matches a hand-computed ten-sample sheet") {
    // Fixed roster; expected means computed by hand:
    //   acc:  (1.0+0.9+0.8+0.7+0.6+0.5+0+1+1+0) / 10   = 0.65  -> 65.0
    //   sim:  (1.0+0.8+0.6+0.4+0.2+0.0+0+1+1+0) / 10   = 0.50  -> 50.0
    //   final on matches = 0.3 acc + 0.7 sim, zeros on the two mismatches.
    std::vector<SampleScore> rows;
    const double accs[6] = {1.0, 0.9, 0.8, 0.7, 0.6, 0.5};
    const double sims[6] = {1.0, 0.8, 0.6, 0.4, 0.2, 0.0};
    for (int i = 0; i < 6; ++i) rows.push_back(finalize_score(true, true, accs[i], sims[i]));
    rows.push_back(finalize_score(false, true, 0.0, 0.0));  // miss
    rows.push_back(finalize_score(false, false, 1.0, 1.0)); // correct authentic
    rows.push_back(finalize_score(false, false, 1.0, 1.0)); // correct authentic
    rows.push_back(finalize_score(true, false, 0.0, 0.0));  // false positive

    const AggregateReport r = aggregate(rows);
    CHECK(r.mean_acc_ocr == doctest::Approx(65.0));
    CHECK(r.mean_sim_para == doctest::Approx(50.0));
    double final_sum = 0.0;
    for (int i = 0; i < 6; ++i) final_sum += 0.3 * accs[i] + 0.7 * sims[i];
    final_sum += 0.0 + 1.0 + 1.0 + 0.0;
    CHECK(r.mean_final == doctest::Approx(final_sum / 10.0 * 100.0));
    CHECK(r.classification_accuracy == doctest::Approx(80.0));
    CHECK(r.tampered_count == 7);
    CHECK(r.tampered_mean_acc_ocr == doctest::Approx((4.5 + 0.0) / 7.0 * 100.0));
}

TEST_CASE("detection matching") {
    const std::vector<BBox> gts = {{0, 0, 10, 10}, {20, 20, 30, 30}};

    SUBCASE("ground truth as predictions is perfect") {
        const DetectionPRF prf = detection_prf(gts, gts, 0.5);
        CHECK(prf.precision == 1.0);
        CHECK(prf.recall == 1.0);
        CHECK(prf.f1 == 1.0);
    }

    SUBCASE("empty predictions") {
        const DetectionPRF prf = detection_prf({}, gts, 0.5);
        CHECK(prf.precision == 0.0);
        CHECK(prf.recall == 0.0);
        CHECK(prf.f1 == 0.0);
    }

    SUBCASE("both sides empty") {
        const DetectionPRF prf = detection_prf({}, {}, 0.5);
        CHECK(prf.precision == 1.0);
        CHECK(prf.recall == 1.0);
        CHECK(prf.f1 == 1.0);
    }

    SUBCASE("overlap below threshold does not match") {
        // IoU 1/3 pair plus a disjoint pred; nothing crosses 0.5.
        const std::vector<BBox> preds = {{5, 0, 15, 10}, {50, 50, 60, 60}};
        const DetectionPRF prf = detection_prf(preds, gts, 0.5);
        CHECK(iou(preds[0], gts[0]) == doctest::Approx(1.0 / 3.0));
        CHECK(prf.precision == 0.0);
        CHECK(prf.recall == 0.0);
        CHECK(prf.f1 == 0.0);
    }

    SUBCASE("greedy matching is one-to-one") {
        // Two predictions over one gt box: only one can match.
        const std::vector<BBox> preds = {{0, 0, 10, 10}, {1, 0, 10, 10}};
        const DetectionPRF prf = detection_prf(preds, {gts[0]}, 0.5);
        CHECK(prf.true_positives == 1);
        CHECK(prf.precision == doctest::Approx(0.5));
        CHECK(prf.recall == 1.0);
    }

    SUBCASE("recall never increases with the threshold") {
        SplitMix rng(5);
        std::vector<BBox> preds;
        std::vector<BBox> truth;
        for (int k = 0; k < 6; ++k) {
            const int x = static_cast<int>(rng.below(40));
            const int y = static_cast<int>(rng.below(40));
            truth.push_back({x, y, x + 8, y + 8});
            const int jx = x + static_cast<int>(rng.below(7)) - 3;
            const int jy = y + static_cast<int>(rng.below(7)) - 3;
            preds.push_back({std::max(0, jx), std::max(0, jy), std::max(0, jx) + 8,
                             std::max(0, jy) + 8});
        }
        double prev = 1.0;
        for (double t = 0.1; t <= 1.0; t += 0.1) {
            const double r = detection_prf(preds, truth, t).recall;
            CHECK(r <= prev + 1e-12);
            prev = r;
        }
    }
}
