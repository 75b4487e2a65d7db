#include "tamperkit/prompts.hpp"

#include "tamperkit/rng.hpp"

#include <doctest.h>

#include <fstream>
#include <sstream>

using namespace tamperkit;

namespace {

// Exact rational normalization: round half away from zero without any
// floating-point step.
int normalize_exact(long long v, long long extent) {
    const long long num = v * 1000;
    const long long q = num / extent;
    const long long r = num % extent;
    long long n = q + (2 * r >= extent ? 1 : 0);
    if (n < 0) n = 0;
    if (n > 1000) n = 1000;
    return static_cast<int>(n);
}

} // namespace

TEST_CASE("annotation query carries the six perspectives in order") {
    const AnnotationQuery q = build_annotation_query();
    CHECK(q.text.find("Edge artifacts") != std::string::npos);

    const std::array<std::string, 6> labels = {
        "Edge artifacts",     "Unnatural texture appearance", "Inconsistent font",
        "Inconsistent alignment", "Text incoherence",         "Lack of integration"};
    CHECK(q.perspectives == labels);

    size_t last_pos = 0;
    for (int i = 1; i <= 6; ++i) {
        const std::string marker = std::to_string(i) + ". " + labels[static_cast<size_t>(i - 1)];
        const size_t pos = q.text.find(marker);
        REQUIRE(pos != std::string::npos);
        CHECK(pos > last_pos);
        last_pos = pos;
    }
    CHECK(q.text.find("7. ") == std::string::npos);

    CHECK(q.text.find("First, recognize the tampered text") != std::string::npos);
    CHECK(q.text.find("Don't mention the image B") != std::string::npos);
}

TEST_CASE("annotation query is deterministic and golden-pinned") {
    CHECK(build_annotation_query().text == build_annotation_query().text);

    const std::string golden_path =
        std::string(TAMPERKIT_FIXTURES_DIR) + "/annotation_query_" +
        kAnnotationQueryVersion + ".txt";
    std::ifstream in(golden_path, std::ios::binary);
    REQUIRE_MESSAGE(in.good(), "missing golden fixture " << golden_path);
    std::ostringstream buf;
    buf << in.rdbuf();
    CHECK(build_annotation_query().text == buf.str());
}

TEST_CASE("inference queries are the exact strings") {
    CHECK(build_inference_query(InferenceMode::FineTuned) ==
          "What is the tampered text in this image, why?");
    CHECK(build_inference_query(InferenceMode::ZeroShot) ==
          "Does this image have tampered text on it? Please start your answer with \"Yes\" "
          "or \"No\". If \"Yes\", then recognize the tampered text and describe the anomaly "
          "of the tampered region.");
    CHECK(build_inference_query(InferenceMode::FineTuned) !=
          build_inference_query(InferenceMode::ZeroShot));
}

TEST_CASE("grounding prompt formats the normalized box") {
    const GroundingPrompt exact = build_grounding_prompt(BBox{500, 250, 1500, 750}, 2000, 1000);
    CHECK(exact.text == "The suspected tampered text <box>[[250, 250, 750, 750]]</box>");
    CHECK(exact.nbox == NormalizedBox{250, 250, 750, 750});

    const GroundingPrompt full = build_grounding_prompt(BBox{0, 0, 1000, 1000}, 1000, 1000);
    CHECK(full.text == "The suspected tampered text <box>[[0, 0, 1000, 1000]]</box>");

    // Derived via the exact rational oracle.
    const BBox b{123, 45, 381, 222};
    const GroundingPrompt odd = build_grounding_prompt(b, 640, 480);
    CHECK(odd.nbox.x_min == normalize_exact(123, 640));
    CHECK(odd.nbox.y_min == normalize_exact(45, 480));
    CHECK(odd.nbox.x_max == normalize_exact(381, 640));
    CHECK(odd.nbox.y_max == normalize_exact(222, 480));
    CHECK(odd.nbox == NormalizedBox{192, 94, 595, 463});
}

TEST_CASE("grounding normalization is scale invariant up to rounding") {
    SplitMix rng(11);
    for (int round = 0; round < 1000; ++round) {
        const int w = 2 + static_cast<int>(rng.below(1999));
        const int h = 2 + static_cast<int>(rng.below(1999));
        const int x0 = static_cast<int>(rng.below(static_cast<uint64_t>(w)));
        const int y0 = static_cast<int>(rng.below(static_cast<uint64_t>(h)));
        const BBox box{x0, y0, x0 + 1 + static_cast<int>(rng.below(static_cast<uint64_t>(w - x0))),
                       y0 + 1 + static_cast<int>(rng.below(static_cast<uint64_t>(h - y0)))};
        const int k = 2 + static_cast<int>(rng.below(4));
        const BBox scaled{box.x_min * k, box.y_min * k, box.x_max * k, box.y_max * k};

        const NormalizedBox a = build_grounding_prompt(box, w, h).nbox;
        const NormalizedBox b = build_grounding_prompt(scaled, w * k, h * k).nbox;
        CHECK(std::abs(a.x_min - b.x_min) <= 1);
        CHECK(std::abs(a.y_min - b.y_min) <= 1);
        CHECK(std::abs(a.x_max - b.x_max) <= 1);
        CHECK(std::abs(a.y_max - b.y_max) <= 1);
    }
}

TEST_CASE("grounding prompt rejects boxes outside the image") {
    CHECK_THROWS_AS(build_grounding_prompt(BBox{0, 0, 1100, 500}, 1000, 1000), BoundsError);
    CHECK_THROWS_AS(build_grounding_prompt(BBox{10, 10, 10, 20}, 100, 100), BoundsError);
}

TEST_CASE("grounded query puts the auxiliary prompt before the question") {
    const std::string q = build_grounded_query(BBox{0, 0, 50, 50}, 100, 100, "Why?");
    CHECK(q == "The suspected tampered text <box>[[0, 0, 500, 500]]</box>\nWhy?");
}
