#include "tamperkit/prompts.hpp"

#include "tamperkit/errors.hpp"

#include <sstream>

namespace tamperkit {

namespace {

// Embedded annotation query, version v1. Changing a single byte breaks the
// golden tests on purpose.
constexpr const char* kAnnotationQueryText =
    "You are an expert good at analyzing tampered text images. You will be provided with two "
    "images, the first is the tampered text image A and the second is the reference image B, "
    "with the tampered areas highlighted and the authentic areas darkened.\n"
    "\n"
    "Your task is to: First, recognize the tampered text and output its OCR result. Second, "
    "Describe visible details in the image that have been tampered with. Please consider the "
    "visible details caused by tampering from these perspectives.\n"
    "\n"
    "1. Edge artifacts. The background of the tampered text may be inconsistent with the "
    "authentic regions. Therefore, the edges around the tampered text region may be "
    "discontinuous and inconsistent with the background.\n"
    "\n"
    "2. Unnatural texture appearance. The texture appearance of the tampered text may be "
    "slightly blurred, hazy, jagged, have a distortion effect, or have an unnatural clarity.\n"
    "\n"
    "3. Inconsistent font. The font of the tampered text may be slightly different in color, "
    "size, thickness, brightness, or style from the surrounding authentic text.\n"
    "\n"
    "4. Inconsistent alignment. The tampered text may have inconsistent spacing with the "
    "surrounding text or a small offset to the text line.\n"
    "\n"
    "5. Text incoherence. Tampered text may break the coherence of the sentence.\n"
    "\n"
    "6. Lack of integration. The tampered text may appear unnaturally placed and not "
    "integrated with its surroundings, or it may not blend seamlessly with its surroundings, "
    "appearing artificially overlaid or unnaturally pasted.\n"
    "\n"
    "Don't mention the image B in your answer, always assume that you are only observing the "
    "input image A.";

int normalize_coord(int value, int extent) {
    const double scaled = static_cast<double>(value) * 1000.0 / extent;
    const int rounded = round_half_away(scaled);
    return rounded < 0 ? 0 : (rounded > 1000 ? 1000 : rounded);
}

} // namespace

AnnotationQuery build_annotation_query() {
    AnnotationQuery q;
    q.text = kAnnotationQueryText;
    q.perspectives = {"Edge artifacts",     "Unnatural texture appearance",
                      "Inconsistent font",  "Inconsistent alignment",
                      "Text incoherence",   "Lack of integration"};
    return q;
}

std::string build_inference_query(InferenceMode mode) {
    switch (mode) {
    case InferenceMode::FineTuned:
        return "What is the tampered text in this image, why?";
    case InferenceMode::ZeroShot:
        return "Does this image have tampered text on it? Please start your answer with "
               "\"Yes\" or \"No\". If \"Yes\", then recognize the tampered text and describe "
               "the anomaly of the tampered region.";
    }
    throw Error("unknown inference mode");
}

GroundingPrompt build_grounding_prompt(const BBox& box, int image_w, int image_h) {
    if (image_w < 1 || image_h < 1 || !box.inside(image_w, image_h)) {
        throw BoundsError("grounding box must lie inside the image");
    }
    GroundingPrompt p;
    p.nbox.x_min = normalize_coord(box.x_min, image_w);
    p.nbox.y_min = normalize_coord(box.y_min, image_h);
    p.nbox.x_max = normalize_coord(box.x_max, image_w);
    p.nbox.y_max = normalize_coord(box.y_max, image_h);

    std::ostringstream out;
    out << "The suspected tampered text <box>[[" << p.nbox.x_min << ", " << p.nbox.y_min
        << ", " << p.nbox.x_max << ", " << p.nbox.y_max << "]]</box>";
    p.text = out.str();
    return p;
}

std::string build_grounded_query(const BBox& box, int image_w, int image_h,
                                 const std::string& question) {
    return build_grounding_prompt(box, image_w, image_h).text + "\n" + question;
}

} // namespace tamperkit
