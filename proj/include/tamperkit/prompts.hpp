#pragma once

#include "tamperkit/imaging.hpp"

#include <array>
#include <string>

namespace tamperkit {

/// The annotation query shipped as an embedded, versioned resource so
/// golden tests can pin it byte-exactly.
inline constexpr const char* kAnnotationQueryVersion = "v1";

/// The elaborate two-image annotation query: OCR the tampered text first,
/// then describe the visible anomaly along six fixed perspectives.
struct AnnotationQuery {
    std::string text;
    std::array<std::string, 6> perspectives;
};

AnnotationQuery build_annotation_query();

enum class InferenceMode { FineTuned, ZeroShot };

/// Exact evaluation-time question for the chosen mode.
std::string build_inference_query(InferenceMode mode);

/// Box coordinates normalized to the 0..1000 grid.
struct NormalizedBox {
    int x_min = 0;
    int y_min = 0;
    int x_max = 0;
    int y_max = 0;
    friend bool operator==(const NormalizedBox&, const NormalizedBox&) = default;
};

struct GroundingPrompt {
    std::string text;
    NormalizedBox nbox;
};

/// Auxiliary prompt pointing the model at a suspected region. Coordinates
/// are rounded half away from zero onto the 0..1000 grid.
GroundingPrompt build_grounding_prompt(const BBox& box, int image_w, int image_h);

/// Grounding prompt placed before the question, newline separated.
std::string build_grounded_query(const BBox& box, int image_w, int image_h,
                                 const std::string& question);

} // namespace tamperkit
