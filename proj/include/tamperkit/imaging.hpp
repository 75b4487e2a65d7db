#pragma once

#include "tamperkit/errors.hpp"

#include <cmath>
#include <cstdint>
#include <vector>

namespace tamperkit {

/// Round half away from zero. Shared by the fused-mask arithmetic and the
/// box normalization so both produce the same integers.
inline int round_half_away(double v) {
    return static_cast<int>(std::lround(v));
}

/// 8-bit RGB raster, row major, interleaved channels.
///
/// Sample at (x, y, c) lives at data[(y * width + x) * 3 + c].
struct ImageBuf {
    int width = 0;
    int height = 0;
    static constexpr int channels = 3;
    std::vector<uint8_t> data;

    ImageBuf() = default;
    ImageBuf(int w, int h, uint8_t fill = 0);

    uint8_t& at(int x, int y, int c) {
        return data[(static_cast<size_t>(y) * width + x) * channels + c];
    }
    uint8_t at(int x, int y, int c) const {
        return data[(static_cast<size_t>(y) * width + x) * channels + c];
    }
    size_t pixel_count() const { return static_cast<size_t>(width) * height; }
    bool same_size(const ImageBuf& other) const {
        return width == other.width && height == other.height;
    }
};

/// Per-pixel tamper annotation paired with an image. Values are exactly
/// 0 (authentic) or 255 (tampered).
struct BinaryMask {
    int width = 0;
    int height = 0;
    std::vector<uint8_t> data;

    BinaryMask() = default;
    BinaryMask(int w, int h, uint8_t fill = 0);

    uint8_t& at(int x, int y) { return data[static_cast<size_t>(y) * width + x]; }
    uint8_t at(int x, int y) const { return data[static_cast<size_t>(y) * width + x]; }
    size_t pixel_count() const { return static_cast<size_t>(width) * height; }

    /// Number of 255 pixels.
    size_t foreground_area() const;

    /// Throws SchemaError if any value is neither 0 nor 255.
    void validate() const;
};

/// Axis-aligned box, half-open convention [x_min, x_max) x [y_min, y_max).
struct BBox {
    int x_min = 0;
    int y_min = 0;
    int x_max = 0;
    int y_max = 0;

    int width() const { return x_max - x_min; }
    int height() const { return y_max - y_min; }
    long long area() const { return static_cast<long long>(width()) * height(); }
    bool valid() const { return x_min >= 0 && y_min >= 0 && x_min < x_max && y_min < y_max; }
    bool inside(int image_w, int image_h) const {
        return valid() && x_max <= image_w && y_max <= image_h;
    }
    friend bool operator==(const BBox&, const BBox&) = default;
};

/// Weighted overlay of image and mask: out = clamp(round(l1*I + l2*M)).
/// The single-channel mask value (0 or 255) is broadcast across all three
/// channels. Defaults are the 0.5/0.5 weighting used for annotation prompts.
ImageBuf render_fused_mask(const ImageBuf& image, const BinaryMask& mask,
                           double lambda1 = 0.5, double lambda2 = 0.5);

/// One bounding box per 4-connected foreground component with area >=
/// min_area, sorted by (y_min, x_min). Empty mask yields an empty list.
std::vector<BBox> mask_to_boxes(const BinaryMask& mask, int min_area = 4);

/// Intersection over union of two boxes; 0 when disjoint.
double iou(const BBox& a, const BBox& b);

/// Exact sub-rectangle copy. Throws BoundsError when the box leaves the image.
ImageBuf crop(const ImageBuf& image, const BBox& box);

/// Copy of dst with the patch written at (x, y). Pure: dst is not modified.
ImageBuf paste(const ImageBuf& dst, const ImageBuf& patch, int x, int y);

/// Filled-rectangle mask helpers used by the forging pipeline.
BinaryMask rect_mask(int width, int height, const BBox& box);
void fill_rect(ImageBuf& image, const BBox& box, uint8_t r, uint8_t g, uint8_t b);

} // namespace tamperkit
