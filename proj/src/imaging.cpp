#include "tamperkit/imaging.hpp"

#include <algorithm>
#include <string>

namespace tamperkit {

namespace {

void require_positive(int w, int h) {
    if (w < 1 || h < 1) {
        throw DimensionError("image dimensions must be at least 1x1, got " +
                             std::to_string(w) + "x" + std::to_string(h));
    }
}

uint8_t clamp_byte(double v) {
    double r = static_cast<double>(std::lround(v));
    return static_cast<uint8_t>(std::clamp(r, 0.0, 255.0));
}

} // namespace

ImageBuf::ImageBuf(int w, int h, uint8_t fill) : width(w), height(h) {
    require_positive(w, h);
    data.assign(static_cast<size_t>(w) * h * channels, fill);
}

BinaryMask::BinaryMask(int w, int h, uint8_t fill) : width(w), height(h) {
    require_positive(w, h);
    data.assign(static_cast<size_t>(w) * h, fill);
}

size_t BinaryMask::foreground_area() const {
    return static_cast<size_t>(std::count(data.begin(), data.end(), 255));
}

void BinaryMask::validate() const {
    for (size_t i = 0; i < data.size(); ++i) {
        if (data[i] != 0 && data[i] != 255) {
            throw SchemaError("mask value " + std::to_string(data[i]) + " at index " +
                              std::to_string(i) + " is neither 0 nor 255");
        }
    }
}

ImageBuf render_fused_mask(const ImageBuf& image, const BinaryMask& mask,
                           double lambda1, double lambda2) {
    if (image.width != mask.width || image.height != mask.height) {
        throw DimensionError("fused mask: image is " + std::to_string(image.width) + "x" +
                             std::to_string(image.height) + " but mask is " +
                             std::to_string(mask.width) + "x" + std::to_string(mask.height));
    }
    ImageBuf out(image.width, image.height);
    const size_t pixels = image.pixel_count();
    for (size_t p = 0; p < pixels; ++p) {
        const double m = lambda2 * mask.data[p];
        for (int c = 0; c < ImageBuf::channels; ++c) {
            out.data[p * 3 + c] = clamp_byte(lambda1 * image.data[p * 3 + c] + m);
        }
    }
    return out;
}

std::vector<BBox> mask_to_boxes(const BinaryMask& mask, int min_area) {
    const int w = mask.width;
    const int h = mask.height;
    std::vector<int32_t> label(mask.data.size(), -1);
    std::vector<BBox> boxes;
    std::vector<size_t> stack;

    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const size_t idx = static_cast<size_t>(y) * w + x;
            if (mask.data[idx] != 255 || label[idx] >= 0) continue;

            // Flood-fill one 4-connected component.
            BBox box{x, y, x + 1, y + 1};
            long long area = 0;
            label[idx] = static_cast<int32_t>(boxes.size());
            stack.push_back(idx);
            while (!stack.empty()) {
                const size_t cur = stack.back();
                stack.pop_back();
                ++area;
                const int cx = static_cast<int>(cur % w);
                const int cy = static_cast<int>(cur / w);
                box.x_min = std::min(box.x_min, cx);
                box.y_min = std::min(box.y_min, cy);
                box.x_max = std::max(box.x_max, cx + 1);
                box.y_max = std::max(box.y_max, cy + 1);
                const int nx[4] = {cx - 1, cx + 1, cx, cx};
                const int ny[4] = {cy, cy, cy - 1, cy + 1};
                for (int k = 0; k < 4; ++k) {
                    if (nx[k] < 0 || nx[k] >= w || ny[k] < 0 || ny[k] >= h) continue;
                    const size_t nidx = static_cast<size_t>(ny[k]) * w + nx[k];
                    if (mask.data[nidx] == 255 && label[nidx] < 0) {
                        label[nidx] = static_cast<int32_t>(boxes.size());
                        stack.push_back(nidx);
                    }
                }
            }
            if (area >= min_area) boxes.push_back(box);
        }
    }
    std::sort(boxes.begin(), boxes.end(), [](const BBox& a, const BBox& b) {
        if (a.y_min != b.y_min) return a.y_min < b.y_min;
        return a.x_min < b.x_min;
    });
    return boxes;
}

double iou(const BBox& a, const BBox& b) {
    const int ix_min = std::max(a.x_min, b.x_min);
    const int iy_min = std::max(a.y_min, b.y_min);
    const int ix_max = std::min(a.x_max, b.x_max);
    const int iy_max = std::min(a.y_max, b.y_max);
    if (ix_min >= ix_max || iy_min >= iy_max) return 0.0;
    const long long inter =
        static_cast<long long>(ix_max - ix_min) * (iy_max - iy_min);
    const long long uni = a.area() + b.area() - inter;
    return static_cast<double>(inter) / static_cast<double>(uni);
}

ImageBuf crop(const ImageBuf& image, const BBox& box) {
    if (!box.inside(image.width, image.height)) {
        throw BoundsError("crop box [" + std::to_string(box.x_min) + "," +
                          std::to_string(box.y_min) + "," + std::to_string(box.x_max) + "," +
                          std::to_string(box.y_max) + ") exceeds " +
                          std::to_string(image.width) + "x" + std::to_string(image.height));
    }
    ImageBuf out(box.width(), box.height());
    for (int y = 0; y < box.height(); ++y) {
        const uint8_t* src = &image.data[((static_cast<size_t>(box.y_min) + y) * image.width +
                                          box.x_min) * 3];
        std::copy(src, src + static_cast<size_t>(box.width()) * 3,
                  &out.data[static_cast<size_t>(y) * box.width() * 3]);
    }
    return out;
}

ImageBuf paste(const ImageBuf& dst, const ImageBuf& patch, int x, int y) {
    if (x < 0 || y < 0 || x + patch.width > dst.width || y + patch.height > dst.height) {
        throw BoundsError("paste of " + std::to_string(patch.width) + "x" +
                          std::to_string(patch.height) + " at (" + std::to_string(x) + "," +
                          std::to_string(y) + ") exceeds " + std::to_string(dst.width) + "x" +
                          std::to_string(dst.height));
    }
    ImageBuf out = dst;
    for (int py = 0; py < patch.height; ++py) {
        const uint8_t* src = &patch.data[static_cast<size_t>(py) * patch.width * 3];
        uint8_t* dstp = &out.data[((static_cast<size_t>(y) + py) * dst.width + x) * 3];
        std::copy(src, src + static_cast<size_t>(patch.width) * 3, dstp);
    }
    return out;
}

BinaryMask rect_mask(int width, int height, const BBox& box) {
    if (!box.inside(width, height)) {
        throw BoundsError("mask rectangle exceeds " + std::to_string(width) + "x" +
                          std::to_string(height));
    }
    BinaryMask mask(width, height, 0);
    for (int y = box.y_min; y < box.y_max; ++y) {
        std::fill(&mask.data[static_cast<size_t>(y) * width + box.x_min],
                  &mask.data[static_cast<size_t>(y) * width + box.x_max], 255);
    }
    return mask;
}

void fill_rect(ImageBuf& image, const BBox& box, uint8_t r, uint8_t g, uint8_t b) {
    if (!box.inside(image.width, image.height)) {
        throw BoundsError("fill rectangle exceeds image bounds");
    }
    for (int y = box.y_min; y < box.y_max; ++y) {
        for (int x = box.x_min; x < box.x_max; ++x) {
            image.at(x, y, 0) = r;
            image.at(x, y, 1) = g;
            image.at(x, y, 2) = b;
        }
    }
}

} // namespace tamperkit
