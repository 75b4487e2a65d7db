#include "tamperkit/robustness.hpp"

#include "tamperkit/dataset.hpp"
#include "tamperkit/errors.hpp"
#include "tamperkit/image_io.hpp"
#include "tamperkit/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

namespace tamperkit {

Distortion Distortion::jpeg(int quality) {
    if (quality < 1 || quality > 100) {
        throw SchemaError("jpeg quality must be in [1,100], got " + std::to_string(quality));
    }
    return {DistortionKind::JpegQuality, static_cast<double>(quality)};
}

Distortion Distortion::resize(double factor) {
    if (!(factor > 0.0) || factor > 1.0) {
        throw SchemaError("resize factor must be in (0,1], got " + std::to_string(factor));
    }
    return {DistortionKind::Resize, factor};
}

Distortion Distortion::parse(const std::string& spec) {
    if (spec == "identity") return identity();
    const size_t colon = spec.find(':');
    if (colon != std::string::npos) {
        const std::string kind = spec.substr(0, colon);
        const std::string value = spec.substr(colon + 1);
        try {
            if (kind == "jpeg") return jpeg(std::stoi(value));
            if (kind == "resize") return resize(std::stod(value));
        } catch (const std::logic_error&) {
            // falls through to the schema error below
        }
    }
    throw SchemaError("cannot parse distortion '" + spec +
                      "': expected identity, jpeg:<1..100> or resize:<0..1]");
}

std::string Distortion::describe() const {
    switch (kind) {
    case DistortionKind::Identity: return "identity";
    case DistortionKind::JpegQuality:
        return "jpeg:" + std::to_string(static_cast<int>(parameter));
    case DistortionKind::Resize: {
        std::string v = std::to_string(parameter);
        v.erase(v.find_last_not_of('0') + 1);
        if (!v.empty() && v.back() == '.') v.pop_back();
        return "resize:" + v;
    }
    }
    return "identity";
}

std::vector<Distortion> robustness_grid() {
    return {Distortion::identity(), Distortion::jpeg(75), Distortion::jpeg(50),
            Distortion::resize(0.75), Distortion::resize(0.5)};
}

namespace {

int scaled_extent(int extent, double factor) {
    return std::max(1, round_half_away(factor * extent));
}

ImageBuf resize_bilinear(const ImageBuf& image, int out_w, int out_h) {
    ImageBuf out(out_w, out_h);
    const double sx = static_cast<double>(image.width) / out_w;
    const double sy = static_cast<double>(image.height) / out_h;
    for (int y = 0; y < out_h; ++y) {
        const double fy = (y + 0.5) * sy - 0.5;
        const int y0 = std::clamp(static_cast<int>(std::floor(fy)), 0, image.height - 1);
        const int y1 = std::min(y0 + 1, image.height - 1);
        const double wy = std::clamp(fy - y0, 0.0, 1.0);
        for (int x = 0; x < out_w; ++x) {
            const double fx = (x + 0.5) * sx - 0.5;
            const int x0 = std::clamp(static_cast<int>(std::floor(fx)), 0, image.width - 1);
            const int x1 = std::min(x0 + 1, image.width - 1);
            const double wx = std::clamp(fx - x0, 0.0, 1.0);
            for (int c = 0; c < 3; ++c) {
                const double top = image.at(x0, y0, c) * (1.0 - wx) + image.at(x1, y0, c) * wx;
                const double bottom =
                    image.at(x0, y1, c) * (1.0 - wx) + image.at(x1, y1, c) * wx;
                const double v = top * (1.0 - wy) + bottom * wy;
                out.at(x, y, c) = static_cast<uint8_t>(
                    std::clamp(static_cast<double>(std::lround(v)), 0.0, 255.0));
            }
        }
    }
    return out;
}

BinaryMask resize_nearest(const BinaryMask& mask, int out_w, int out_h) {
    BinaryMask out(out_w, out_h);
    const double sx = static_cast<double>(mask.width) / out_w;
    const double sy = static_cast<double>(mask.height) / out_h;
    for (int y = 0; y < out_h; ++y) {
        const int src_y = std::clamp(static_cast<int>((y + 0.5) * sy), 0, mask.height - 1);
        for (int x = 0; x < out_w; ++x) {
            const int src_x = std::clamp(static_cast<int>((x + 0.5) * sx), 0, mask.width - 1);
            out.at(x, y) = mask.at(src_x, src_y);
        }
    }
    return out;
}

} // namespace

ImageBuf apply(const ImageBuf& image, const Distortion& d) {
    switch (d.kind) {
    case DistortionKind::Identity:
        return image;
    case DistortionKind::JpegQuality:
        return decode_jpeg(encode_jpeg(image, static_cast<int>(d.parameter)));
    case DistortionKind::Resize:
        return resize_bilinear(image, scaled_extent(image.width, d.parameter),
                               scaled_extent(image.height, d.parameter));
    }
    return image;
}

BinaryMask apply_mask(const BinaryMask& mask, const Distortion& d) {
    if (d.kind != DistortionKind::Resize) return mask;
    return resize_nearest(mask, scaled_extent(mask.width, d.parameter),
                          scaled_extent(mask.height, d.parameter));
}

BBox rescale_box(const BBox& box, int in_w, int in_h, int out_w, int out_h) {
    const double sx = static_cast<double>(out_w) / in_w;
    const double sy = static_cast<double>(out_h) / in_h;
    BBox out;
    out.x_min = std::clamp(round_half_away(box.x_min * sx), 0, out_w - 1);
    out.y_min = std::clamp(round_half_away(box.y_min * sy), 0, out_h - 1);
    out.x_max = std::clamp(round_half_away(box.x_max * sx), out.x_min + 1, out_w);
    out.y_max = std::clamp(round_half_away(box.y_max * sy), out.y_min + 1, out_h);
    return out;
}

PerturbSummary perturb_corpus(const std::filesystem::path& manifest_in,
                              const std::filesystem::path& manifest_out, const Distortion& d) {
    std::vector<TamperRecord> records = read_manifest(manifest_in);
    const std::filesystem::path in_root = manifest_in.has_parent_path()
                                              ? manifest_in.parent_path()
                                              : std::filesystem::path(".");
    const std::filesystem::path out_root = manifest_out.has_parent_path()
                                               ? manifest_out.parent_path()
                                               : std::filesystem::path(".");
    std::filesystem::create_directories(out_root / "images");
    std::filesystem::create_directories(out_root / "masks");

    PerturbSummary summary;
    if (d.kind == DistortionKind::JpegQuality) summary.codec_id = jpeg_codec_id();

    std::vector<std::optional<TamperRecord>> results(records.size());
    std::vector<std::string> errors(records.size());
    parallel_for(records.size(), std::thread::hardware_concurrency(), [&](size_t i) {
        try {
            TamperRecord rec = records[i];
            const ImageBuf image = read_image(in_root / rec.image_path);
            const ImageBuf distorted = apply(image, d);
            const std::string image_rel = "images/" + rec.id + ".png";
            write_png(distorted, out_root / image_rel);
            rec.image_path = image_rel;

            if (rec.mask_path) {
                const std::string mask_rel = "masks/" + rec.id + ".png";
                if (d.kind == DistortionKind::Resize) {
                    const BinaryMask mask = read_mask_png(in_root / *rec.mask_path);
                    write_png(apply_mask(mask, d), out_root / mask_rel);
                    std::vector<BBox> boxes;
                    boxes.reserve(rec.boxes.size());
                    for (const BBox& b : rec.boxes) {
                        boxes.push_back(rescale_box(b, image.width, image.height,
                                                    distorted.width, distorted.height));
                    }
                    rec.boxes = std::move(boxes);
                } else {
                    // Masks bypass the codec entirely.
                    std::filesystem::copy_file(
                        in_root / *rec.mask_path, out_root / mask_rel,
                        std::filesystem::copy_options::overwrite_existing);
                }
                rec.mask_path = mask_rel;
            }
            rec.distortion = d;
            if (!summary.codec_id.empty()) rec.distortion_codec = summary.codec_id;
            results[i] = std::move(rec);
        } catch (const Error& e) {
            errors[i] = e.what();
        } catch (const std::filesystem::filesystem_error& e) {
            errors[i] = e.what();
        }
    });

    std::vector<TamperRecord> out_records;
    out_records.reserve(records.size());
    for (size_t i = 0; i < records.size(); ++i) {
        if (results[i]) {
            ++summary.processed;
            out_records.push_back(std::move(*results[i]));
        } else {
            ++summary.failed;
            summary.failures.emplace_back(records[i].id, errors[i]);
        }
    }
    write_manifest(out_records, manifest_out);
    return summary;
}

} // namespace tamperkit
