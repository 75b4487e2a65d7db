#include "tamperkit/tamper.hpp"

#include "tamperkit/errors.hpp"

namespace tamperkit {

namespace {

TamperResult paste_patch(const ImageBuf& target, const ImageBuf& patch, int dest_x, int dest_y,
                         bool blend, const PoissonOptions& opts) {
    if (dest_x < 0 || dest_y < 0 || dest_x + patch.width > target.width ||
        dest_y + patch.height > target.height) {
        throw BoundsError("tamper destination rectangle exceeds target bounds");
    }
    TamperResult result;
    result.image = blend ? poisson_blend(target, patch, dest_x, dest_y, opts)
                         : paste(target, patch, dest_x, dest_y);
    result.mask = rect_mask(target.width, target.height,
                            BBox{dest_x, dest_y, dest_x + patch.width, dest_y + patch.height});
    return result;
}

} // namespace

TamperResult copy_move(const ImageBuf& image, const BBox& source_box, int dest_x, int dest_y,
                       bool blend, const PoissonOptions& opts) {
    if (!source_box.inside(image.width, image.height)) {
        throw BoundsError("copy-move source rectangle exceeds image bounds");
    }
    // Crop first: source and destination may overlap.
    const ImageBuf patch = crop(image, source_box);
    return paste_patch(image, patch, dest_x, dest_y, blend, opts);
}

TamperResult splice(const ImageBuf& acceptor, const ImageBuf& donor, const BBox& source_box,
                    int dest_x, int dest_y, bool blend, const PoissonOptions& opts) {
    if (!source_box.inside(donor.width, donor.height)) {
        throw BoundsError("splice source rectangle exceeds donor bounds");
    }
    const ImageBuf patch = crop(donor, source_box);
    return paste_patch(acceptor, patch, dest_x, dest_y, blend, opts);
}

TamperResult apply_op(const ImageBuf& acceptor, const TamperOp& op, const ImageBuf* donor,
                      const PoissonOptions& opts) {
    if (op.method == TamperMethod::CopyMove) {
        if (op.donor_id || donor) {
            throw DimensionError("copy-move ops take no donor");
        }
        return copy_move(acceptor, op.source_box, op.dest_x, op.dest_y, op.blend, opts);
    }
    if (!donor) {
        throw DimensionError("splicing op " + op.donor_id.value_or("<unnamed>") +
                             " needs resolved donor pixels");
    }
    return splice(acceptor, *donor, op.source_box, op.dest_x, op.dest_y, op.blend, opts);
}

} // namespace tamperkit
