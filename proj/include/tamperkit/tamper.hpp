#pragma once

#include "tamperkit/imaging.hpp"
#include "tamperkit/poisson.hpp"

#include <optional>
#include <string>

namespace tamperkit {

enum class TamperMethod { CopyMove, Splicing };

/// One forging step. Splicing takes its patch from a donor image named by
/// donor_id; copy-move stays within the acceptor.
struct TamperOp {
    TamperMethod method = TamperMethod::CopyMove;
    BBox source_box;
    int dest_x = 0;
    int dest_y = 0;
    std::optional<std::string> donor_id;
    bool blend = false;
};

struct TamperResult {
    ImageBuf image;
    BinaryMask mask; // 255 exactly on the destination rectangle
};

/// Duplicates the source rectangle at (dest_x, dest_y) inside one image,
/// hard paste or Poisson-blended. Source and destination may overlap.
TamperResult copy_move(const ImageBuf& image, const BBox& source_box, int dest_x, int dest_y,
                       bool blend, const PoissonOptions& opts = {});

/// Pastes a donor rectangle into the acceptor at (dest_x, dest_y).
TamperResult splice(const ImageBuf& acceptor, const ImageBuf& donor, const BBox& source_box,
                    int dest_x, int dest_y, bool blend, const PoissonOptions& opts = {});

/// Dispatches one recorded op. Splicing ops need the donor pixels resolved
/// by the caller; copy-move ops must not carry one.
TamperResult apply_op(const ImageBuf& acceptor, const TamperOp& op,
                      const ImageBuf* donor = nullptr, const PoissonOptions& opts = {});

} // namespace tamperkit
