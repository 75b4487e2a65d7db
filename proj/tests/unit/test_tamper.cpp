#include "tamperkit/tamper.hpp"

#include "helpers.hpp"

#include <doctest.h>

using namespace tamperkit;

TEST_CASE("copy-move onto itself leaves the image unchanged") {
    const ImageBuf img = testkit::gradient_image(20, 16);
    const BBox box{4, 5, 12, 11};
    const TamperResult result = copy_move(img, box, box.x_min, box.y_min, false);
    CHECK(result.image.data == img.data);
    CHECK(result.mask.foreground_area() == static_cast<size_t>(box.area()));
    const std::vector<BBox> boxes = mask_to_boxes(result.mask);
    REQUIRE(boxes.size() == 1);
    CHECK(boxes[0] == box);
}

TEST_CASE("hard paste of a white patch onto a black image") {
    ImageBuf img(16, 16, 0);
    fill_rect(img, BBox{2, 2, 7, 7}, 255, 255, 255);
    const TamperResult result = copy_move(img, BBox{2, 2, 7, 7}, 9, 9, false);
    for (int y = 9; y < 14; ++y) {
        for (int x = 9; x < 14; ++x) {
            CHECK(result.image.at(x, y, 0) == 255);
            CHECK(result.mask.at(x, y) == 255);
        }
    }
    CHECK(result.mask.foreground_area() == 25);
}

TEST_CASE("pixels outside the destination rectangle never change") {
    const ImageBuf img = testkit::random_image(24, 20, 17);
    const BBox src{2, 2, 9, 8};
    const int dx = 12;
    const int dy = 10;
    for (const bool blend : {false, true}) {
        const TamperResult result = copy_move(img, src, dx, dy, blend);
        for (int y = 0; y < img.height; ++y) {
            for (int x = 0; x < img.width; ++x) {
                const bool inside = x >= dx && x < dx + src.width() && y >= dy &&
                                    y < dy + src.height();
                if (inside) continue;
                for (int c = 0; c < 3; ++c) {
                    CHECK(result.image.at(x, y, c) == img.at(x, y, c));
                }
                CHECK(result.mask.at(x, y) == 0);
            }
        }
    }
}

TEST_CASE("identity splice leaves the acceptor unchanged") {
    const ImageBuf img = testkit::gradient_image(18, 14);
    const BBox box{3, 3, 10, 9};
    const TamperResult result = splice(img, img, box, box.x_min, box.y_min, false);
    CHECK(result.image.data == img.data);
}

TEST_CASE("splicing a white donor patch into a black acceptor") {
    const ImageBuf acceptor(12, 12, 0);
    const ImageBuf donor(12, 12, 255);
    const TamperResult result = splice(acceptor, donor, BBox{0, 0, 4, 4}, 5, 5, false);
    for (int y = 5; y < 9; ++y) {
        for (int x = 5; x < 9; ++x) {
            CHECK(result.image.at(x, y, 0) == 255);
        }
    }
    CHECK(mask_to_boxes(result.mask) == std::vector<BBox>{BBox{5, 5, 9, 9}});
}

TEST_CASE("blended splice of a constant patch over a matching boundary") {
    // Donor patch constant, acceptor constant at the same value: the
    // harmonic interior is that constant.
    const ImageBuf acceptor(14, 14, 64);
    const ImageBuf donor(14, 14, 64);
    const TamperResult result = splice(acceptor, donor, BBox{1, 1, 8, 8}, 3, 3, true);
    CHECK(result.image.data == acceptor.data);
}

TEST_CASE("blended copy-move keeps the mask rectangle exact") {
    const ImageBuf img = testkit::gradient_image(30, 24);
    const BBox src{2, 2, 12, 10};
    const TamperResult result = copy_move(img, src, 15, 12, true);
    const std::vector<BBox> boxes = mask_to_boxes(result.mask);
    REQUIRE(boxes.size() == 1);
    CHECK(boxes[0] == BBox{15, 12, 25, 20});
    CHECK(result.mask.foreground_area() == static_cast<size_t>(src.area()));
}

TEST_CASE("tamper bounds errors") {
    const ImageBuf img(10, 10);
    CHECK_THROWS_AS(copy_move(img, BBox{0, 0, 12, 3}, 0, 0, false), BoundsError);
    CHECK_THROWS_AS(copy_move(img, BBox{0, 0, 4, 4}, 8, 8, false), BoundsError);
    CHECK_THROWS_AS(splice(img, ImageBuf(5, 5), BBox{0, 0, 6, 6}, 0, 0, false), BoundsError);
}

TEST_CASE("recorded ops dispatch through apply_op") {
    const ImageBuf img = testkit::gradient_image(20, 16);
    TamperOp op;
    op.method = TamperMethod::CopyMove;
    op.source_box = BBox{2, 2, 8, 8};
    op.dest_x = 10;
    op.dest_y = 6;

    const TamperResult direct = copy_move(img, op.source_box, op.dest_x, op.dest_y, false);
    const TamperResult via_op = apply_op(img, op);
    CHECK(via_op.image.data == direct.image.data);
    CHECK(via_op.mask.data == direct.mask.data);

    TamperOp bad_splice = op;
    bad_splice.method = TamperMethod::Splicing;
    bad_splice.donor_id = "donor0";
    CHECK_THROWS_AS(apply_op(img, bad_splice), DimensionError);

    const ImageBuf donor = testkit::gradient_image(20, 16, 11, 5);
    const TamperResult spliced = apply_op(img, bad_splice, &donor);
    CHECK(spliced.image.data ==
          splice(img, donor, op.source_box, op.dest_x, op.dest_y, false).image.data);
}
