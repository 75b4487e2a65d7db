// Synthetic inputs shared across the test suites.
#pragma once

#include "tamperkit/imaging.hpp"
#include "tamperkit/rng.hpp"

#include <filesystem>
#include <string>

namespace testkit {

inline tamperkit::ImageBuf random_image(int w, int h, uint64_t seed) {
    tamperkit::ImageBuf img(w, h);
    tamperkit::SplitMix rng(seed);
    for (uint8_t& v : img.data) v = static_cast<uint8_t>(rng.below(256));
    return img;
}

inline tamperkit::BinaryMask random_mask(int w, int h, uint64_t seed) {
    tamperkit::BinaryMask mask(w, h);
    tamperkit::SplitMix rng(seed);
    for (uint8_t& v : mask.data) v = rng.below(2) == 0 ? 0 : 255;
    return mask;
}

// Smooth two-axis gradient, useful for blending fixtures.
inline tamperkit::ImageBuf gradient_image(int w, int h, int x_step = 7, int y_step = 3) {
    tamperkit::ImageBuf img(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            img.at(x, y, 0) = static_cast<uint8_t>((x * x_step) % 256);
            img.at(x, y, 1) = static_cast<uint8_t>((y * y_step) % 256);
            img.at(x, y, 2) = static_cast<uint8_t>((x * x_step + y * y_step) % 256);
        }
    }
    return img;
}

// Fresh directory under the system temp root; wiped when it already exists.
inline std::filesystem::path fresh_temp_dir(const std::string& name) {
    const std::filesystem::path dir = std::filesystem::temp_directory_path() / name;
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

} // namespace testkit
