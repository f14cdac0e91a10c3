#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace pcot {

struct ImageBuffer {
    int width = 0, height = 0;
    std::vector<std::uint8_t> pixels;  // row-major RGB, 3 bytes per pixel
};

// Binary P6 portable pixmap, maxval 255 only. Round-trips losslessly.
// Throws FormatError on anything else (wrong magic, bad header, truncation).
ImageBuffer load_image(const std::string& path);
void save_image(const ImageBuffer& img, const std::string& path);

} // namespace pcot
