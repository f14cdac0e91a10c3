#include "pcot/ppm.hpp"

#include <cctype>
#include <fstream>

#include "pcot/errors.hpp"

namespace pcot {

namespace {

// Next whitespace-separated token, skipping '#' comments to end of line.
std::string next_token(std::istream& in) {
    std::string tok;
    int ch;
    while ((ch = in.get()) != EOF) {
        if (ch == '#') {
            while ((ch = in.get()) != EOF && ch != '\n') {
            }
            continue;
        }
        if (std::isspace(ch)) {
            if (!tok.empty()) return tok;
            continue;
        }
        tok.push_back(char(ch));
    }
    return tok;
}

int parse_dim(const std::string& tok, const char* what) {
    if (tok.empty()) throw FormatError(std::string("ppm header ends before ") + what);
    for (char c : tok)
        if (c < '0' || c > '9') throw FormatError(std::string("ppm ") + what + " is not a number: " + tok);
    long v = std::stol(tok);
    if (v <= 0 || v > 1 << 20) throw FormatError(std::string("ppm ") + what + " out of range: " + tok);
    return int(v);
}

} // namespace

ImageBuffer load_image(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open image file: " + path);

    if (next_token(in) != "P6") throw FormatError("not a binary P6 pixmap: " + path);
    ImageBuffer img;
    img.width = parse_dim(next_token(in), "width");
    img.height = parse_dim(next_token(in), "height");
    if (next_token(in) != "255") throw FormatError("only maxval 255 is supported: " + path);
    // the single whitespace byte after maxval was consumed by the tokenizer

    img.pixels.resize(size_t(img.width) * img.height * 3);
    in.read(reinterpret_cast<char*>(img.pixels.data()), std::streamsize(img.pixels.size()));
    if (size_t(in.gcount()) != img.pixels.size()) throw FormatError("truncated pixel data: " + path);
    return img;
}

void save_image(const ImageBuffer& img, const std::string& path) {
    if (img.pixels.size() != size_t(img.width) * img.height * 3)
        throw FormatError("image buffer size does not match its dimensions");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FormatError("cannot write image file: " + path);
    out << "P6\n" << img.width << " " << img.height << "\n255\n";
    out.write(reinterpret_cast<const char*>(img.pixels.data()), std::streamsize(img.pixels.size()));
    if (!out) throw FormatError("failed writing pixel data: " + path);
}

} // namespace pcot
