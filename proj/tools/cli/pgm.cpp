#include "cli/pgm.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iterator>
#include <string>

#include "tnqe/error.hpp"

namespace tnqe::cli {

namespace {

class Reader {
public:
    Reader(std::string data, std::string where) : data_(std::move(data)), where_(std::move(where)) {}

    // Next whitespace-separated header token, skipping # comments.
    std::string token() {
        for (;;) {
            while (pos_ < data_.size() && std::isspace(static_cast<unsigned char>(data_[pos_]))) ++pos_;
            if (pos_ < data_.size() && data_[pos_] == '#') {
                while (pos_ < data_.size() && data_[pos_] != '\n') ++pos_;
                continue;
            }
            break;
        }
        const std::size_t start = pos_;
        while (pos_ < data_.size() && !std::isspace(static_cast<unsigned char>(data_[pos_]))) ++pos_;
        if (start == pos_) fail("unexpected end of file");
        return data_.substr(start, pos_ - start);
    }

    std::size_t number() {
        const std::string t = token();
        if (!std::all_of(t.begin(), t.end(), [](unsigned char c) { return std::isdigit(c); }))
            fail("expected a number, got '" + t + "'");
        return std::stoul(t);
    }

    // Binary payload starts after exactly one whitespace byte.
    std::size_t binary_start() {
        if (pos_ >= data_.size()) fail("missing pixel data");
        return pos_ + 1;
    }

    const std::string& data() const { return data_; }

    [[noreturn]] void fail(const std::string& what) const { throw IoError(where_ + ": " + what); }

private:
    std::string data_;
    std::string where_;
    std::size_t pos_ = 0;
};

} // namespace

RawImage read_pgm(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    Reader r(std::string(std::istreambuf_iterator<char>(in), {}), path.string());

    const std::string magic = r.token();
    if (magic != "P2" && magic != "P5") r.fail("not a PGM file (magic '" + magic + "')");
    RawImage img;
    img.width = r.number();
    img.height = r.number();
    const std::size_t maxval = r.number();
    if (img.width == 0 || img.height == 0) r.fail("empty image");
    if (maxval == 0 || maxval > 65535) r.fail("maxval must be in 1..65535");
    const std::size_t count = img.width * img.height;
    img.pixels.resize(count);

    if (magic == "P2") {
        for (auto& v : img.pixels) {
            const std::size_t raw = r.number();
            if (raw > maxval) r.fail("pixel exceeds maxval");
            v = static_cast<double>(raw) / static_cast<double>(maxval);
        }
    } else {
        const std::size_t start = r.binary_start();
        const std::size_t bytes = maxval < 256 ? 1 : 2;
        if (r.data().size() < start + count * bytes) r.fail("truncated pixel data");
        for (std::size_t i = 0; i < count; ++i) {
            std::size_t raw = static_cast<unsigned char>(r.data()[start + i * bytes]);
            if (bytes == 2) raw = (raw << 8) | static_cast<unsigned char>(r.data()[start + i * bytes + 1]);
            if (raw > maxval) r.fail("pixel exceeds maxval");
            img.pixels[i] = static_cast<double>(raw) / static_cast<double>(maxval);
        }
    }
    return img;
}

Image to_image(const RawImage& raw, bool pad) {
    const bool square_pow2 = raw.width == raw.height && is_power_of_two(raw.width);
    if (square_pow2) return Image(raw.width, raw.pixels);
    if (!pad)
        throw InvalidInput("image is " + std::to_string(raw.width) + "x" + std::to_string(raw.height) +
                           "; the side must be a power of two and square (use --pad to zero-pad)");
    const std::size_t side = next_power_of_two(std::max(raw.width, raw.height));
    const std::size_t off_x = (side - raw.height) / 2, off_y = (side - raw.width) / 2;
    Image img = Image::zeros(side);
    for (std::size_t x = 0; x < raw.height; ++x)
        for (std::size_t y = 0; y < raw.width; ++y) img.at(x + off_x, y + off_y) = raw.pixels[x * raw.width + y];
    return img;
}

Image load_image(const std::filesystem::path& path, bool pad) { return to_image(read_pgm(path), pad); }

void write_pgm(const std::filesystem::path& path, const Image& img) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << "P5\n" << img.size() << ' ' << img.size() << "\n255\n";
    for (double v : img.pixels()) {
        const double c = std::isfinite(v) ? std::clamp(v, 0.0, 1.0) : 0.0;
        out.put(static_cast<char>(static_cast<unsigned char>(std::lround(c * 255.0))));
    }
    if (!out) throw IoError("failed writing " + path.string());
}

} // namespace tnqe::cli
