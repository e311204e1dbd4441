#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "polarface/image.hpp"

namespace polarface {

/// Raised when a PGM stream is malformed. `field()` names the header field
/// or section ("magic", "width", "height", "maxval", "pixel_data") that
/// failed to parse.
class PgmParseError : public std::runtime_error {
public:
    PgmParseError(std::string field, const std::string& message)
        : std::runtime_error("PGM parse error in " + field + ": " + message),
          field_(std::move(field)) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

namespace detail {

struct PgmCursor {
    std::span<const std::uint8_t> bytes;
    std::size_t pos = 0;

    bool eof() const { return pos >= bytes.size(); }
    std::uint8_t peek() const { return bytes[pos]; }

    static bool is_space(std::uint8_t c) {
        return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\v' || c == '\f';
    }

    // PNM headers allow '#' comments running to end of line.
    void skip_space_and_comments() {
        while (!eof()) {
            if (is_space(peek())) {
                ++pos;
            } else if (peek() == '#') {
                while (!eof() && peek() != '\n') ++pos;
            } else {
                break;
            }
        }
    }

    std::uint64_t read_uint(const std::string& field) {
        skip_space_and_comments();
        if (eof() || peek() < '0' || peek() > '9')
            throw PgmParseError(field, "expected a decimal integer");
        std::uint64_t value = 0;
        while (!eof() && peek() >= '0' && peek() <= '9') {
            value = value * 10 + (peek() - '0');
            if (value > 0xFFFFFFFFull)
                throw PgmParseError(field, "value out of range");
            ++pos;
        }
        return value;
    }
};

}  // namespace detail

/// Parses a PGM stream (binary P5 or ASCII P2, maxval <= 65535) into a
/// GrayImage with intensities normalized by the stream's maxval.
inline GrayImage read_pgm(std::span<const std::uint8_t> bytes) {
    detail::PgmCursor cur{bytes};

    if (bytes.size() < 2)
        throw PgmParseError("magic", "stream shorter than a magic number");
    const char m0 = static_cast<char>(bytes[0]);
    const char m1 = static_cast<char>(bytes[1]);
    if (m0 != 'P' || (m1 != '5' && m1 != '2'))
        throw PgmParseError("magic", std::string("expected P5 or P2, got '") + m0 + m1 + "'");
    const bool binary = (m1 == '5');
    cur.pos = 2;

    const std::uint64_t width = cur.read_uint("width");
    if (width == 0) throw PgmParseError("width", "must be positive");
    const std::uint64_t height = cur.read_uint("height");
    if (height == 0) throw PgmParseError("height", "must be positive");
    const std::uint64_t maxval = cur.read_uint("maxval");
    if (maxval == 0) throw PgmParseError("maxval", "must be positive");
    if (maxval > 65535) throw PgmParseError("maxval", "exceeds 65535");

    GrayImage img(height, width);
    const std::size_t count = img.size();
    const double scale = 1.0 / static_cast<double>(maxval);

    if (binary) {
        // Exactly one whitespace byte separates the header from the raster.
        if (cur.eof() || !detail::PgmCursor::is_space(cur.peek()))
            throw PgmParseError("pixel_data", "missing separator after maxval");
        ++cur.pos;
        const std::size_t bytes_per_sample = maxval > 255 ? 2 : 1;
        if (bytes.size() - cur.pos < count * bytes_per_sample)
            throw PgmParseError("pixel_data",
                                "truncated: need " + std::to_string(count * bytes_per_sample) +
                                    " bytes, have " + std::to_string(bytes.size() - cur.pos));
        for (std::size_t k = 0; k < count; ++k) {
            std::uint32_t v;
            if (bytes_per_sample == 1) {
                v = bytes[cur.pos + k];
            } else {
                v = (static_cast<std::uint32_t>(bytes[cur.pos + 2 * k]) << 8) |
                    bytes[cur.pos + 2 * k + 1];
            }
            if (v > maxval)
                throw PgmParseError("pixel_data", "sample " + std::to_string(v) +
                                                      " exceeds maxval " + std::to_string(maxval));
            img.pixels[k] = v * scale;
        }
    } else {
        for (std::size_t k = 0; k < count; ++k) {
            std::uint64_t v;
            try {
                v = cur.read_uint("pixel_data");
            } catch (const PgmParseError&) {
                throw PgmParseError("pixel_data", "truncated: expected " + std::to_string(count) +
                                                      " samples, got " + std::to_string(k));
            }
            if (v > maxval)
                throw PgmParseError("pixel_data", "sample " + std::to_string(v) +
                                                      " exceeds maxval " + std::to_string(maxval));
            img.pixels[k] = v * scale;
        }
    }
    return img;
}

/// Emits binary P5 with intensities quantized by round(p * maxval).
inline std::vector<std::uint8_t> write_pgm(const GrayImage& img, std::uint32_t maxval = 255) {
    if (maxval == 0 || maxval > 65535)
        throw std::invalid_argument("write_pgm: maxval must be in [1, 65535]");
    std::string header = "P5\n" + std::to_string(img.width) + " " + std::to_string(img.height) +
                         "\n" + std::to_string(maxval) + "\n";
    std::vector<std::uint8_t> out(header.begin(), header.end());
    const bool wide = maxval > 255;
    out.reserve(out.size() + img.size() * (wide ? 2 : 1));
    for (double p : img.pixels) {
        long v = std::lround(p * maxval);
        if (v < 0) v = 0;
        if (v > static_cast<long>(maxval)) v = maxval;
        if (wide) out.push_back(static_cast<std::uint8_t>(v >> 8));
        out.push_back(static_cast<std::uint8_t>(v & 0xFF));
    }
    return out;
}

inline GrayImage load_pgm(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
    try {
        return read_pgm(bytes);
    } catch (const PgmParseError& e) {
        throw std::runtime_error(path.string() + ": " + e.what());
    }
}

inline void save_pgm(const std::filesystem::path& path, const GrayImage& img,
                     std::uint32_t maxval = 255) {
    const auto bytes = write_pgm(img, maxval);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace polarface
