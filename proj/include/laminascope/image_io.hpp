#pragma once

/**
 * @file image_io.hpp
 * @brief 8-bit grayscale image readers/writers: PGM (P5) and PNG.
 *
 * PGM is the canonical lossless interchange format; PNG is accepted for
 * convenience (non-grayscale PNGs are converted by Rec.601 luminance).
 * Loading maps byte value b to b/255.0; saving clamps to [0,1] and rounds
 * to 8 bits, so a save/load round trip is exact to 1/255 per pixel.
 */

#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <zlib.h>

#include "laminascope/image.hpp"

namespace laminascope {

struct IoError : std::runtime_error {
    enum class Code { MissingFile, CorruptHeader, UnsupportedFormat, UnwritablePath };
    Code code;
    IoError(Code c, const std::string& msg) : std::runtime_error(msg), code(c) {}
};

namespace detail {

inline std::vector<uint8_t> read_file_bytes(const std::string& path) {
    if (!std::filesystem::exists(path))
        throw IoError(IoError::Code::MissingFile, "no such file: " + path);
    std::ifstream f(path, std::ios::binary);
    if (!f)
        throw IoError(IoError::Code::MissingFile, "cannot open file: " + path);
    std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(f)),
                               std::istreambuf_iterator<char>());
    return bytes;
}

// --- PGM -------------------------------------------------------------------

// Reads one whitespace/comment-delimited token from a PGM header.
inline std::string pgm_token(const std::vector<uint8_t>& b, size_t& pos) {
    while (pos < b.size()) {
        if (std::isspace(b[pos])) {
            ++pos;
        } else if (b[pos] == '#') {
            while (pos < b.size() && b[pos] != '\n') ++pos;
        } else {
            break;
        }
    }
    std::string tok;
    while (pos < b.size() && !std::isspace(b[pos]) && b[pos] != '#')
        tok.push_back(static_cast<char>(b[pos++]));
    return tok;
}

inline Image load_pgm(const std::vector<uint8_t>& bytes, const std::string& path) {
    size_t pos = 2;  // past "P5"
    auto parse_int = [&](const char* what) {
        const std::string tok = pgm_token(bytes, pos);
        if (tok.empty() || tok.find_first_not_of("0123456789") != std::string::npos)
            throw IoError(IoError::Code::CorruptHeader,
                          path + ": bad PGM " + what + " field");
        return std::stol(tok);
    };
    const long w = parse_int("width");
    const long h = parse_int("height");
    const long maxval = parse_int("maxval");
    if (w <= 0 || h <= 0)
        throw IoError(IoError::Code::CorruptHeader, path + ": bad PGM dimensions");
    if (maxval > 255)
        throw IoError(IoError::Code::UnsupportedFormat,
                      path + ": only 8-bit PGM supported (maxval " + std::to_string(maxval) + ")");
    if (maxval <= 0)
        throw IoError(IoError::Code::CorruptHeader, path + ": bad PGM maxval");
    if (pos >= bytes.size() || !std::isspace(bytes[pos]))
        throw IoError(IoError::Code::CorruptHeader, path + ": malformed PGM header");
    ++pos;  // single whitespace before raster

    const size_t need = static_cast<size_t>(w) * h;
    if (bytes.size() - pos < need)
        throw IoError(IoError::Code::CorruptHeader, path + ": truncated PGM raster");

    Image img(static_cast<int>(w), static_cast<int>(h));
    for (size_t i = 0; i < need; ++i)
        img.data[i] = bytes[pos + i] / 255.0;
    return img;
}

// --- PNG -------------------------------------------------------------------

inline uint32_t be32(const uint8_t* p) {
    return (uint32_t(p[0]) << 24) | (uint32_t(p[1]) << 16) | (uint32_t(p[2]) << 8) | p[3];
}

inline void put_be32(std::vector<uint8_t>& out, uint32_t v) {
    out.push_back(uint8_t(v >> 24));
    out.push_back(uint8_t(v >> 16));
    out.push_back(uint8_t(v >> 8));
    out.push_back(uint8_t(v));
}

inline int paeth(int a, int b, int c) {
    const int p = a + b - c;
    const int pa = std::abs(p - a), pb = std::abs(p - b), pc = std::abs(p - c);
    if (pa <= pb && pa <= pc) return a;
    return pb <= pc ? b : c;
}

inline Image load_png(const std::vector<uint8_t>& bytes, const std::string& path) {
    static const uint8_t sig[8] = {0x89, 'P', 'N', 'G', 0x0d, 0x0a, 0x1a, 0x0a};
    if (bytes.size() < 8 + 25 || std::memcmp(bytes.data(), sig, 8) != 0)
        throw IoError(IoError::Code::CorruptHeader, path + ": bad PNG signature");

    size_t pos = 8;
    uint32_t w = 0, h = 0;
    int bit_depth = 0, color_type = 0, interlace = 0;
    bool seen_ihdr = false, seen_iend = false;
    std::vector<uint8_t> idat;

    while (pos + 8 <= bytes.size()) {
        const uint32_t len = be32(&bytes[pos]);
        if (pos + 12 + static_cast<size_t>(len) > bytes.size())
            throw IoError(IoError::Code::CorruptHeader, path + ": truncated PNG chunk");
        const char* type = reinterpret_cast<const char*>(&bytes[pos + 4]);
        const uint8_t* data = &bytes[pos + 8];

        if (std::memcmp(type, "IHDR", 4) == 0) {
            if (len != 13)
                throw IoError(IoError::Code::CorruptHeader, path + ": bad IHDR length");
            w = be32(data);
            h = be32(data + 4);
            bit_depth = data[8];
            color_type = data[9];
            interlace = data[12];
            seen_ihdr = true;
        } else if (std::memcmp(type, "IDAT", 4) == 0) {
            idat.insert(idat.end(), data, data + len);
        } else if (std::memcmp(type, "IEND", 4) == 0) {
            seen_iend = true;
            break;
        }
        pos += 12 + len;
    }
    if (!seen_ihdr || !seen_iend || w == 0 || h == 0)
        throw IoError(IoError::Code::CorruptHeader, path + ": missing PNG chunks");
    if (bit_depth != 8)
        throw IoError(IoError::Code::UnsupportedFormat,
                      path + ": only 8-bit PNG supported (depth " + std::to_string(bit_depth) + ")");
    if (interlace != 0)
        throw IoError(IoError::Code::UnsupportedFormat, path + ": interlaced PNG not supported");

    int channels;
    switch (color_type) {
        case 0: channels = 1; break;  // grayscale
        case 2: channels = 3; break;  // RGB
        case 4: channels = 2; break;  // gray + alpha
        case 6: channels = 4; break;  // RGBA
        default:
            throw IoError(IoError::Code::UnsupportedFormat,
                          path + ": unsupported PNG color type " + std::to_string(color_type));
    }

    const size_t stride = static_cast<size_t>(w) * channels;
    const size_t raw_size = (stride + 1) * h;
    std::vector<uint8_t> raw(raw_size);
    uLongf dest_len = raw_size;
    if (uncompress(raw.data(), &dest_len, idat.data(), idat.size()) != Z_OK || dest_len != raw_size)
        throw IoError(IoError::Code::CorruptHeader, path + ": PNG inflate failed");

    // undo per-scanline filters in place
    std::vector<uint8_t> pix(stride * h);
    for (uint32_t y = 0; y < h; ++y) {
        const uint8_t filter = raw[y * (stride + 1)];
        const uint8_t* src = &raw[y * (stride + 1) + 1];
        uint8_t* dst = &pix[y * stride];
        const uint8_t* prev = y > 0 ? &pix[(y - 1) * stride] : nullptr;
        for (size_t i = 0; i < stride; ++i) {
            const int a = i >= static_cast<size_t>(channels) ? dst[i - channels] : 0;
            const int b = prev ? prev[i] : 0;
            const int c = (prev && i >= static_cast<size_t>(channels)) ? prev[i - channels] : 0;
            int v = src[i];
            switch (filter) {
                case 0: break;
                case 1: v += a; break;
                case 2: v += b; break;
                case 3: v += (a + b) / 2; break;
                case 4: v += paeth(a, b, c); break;
                default:
                    throw IoError(IoError::Code::CorruptHeader, path + ": bad PNG filter byte");
            }
            dst[i] = static_cast<uint8_t>(v & 0xff);
        }
    }

    Image img(static_cast<int>(w), static_cast<int>(h));
    for (size_t i = 0; i < static_cast<size_t>(w) * h; ++i) {
        const uint8_t* px = &pix[i * channels];
        double v;
        if (channels == 1 || channels == 2) {
            v = px[0] / 255.0;
        } else {
            v = (0.299 * px[0] + 0.587 * px[1] + 0.114 * px[2]) / 255.0;
        }
        img.data[i] = v;
    }
    return img;
}

inline std::vector<uint8_t> encode_png(const Image& img) {
    const size_t stride = static_cast<size_t>(img.width);
    std::vector<uint8_t> raw((stride + 1) * img.height);
    for (int y = 0; y < img.height; ++y) {
        raw[y * (stride + 1)] = 0;  // filter: none
        for (int x = 0; x < img.width; ++x) {
            const double v = std::clamp(img.at(x, y), 0.0, 1.0);
            raw[y * (stride + 1) + 1 + x] = static_cast<uint8_t>(std::lround(v * 255.0));
        }
    }

    uLongf bound = compressBound(raw.size());
    std::vector<uint8_t> compressed(bound);
    if (compress2(compressed.data(), &bound, raw.data(), raw.size(), 6) != Z_OK)
        throw std::runtime_error("encode_png: deflate failed");
    compressed.resize(bound);

    std::vector<uint8_t> out;
    static const uint8_t sig[8] = {0x89, 'P', 'N', 'G', 0x0d, 0x0a, 0x1a, 0x0a};
    out.insert(out.end(), sig, sig + 8);

    auto chunk = [&out](const char* type, const std::vector<uint8_t>& body) {
        put_be32(out, static_cast<uint32_t>(body.size()));
        const size_t start = out.size();
        out.insert(out.end(), type, type + 4);
        out.insert(out.end(), body.begin(), body.end());
        const uint32_t crc = crc32(0, out.data() + start, static_cast<uInt>(out.size() - start));
        put_be32(out, crc);
    };

    std::vector<uint8_t> ihdr;
    put_be32(ihdr, static_cast<uint32_t>(img.width));
    put_be32(ihdr, static_cast<uint32_t>(img.height));
    ihdr.push_back(8);  // bit depth
    ihdr.push_back(0);  // grayscale
    ihdr.push_back(0);  // compression
    ihdr.push_back(0);  // filter
    ihdr.push_back(0);  // no interlace
    chunk("IHDR", ihdr);
    chunk("IDAT", compressed);
    chunk("IEND", {});
    return out;
}

}  // namespace detail

/// Loads an 8-bit grayscale PGM (P5) or PNG image; intensities scaled to [0,1].
inline Image load_image(const std::string& path) {
    const auto bytes = detail::read_file_bytes(path);
    if (bytes.size() >= 2 && bytes[0] == 'P' && bytes[1] == '5')
        return detail::load_pgm(bytes, path);
    if (bytes.size() >= 4 && bytes[0] == 0x89 && bytes[1] == 'P')
        return detail::load_png(bytes, path);
    if (bytes.size() >= 2 && bytes[0] == 'P')
        throw IoError(IoError::Code::UnsupportedFormat,
                      path + ": only binary 8-bit PGM (P5) is supported");
    throw IoError(IoError::Code::CorruptHeader, path + ": not a PGM or PNG file");
}

/// Saves as 8-bit. Format chosen by extension: ".png" writes PNG, anything
/// else raw PGM (P5). Values are clamped to [0,1] before quantization.
inline void save_image(const Image& img, const std::string& path) {
    if (!img.all_finite())
        throw std::invalid_argument("save_image: non-finite intensities");

    std::vector<uint8_t> bytes;
    const bool png = path.size() >= 4 && path.substr(path.size() - 4) == ".png";
    if (png) {
        bytes = detail::encode_png(img);
    } else {
        std::ostringstream header;
        header << "P5\n" << img.width << " " << img.height << "\n255\n";
        const std::string h = header.str();
        bytes.assign(h.begin(), h.end());
        bytes.reserve(bytes.size() + img.size());
        for (double v : img.data) {
            const double c = std::clamp(v, 0.0, 1.0);
            bytes.push_back(static_cast<uint8_t>(std::lround(c * 255.0)));
        }
    }

    std::ofstream f(path, std::ios::binary);
    if (!f)
        throw IoError(IoError::Code::UnwritablePath, "cannot write: " + path);
    f.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
    if (!f)
        throw IoError(IoError::Code::UnwritablePath, "write failed: " + path);
}

}  // namespace laminascope
