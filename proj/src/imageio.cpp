#include "revadv/imageio.hpp"

#include <png.h>

#include <cstdio>
#include <cstring>
#include <fstream>

#include "revadv/crc32.hpp"
#include "revadv/errors.hpp"

namespace revadv {

std::vector<std::uint8_t> read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
    return bytes;
}

void write_file(const std::string& path, const std::vector<std::uint8_t>& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path);
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("short write to " + path);
}

namespace {

struct PngReadCtx {
    const std::uint8_t* data;
    std::size_t size;
    std::size_t pos;
};

void png_read_cb(png_structp png, png_bytep out, png_size_t n) {
    auto* ctx = static_cast<PngReadCtx*>(png_get_io_ptr(png));
    if (ctx->pos + n > ctx->size) png_error(png, "unexpected end of PNG stream");
    std::memcpy(out, ctx->data + ctx->pos, n);
    ctx->pos += n;
}

void png_write_cb(png_structp png, png_bytep data, png_size_t n) {
    auto* out = static_cast<std::vector<std::uint8_t>*>(png_get_io_ptr(png));
    out->insert(out->end(), data, data + n);
}

void png_flush_cb(png_structp) {}

}  // namespace

std::vector<std::uint8_t> encode_png(const ImageU8& img) {
    if (img.c != 1 && img.c != 3) throw FormatError("png: only 1- or 3-channel images supported");
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) throw IoError("png: create_write_struct failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        throw IoError("png: create_info_struct failed");
    }
    std::vector<std::uint8_t> out;
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw FormatError("png: encode failed");
    }
    png_set_write_fn(png, &out, png_write_cb, png_flush_cb);
    png_set_IHDR(png, info, static_cast<png_uint_32>(img.w), static_cast<png_uint_32>(img.h), 8,
                 img.c == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    std::vector<png_bytep> rows(static_cast<std::size_t>(img.h));
    for (int i = 0; i < img.h; ++i)
        rows[static_cast<std::size_t>(i)] =
            const_cast<png_bytep>(&img.data[static_cast<std::size_t>(i) * img.w * img.c]);
    png_write_image(png, rows.data());
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
    return out;
}

ImageU8 decode_png(const std::vector<std::uint8_t>& bytes) {
    if (bytes.size() < 8 || png_sig_cmp(bytes.data(), 0, 8) != 0)
        throw FormatError("png: bad signature");
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) throw IoError("png: create_read_struct failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        throw IoError("png: create_info_struct failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw FormatError("png: decode failed");
    }
    PngReadCtx ctx{bytes.data(), bytes.size(), 0};
    png_set_read_fn(png, &ctx, png_read_cb);
    png_read_info(png, info);

    png_set_strip_16(png);
    png_set_packing(png);
    const png_byte color = png_get_color_type(png, info);
    if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (color == PNG_COLOR_TYPE_GRAY && png_get_bit_depth(png, info) < 8)
        png_set_expand_gray_1_2_4_to_8(png);
    if (color & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(png);
    png_read_update_info(png, info);

    const int h = static_cast<int>(png_get_image_height(png, info));
    const int w = static_cast<int>(png_get_image_width(png, info));
    const int c = static_cast<int>(png_get_channels(png, info));
    if (c != 1 && c != 3) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw FormatError("png: unsupported channel count " + std::to_string(c));
    }
    ImageU8 img = ImageU8::make(h, w, c);
    std::vector<png_bytep> rows(static_cast<std::size_t>(h));
    for (int i = 0; i < h; ++i)
        rows[static_cast<std::size_t>(i)] = &img.data[static_cast<std::size_t>(i) * w * c];
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);
    return img;
}

void write_png(const std::string& path, const ImageU8& img) { write_file(path, encode_png(img)); }

ImageU8 read_png(const std::string& path) { return decode_png(read_file(path)); }

namespace {

std::uint32_t be32(const std::uint8_t* p) {
    return (static_cast<std::uint32_t>(p[0]) << 24) | (static_cast<std::uint32_t>(p[1]) << 16) |
           (static_cast<std::uint32_t>(p[2]) << 8) | static_cast<std::uint32_t>(p[3]);
}

}  // namespace

std::vector<ImageU8> read_idx_images(const std::string& path) {
    const auto bytes = read_file(path);
    if (bytes.size() < 16) throw FormatError("idx: truncated header in " + path);
    if (be32(&bytes[0]) != 0x00000803u)
        throw FormatError("idx: bad image magic in " + path);
    const std::size_t n = be32(&bytes[4]);
    const std::size_t h = be32(&bytes[8]);
    const std::size_t w = be32(&bytes[12]);
    if (bytes.size() != 16 + n * h * w)
        throw FormatError("idx: expected " + std::to_string(16 + n * h * w) + " bytes, got " +
                          std::to_string(bytes.size()) + " at offset 16 in " + path);
    std::vector<ImageU8> images;
    images.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        ImageU8 img = ImageU8::make(static_cast<int>(h), static_cast<int>(w), 1);
        std::memcpy(img.data.data(), &bytes[16 + i * h * w], h * w);
        images.push_back(std::move(img));
    }
    return images;
}

std::vector<int> read_idx_labels(const std::string& path) {
    const auto bytes = read_file(path);
    if (bytes.size() < 8) throw FormatError("idx: truncated header in " + path);
    if (be32(&bytes[0]) != 0x00000801u) throw FormatError("idx: bad label magic in " + path);
    const std::size_t n = be32(&bytes[4]);
    if (bytes.size() != 8 + n)
        throw FormatError("idx: expected " + std::to_string(8 + n) + " bytes, got " +
                          std::to_string(bytes.size()) + " in " + path);
    std::vector<int> labels(n);
    for (std::size_t i = 0; i < n; ++i) labels[i] = bytes[8 + i];
    return labels;
}

void write_stages(const std::string& path, const StageMatrix& stages) {
    if (!stages.valid_alphabet()) throw FormatError("stages: symbol outside alphabet");
    std::vector<std::uint8_t> out = {'R', 'V', 'S', 'M', 1,
                                     static_cast<std::uint8_t>(stages.xi)};
    out.push_back(static_cast<std::uint8_t>(stages.h >> 8));
    out.push_back(static_cast<std::uint8_t>(stages.h & 0xFF));
    out.push_back(static_cast<std::uint8_t>(stages.w >> 8));
    out.push_back(static_cast<std::uint8_t>(stages.w & 0xFF));
    for (auto s : stages.stages) out.push_back(static_cast<std::uint8_t>(s));
    const std::uint32_t crc = crc32(out);
    out.push_back(static_cast<std::uint8_t>(crc >> 24));
    out.push_back(static_cast<std::uint8_t>((crc >> 16) & 0xFF));
    out.push_back(static_cast<std::uint8_t>((crc >> 8) & 0xFF));
    out.push_back(static_cast<std::uint8_t>(crc & 0xFF));
    write_file(path, out);
}

StageMatrix read_stages(const std::string& path) {
    const auto bytes = read_file(path);
    if (bytes.size() < 14) throw FormatError("stages: truncated file " + path);
    if (std::memcmp(bytes.data(), "RVSM", 4) != 0)
        throw FormatError("stages: bad magic in " + path);
    if (bytes[4] != 1) throw FormatError("stages: unsupported version in " + path);
    StageMatrix m;
    m.xi = bytes[5];
    m.h = (bytes[6] << 8) | bytes[7];
    m.w = (bytes[8] << 8) | bytes[9];
    const std::size_t count = static_cast<std::size_t>(m.h) * static_cast<std::size_t>(m.w);
    if (bytes.size() != 10 + count + 4)
        throw FormatError("stages: expected " + std::to_string(10 + count + 4) + " bytes, got " +
                          std::to_string(bytes.size()) + " in " + path);
    if (crc32(bytes.data(), bytes.size() - 4) != be32(&bytes[bytes.size() - 4]))
        throw IntegrityError("stages: CRC mismatch in " + path);
    m.stages.resize(count);
    for (std::size_t i = 0; i < count; ++i)
        m.stages[i] = static_cast<std::int8_t>(bytes[10 + i]);
    if (!m.valid_alphabet()) throw FormatError("stages: symbol outside alphabet in " + path);
    return m;
}

}  // namespace revadv
