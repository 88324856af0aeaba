#include "uvforge/atlas.hpp"

#include <png.h>

#include <cstring>

#include "uvforge/digest.hpp"
#include "uvforge/error.hpp"
#include "uvforge/fileio.hpp"

namespace uvforge {

namespace {

void check_bounds(int width, int height) {
    if (width < 1 || height < 1 || width > kMaxAtlasSide || height > kMaxAtlasSide) {
        throw Error(ErrorCode::DimensionBound, "atlas dimensions " + std::to_string(width) + "x" +
                                                   std::to_string(height) + " outside 1.." +
                                                   std::to_string(kMaxAtlasSide));
    }
}

constexpr std::uint8_t kPngSignature[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1A, '\n'};

// Frees libpng's read state on every exit path.
struct PngImage {
    png_image image;
    PngImage() {
        std::memset(&image, 0, sizeof image);
        image.version = PNG_IMAGE_VERSION;
    }
    ~PngImage() { png_image_free(&image); }
};

}  // namespace

TextureAtlas::TextureAtlas(int width, int height, Rgba8 fill) {
    check_bounds(width, height);
    width_ = width;
    height_ = height;
    pixels_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill);
}

TextureAtlas::TextureAtlas(int width, int height, std::vector<Rgba8> pixels) {
    check_bounds(width, height);
    if (pixels.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
        throw Error(ErrorCode::DimensionMismatch, "pixel count does not match width x height");
    }
    width_ = width;
    height_ = height;
    pixels_ = std::move(pixels);
}

std::span<const std::uint8_t> TextureAtlas::bytes() const noexcept {
    return {reinterpret_cast<const std::uint8_t*>(pixels_.data()), pixels_.size() * 4};
}

TextureAtlas decode_png(std::span<const std::uint8_t> data) {
    if (data.size() < sizeof kPngSignature ||
        std::memcmp(data.data(), kPngSignature, sizeof kPngSignature) != 0) {
        throw Error(ErrorCode::DecodeError, "not a PNG file");
    }
    PngImage png;
    if (!png_image_begin_read_from_memory(&png.image, data.data(), data.size())) {
        throw Error(ErrorCode::DecodeError, std::string("PNG header: ") + png.image.message);
    }
    if (png.image.format & PNG_FORMAT_FLAG_LINEAR) {
        throw Error(ErrorCode::DecodeError, "16-bit PNG is not supported");
    }
    const int width = static_cast<int>(png.image.width);
    const int height = static_cast<int>(png.image.height);
    check_bounds(width, height);

    png.image.format = PNG_FORMAT_RGBA;
    std::vector<Rgba8> pixels(static_cast<std::size_t>(width) * static_cast<std::size_t>(height));
    if (!png_image_finish_read(&png.image, nullptr, pixels.data(), 0, nullptr)) {
        throw Error(ErrorCode::DecodeError, std::string("PNG data: ") + png.image.message);
    }
    return TextureAtlas(width, height, std::move(pixels));
}

TextureAtlas load_atlas(const std::filesystem::path& path) {
    const auto bytes = read_file(path);
    try {
        return decode_png(bytes);
    } catch (const Error& e) {
        throw Error(e.code(), path.string() + ": " + e.what());
    }
}

std::vector<std::uint8_t> encode_png(const TextureAtlas& atlas) {
    if (atlas.empty()) {
        throw Error(ErrorCode::DimensionBound, "cannot encode an empty atlas");
    }
    png_image image;
    std::memset(&image, 0, sizeof image);
    image.version = PNG_IMAGE_VERSION;
    image.width = static_cast<png_uint_32>(atlas.width());
    image.height = static_cast<png_uint_32>(atlas.height());
    image.format = PNG_FORMAT_RGBA;

    png_alloc_size_t size = 0;
    if (!png_image_write_get_memory_size(image, size, 0, atlas.pixels().data(), 0, nullptr)) {
        throw std::runtime_error(std::string("PNG size query failed: ") + image.message);
    }
    std::vector<std::uint8_t> out(size);
    if (!png_image_write_to_memory(&image, out.data(), &size, 0, atlas.pixels().data(), 0,
                                   nullptr)) {
        throw std::runtime_error(std::string("PNG encode failed: ") + image.message);
    }
    out.resize(size);
    return out;
}

void save_png(const TextureAtlas& atlas, const std::filesystem::path& path) {
    write_file_atomic(path, encode_png(atlas));
}

std::string pixel_digest(const TextureAtlas& atlas) {
    std::vector<std::uint8_t> buf;
    buf.reserve(8 + atlas.bytes().size());
    const auto put_be32 = [&buf](std::uint32_t v) {
        for (int shift = 24; shift >= 0; shift -= 8) buf.push_back(static_cast<std::uint8_t>(v >> shift));
    };
    put_be32(static_cast<std::uint32_t>(atlas.width()));
    put_be32(static_cast<std::uint32_t>(atlas.height()));
    buf.insert(buf.end(), atlas.bytes().begin(), atlas.bytes().end());
    return sha256_hex(buf);
}

}  // namespace uvforge
