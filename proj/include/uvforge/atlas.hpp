#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace uvforge {

struct Rgb8 {
    std::uint8_t r = 0;
    std::uint8_t g = 0;
    std::uint8_t b = 0;

    friend bool operator==(const Rgb8&, const Rgb8&) = default;
};

struct Rgba8 {
    std::uint8_t r = 0;
    std::uint8_t g = 0;
    std::uint8_t b = 0;
    std::uint8_t a = 255;

    Rgb8 rgb() const { return {r, g, b}; }
    friend bool operator==(const Rgba8&, const Rgba8&) = default;
};

static_assert(sizeof(Rgba8) == 4, "Rgba8 must be tightly packed");

inline constexpr int kMaxAtlasSide = 16384;

/// Row-major RGBA8 raster, sRGB-encoded, straight alpha.
class TextureAtlas {
public:
    TextureAtlas() = default;
    /// Throws Error{DimensionBound} unless 1 <= width,height <= kMaxAtlasSide.
    TextureAtlas(int width, int height, Rgba8 fill = {});
    TextureAtlas(int width, int height, std::vector<Rgba8> pixels);

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    bool empty() const noexcept { return pixels_.empty(); }
    std::size_t pixel_count() const noexcept { return pixels_.size(); }

    const Rgba8& at(int x, int y) const { return pixels_[index(x, y)]; }
    Rgba8& at(int x, int y) { return pixels_[index(x, y)]; }

    std::span<const Rgba8> pixels() const noexcept { return pixels_; }
    std::span<Rgba8> pixels() noexcept { return pixels_; }

    /// Raw RGBA bytes, row-major.
    std::span<const std::uint8_t> bytes() const noexcept;

    bool same_size(const TextureAtlas& other) const noexcept {
        return width_ == other.width_ && height_ == other.height_;
    }

    friend bool operator==(const TextureAtlas&, const TextureAtlas&) = default;

private:
    std::size_t index(int x, int y) const noexcept {
        return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
               static_cast<std::size_t>(x);
    }

    int width_ = 0;
    int height_ = 0;
    std::vector<Rgba8> pixels_;
};

/// Decodes an 8-bit PNG (gray, gray+alpha, palette, RGB, RGBA) into RGBA.
/// Missing alpha becomes 255. Throws DecodeError or DimensionBound.
TextureAtlas decode_png(std::span<const std::uint8_t> data);

/// Reads and decodes a PNG file. Throws FileNotFound in addition to the
/// decode errors.
TextureAtlas load_atlas(const std::filesystem::path& path);

/// Encodes as 8-bit RGBA PNG. Output is deterministic for a given build.
std::vector<std::uint8_t> encode_png(const TextureAtlas& atlas);

void save_png(const TextureAtlas& atlas, const std::filesystem::path& path);

/// SHA-256 (lowercase hex) over width and height as big-endian u32
/// followed by the RGBA bytes. This is the texture digest used by the
/// wardrobe and the goldens; it is independent of PNG compression.
std::string pixel_digest(const TextureAtlas& atlas);

}  // namespace uvforge
