#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "uvforge/atlas.hpp"

namespace uvforge {

inline constexpr int kDefaultLabelTolerance = 8;
inline constexpr int kMaxLabelTolerance = 32;
inline constexpr double kDefaultUnknownThreshold = 0.01;

struct PartLabel {
    std::string name;
    Rgb8 color;
    int tolerance = kDefaultLabelTolerance;

    friend bool operator==(const PartLabel&, const PartLabel&) = default;
};

/// Largest per-channel absolute difference.
int chebyshev_distance(Rgb8 a, Rgb8 b);

/// Ordered part labels for one garment. Construction enforces unique names,
/// distinct colors, and a Chebyshev separation strictly greater than the sum
/// of the pair's tolerances, so no color can match two labels.
class LabelRegistry {
public:
    LabelRegistry() = default;
    LabelRegistry(std::string garment_id, std::vector<PartLabel> entries);

    const std::string& garment_id() const noexcept { return garment_id_; }
    const std::vector<PartLabel>& entries() const noexcept { return entries_; }
    std::size_t size() const noexcept { return entries_.size(); }

    std::optional<std::uint16_t> find(std::string_view name) const;
    const PartLabel& label(std::uint16_t id) const { return entries_.at(id); }

    friend bool operator==(const LabelRegistry&, const LabelRegistry&) = default;

private:
    std::string garment_id_;
    std::vector<PartLabel> entries_;
};

/// Parses the registry JSON document. Throws ParseError, SchemaError,
/// DuplicateName, DuplicateColor or ColorsTooClose.
LabelRegistry parse_label_registry(std::string_view json_text);
LabelRegistry load_label_registry(const std::filesystem::path& path);
std::string registry_to_json(const LabelRegistry& registry);

/// "#RRGGBB" (case-insensitive) to color; throws SchemaError.
Rgb8 parse_hex_color(std::string_view text);
/// Uppercase "#RRGGBB".
std::string format_hex_color(Rgb8 color);

inline constexpr std::uint16_t kBackground = 0xFFFF;

/// Per-pixel label assignment plus soft coverage. Coverage is stored as
/// the mask alpha byte; the coverage fraction is byte/255. A pixel has
/// nonzero coverage iff it carries a label.
class PartMaskIndex {
public:
    PartMaskIndex(LabelRegistry registry, int width, int height,
                  std::vector<std::uint16_t> labels, std::vector<std::uint8_t> coverage);

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    const LabelRegistry& registry() const noexcept { return registry_; }

    std::uint16_t label(int x, int y) const { return labels_[idx(x, y)]; }
    std::uint8_t coverage(int x, int y) const { return coverage_[idx(x, y)]; }
    const std::vector<std::uint16_t>& labels() const noexcept { return labels_; }
    const std::vector<std::uint8_t>& coverage() const noexcept { return coverage_; }

    friend bool operator==(const PartMaskIndex&, const PartMaskIndex&) = default;

private:
    std::size_t idx(int x, int y) const noexcept {
        return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
               static_cast<std::size_t>(x);
    }

    LabelRegistry registry_;
    int width_ = 0;
    int height_ = 0;
    std::vector<std::uint16_t> labels_;
    std::vector<std::uint8_t> coverage_;
};

/// Assigns each mask pixel to the label whose color is within tolerance.
/// Pixels with alpha 0 or no match are background. Total; never throws.
PartMaskIndex classify_mask(const TextureAtlas& mask, const LabelRegistry& registry);

struct BoundingBox {
    int x_min = 0;
    int y_min = 0;
    int x_max = 0;
    int y_max = 0;

    int width() const noexcept { return x_max - x_min + 1; }
    int height() const noexcept { return y_max - y_min + 1; }
    friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
};

/// Pixel set of one part as a packed bitset with its tight bounding box.
class Region {
public:
    Region(std::uint16_t label_id, int width, int height);

    std::uint16_t label_id() const noexcept { return label_id_; }
    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }

    bool contains(int x, int y) const noexcept {
        const std::size_t i = static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
                              static_cast<std::size_t>(x);
        return (words_[i >> 6] >> (i & 63)) & 1u;
    }
    void insert(int x, int y);

    std::size_t pixel_count() const noexcept { return pixel_count_; }
    bool empty() const noexcept { return pixel_count_ == 0; }
    /// Absent for an empty region.
    const std::optional<BoundingBox>& bbox() const noexcept { return bbox_; }
    const std::vector<std::uint64_t>& words() const noexcept { return words_; }

    friend bool operator==(const Region&, const Region&) = default;

private:
    std::uint16_t label_id_;
    int width_;
    int height_;
    std::vector<std::uint64_t> words_;
    std::size_t pixel_count_ = 0;
    std::optional<BoundingBox> bbox_;
};

/// Throws UnknownPart if the name is not registered. An empty region is
/// returned, not thrown.
Region extract_region(const PartMaskIndex& index, std::string_view part_name);

struct ValidationReport {
    std::map<std::string, std::size_t> label_pixel_counts;
    std::size_t unknown_pixels = 0;
    std::size_t total_pixels = 0;
    double unknown_fraction = 0.0;
    double unknown_threshold = kDefaultUnknownThreshold;
    bool dimensions_match = false;
    std::vector<std::string> empty_labels;
    bool pass = false;
};

/// Unknown pixels are mask pixels with nonzero alpha that match no label.
/// Every registry label is required to be non-empty.
ValidationReport validate_garment(const TextureAtlas& atlas, const TextureAtlas& mask,
                                  const LabelRegistry& registry,
                                  double unknown_threshold = kDefaultUnknownThreshold);

std::string report_to_json(const ValidationReport& report);

}  // namespace uvforge
