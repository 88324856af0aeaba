#include "uvforge/mask.hpp"

#include <algorithm>
#include <bit>
#include <cstdlib>
#include <set>

#include <json.hpp>

#include "uvforge/error.hpp"
#include "uvforge/fileio.hpp"

using nlohmann::json;

namespace uvforge {

int chebyshev_distance(Rgb8 a, Rgb8 b) {
    return std::max({std::abs(a.r - b.r), std::abs(a.g - b.g), std::abs(a.b - b.b)});
}

LabelRegistry::LabelRegistry(std::string garment_id, std::vector<PartLabel> entries)
    : garment_id_(std::move(garment_id)), entries_(std::move(entries)) {
    if (garment_id_.empty()) {
        throw Error(ErrorCode::SchemaError, "garment_id must be non-empty", "/garment_id");
    }
    if (entries_.size() >= kBackground) {
        throw Error(ErrorCode::SchemaError, "too many parts", "/parts");
    }
    std::set<std::string> names;
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        const PartLabel& label = entries_[i];
        const std::string path = "/parts/" + std::to_string(i);
        if (label.name.empty()) {
            throw Error(ErrorCode::SchemaError, "part name must be non-empty", path + "/name");
        }
        if (label.tolerance < 0 || label.tolerance > kMaxLabelTolerance) {
            throw Error(ErrorCode::SchemaError, "tolerance must be in [0, 32]", path + "/tolerance");
        }
        if (!names.insert(label.name).second) {
            throw Error(ErrorCode::DuplicateName, "duplicate part name '" + label.name + "'", path);
        }
    }
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        for (std::size_t j = i + 1; j < entries_.size(); ++j) {
            const PartLabel& a = entries_[i];
            const PartLabel& b = entries_[j];
            const int distance = chebyshev_distance(a.color, b.color);
            if (distance == 0) {
                throw Error(ErrorCode::DuplicateColor,
                            "parts '" + a.name + "' and '" + b.name + "' share color " +
                                format_hex_color(a.color));
            }
            if (distance <= a.tolerance + b.tolerance) {
                throw Error(ErrorCode::ColorsTooClose,
                            "parts '" + a.name + "' and '" + b.name + "' are " +
                                std::to_string(distance) + " apart, need more than " +
                                std::to_string(a.tolerance + b.tolerance));
            }
        }
    }
}

std::optional<std::uint16_t> LabelRegistry::find(std::string_view name) const {
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        if (entries_[i].name == name) return static_cast<std::uint16_t>(i);
    }
    return std::nullopt;
}

Rgb8 parse_hex_color(std::string_view text) {
    const auto bad = [&] {
        return Error(ErrorCode::SchemaError, "expected #RRGGBB color, got '" + std::string(text) + "'");
    };
    if (text.size() != 7 || text[0] != '#') throw bad();
    const auto nibble = [&](char c) -> int {
        if (c >= '0' && c <= '9') return c - '0';
        if (c >= 'a' && c <= 'f') return c - 'a' + 10;
        if (c >= 'A' && c <= 'F') return c - 'A' + 10;
        throw bad();
    };
    const auto byte = [&](std::size_t i) {
        return static_cast<std::uint8_t>(nibble(text[i]) * 16 + nibble(text[i + 1]));
    };
    return {byte(1), byte(3), byte(5)};
}

std::string format_hex_color(Rgb8 color) {
    static constexpr char kHex[] = "0123456789ABCDEF";
    std::string out = "#";
    for (std::uint8_t v : {color.r, color.g, color.b}) {
        out.push_back(kHex[v >> 4]);
        out.push_back(kHex[v & 0xF]);
    }
    return out;
}

namespace {

void reject_unknown(const json& object, std::initializer_list<std::string_view> allowed,
                    const std::string& path) {
    for (const auto& [key, value] : object.items()) {
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
            throw Error(ErrorCode::SchemaError, "unknown field '" + key + "'", path + "/" + key);
        }
    }
}

int read_tolerance(const json& value, const std::string& path) {
    if (!value.is_number_integer()) {
        throw Error(ErrorCode::SchemaError, "tolerance must be an integer", path);
    }
    const auto tol = value.get<std::int64_t>();
    if (tol < 0 || tol > kMaxLabelTolerance) {
        throw Error(ErrorCode::SchemaError, "tolerance must be in [0, 32]", path);
    }
    return static_cast<int>(tol);
}

}  // namespace

LabelRegistry parse_label_registry(std::string_view json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw Error(ErrorCode::ParseError, std::string("registry JSON: ") + e.what());
    }
    if (!doc.is_object()) throw Error(ErrorCode::SchemaError, "registry must be an object", "");
    reject_unknown(doc, {"garment_id", "tolerance", "parts"}, "");

    if (!doc.contains("garment_id") || !doc["garment_id"].is_string()) {
        throw Error(ErrorCode::SchemaError, "garment_id must be a string", "/garment_id");
    }
    int tolerance = kDefaultLabelTolerance;
    if (doc.contains("tolerance")) tolerance = read_tolerance(doc["tolerance"], "/tolerance");
    if (!doc.contains("parts") || !doc["parts"].is_array()) {
        throw Error(ErrorCode::SchemaError, "parts must be an array", "/parts");
    }

    std::vector<PartLabel> labels;
    for (std::size_t i = 0; i < doc["parts"].size(); ++i) {
        const json& part = doc["parts"][i];
        const std::string path = "/parts/" + std::to_string(i);
        if (!part.is_object()) throw Error(ErrorCode::SchemaError, "part must be an object", path);
        reject_unknown(part, {"name", "color", "tolerance"}, path);
        if (!part.contains("name") || !part["name"].is_string()) {
            throw Error(ErrorCode::SchemaError, "name must be a string", path + "/name");
        }
        if (!part.contains("color") || !part["color"].is_string()) {
            throw Error(ErrorCode::SchemaError, "color must be a string", path + "/color");
        }
        PartLabel label;
        label.name = part["name"].get<std::string>();
        try {
            label.color = parse_hex_color(part["color"].get<std::string>());
        } catch (const Error& e) {
            throw Error(e.code(), e.what(), path + "/color");
        }
        label.tolerance = part.contains("tolerance")
                              ? read_tolerance(part["tolerance"], path + "/tolerance")
                              : tolerance;
        labels.push_back(std::move(label));
    }
    return LabelRegistry(doc["garment_id"].get<std::string>(), std::move(labels));
}

LabelRegistry load_label_registry(const std::filesystem::path& path) {
    return parse_label_registry(read_text_file(path));
}

std::string registry_to_json(const LabelRegistry& registry) {
    // A shared tolerance is written once; per-part values only when they differ.
    const int shared = registry.entries().empty() ? kDefaultLabelTolerance
                                                  : registry.entries().front().tolerance;
    json parts = json::array();
    for (const PartLabel& label : registry.entries()) {
        json part = {{"name", label.name}, {"color", format_hex_color(label.color)}};
        if (label.tolerance != shared) part["tolerance"] = label.tolerance;
        parts.push_back(std::move(part));
    }
    json doc = {{"garment_id", registry.garment_id()}, {"tolerance", shared}, {"parts", parts}};
    return doc.dump(2);
}

PartMaskIndex::PartMaskIndex(LabelRegistry registry, int width, int height,
                             std::vector<std::uint16_t> labels, std::vector<std::uint8_t> coverage)
    : registry_(std::move(registry)),
      width_(width),
      height_(height),
      labels_(std::move(labels)),
      coverage_(std::move(coverage)) {
    const auto n = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
    if (labels_.size() != n || coverage_.size() != n) {
        throw Error(ErrorCode::DimensionMismatch, "label/coverage planes do not match dimensions");
    }
    for (std::size_t i = 0; i < n; ++i) {
        const bool background = labels_[i] == kBackground;
        if (!background && labels_[i] >= registry_.size()) {
            throw Error(ErrorCode::UnknownPart, "label id outside the registry");
        }
        if (background != (coverage_[i] == 0)) {
            throw Error(ErrorCode::SchemaError, "coverage must be zero exactly on background pixels");
        }
    }
}

PartMaskIndex classify_mask(const TextureAtlas& mask, const LabelRegistry& registry) {
    const std::size_t n = mask.pixel_count();
    std::vector<std::uint16_t> labels(n, kBackground);
    std::vector<std::uint8_t> coverage(n, 0);
    const auto& entries = registry.entries();
    const auto pixels = mask.pixels();
    for (std::size_t i = 0; i < n; ++i) {
        const Rgba8 px = pixels[i];
        if (px.a == 0) continue;
        for (std::size_t id = 0; id < entries.size(); ++id) {
            if (chebyshev_distance(px.rgb(), entries[id].color) <= entries[id].tolerance) {
                labels[i] = static_cast<std::uint16_t>(id);
                coverage[i] = px.a;
                break;
            }
        }
    }
    return PartMaskIndex(registry, mask.width(), mask.height(), std::move(labels),
                         std::move(coverage));
}

Region::Region(std::uint16_t label_id, int width, int height)
    : label_id_(label_id),
      width_(width),
      height_(height),
      words_((static_cast<std::size_t>(width) * static_cast<std::size_t>(height) + 63) / 64, 0) {}

void Region::insert(int x, int y) {
    const std::size_t i =
        static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x);
    std::uint64_t& word = words_[i >> 6];
    const std::uint64_t bit = std::uint64_t{1} << (i & 63);
    if (word & bit) return;
    word |= bit;
    ++pixel_count_;
    if (!bbox_) {
        bbox_ = BoundingBox{x, y, x, y};
    } else {
        bbox_->x_min = std::min(bbox_->x_min, x);
        bbox_->y_min = std::min(bbox_->y_min, y);
        bbox_->x_max = std::max(bbox_->x_max, x);
        bbox_->y_max = std::max(bbox_->y_max, y);
    }
}

Region extract_region(const PartMaskIndex& index, std::string_view part_name) {
    const auto id = index.registry().find(part_name);
    if (!id) {
        throw Error(ErrorCode::UnknownPart, "unknown part '" + std::string(part_name) + "'");
    }
    Region region(*id, index.width(), index.height());
    for (int y = 0; y < index.height(); ++y) {
        for (int x = 0; x < index.width(); ++x) {
            if (index.label(x, y) == *id) region.insert(x, y);
        }
    }
    return region;
}

ValidationReport validate_garment(const TextureAtlas& atlas, const TextureAtlas& mask,
                                  const LabelRegistry& registry, double unknown_threshold) {
    ValidationReport report;
    report.unknown_threshold = unknown_threshold;
    report.dimensions_match = atlas.same_size(mask);
    report.total_pixels = mask.pixel_count();

    for (const PartLabel& label : registry.entries()) report.label_pixel_counts[label.name] = 0;

    const PartMaskIndex index = classify_mask(mask, registry);
    const auto pixels = mask.pixels();
    for (std::size_t i = 0; i < pixels.size(); ++i) {
        const std::uint16_t label = index.labels()[i];
        if (label != kBackground) {
            ++report.label_pixel_counts[registry.label(label).name];
        } else if (pixels[i].a != 0) {
            ++report.unknown_pixels;
        }
    }
    report.unknown_fraction = report.total_pixels == 0
                                  ? 0.0
                                  : static_cast<double>(report.unknown_pixels) /
                                        static_cast<double>(report.total_pixels);
    for (const PartLabel& label : registry.entries()) {
        if (report.label_pixel_counts[label.name] == 0) report.empty_labels.push_back(label.name);
    }
    report.pass = report.dimensions_match && report.unknown_fraction <= unknown_threshold &&
                  report.empty_labels.empty();
    return report;
}

std::string report_to_json(const ValidationReport& report) {
    json counts = json::object();
    for (const auto& [name, count] : report.label_pixel_counts) counts[name] = count;
    json doc = {
        {"pass", report.pass},
        {"dimensions_match", report.dimensions_match},
        {"unknown_pixels", report.unknown_pixels},
        {"total_pixels", report.total_pixels},
        {"unknown_fraction", report.unknown_fraction},
        {"unknown_threshold", report.unknown_threshold},
        {"label_pixel_counts", counts},
        {"empty_labels", report.empty_labels},
    };
    return doc.dump();
}

}  // namespace uvforge
