#pragma once

#include <filesystem>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "uvforge/atlas.hpp"
#include "uvforge/color.hpp"
#include "uvforge/gen.hpp"
#include "uvforge/mask.hpp"

namespace uvforge {

// ---- image references -----------------------------------------------------

struct GeneratedImage {
    GenRequest request;
    friend bool operator==(const GeneratedImage&, const GeneratedImage&) = default;
};

/// PNG bytes carried in the recipe; sha256 must match the payload.
struct InlineImage {
    std::string sha256;
    std::vector<std::uint8_t> png;
    friend bool operator==(const InlineImage&, const InlineImage&) = default;
};

/// Path relative to the resolver's asset root.
struct AssetImage {
    std::string path;
    friend bool operator==(const AssetImage&, const AssetImage&) = default;
};

using ImageRef = std::variant<GeneratedImage, InlineImage, AssetImage>;

class ImageResolver {
public:
    virtual ~ImageResolver() = default;
    /// Throws Error; provider failures keep their own codes, everything else
    /// becomes ResolveError.
    virtual TextureAtlas resolve(const ImageRef& ref) = 0;
};

/// Generated refs go through cached_resolve when a cache directory is set,
/// straight to the provider otherwise. Asset paths must stay inside the
/// asset root.
class StandardResolver final : public ImageResolver {
public:
    StandardResolver(std::shared_ptr<ImageProvider> provider, std::filesystem::path asset_root,
                     std::filesystem::path cache_dir = {});

    TextureAtlas resolve(const ImageRef& ref) override;

private:
    std::shared_ptr<ImageProvider> provider_;
    std::filesystem::path asset_root_;
    std::filesystem::path cache_dir_;
};

// ---- edit operations ------------------------------------------------------

enum class FitMode { Tile, Stretch };

struct RecolorOp {
    std::string part;
    Rgb8 target;
    bool preserve_shading = false;
    friend bool operator==(const RecolorOp&, const RecolorOp&) = default;
};

struct TextureFillOp {
    std::string part;
    ImageRef image;
    FitMode fit = FitMode::Tile;
    double tile_scale = 1.0;
    Fraction blend_opacity = Fraction::one();
    friend bool operator==(const TextureFillOp&, const TextureFillOp&) = default;
};

struct LogoStampOp {
    std::string part;
    ImageRef image;
    double anchor_u = 0.5;
    double anchor_v = 0.5;
    double scale = 1.0;
    double rotation_deg = 0.0;
    Fraction opacity = Fraction::one();
    friend bool operator==(const LogoStampOp&, const LogoStampOp&) = default;
};

using EditOp = std::variant<RecolorOp, TextureFillOp, LogoStampOp>;

const std::string& op_part(const EditOp& op);

inline constexpr int kRecipeSchemaVersion = 1;

struct Recipe {
    int schema_version = kRecipeSchemaVersion;
    std::string garment_id;
    /// ISO-8601 UTC, e.g. 2024-05-01T12:00:00Z.
    std::string created_at;
    std::vector<EditOp> ops;
    friend bool operator==(const Recipe&, const Recipe&) = default;
};

/// Strict parse: unknown fields and out-of-range values are rejected with
/// SchemaError whose detail is the JSON path (e.g. "/ops/1/opacity").
/// Malformed JSON throws ParseError with line/column in the message.
Recipe parse_recipe(std::string_view json_text);
Recipe recipe_from_json(const nlohmann::json& json);
nlohmann::json to_json(const Recipe& recipe);
std::string recipe_to_string(const Recipe& recipe);

// ---- garment --------------------------------------------------------------

/// Installed garment: atlas, artist mask and the derived part index.
struct Garment {
    LabelRegistry registry;
    TextureAtlas atlas;
    TextureAtlas mask;
    PartMaskIndex index;

    const std::string& id() const { return registry.garment_id(); }
};

Garment make_garment(LabelRegistry registry, TextureAtlas atlas, TextureAtlas mask);

// ---- pixel operations -----------------------------------------------------
//
// Every operation mixes RGB only, with weight coverage (x opacity); alpha is
// carried through from the input atlas. Pixels outside the region are left
// byte-identical.

/// Throws EmptyRegion, DimensionMismatch.
TextureAtlas recolor(const TextureAtlas& atlas, const Region& region, const PartMaskIndex& index,
                     Rgb8 target, bool preserve_shading);

/// Throws EmptyRegion, EmptyFillImage, DimensionMismatch, NonPositiveScale.
TextureAtlas texture_fill(const TextureAtlas& atlas, const Region& region,
                          const PartMaskIndex& index, const TextureAtlas& fill, FitMode fit,
                          double tile_scale, Fraction blend_opacity);

/// Throws EmptyRegion, EmptyLogo, NonPositiveScale, DimensionMismatch.
TextureAtlas logo_stamp(const TextureAtlas& atlas, const Region& region,
                        const PartMaskIndex& index, const TextureAtlas& logo, double anchor_u,
                        double anchor_v, double scale, double rotation_deg, Fraction opacity);

/// Bilinear sample at pixel-index coordinates (integer coordinates hit pixel
/// centers), clamping at edges. Returns real channel values.
struct SampleRgba {
    double r, g, b, a;
};
SampleRgba sample_bilinear_clamp(const TextureAtlas& image, double x, double y);
SampleRgba sample_bilinear_wrap(const TextureAtlas& image, double x, double y);

TextureAtlas apply_op(const Garment& garment, const TextureAtlas& atlas, const EditOp& op,
                      ImageResolver& resolver);

/// Ordered fold of apply_op. Throws GarmentMismatch; any op failure is
/// rethrown with its op index attached.
TextureAtlas apply_recipe(const Garment& garment, const TextureAtlas& base, const Recipe& recipe,
                          ImageResolver& resolver);

}  // namespace uvforge
