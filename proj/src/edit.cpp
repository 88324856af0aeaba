#include "uvforge/edit.hpp"

#include <cmath>
#include <numbers>

#include "uvforge/error.hpp"

namespace uvforge {

namespace {

void check_inputs(const TextureAtlas& atlas, const Region& region, const PartMaskIndex& index) {
    if (region.empty()) {
        throw Error(ErrorCode::EmptyRegion, "region has no pixels");
    }
    if (atlas.width() != index.width() || atlas.height() != index.height() ||
        region.width() != index.width() || region.height() != index.height()) {
        throw Error(ErrorCode::DimensionMismatch, "atlas, region and mask index sizes differ");
    }
}

Rgba8 with_rgb(Rgba8 px, Rgb8 rgb) { return {rgb.r, rgb.g, rgb.b, px.a}; }

double lerp(double a, double b, double t) { return a + (b - a) * t; }

SampleRgba bilinear(const Rgba8& p00, const Rgba8& p10, const Rgba8& p01, const Rgba8& p11,
                    double fx, double fy) {
    const auto channel = [&](auto member) {
        const double top = lerp(p00.*member, p10.*member, fx);
        const double bottom = lerp(p01.*member, p11.*member, fx);
        return lerp(top, bottom, fy);
    };
    return {channel(&Rgba8::r), channel(&Rgba8::g), channel(&Rgba8::b), channel(&Rgba8::a)};
}

Rgb8 quantize_rgb(const SampleRgba& s) { return {quantize(s.r), quantize(s.g), quantize(s.b)}; }

bool valid_scale(double s) { return std::isfinite(s) && s > 0.0; }

}  // namespace

const std::string& op_part(const EditOp& op) {
    return std::visit([](const auto& o) -> const std::string& { return o.part; }, op);
}

SampleRgba sample_bilinear_clamp(const TextureAtlas& image, double x, double y) {
    const double max_x = image.width() - 1;
    const double max_y = image.height() - 1;
    x = std::clamp(x, 0.0, max_x);
    y = std::clamp(y, 0.0, max_y);
    const int x0 = static_cast<int>(std::floor(x));
    const int y0 = static_cast<int>(std::floor(y));
    const int x1 = std::min(x0 + 1, image.width() - 1);
    const int y1 = std::min(y0 + 1, image.height() - 1);
    return bilinear(image.at(x0, y0), image.at(x1, y0), image.at(x0, y1), image.at(x1, y1),
                    x - x0, y - y0);
}

SampleRgba sample_bilinear_wrap(const TextureAtlas& image, double x, double y) {
    const double w = image.width();
    const double h = image.height();
    x = std::fmod(x, w);
    if (x < 0.0) x += w;
    y = std::fmod(y, h);
    if (y < 0.0) y += h;
    const int x0 = std::min(static_cast<int>(std::floor(x)), image.width() - 1);
    const int y0 = std::min(static_cast<int>(std::floor(y)), image.height() - 1);
    const int x1 = (x0 + 1) % image.width();
    const int y1 = (y0 + 1) % image.height();
    return bilinear(image.at(x0, y0), image.at(x1, y0), image.at(x0, y1), image.at(x1, y1),
                    x - x0, y - y0);
}

TextureAtlas recolor(const TextureAtlas& atlas, const Region& region, const PartMaskIndex& index,
                     Rgb8 target, bool preserve_shading) {
    check_inputs(atlas, region, index);
    TextureAtlas out = atlas;
    const BoundingBox box = *region.bbox();
    for (int y = box.y_min; y <= box.y_max; ++y) {
        for (int x = box.x_min; x <= box.x_max; ++x) {
            if (!region.contains(x, y)) continue;
            const Rgba8 src = atlas.at(x, y);
            const Rgb8 replacement = preserve_shading ? shade_preserving_color(src.rgb(), target)
                                                      : target;
            out.at(x, y) =
                with_rgb(src, mix(src.rgb(), replacement, Fraction::from_byte(index.coverage(x, y))));
        }
    }
    return out;
}

TextureAtlas texture_fill(const TextureAtlas& atlas, const Region& region,
                          const PartMaskIndex& index, const TextureAtlas& fill, FitMode fit,
                          double tile_scale, Fraction blend_opacity) {
    check_inputs(atlas, region, index);
    if (fill.empty()) throw Error(ErrorCode::EmptyFillImage, "fill image is empty");
    if (fit == FitMode::Tile && !valid_scale(tile_scale)) {
        throw Error(ErrorCode::NonPositiveScale, "tile_scale must be positive");
    }
    TextureAtlas out = atlas;
    if (blend_opacity.is_zero()) return out;

    const BoundingBox box = *region.bbox();
    const int fw = fill.width();
    const int fh = fill.height();
    const bool nearest = fit == FitMode::Tile && tile_scale == 1.0;
    const double sx = static_cast<double>(fw) / box.width();
    const double sy = static_cast<double>(fh) / box.height();

    for (int y = box.y_min; y <= box.y_max; ++y) {
        const int ry = y - box.y_min;
        for (int x = box.x_min; x <= box.x_max; ++x) {
            if (!region.contains(x, y)) continue;
            const int rx = x - box.x_min;
            Rgb8 sample;
            if (nearest) {
                sample = fill.at(rx % fw, ry % fh).rgb();
            } else if (fit == FitMode::Tile) {
                sample = quantize_rgb(sample_bilinear_wrap(fill, rx / tile_scale, ry / tile_scale));
            } else {
                sample = quantize_rgb(
                    sample_bilinear_clamp(fill, (rx + 0.5) * sx - 0.5, (ry + 0.5) * sy - 0.5));
            }
            const Rgba8 src = atlas.at(x, y);
            const Fraction t = Fraction::from_byte(index.coverage(x, y)) * blend_opacity;
            out.at(x, y) = with_rgb(src, mix(src.rgb(), sample, t));
        }
    }
    return out;
}

TextureAtlas logo_stamp(const TextureAtlas& atlas, const Region& region,
                        const PartMaskIndex& index, const TextureAtlas& logo, double anchor_u,
                        double anchor_v, double scale, double rotation_deg, Fraction opacity) {
    check_inputs(atlas, region, index);
    if (logo.empty()) throw Error(ErrorCode::EmptyLogo, "logo image is empty");
    if (!valid_scale(scale)) throw Error(ErrorCode::NonPositiveScale, "scale must be positive");
    TextureAtlas out = atlas;
    if (opacity.is_zero()) return out;

    const BoundingBox box = *region.bbox();
    const double cx = box.x_min + anchor_u * box.width();
    const double cy = box.y_min + anchor_v * box.height();
    const double theta = rotation_deg * std::numbers::pi / 180.0;
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    const double half_w = logo.width() / 2.0;
    const double half_h = logo.height() / 2.0;

    for (int y = box.y_min; y <= box.y_max; ++y) {
        for (int x = box.x_min; x <= box.x_max; ++x) {
            if (!region.contains(x, y)) continue;
            // Inverse map the destination pixel center into logo space.
            const double dx = x + 0.5 - cx;
            const double dy = y + 0.5 - cy;
            const double lx = (c * dx + s * dy) / scale + half_w;
            const double ly = (-s * dx + c * dy) / scale + half_h;
            if (lx < 0.0 || ly < 0.0 || lx >= logo.width() || ly >= logo.height()) continue;

            const SampleRgba sample = sample_bilinear_clamp(logo, lx - 0.5, ly - 0.5);
            const std::uint8_t alpha = quantize(sample.a);
            if (alpha == 0) continue;
            const Rgba8 src = atlas.at(x, y);
            const Fraction t =
                Fraction::from_byte(index.coverage(x, y)) * opacity * Fraction::from_byte(alpha);
            out.at(x, y) = with_rgb(src, mix(src.rgb(), quantize_rgb(sample), t));
        }
    }
    return out;
}

Garment make_garment(LabelRegistry registry, TextureAtlas atlas, TextureAtlas mask) {
    if (!atlas.same_size(mask)) {
        throw Error(ErrorCode::DimensionMismatch, "mask and atlas sizes differ");
    }
    PartMaskIndex index = classify_mask(mask, registry);
    return Garment{std::move(registry), std::move(atlas), std::move(mask), std::move(index)};
}

TextureAtlas apply_op(const Garment& garment, const TextureAtlas& atlas, const EditOp& op,
                      ImageResolver& resolver) {
    const Region region = extract_region(garment.index, op_part(op));
    if (region.empty()) {
        throw Error(ErrorCode::EmptyRegion, "part '" + op_part(op) + "' has no pixels");
    }
    return std::visit(
        [&](const auto& o) -> TextureAtlas {
            using T = std::decay_t<decltype(o)>;
            if constexpr (std::is_same_v<T, RecolorOp>) {
                return recolor(atlas, region, garment.index, o.target, o.preserve_shading);
            } else if constexpr (std::is_same_v<T, TextureFillOp>) {
                const TextureAtlas fill = resolver.resolve(o.image);
                return texture_fill(atlas, region, garment.index, fill, o.fit, o.tile_scale,
                                    o.blend_opacity);
            } else {
                const TextureAtlas logo = resolver.resolve(o.image);
                return logo_stamp(atlas, region, garment.index, logo, o.anchor_u, o.anchor_v,
                                  o.scale, o.rotation_deg, o.opacity);
            }
        },
        op);
}

TextureAtlas apply_recipe(const Garment& garment, const TextureAtlas& base, const Recipe& recipe,
                          ImageResolver& resolver) {
    if (recipe.garment_id != garment.id()) {
        throw Error(ErrorCode::GarmentMismatch, "recipe is for garment '" + recipe.garment_id +
                                                    "', not '" + garment.id() + "'");
    }
    TextureAtlas current = base;
    for (std::size_t i = 0; i < recipe.ops.size(); ++i) {
        try {
            current = apply_op(garment, current, recipe.ops[i], resolver);
        } catch (const Error& e) {
            throw Error(e.code(), "op " + std::to_string(i) + ": " + e.what(), e.detail())
                .with_op_index(i);
        }
    }
    return current;
}

}  // namespace uvforge
