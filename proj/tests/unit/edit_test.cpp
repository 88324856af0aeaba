#include <gtest/gtest.h>

#include "gtest_helpers.hpp"
#include "naive_ops.hpp"
#include "test_support.hpp"
#include "uvforge/fileio.hpp"

using namespace uvtest;

namespace {

/// Whole-atlas single-part garment with an opaque mask.
Garment full_garment(int w, int h, const TextureAtlas& atlas) {
    LabelRegistry reg("g", {{"body", {255, 0, 0}, 8}, {"other", {0, 0, 255}, 8}});
    TextureAtlas mask(w, h, Rgba8{255, 0, 0, 255});
    return make_garment(std::move(reg), atlas, std::move(mask));
}

/// Garment whose "body" is the rectangle [x0,x1]x[y0,y1] of a w x h atlas.
Garment rect_garment(int w, int h, int x0, int y0, int x1, int y1, const TextureAtlas& atlas) {
    LabelRegistry reg("g", {{"body", {255, 0, 0}, 8}, {"other", {0, 0, 255}, 8}});
    TextureAtlas mask(w, h, Rgba8{0, 0, 255, 255});
    for (int y = y0; y <= y1; ++y) {
        for (int x = x0; x <= x1; ++x) mask.at(x, y) = {255, 0, 0, 255};
    }
    return make_garment(std::move(reg), atlas, std::move(mask));
}

Region body(const Garment& g) { return extract_region(g.index, "body"); }

}  // namespace

TEST(Recolor, PreserveShadingGray) {
    const Garment g = full_garment(1, 1, TextureAtlas(1, 1, Rgba8{64, 64, 64, 255}));
    const TextureAtlas out = recolor(g.atlas, body(g), g.index, {255, 0, 0}, true);
    EXPECT_EQ(out.at(0, 0), (Rgba8{128, 0, 0, 255}));
}

TEST(Recolor, FlatReplacement) {
    Rng rng(1);
    const Garment g = full_garment(8, 8, random_atlas(rng, 8, 8));
    const TextureAtlas out = recolor(g.atlas, body(g), g.index, {255, 0, 0}, false);
    for (int i = 0; i < 64; ++i) {
        EXPECT_EQ(out.pixels()[i].rgb(), (Rgb8{255, 0, 0}));
        EXPECT_EQ(out.pixels()[i].a, g.atlas.pixels()[i].a);
    }
}

TEST(Recolor, OutsideRegionUnchanged) {
    Rng rng(2);
    const TextureAtlas atlas = random_atlas(rng, 10, 10);
    const Garment g = rect_garment(10, 10, 2, 3, 5, 7, atlas);
    const TextureAtlas out = recolor(atlas, body(g), g.index, {1, 2, 3}, true);
    for (int y = 0; y < 10; ++y) {
        for (int x = 0; x < 10; ++x) {
            if (!(x >= 2 && x <= 5 && y >= 3 && y <= 7)) {
                EXPECT_EQ(out.at(x, y), atlas.at(x, y));
            }
        }
    }
}

TEST(Recolor, SoftCoverageBlendsHalfway) {
    LabelRegistry reg("g", {{"body", {255, 0, 0}, 8}});
    const Garment g = make_garment(reg, TextureAtlas(1, 1, Rgba8{0, 0, 0, 255}),
                                   TextureAtlas(1, 1, Rgba8{255, 0, 0, 128}));
    const TextureAtlas out = recolor(g.atlas, body(g), g.index, {255, 255, 255}, false);
    EXPECT_EQ(out.at(0, 0), (Rgba8{128, 128, 128, 255}));
}

TEST(Recolor, EmptyRegionThrows) {
    const Garment g = full_garment(2, 2, TextureAtlas(2, 2));
    const Region empty = extract_region(g.index, "other");
    EXPECT_EQ(code_of([&] { recolor(g.atlas, empty, g.index, {0, 0, 0}, false); }), ErrorCode::EmptyRegion);
}

TEST(Recolor, FlatIsIdempotent) {
    Rng rng(3);
    const Garment g = full_garment(16, 16, random_atlas(rng, 16, 16));
    const TextureAtlas once = recolor(g.atlas, body(g), g.index, {9, 99, 199}, false);
    EXPECT_EQ(recolor(once, body(g), g.index, {9, 99, 199}, false), once);
}

TEST(TextureFill, SolidFillAnyMode) {
    Rng rng(4);
    const Garment g = rect_garment(12, 9, 1, 1, 10, 6, random_atlas(rng, 12, 9));
    const TextureAtlas fill(1, 1, Rgba8{10, 20, 30, 255});
    for (const auto& [mode, scale] : {std::pair{FitMode::Tile, 1.0}, {FitMode::Tile, 2.5}, {FitMode::Stretch, 1.0}}) {
        const TextureAtlas out = texture_fill(g.atlas, body(g), g.index, fill, mode, scale, Fraction::one());
        for (int y = 1; y <= 6; ++y) {
            for (int x = 1; x <= 10; ++x) EXPECT_EQ(out.at(x, y).rgb(), (Rgb8{10, 20, 30}));
        }
    }
}

TEST(TextureFill, CheckerTilesWithPeriodTwo) {
    const Rgba8 w{255, 255, 255, 255}, b{0, 0, 0, 255};
    const TextureAtlas fill(2, 2, std::vector<Rgba8>{w, b, b, w});
    const Garment g = full_garment(4, 4, TextureAtlas(4, 4, Rgba8{100, 100, 100, 255}));
    const TextureAtlas out = texture_fill(g.atlas, body(g), g.index, fill, FitMode::Tile, 1.0, Fraction::one());
    for (int y = 0; y < 4; ++y) {
        for (int x = 0; x < 4; ++x) EXPECT_EQ(out.at(x, y), ((x + y) % 2 == 0 ? w : b)) << x << "," << y;
    }
}

TEST(TextureFill, TileAnchorsAtBoundingBox) {
    const TextureAtlas fill(2, 1, std::vector<Rgba8>{{1, 1, 1, 255}, {2, 2, 2, 255}});
    const Garment g = rect_garment(8, 2, 3, 0, 6, 1, TextureAtlas(8, 2));
    const TextureAtlas out = texture_fill(g.atlas, body(g), g.index, fill, FitMode::Tile, 1.0, Fraction::one());
    EXPECT_EQ(out.at(3, 0).r, 1);
    EXPECT_EQ(out.at(4, 0).r, 2);
    EXPECT_EQ(out.at(5, 1).r, 1);
}

TEST(TextureFill, StretchMapsCornersToCorners) {
    const TextureAtlas fill(2, 2, std::vector<Rgba8>{{0, 0, 0, 255}, {255, 0, 0, 255}, {0, 255, 0, 255}, {0, 0, 255, 255}});
    const Garment g = full_garment(2, 2, TextureAtlas(2, 2));
    const TextureAtlas out = texture_fill(g.atlas, body(g), g.index, fill, FitMode::Stretch, 1.0, Fraction::one());
    for (int i = 0; i < 4; ++i) EXPECT_EQ(out.pixels()[i].rgb(), fill.pixels()[i].rgb());
}

TEST(TextureFill, ZeroOpacityIsIdentity) {
    Rng rng(5);
    const Garment g = full_garment(8, 8, random_atlas(rng, 8, 8));
    const TextureAtlas fill = random_atlas(rng, 3, 5);
    EXPECT_EQ(texture_fill(g.atlas, body(g), g.index, fill, FitMode::Stretch, 1.0, Fraction::zero()), g.atlas);
}

TEST(TextureFill, ErrorCases) {
    const Garment g = full_garment(4, 4, TextureAtlas(4, 4));
    EXPECT_EQ(code_of([&] { texture_fill(g.atlas, body(g), g.index, TextureAtlas(), FitMode::Tile, 1.0, Fraction::one()); }),
              ErrorCode::EmptyFillImage);
    EXPECT_EQ(code_of([&] { texture_fill(g.atlas, body(g), g.index, TextureAtlas(1, 1), FitMode::Tile, 0.0, Fraction::one()); }),
              ErrorCode::NonPositiveScale);
    EXPECT_EQ(code_of([&] { texture_fill(TextureAtlas(5, 4), body(g), g.index, TextureAtlas(1, 1), FitMode::Tile, 1.0, Fraction::one()); }),
              ErrorCode::DimensionMismatch);
}

TEST(LogoStamp, TwoByTwoCenteredInEightByEight) {
    const Garment g = full_garment(8, 8, TextureAtlas(8, 8, Rgba8{0, 0, 0, 255}));
    const std::vector<Rgba8> px{{10, 0, 0, 255}, {20, 0, 0, 255}, {30, 0, 0, 255}, {40, 0, 0, 255}};
    const TextureAtlas logo(2, 2, px);
    const TextureAtlas out = logo_stamp(g.atlas, body(g), g.index, logo, 0.5, 0.5, 1.0, 0.0, Fraction::one());
    for (int y = 0; y < 8; ++y) {
        for (int x = 0; x < 8; ++x) {
            if (x >= 3 && x <= 4 && y >= 3 && y <= 4) {
                EXPECT_EQ(out.at(x, y), logo.at(x - 3, y - 3));
            } else {
                EXPECT_EQ(out.at(x, y), g.atlas.at(x, y)) << x << "," << y;
            }
        }
    }
}

TEST(LogoStamp, ZeroOpacityIsIdentity) {
    Rng rng(6);
    const Garment g = full_garment(8, 8, random_atlas(rng, 8, 8));
    EXPECT_EQ(logo_stamp(g.atlas, body(g), g.index, random_atlas(rng, 4, 4), 0.5, 0.5, 2.0, 30.0, Fraction::zero()),
              g.atlas);
}

TEST(LogoStamp, FootprintClippedToRegion) {
    // 4x4 region in a 10x10 atlas, 6x6 opaque logo at scale 2 overhangs it.
    const TextureAtlas atlas(10, 10, Rgba8{0, 0, 0, 255});
    const Garment g = rect_garment(10, 10, 3, 3, 6, 6, atlas);
    const TextureAtlas logo(6, 6, Rgba8{200, 100, 50, 255});
    const TextureAtlas out = logo_stamp(atlas, body(g), g.index, logo, 0.5, 0.5, 2.0, 0.0, Fraction::one());
    for (int y = 0; y < 10; ++y) {
        for (int x = 0; x < 10; ++x) {
            const bool in = x >= 3 && x <= 6 && y >= 3 && y <= 6;
            EXPECT_EQ(out.at(x, y), (in ? Rgba8{200, 100, 50, 255} : atlas.at(x, y))) << x << "," << y;
        }
    }
    const naive::Labels ref = naive::classify(g.mask, g.registry.entries());
    EXPECT_EQ(naive::stamp(atlas, ref, 0, logo, 0.5, 0.5, 2.0, 0.0, {1, 1}), out);
}

TEST(LogoStamp, RotationQuarterTurn) {
    // A 1x2 vertical bar rotated 90 degrees becomes horizontal.
    const Garment g = full_garment(6, 6, TextureAtlas(6, 6, Rgba8{0, 0, 0, 255}));
    const TextureAtlas logo(1, 2, Rgba8{255, 255, 255, 255});
    const TextureAtlas out = logo_stamp(g.atlas, body(g), g.index, logo, 0.5, 0.5, 1.0, 90.0, Fraction::one());
    int stamped = 0;
    for (int y = 0; y < 6; ++y) {
        for (int x = 0; x < 6; ++x) {
            if (out.at(x, y).r == 255) {
                EXPECT_EQ(y, 2);
                ++stamped;
            }
        }
    }
    EXPECT_EQ(stamped, 2);
}

TEST(LogoStamp, ErrorCases) {
    const Garment g = full_garment(4, 4, TextureAtlas(4, 4));
    EXPECT_EQ(code_of([&] { logo_stamp(g.atlas, body(g), g.index, TextureAtlas(), 0.5, 0.5, 1.0, 0.0, Fraction::one()); }),
              ErrorCode::EmptyLogo);
    EXPECT_EQ(code_of([&] { logo_stamp(g.atlas, body(g), g.index, TextureAtlas(1, 1), 0.5, 0.5, -1.0, 0.0, Fraction::one()); }),
              ErrorCode::NonPositiveScale);
}

TEST(Sampling, IntegerCoordinatesHitCenters) {
    Rng rng(7);
    const TextureAtlas img = random_atlas(rng, 5, 4);
    for (int y = 0; y < 4; ++y) {
        for (int x = 0; x < 5; ++x) {
            const SampleRgba c = sample_bilinear_clamp(img, x, y);
            const SampleRgba w = sample_bilinear_wrap(img, x + 5.0, y - 4.0);
            EXPECT_DOUBLE_EQ(c.r, img.at(x, y).r);
            EXPECT_DOUBLE_EQ(w.g, img.at(x, y).g);
        }
    }
    const SampleRgba mid = sample_bilinear_clamp(TextureAtlas(2, 1, std::vector<Rgba8>{{0, 0, 0, 0}, {100, 0, 0, 0}}), 0.5, 0);
    EXPECT_DOUBLE_EQ(mid.r, 50.0);
}

TEST(Ops, MatchNaiveReferenceOnRandomInstances) {
    Rng rng(8);
    for (int i = 0; i < 60; ++i) {
        const int w = uniform(rng, 1, 24), h = uniform(rng, 1, 24);
        const Garment g = random_garment(rng, w, h, uniform(rng, 1, 4));
        const naive::Labels ref = naive::classify(g.mask, g.registry.entries());
        const int part = uniform(rng, 0, static_cast<int>(g.registry.size()) - 1);
        const Region region = extract_region(g.index, g.registry.label(static_cast<std::uint16_t>(part)).name);
        const Rgb8 target = random_rgba(rng).rgb();
        ASSERT_EQ(recolor(g.atlas, region, g.index, target, true), naive::recolor(g.atlas, ref, part, target, true));
        const TextureAtlas img = random_atlas(rng, uniform(rng, 1, 9), uniform(rng, 1, 9));
        const Fraction op = Fraction::from_double(uniform_real(rng, 0, 1));
        const double scale = uniform_real(rng, 0.3, 3.0);
        ASSERT_EQ(texture_fill(g.atlas, region, g.index, img, FitMode::Tile, scale, op),
                  naive::fill(g.atlas, ref, part, img, true, scale, {op.num, op.den}));
        ASSERT_EQ(logo_stamp(g.atlas, region, g.index, img, 0.3, 0.6, scale, 37.0, op),
                  naive::stamp(g.atlas, ref, part, img, 0.3, 0.6, scale, 37.0, {op.num, op.den}));
    }
}

TEST(ApplyOp, DispatchesLikeDirectCall) {
    const Garment g = fixture_garment();
    FixedResolver resolver(TextureAtlas(1, 1));
    const RecolorOp op{"body", {10, 200, 30}, true};
    EXPECT_EQ(apply_op(g, g.atlas, op, resolver),
              recolor(g.atlas, extract_region(g.index, "body"), g.index, op.target, true));
}

TEST(ApplyOp, UnknownPart) {
    const Garment g = fixture_garment();
    FixedResolver resolver(TextureAtlas(1, 1));
    EXPECT_EQ(code_of([&] { apply_op(g, g.atlas, RecolorOp{"elbow", {}, false}, resolver); }), ErrorCode::UnknownPart);
}

TEST(ApplyOp, GeneratedFillIsDeterministic) {
    const Garment g = fixture_garment();
    StandardResolver resolver(std::make_shared<MockProvider>(), fixtures_dir() / "assets");
    TextureFillOp op;
    op.part = "left_sleeve";
    op.image = GeneratedImage{GenRequest{"blue stripes", Style::Cartoon, 64, 64, 7}};
    const TextureAtlas a = apply_op(g, g.atlas, op, resolver);
    const TextureAtlas b = apply_op(g, g.atlas, op, resolver);
    EXPECT_EQ(a, b);
    EXPECT_NE(a, g.atlas);
}

TEST(ApplyRecipe, EmptyOpsIsIdentity) {
    const Garment g = fixture_garment();
    FixedResolver resolver(TextureAtlas(1, 1));
    Recipe recipe;
    recipe.garment_id = g.id();
    EXPECT_EQ(apply_recipe(g, g.atlas, recipe, resolver), g.atlas);
}

TEST(ApplyRecipe, LastWriterWins) {
    const Garment g = fixture_garment();
    FixedResolver resolver(TextureAtlas(1, 1));
    Recipe both{kRecipeSchemaVersion, g.id(), "", {RecolorOp{"body", {255, 0, 0}, false}, RecolorOp{"body", {0, 0, 255}, false}}};
    Recipe blue{kRecipeSchemaVersion, g.id(), "", {RecolorOp{"body", {0, 0, 255}, false}}};
    EXPECT_EQ(apply_recipe(g, g.atlas, both, resolver), apply_recipe(g, g.atlas, blue, resolver));
}

TEST(ApplyRecipe, GarmentMismatch) {
    const Garment g = fixture_garment();
    FixedResolver resolver(TextureAtlas(1, 1));
    Recipe recipe{kRecipeSchemaVersion, "other", "", {}};
    EXPECT_EQ(code_of([&] { apply_recipe(g, g.atlas, recipe, resolver); }), ErrorCode::GarmentMismatch);
}

TEST(ApplyRecipe, FailureCarriesOpIndex) {
    const Garment g = fixture_garment();
    FixedResolver resolver(TextureAtlas(1, 1));
    Recipe recipe{kRecipeSchemaVersion, g.id(), "", {RecolorOp{"body", {}, false}, RecolorOp{"elbow", {}, false}}};
    try {
        apply_recipe(g, g.atlas, recipe, resolver);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::UnknownPart);
        EXPECT_EQ(e.op_index(), std::optional<std::size_t>(1));
    }
}

TEST(ApplyRecipe, GoldenThreeOpRecipe) {
    const Garment g = fixture_garment();
    const Recipe recipe = parse_recipe(read_text_file(fixtures_dir() / "recipe_3op.json"));
    StandardResolver resolver(std::make_shared<MockProvider>(), fixtures_dir() / "assets");
    const TextureAtlas out = apply_recipe(g, g.atlas, recipe, resolver);
    EXPECT_EQ(pixel_digest(out), golden()["recipe_3op_digest"].get<std::string>());
    EXPECT_EQ(apply_recipe(g, g.atlas, recipe, resolver), out);
}

TEST(Resolver, InlineDigestChecked) {
    Rng rng(9);
    InlineImage ref;
    ref.png = encode_png(random_atlas(rng, 3, 3));
    ref.sha256 = std::string(64, '0');
    StandardResolver resolver(std::make_shared<MockProvider>(), fixtures_dir() / "assets");
    EXPECT_EQ(code_of([&] { resolver.resolve(ref); }), ErrorCode::ResolveError);
}

TEST(Resolver, AssetEscapeRejected) {
    StandardResolver resolver(std::make_shared<MockProvider>(), fixtures_dir() / "assets");
    EXPECT_EQ(code_of([&] { resolver.resolve(AssetImage{"../garment/atlas.png"}); }), ErrorCode::ResolveError);
    EXPECT_EQ(code_of([&] { resolver.resolve(AssetImage{"/etc/passwd"}); }), ErrorCode::ResolveError);
    EXPECT_EQ(code_of([&] { resolver.resolve(AssetImage{"logos/missing.png"}); }), ErrorCode::ResolveError);
    EXPECT_EQ(resolver.resolve(AssetImage{"logos/star.png"}).width(), 32);
}
