#include <gtest/gtest.h>

#include "gtest_helpers.hpp"
#include "test_support.hpp"
#include "uvforge/fileio.hpp"

using namespace uvtest;

namespace {

GenRequest req(std::uint64_t seed) { return {"cached", Style::Aesthetic, 64, 72, seed}; }

}  // namespace

TEST(Cache, MissThenHitMakesNoSecondCall) {
    TempDir dir;
    CountingProvider provider;
    const GenResult a = cached_resolve(dir.path(), provider, req(1));
    EXPECT_EQ(provider.calls.load(), 1);
    const GenResult b = cached_resolve(dir.path(), provider, req(1));
    EXPECT_EQ(provider.calls.load(), 1);
    EXPECT_EQ(a.image, b.image);
    EXPECT_EQ(b.request_digest, cache_key(req(1)));
    EXPECT_TRUE(fs::exists(dir / (cache_key(req(1)) + ".png")));
    EXPECT_EQ(cache_path(dir.path(), req(1)), dir / (cache_key(req(1)) + ".png"));
}

TEST(Cache, DistinctRequestsDistinctFiles) {
    TempDir dir;
    CountingProvider provider;
    cached_resolve(dir.path(), provider, req(1));
    cached_resolve(dir.path(), provider, req(2));
    EXPECT_EQ(provider.calls.load(), 2);
    std::size_t files = 0;
    for ([[maybe_unused]] const auto& e : fs::directory_iterator(dir.path())) ++files;
    EXPECT_EQ(files, 2u);
}

TEST(Cache, CorruptEntryIsRegeneratedAndOverwritten) {
    TempDir dir;
    CountingProvider provider;
    const GenResult first = cached_resolve(dir.path(), provider, req(3));
    const fs::path file = cache_path(dir.path(), req(3));
    write_file_atomic(file, std::string_view("garbage"));
    const GenResult healed = cached_resolve(dir.path(), provider, req(3));
    EXPECT_EQ(provider.calls.load(), 2);
    EXPECT_EQ(healed.image, first.image);
    EXPECT_EQ(decode_png(read_file(file)), first.image);
    cached_resolve(dir.path(), provider, req(3));
    EXPECT_EQ(provider.calls.load(), 2);
}

TEST(Cache, WrongSizedEntryIsAMiss) {
    TempDir dir;
    CountingProvider provider;
    save_png(TextureAtlas(8, 8), cache_path(dir.path(), req(4)));
    EXPECT_EQ(cached_resolve(dir.path(), provider, req(4)).image.width(), 64);
    EXPECT_EQ(provider.calls.load(), 1);
}

TEST(Cache, TransparentForMock) {
    TempDir dir;
    CountingProvider provider;
    MockProvider mock;
    Rng rng(41);
    for (int i = 0; i < 20; ++i) {
        const GenRequest r{"t" + std::to_string(i), static_cast<Style>(i % 4), 64 + 8 * uniform(rng, 0, 4), 64, rng()};
        EXPECT_EQ(cached_resolve(dir.path(), provider, r).image, generate(mock, r).image);
        EXPECT_EQ(cached_resolve(dir.path(), provider, r).image, generate(mock, r).image);
    }
    EXPECT_EQ(provider.calls.load(), 20);
}

TEST(Cache, CreatesMissingDirectory) {
    TempDir dir;
    CountingProvider provider;
    cached_resolve(dir / "a" / "b", provider, req(5));
    EXPECT_TRUE(fs::exists(cache_path(dir / "a" / "b", req(5))));
}

TEST(Cache, CacheDirIsAFileIsCacheIoError) {
    TempDir dir;
    const fs::path file = dir / "file";
    write_file_atomic(file, std::string_view("x"));
    CountingProvider provider;
    EXPECT_EQ(code_of([&] { cached_resolve(file, provider, req(7)); }), ErrorCode::CacheIoError);
}

TEST(Cache, ResolverUsesCache) {
    TempDir dir;
    auto provider = std::make_shared<CountingProvider>();
    StandardResolver resolver(provider, dir.path(), dir / "cache");
    const ImageRef ref = GeneratedImage{req(8)};
    EXPECT_EQ(resolver.resolve(ref), resolver.resolve(ref));
    EXPECT_EQ(provider->calls.load(), 1);
}
