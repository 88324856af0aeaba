#include "uvforge/wardrobe.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <chrono>
#include <cstring>
#include <ctime>
#include <random>

#include "uvforge/error.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace uvforge {

json to_json(const Outfit& outfit) {
    return {{"outfit_id", outfit.outfit_id},   {"garment_id", outfit.garment_id},
            {"title", outfit.title},           {"texture_digest", outfit.texture_digest},
            {"saved_at", outfit.saved_at},     {"recipe", to_json(outfit.recipe)}};
}

json to_json(const OutfitSummary& s) {
    return {{"outfit_id", s.outfit_id}, {"garment_id", s.garment_id}, {"title", s.title},
            {"texture_digest", s.texture_digest}, {"saved_at", s.saved_at}};
}

json to_json(const GarmentSummary& s) {
    return {{"garment_id", s.garment_id}, {"name", s.name},     {"parts", s.parts},
            {"width", s.width},           {"height", s.height}};
}

std::string utc_timestamp_now() {
    const auto now = std::chrono::system_clock::now();
    const auto micros =
        std::chrono::duration_cast<std::chrono::microseconds>(now.time_since_epoch()).count();
    const std::time_t secs = static_cast<std::time_t>(micros / 1'000'000);
    std::tm tm{};
    gmtime_r(&secs, &tm);
    char buf[64];
    std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02d.%06lldZ", tm.tm_year + 1900,
                  tm.tm_mon + 1, tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec,
                  static_cast<long long>(micros % 1'000'000));
    return buf;
}

std::string make_uuid_v4() {
    thread_local std::mt19937_64 rng{std::random_device{}()};
    std::uint8_t b[16];
    for (int i = 0; i < 16; i += 8) {
        const std::uint64_t v = rng();
        std::memcpy(b + i, &v, 8);
    }
    b[6] = static_cast<std::uint8_t>((b[6] & 0x0F) | 0x40);
    b[8] = static_cast<std::uint8_t>((b[8] & 0x3F) | 0x80);
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out;
    for (int i = 0; i < 16; ++i) {
        if (i == 4 || i == 6 || i == 8 || i == 10) out.push_back('-');
        out.push_back(kHex[b[i] >> 4]);
        out.push_back(kHex[b[i] & 0xF]);
    }
    return out;
}

StoreWriteLock::StoreWriteLock(const fs::path& root) {
    const fs::path path = root / ".lock";
    fd_ = ::open(path.c_str(), O_RDWR | O_CREAT | O_CLOEXEC, 0644);
    if (fd_ < 0) {
        throw Error(ErrorCode::StoreIoError, "cannot open lock file " + path.string() + ": " +
                                                 std::strerror(errno));
    }
    if (::flock(fd_, LOCK_EX | LOCK_NB) != 0) {
        const int err = errno;
        ::close(fd_);
        fd_ = -1;
        if (err == EWOULDBLOCK) {
            throw Error(ErrorCode::StoreBusy, "wardrobe store is locked by another writer");
        }
        throw Error(ErrorCode::StoreIoError, std::string("flock: ") + std::strerror(err));
    }
}

StoreWriteLock::~StoreWriteLock() {
    if (fd_ >= 0) {
        ::flock(fd_, LOCK_UN);
        ::close(fd_);
    }
}

namespace {

bool usable_as_dir_name(const std::string& id) {
    if (id.empty() || id == "." || id == ".." || id.size() > 128) return false;
    return std::all_of(id.begin(), id.end(), [](char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.';
    });
}

template <typename F>
auto wrap_fs(F&& body) {
    try {
        return body();
    } catch (const fs::filesystem_error& e) {
        throw Error(ErrorCode::StoreIoError, e.what());
    }
}

const json* find_by(const json& array, const char* key, const std::string& value) {
    for (const json& item : array) {
        if (item.value(key, "") == value) return &item;
    }
    return nullptr;
}

OutfitSummary summary_from(const json& item) {
    return {item.at("outfit_id").get<std::string>(), item.at("garment_id").get<std::string>(),
            item.at("title").get<std::string>(), item.at("texture_digest").get<std::string>(),
            item.at("saved_at").get<std::string>()};
}

}  // namespace

WardrobeStore::WardrobeStore(fs::path root) : root_(std::move(root)) {
    wrap_fs([&] { return fs::create_directories(root_); });
}

json WardrobeStore::read_index() const {
    std::error_code ec;
    if (!fs::exists(index_path(), ec)) {
        return {{"version", 1}, {"garments", json::array()}, {"outfits", json::array()}};
    }
    try {
        json index = json::parse(read_text_file(index_path()));
        if (!index.is_object() || !index.contains("garments") || !index.contains("outfits")) {
            throw Error(ErrorCode::StoreIoError, "index.json has an unexpected shape");
        }
        return index;
    } catch (const json::exception& e) {
        throw Error(ErrorCode::StoreIoError, std::string("index.json unreadable: ") + e.what());
    } catch (const Error& e) {
        if (e.code() == ErrorCode::StoreIoError) throw;
        throw Error(ErrorCode::StoreIoError, std::string("index.json unreadable: ") + e.what());
    }
}

void WardrobeStore::write_index(const json& index) const {
    write_file_atomic(index_path(), index.dump(2), fault_hook_);
}

std::string WardrobeStore::install_garment(const fs::path& atlas_path, const fs::path& mask_path,
                                           const fs::path& registry_path) {
    const TextureAtlas atlas = load_atlas(atlas_path);
    const TextureAtlas mask = load_atlas(mask_path);
    const auto registry_bytes = read_file(registry_path);
    const LabelRegistry registry =
        parse_label_registry(std::string(registry_bytes.begin(), registry_bytes.end()));

    const ValidationReport report = validate_garment(atlas, mask, registry);
    if (!report.pass) {
        throw Error(ErrorCode::ValidationFailed,
                    "garment '" + registry.garment_id() + "' failed validation",
                    report_to_json(report));
    }
    const std::string& id = registry.garment_id();
    if (!usable_as_dir_name(id)) {
        throw Error(ErrorCode::SchemaError, "garment_id '" + id + "' cannot be used as a directory name",
                    "/garment_id");
    }

    StoreWriteLock lock(root_);
    json index = read_index();
    if (find_by(index["garments"], "garment_id", id)) {
        throw Error(ErrorCode::DuplicateGarment, "garment '" + id + "' is already installed");
    }
    const fs::path dir = root_ / "garments" / id;
    wrap_fs([&] { return fs::create_directories(dir); });
    write_file_atomic(dir / "atlas.png", read_file(atlas_path));
    write_file_atomic(dir / "mask.png", read_file(mask_path));
    write_file_atomic(dir / "registry.json", registry_bytes);

    index["garments"].push_back({{"garment_id", id},
                                 {"atlas", "garments/" + id + "/atlas.png"},
                                 {"mask", "garments/" + id + "/mask.png"},
                                 {"registry", "garments/" + id + "/registry.json"}});
    write_index(index);
    return id;
}

std::vector<GarmentSummary> WardrobeStore::list_garments() const {
    const json index = read_index();
    std::vector<GarmentSummary> out;
    for (const json& item : index["garments"]) {
        const std::string id = item.at("garment_id").get<std::string>();
        const LabelRegistry registry = load_label_registry(root_ / item.at("registry").get<std::string>());
        const TextureAtlas atlas = load_atlas(root_ / item.at("atlas").get<std::string>());
        GarmentSummary summary;
        summary.garment_id = id;
        summary.name = id;
        for (const PartLabel& label : registry.entries()) summary.parts.push_back(label.name);
        summary.width = atlas.width();
        summary.height = atlas.height();
        out.push_back(std::move(summary));
    }
    return out;
}

bool WardrobeStore::has_garment(const std::string& garment_id) const {
    return find_by(read_index()["garments"], "garment_id", garment_id) != nullptr;
}

Garment WardrobeStore::load_garment(const std::string& garment_id) const {
    const json index = read_index();
    const json* item = find_by(index["garments"], "garment_id", garment_id);
    if (!item) throw Error(ErrorCode::NotFound, "no garment '" + garment_id + "'");
    try {
        return make_garment(load_label_registry(root_ / item->at("registry").get<std::string>()),
                            load_atlas(root_ / item->at("atlas").get<std::string>()),
                            load_atlas(root_ / item->at("mask").get<std::string>()));
    } catch (const Error& e) {
        if (e.code() == ErrorCode::FileNotFound) {
            throw Error(ErrorCode::StoreIoError, std::string("garment files missing: ") + e.what());
        }
        throw;
    }
}

Outfit WardrobeStore::save_outfit(const Recipe& recipe, const std::string& title,
                                  ImageResolver& resolver) {
    if (recipe.ops.empty()) throw Error(ErrorCode::EmptyRecipe, "a saved recipe needs at least one op");
    StoreWriteLock lock(root_);
    const Garment garment = load_garment(recipe.garment_id);
    const TextureAtlas rendered = apply_recipe(garment, garment.atlas, recipe, resolver);

    Outfit outfit;
    outfit.outfit_id = make_uuid_v4();
    outfit.garment_id = recipe.garment_id;
    outfit.recipe = recipe;
    outfit.title = title;
    outfit.saved_at = utc_timestamp_now();
    if (outfit.recipe.created_at.empty()) outfit.recipe.created_at = outfit.saved_at;
    outfit.texture_digest = pixel_digest(rendered);

    const fs::path dir = root_ / "outfits" / outfit.outfit_id;
    try {
        wrap_fs([&] { return fs::create_directories(dir); });
        write_file_atomic(dir / "recipe.json", recipe_to_string(outfit.recipe));
        write_file_atomic(dir / "texture.png", encode_png(rendered));

        json index = read_index();
        index["outfits"].push_back(to_json(OutfitSummary{outfit.outfit_id, outfit.garment_id,
                                                         outfit.title, outfit.texture_digest,
                                                         outfit.saved_at}));
        write_index(index);
    } catch (...) {
        // Only drop the directory when the index does not reference it.
        bool referenced = false;
        try {
            referenced = find_by(read_index()["outfits"], "outfit_id", outfit.outfit_id) != nullptr;
        } catch (const Error&) {
        }
        std::error_code ec;
        if (!referenced) fs::remove_all(dir, ec);
        throw;
    }
    return outfit;
}

std::vector<OutfitSummary> WardrobeStore::list_outfits() const {
    const json index = read_index();
    std::vector<OutfitSummary> out;
    for (const json& item : index["outfits"]) out.push_back(summary_from(item));
    // Newest first; equal timestamps keep later saves first.
    std::reverse(out.begin(), out.end());
    std::stable_sort(out.begin(), out.end(), [](const OutfitSummary& a, const OutfitSummary& b) {
        return a.saved_at > b.saved_at;
    });
    return out;
}

Outfit WardrobeStore::load_outfit(const std::string& outfit_id) const {
    const json index = read_index();
    const json* item = find_by(index["outfits"], "outfit_id", outfit_id);
    if (!item) throw Error(ErrorCode::NotFound, "no outfit '" + outfit_id + "'");
    const OutfitSummary s = summary_from(*item);
    Outfit outfit;
    outfit.outfit_id = s.outfit_id;
    outfit.garment_id = s.garment_id;
    outfit.title = s.title;
    outfit.texture_digest = s.texture_digest;
    outfit.saved_at = s.saved_at;
    try {
        outfit.recipe = parse_recipe(read_text_file(root_ / "outfits" / outfit_id / "recipe.json"));
    } catch (const Error& e) {
        throw Error(ErrorCode::StoreIoError, std::string("outfit recipe unreadable: ") + e.what());
    }
    return outfit;
}

fs::path WardrobeStore::texture_path(const std::string& outfit_id) const {
    if (!find_by(read_index()["outfits"], "outfit_id", outfit_id)) {
        throw Error(ErrorCode::NotFound, "no outfit '" + outfit_id + "'");
    }
    return root_ / "outfits" / outfit_id / "texture.png";
}

void WardrobeStore::delete_outfit(const std::string& outfit_id) {
    StoreWriteLock lock(root_);
    json index = read_index();
    json& outfits = index["outfits"];
    const auto it = std::find_if(outfits.begin(), outfits.end(), [&](const json& item) {
        return item.value("outfit_id", "") == outfit_id;
    });
    if (it == outfits.end()) throw Error(ErrorCode::NotFound, "no outfit '" + outfit_id + "'");
    outfits.erase(it);
    write_index(index);
    std::error_code ec;
    fs::remove_all(root_ / "outfits" / outfit_id, ec);
}

bool verify_outfit(const WardrobeStore& store, const Outfit& outfit, ImageResolver& resolver) {
    if (pixel_digest(load_atlas(store.texture_path(outfit.outfit_id))) != outfit.texture_digest) return false;
    const Garment garment = store.load_garment(outfit.garment_id);
    return pixel_digest(apply_recipe(garment, garment.atlas, outfit.recipe, resolver)) ==
           outfit.texture_digest;
}

}  // namespace uvforge
