#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "uvforge/edit.hpp"
#include "uvforge/fileio.hpp"
#include "uvforge/mask.hpp"

namespace uvforge {

struct Outfit {
    std::string outfit_id;
    std::string garment_id;
    Recipe recipe;
    std::string texture_digest;
    std::string title;
    std::string saved_at;
};

struct OutfitSummary {
    std::string outfit_id;
    std::string garment_id;
    std::string title;
    std::string texture_digest;
    std::string saved_at;
};

struct GarmentSummary {
    std::string garment_id;
    std::string name;
    std::vector<std::string> parts;
    int width = 0;
    int height = 0;
};

nlohmann::json to_json(const Outfit& outfit);
nlohmann::json to_json(const OutfitSummary& summary);
nlohmann::json to_json(const GarmentSummary& summary);

/// Exclusive writer lock on {root}/.lock (flock). Released on destruction
/// or process exit. Throws StoreBusy when another writer holds it.
class StoreWriteLock {
public:
    explicit StoreWriteLock(const std::filesystem::path& root);
    ~StoreWriteLock();
    StoreWriteLock(const StoreWriteLock&) = delete;
    StoreWriteLock& operator=(const StoreWriteLock&) = delete;

private:
    int fd_ = -1;
};

/// Directory-backed wardrobe:
///   {root}/index.json
///   {root}/garments/{id}/atlas.png|mask.png|registry.json
///   {root}/outfits/{outfit_id}/recipe.json|texture.png
/// The index is replaced atomically. Writers take StoreWriteLock; readers
/// never lock.
class WardrobeStore {
public:
    /// Creates the root and an empty index if missing.
    explicit WardrobeStore(std::filesystem::path root);

    const std::filesystem::path& root() const noexcept { return root_; }

    /// Validates (ValidationFailed embeds the report JSON in detail), then
    /// copies the three files into the store. Throws DuplicateGarment.
    std::string install_garment(const std::filesystem::path& atlas_path,
                                const std::filesystem::path& mask_path,
                                const std::filesystem::path& registry_path);

    std::vector<GarmentSummary> list_garments() const;
    /// Throws NotFound.
    Garment load_garment(const std::string& garment_id) const;
    bool has_garment(const std::string& garment_id) const;

    /// Renders the recipe, writes recipe.json and texture.png, then commits
    /// the index. Throws NotFound for an uninstalled garment, EmptyRecipe,
    /// apply_recipe errors, StoreIoError, StoreBusy.
    Outfit save_outfit(const Recipe& recipe, const std::string& title, ImageResolver& resolver);

    /// Sorted by saved_at, newest first.
    std::vector<OutfitSummary> list_outfits() const;
    Outfit load_outfit(const std::string& outfit_id) const;
    std::filesystem::path texture_path(const std::string& outfit_id) const;
    void delete_outfit(const std::string& outfit_id);

    /// Test hook invoked around the index write; throwing from it simulates
    /// a crash mid-commit.
    void set_fault_hook(WriteFaultHook hook) { fault_hook_ = std::move(hook); }

private:
    nlohmann::json read_index() const;
    void write_index(const nlohmann::json& index) const;
    std::filesystem::path index_path() const { return root_ / "index.json"; }

    std::filesystem::path root_;
    WriteFaultHook fault_hook_;
};

/// True when both the stored texture and a fresh render of the recipe match
/// the recorded texture_digest.
bool verify_outfit(const WardrobeStore& store, const Outfit& outfit, ImageResolver& resolver);

/// Current UTC time as ISO-8601 with microseconds, e.g.
/// 2024-05-01T12:00:00.123456Z.
std::string utc_timestamp_now();

/// Random RFC 4122 version-4 UUID, lowercase.
std::string make_uuid_v4();

}  // namespace uvforge
