// uvforge: command-line entry point.
//
// Exit codes: 0 success, 1 domain error (validation failure, bad recipe,
// provider failure, ...), 2 usage error (bad flags, missing input files).

#include <CLI11.hpp>

#include <csignal>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <memory>
#include <optional>
#include <string>

#include "uvforge/atlas.hpp"
#include "uvforge/edit.hpp"
#include "uvforge/error.hpp"
#include "uvforge/fileio.hpp"
#include "uvforge/gen.hpp"
#include "uvforge/mask.hpp"
#include "uvforge/service.hpp"
#include "uvforge/wardrobe.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace uvforge;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitDomain = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ProviderFlags {
    std::string provider = "mock";
    std::string endpoint;
    int timeout_ms = kDefaultGenTimeoutMs;
    std::string cache_dir;

    void add_to(CLI::App* cmd) {
        cmd->add_option("--provider", provider, "Image provider")
            ->check(CLI::IsMember({"mock", "remote"}));
        cmd->add_option("--gen-endpoint", endpoint, "Base URL of the remote generation backend");
        cmd->add_option("--gen-timeout-ms", timeout_ms, "Remote generation timeout")
            ->check(CLI::PositiveNumber);
        cmd->add_option("--cache-dir", cache_dir, "Content-addressed image cache directory");
    }

    std::shared_ptr<ImageProvider> make() const {
        if (provider == "remote") {
            if (endpoint.empty()) throw UsageError("--provider remote requires --gen-endpoint");
            return std::make_shared<RemoteProvider>(RemoteConfig::from_env(endpoint, timeout_ms));
        }
        return std::make_shared<MockProvider>();
    }
};

bool g_json = false;

void print_json(const json& value) { std::cout << value.dump(g_json ? -1 : 2) << "\n"; }

void report_error(const Error& e) {
    if (g_json) {
        json body = {{"code", to_string(e.code())}, {"message", e.what()}};
        if (!e.detail().empty()) body["detail"] = e.detail();
        if (e.op_index()) body["op_index"] = *e.op_index();
        std::cerr << body.dump() << "\n";
    } else {
        std::cerr << "error [" << to_string(e.code()) << "]: " << e.what();
        if (!e.detail().empty()) std::cerr << " (" << e.detail() << ")";
        std::cerr << "\n";
    }
}

// Missing inputs are usage errors; everything else is a domain error.
int exit_code_for(const Error& e) {
    return e.code() == ErrorCode::FileNotFound ? kExitUsage : kExitDomain;
}

std::pair<int, int> parse_size(const std::string& text) {
    const auto x = text.find_first_of("xX");
    if (x == std::string::npos) throw UsageError("--size must look like WxH, got '" + text + "'");
    try {
        std::size_t used_w = 0, used_h = 0;
        const int w = std::stoi(text.substr(0, x), &used_w);
        const int h = std::stoi(text.substr(x + 1), &used_h);
        if (used_w != x || used_h != text.size() - x - 1) throw std::invalid_argument("trailing");
        for (int side : {w, h}) {
            if (side < kMinGenSide || side > kMaxGenSide || side % 8 != 0) {
                throw UsageError("--size sides must be multiples of 8 in [64, 2048], got '" + text + "'");
            }
        }
        return {w, h};
    } catch (const std::logic_error&) {
        throw UsageError("--size must look like WxH, got '" + text + "'");
    }
}

// ---- subcommands --------------------------------------------------------------

struct ValidateArgs {
    std::string atlas, mask, registry;
    double threshold = kDefaultUnknownThreshold;
};

int run_validate(const ValidateArgs& a) {
    const TextureAtlas atlas = load_atlas(a.atlas);
    const TextureAtlas mask = load_atlas(a.mask);
    const LabelRegistry registry = load_label_registry(a.registry);
    const ValidationReport report = validate_garment(atlas, mask, registry, a.threshold);
    if (g_json) {
        std::cout << report_to_json(report) << "\n";
    } else {
        std::cout << (report.pass ? "PASS" : "FAIL") << "\n"
                  << "  dimensions match: " << (report.dimensions_match ? "yes" : "no") << "\n"
                  << "  unknown pixels:   " << report.unknown_pixels << " / " << report.total_pixels
                  << " (" << report.unknown_fraction << ", threshold " << report.unknown_threshold
                  << ")\n";
        for (const auto& [name, count] : report.label_pixel_counts) {
            std::cout << "  " << name << ": " << count << "\n";
        }
        for (const auto& name : report.empty_labels) std::cout << "  empty label: " << name << "\n";
    }
    return report.pass ? kExitOk : kExitDomain;
}

struct ApplyArgs {
    std::string store, garment, recipe, out, assets = ".";
    ProviderFlags provider;
};

int run_apply(const ApplyArgs& a) {
    const Recipe recipe = parse_recipe(read_text_file(a.recipe));
    const WardrobeStore store(a.store);
    const Garment garment = store.load_garment(a.garment);
    StandardResolver resolver(a.provider.make(), a.assets, a.provider.cache_dir);
    const TextureAtlas out = apply_recipe(garment, garment.atlas, recipe, resolver);
    save_png(out, a.out);
    const std::string digest = pixel_digest(out);
    if (g_json) {
        print_json({{"out", a.out}, {"texture_digest", digest}});
    } else {
        std::cout << a.out << " " << digest << "\n";
    }
    return kExitOk;
}

struct GenArgs {
    std::string prompt, style = "none", size = "512x512", out;
    std::uint64_t seed = 0;
    ProviderFlags provider;
};

int run_gen(const GenArgs& a) {
    GenRequest request;
    request.prompt = a.prompt;
    try {
        request.style = parse_style(a.style);
    } catch (const Error& e) {
        throw UsageError(e.what());
    }
    std::tie(request.width, request.height) = parse_size(a.size);
    request.seed = a.seed;
    const auto provider = a.provider.make();
    const GenResult result = a.provider.cache_dir.empty()
                                 ? generate(*provider, request)
                                 : cached_resolve(a.provider.cache_dir, *provider, request);
    save_png(result.image, a.out);
    if (g_json) {
        print_json({{"out", a.out},
                    {"request_digest", result.request_digest},
                    {"provider_id", result.provider_id},
                    {"elapsed_ms", result.elapsed_ms}});
    } else {
        std::cout << a.out << " " << result.request_digest << "\n";
    }
    return kExitOk;
}

struct WardrobeArgs {
    std::string store, atlas, mask, registry, recipe, title, id, assets = ".";
    bool verify = false;
    ProviderFlags provider;
};

int run_install(const WardrobeArgs& a) {
    WardrobeStore store(a.store);
    const std::string id = store.install_garment(a.atlas, a.mask, a.registry);
    if (g_json) {
        print_json({{"garment_id", id}});
    } else {
        std::cout << "installed " << id << "\n";
    }
    return kExitOk;
}

int run_save(const WardrobeArgs& a) {
    const Recipe recipe = parse_recipe(read_text_file(a.recipe));
    WardrobeStore store(a.store);
    StandardResolver resolver(a.provider.make(), a.assets, a.provider.cache_dir);
    const Outfit outfit = store.save_outfit(recipe, a.title, resolver);
    if (g_json) {
        print_json(to_json(outfit));
    } else {
        std::cout << outfit.outfit_id << " " << outfit.texture_digest << "\n";
    }
    return kExitOk;
}

int run_list(const WardrobeArgs& a) {
    const WardrobeStore store(a.store);
    const auto garments = store.list_garments();
    const auto outfits = store.list_outfits();
    if (g_json) {
        json g = json::array();
        for (const auto& s : garments) g.push_back(to_json(s));
        json o = json::array();
        for (const auto& s : outfits) o.push_back(to_json(s));
        print_json({{"garments", g}, {"outfits", o}});
        return kExitOk;
    }
    std::cout << "garments:\n";
    for (const auto& s : garments) {
        std::cout << "  " << s.garment_id << " " << s.width << "x" << s.height << " parts:";
        for (const auto& p : s.parts) std::cout << " " << p;
        std::cout << "\n";
    }
    std::cout << "outfits:\n";
    for (const auto& s : outfits) {
        std::cout << "  " << s.outfit_id << " " << s.saved_at << " " << s.garment_id << " \"" << s.title
                  << "\"\n";
    }
    return kExitOk;
}

int run_show(const WardrobeArgs& a) {
    const WardrobeStore store(a.store);
    const Outfit outfit = store.load_outfit(a.id);
    std::optional<bool> verified;
    if (a.verify) {
        StandardResolver resolver(a.provider.make(), a.assets, a.provider.cache_dir);
        verified = verify_outfit(store, outfit, resolver);
    }
    json body = to_json(outfit);
    if (verified) body["verified"] = *verified;
    print_json(body);
    return verified.value_or(true) ? kExitOk : kExitDomain;
}

int run_delete(const WardrobeArgs& a) {
    WardrobeStore store(a.store);
    store.delete_outfit(a.id);
    if (g_json) {
        print_json({{"deleted", a.id}});
    } else {
        std::cout << "deleted " << a.id << "\n";
    }
    return kExitOk;
}

struct ServeArgs {
    std::string store, bind = "127.0.0.1", assets, ui_dir;
    int port = 8080;
    std::string cache_dir = (fs::temp_directory_path() / "uvforge-cache").string();
    ProviderFlags provider;
};

Service* g_service = nullptr;

extern "C" void handle_stop_signal(int) {
    if (g_service) g_service->stop();
}

int run_serve(const ServeArgs& a) {
    ServiceConfig config;
    config.store_root = a.store;
    config.cache_dir = a.cache_dir;
    config.asset_root = a.assets.empty() ? fs::path(a.store) / "assets" : fs::path(a.assets);
    config.ui_dir = a.ui_dir;
    config.provider = a.provider.make();
    Service service(config);
    const int port = service.bind(a.bind, a.port);
    std::cerr << "uvforge serving " << a.store << " on http://" << a.bind << ":" << port << "\n";
    g_service = &service;
    std::signal(SIGINT, handle_stop_signal);
    std::signal(SIGTERM, handle_stop_signal);
    service.listen();
    g_service = nullptr;
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"uvforge: mask-constrained garment texture editing"};
    app.require_subcommand(1);
    app.add_flag("--json", g_json, "Machine-readable output");
    app.set_config("--config", "", "TOML file; keys under [serve] etc. mirror the flags");

    ValidateArgs validate_args;
    auto* validate = app.add_subcommand("validate", "Check a garment's atlas, mask and label registry");
    validate->add_option("--atlas", validate_args.atlas)->required();
    validate->add_option("--mask", validate_args.mask)->required();
    validate->add_option("--registry", validate_args.registry)->required();
    validate->add_option("--threshold", validate_args.threshold, "Allowed unknown-pixel fraction")
        ->check(CLI::Range(0.0, 1.0));

    ApplyArgs apply_args;
    auto* apply = app.add_subcommand("apply", "Render a recipe against an installed garment");
    apply->add_option("--store", apply_args.store)->required();
    apply->add_option("--garment", apply_args.garment)->required();
    apply->add_option("--recipe", apply_args.recipe)->required();
    apply->add_option("--out", apply_args.out)->required();
    apply->add_option("--assets", apply_args.assets, "Root for asset image references");
    apply_args.provider.add_to(apply);

    GenArgs gen_args;
    auto* gen = app.add_subcommand("gen", "Generate an image from a prompt");
    gen->add_option("--prompt", gen_args.prompt)->required();
    gen->add_option("--style", gen_args.style)->check(CLI::IsMember({"cartoon", "aesthetic", "scenic", "none"}));
    gen->add_option("--size", gen_args.size, "WxH");
    gen->add_option("--seed", gen_args.seed);
    gen->add_option("--out", gen_args.out)->required();
    gen_args.provider.add_to(gen);

    WardrobeArgs wardrobe_args;
    auto* wardrobe = app.add_subcommand("wardrobe", "Manage garments and saved outfits");
    wardrobe->require_subcommand(1);
    auto* install = wardrobe->add_subcommand("install", "Install a garment");
    install->add_option("--store", wardrobe_args.store)->required();
    install->add_option("--atlas", wardrobe_args.atlas)->required();
    install->add_option("--mask", wardrobe_args.mask)->required();
    install->add_option("--registry", wardrobe_args.registry)->required();
    auto* save = wardrobe->add_subcommand("save", "Render and save a recipe as an outfit");
    save->add_option("--store", wardrobe_args.store)->required();
    save->add_option("--recipe", wardrobe_args.recipe)->required();
    save->add_option("--title", wardrobe_args.title);
    save->add_option("--assets", wardrobe_args.assets);
    wardrobe_args.provider.add_to(save);
    auto* list = wardrobe->add_subcommand("list", "List garments and outfits");
    list->add_option("--store", wardrobe_args.store)->required();
    auto* show = wardrobe->add_subcommand("show", "Show one outfit");
    show->add_option("--store", wardrobe_args.store)->required();
    show->add_option("--id", wardrobe_args.id)->required();
    show->add_flag("--verify", wardrobe_args.verify, "Re-render and compare the texture digest");
    show->add_option("--assets", wardrobe_args.assets);
    wardrobe_args.provider.add_to(show);
    auto* del = wardrobe->add_subcommand("delete", "Delete an outfit");
    del->add_option("--store", wardrobe_args.store)->required();
    del->add_option("--id", wardrobe_args.id)->required();

    ServeArgs serve_args;
    auto* serve = app.add_subcommand("serve", "Run the HTTP service");
    serve->add_option("--store", serve_args.store)->required();
    serve->add_option("--bind", serve_args.bind);
    serve->add_option("--port", serve_args.port)->check(CLI::Range(0, 65535));
    serve->add_option("--assets", serve_args.assets, "Asset root (default STORE/assets)");
    serve->add_option("--ui-dir", serve_args.ui_dir, "Static editor files served at /");
    serve_args.provider.add_to(serve);
    serve->get_option("--cache-dir")->default_str(serve_args.cache_dir);
    serve_args.provider.cache_dir = serve_args.cache_dir;

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*validate) return run_validate(validate_args);
        if (*apply) return run_apply(apply_args);
        if (*gen) return run_gen(gen_args);
        if (*install) return run_install(wardrobe_args);
        if (*save) return run_save(wardrobe_args);
        if (*list) return run_list(wardrobe_args);
        if (*show) return run_show(wardrobe_args);
        if (*del) return run_delete(wardrobe_args);
        if (*serve) {
            serve_args.cache_dir = serve_args.provider.cache_dir;
            return run_serve(serve_args);
        }
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const Error& e) {
        report_error(e);
        return exit_code_for(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitDomain;
    }
    return kExitUsage;
}
