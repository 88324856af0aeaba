#include <algorithm>
#include <cmath>
#include <regex>

#include "uvforge/digest.hpp"
#include "uvforge/edit.hpp"
#include "uvforge/error.hpp"

using nlohmann::json;

namespace uvforge {

namespace {

[[noreturn]] void schema_fail(const std::string& path, const std::string& message) {
    throw Error(ErrorCode::SchemaError, path + ": " + message, path);
}

void reject_unknown(const json& object, std::initializer_list<std::string_view> allowed,
                    const std::string& path) {
    for (const auto& [key, value] : object.items()) {
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
            schema_fail(path + "/" + key, "unknown field");
        }
    }
}

const json& require(const json& object, const char* key, const std::string& path) {
    const auto it = object.find(key);
    if (it == object.end()) schema_fail(path + "/" + key, "missing required field");
    return *it;
}

std::string read_string(const json& value, const std::string& path, bool non_empty = true) {
    if (!value.is_string()) schema_fail(path, "expected a string");
    auto s = value.get<std::string>();
    if (non_empty && s.empty()) schema_fail(path, "must be non-empty");
    return s;
}

double read_number(const json& value, const std::string& path) {
    if (!value.is_number()) schema_fail(path, "expected a number");
    const double v = value.get<double>();
    if (!std::isfinite(v)) schema_fail(path, "must be finite");
    return v;
}

Fraction read_unit(const json& value, const std::string& path) {
    const double v = read_number(value, path);
    if (v < 0.0 || v > 1.0) schema_fail(path, "must be in [0, 1]");
    return Fraction::from_double(v);
}

double read_positive(const json& value, const std::string& path) {
    const double v = read_number(value, path);
    if (!(v > 0.0)) schema_fail(path, "must be positive");
    return v;
}

bool read_bool(const json& value, const std::string& path) {
    if (!value.is_boolean()) schema_fail(path, "expected a boolean");
    return value.get<bool>();
}

std::string read_part(const json& op, const std::string& path) {
    return read_string(require(op, "part", path), path + "/part");
}

bool is_utc_timestamp(const std::string& text) {
    static const std::regex pattern(R"(\d{4}-\d{2}-\d{2}T\d{2}:\d{2}:\d{2}(\.\d{1,9})?Z)");
    return std::regex_match(text, pattern);
}

ImageRef read_image(const json& value, const std::string& path) {
    if (!value.is_object() || value.size() != 1) {
        schema_fail(path, "image must have exactly one of generated, inline, asset");
    }
    const auto& [kind, body] = *value.items().begin();
    const std::string sub = path + "/" + kind;
    if (kind == "generated") {
        try {
            return GeneratedImage{gen_request_from_json(body)};
        } catch (const Error& e) {
            schema_fail(sub + (e.detail().empty() ? "" : "/" + e.detail()), e.what());
        }
    }
    if (kind == "inline") {
        if (!body.is_object()) schema_fail(sub, "expected an object");
        reject_unknown(body, {"sha256", "png_b64"}, sub);
        InlineImage image;
        image.sha256 = read_string(require(body, "sha256", sub), sub + "/sha256");
        const std::string b64 = read_string(require(body, "png_b64", sub), sub + "/png_b64");
        try {
            image.png = base64_decode(b64);
        } catch (const Error&) {
            schema_fail(sub + "/png_b64", "malformed base64");
        }
        if (sha256_hex(image.png) != image.sha256) schema_fail(sub + "/sha256", "digest mismatch");
        return image;
    }
    if (kind == "asset") {
        return AssetImage{read_string(body, sub)};
    }
    schema_fail(sub, "unknown image kind");
}

json image_to_json(const ImageRef& ref) {
    return std::visit(
        [](const auto& image) -> json {
            using T = std::decay_t<decltype(image)>;
            if constexpr (std::is_same_v<T, GeneratedImage>) {
                return {{"generated", to_json(image.request)}};
            } else if constexpr (std::is_same_v<T, InlineImage>) {
                return {{"inline", {{"sha256", image.sha256}, {"png_b64", base64_encode(image.png)}}}};
            } else {
                return {{"asset", image.path}};
            }
        },
        ref);
}

EditOp read_op(const json& op, const std::string& path) {
    if (!op.is_object()) schema_fail(path, "op must be an object");
    const std::string type = read_string(require(op, "type", path), path + "/type");
    if (type == "recolor") {
        reject_unknown(op, {"type", "part", "target", "preserve_shading"}, path);
        RecolorOp out;
        out.part = read_part(op, path);
        const std::string target = read_string(require(op, "target", path), path + "/target");
        try {
            out.target = parse_hex_color(target);
        } catch (const Error&) {
            schema_fail(path + "/target", "expected #RRGGBB");
        }
        if (op.contains("preserve_shading")) {
            out.preserve_shading = read_bool(op["preserve_shading"], path + "/preserve_shading");
        }
        return out;
    }
    if (type == "texture_fill") {
        reject_unknown(op, {"type", "part", "image", "fit", "tile_scale", "blend_opacity"}, path);
        TextureFillOp out;
        out.part = read_part(op, path);
        out.image = read_image(require(op, "image", path), path + "/image");
        const std::string fit = read_string(require(op, "fit", path), path + "/fit");
        if (fit == "tile") {
            out.fit = FitMode::Tile;
        } else if (fit == "stretch") {
            out.fit = FitMode::Stretch;
        } else {
            schema_fail(path + "/fit", "must be \"tile\" or \"stretch\"");
        }
        if (op.contains("tile_scale")) out.tile_scale = read_positive(op["tile_scale"], path + "/tile_scale");
        if (op.contains("blend_opacity")) {
            out.blend_opacity = read_unit(op["blend_opacity"], path + "/blend_opacity");
        }
        return out;
    }
    if (type == "logo_stamp") {
        reject_unknown(op, {"type", "part", "image", "anchor_uv", "scale", "rotation_deg", "opacity"},
                       path);
        LogoStampOp out;
        out.part = read_part(op, path);
        out.image = read_image(require(op, "image", path), path + "/image");
        const json& anchor = require(op, "anchor_uv", path);
        if (!anchor.is_array() || anchor.size() != 2) {
            schema_fail(path + "/anchor_uv", "expected [u, v]");
        }
        for (int i = 0; i < 2; ++i) {
            const std::string p = path + "/anchor_uv/" + std::to_string(i);
            const double v = read_number(anchor[i], p);
            if (v < 0.0 || v > 1.0) schema_fail(p, "must be in [0, 1]");
            (i == 0 ? out.anchor_u : out.anchor_v) = v;
        }
        out.scale = read_positive(require(op, "scale", path), path + "/scale");
        if (op.contains("rotation_deg")) {
            out.rotation_deg = read_number(op["rotation_deg"], path + "/rotation_deg");
        }
        out.opacity = read_unit(require(op, "opacity", path), path + "/opacity");
        return out;
    }
    schema_fail(path + "/type", "unknown op type '" + type + "'");
}

json op_to_json(const EditOp& op) {
    return std::visit(
        [](const auto& o) -> json {
            using T = std::decay_t<decltype(o)>;
            if constexpr (std::is_same_v<T, RecolorOp>) {
                return {{"type", "recolor"},
                        {"part", o.part},
                        {"target", format_hex_color(o.target)},
                        {"preserve_shading", o.preserve_shading}};
            } else if constexpr (std::is_same_v<T, TextureFillOp>) {
                return {{"type", "texture_fill"},
                        {"part", o.part},
                        {"fit", o.fit == FitMode::Tile ? "tile" : "stretch"},
                        {"tile_scale", o.tile_scale},
                        {"blend_opacity", o.blend_opacity.to_double()},
                        {"image", image_to_json(o.image)}};
            } else {
                return {{"type", "logo_stamp"},
                        {"part", o.part},
                        {"anchor_uv", {o.anchor_u, o.anchor_v}},
                        {"scale", o.scale},
                        {"rotation_deg", o.rotation_deg},
                        {"opacity", o.opacity.to_double()},
                        {"image", image_to_json(o.image)}};
            }
        },
        op);
}

}  // namespace

Recipe recipe_from_json(const json& doc) {
    if (!doc.is_object()) schema_fail("", "recipe must be an object");
    reject_unknown(doc, {"schema_version", "garment_id", "created_at", "ops"}, "");
    Recipe recipe;
    const json& version = require(doc, "schema_version", "");
    if (!version.is_number_integer() || version.get<std::int64_t>() != kRecipeSchemaVersion) {
        schema_fail("/schema_version", "must be 1");
    }
    recipe.garment_id = read_string(require(doc, "garment_id", ""), "/garment_id");
    if (doc.contains("created_at")) {
        recipe.created_at = read_string(doc["created_at"], "/created_at");
        if (!is_utc_timestamp(recipe.created_at)) {
            schema_fail("/created_at", "expected ISO-8601 UTC timestamp ending in Z");
        }
    }
    const json& ops = require(doc, "ops", "");
    if (!ops.is_array()) schema_fail("/ops", "expected an array");
    for (std::size_t i = 0; i < ops.size(); ++i) {
        recipe.ops.push_back(read_op(ops[i], "/ops/" + std::to_string(i)));
    }
    return recipe;
}

Recipe parse_recipe(std::string_view json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw Error(ErrorCode::ParseError, std::string("recipe JSON: ") + e.what());
    }
    return recipe_from_json(doc);
}

json to_json(const Recipe& recipe) {
    json ops = json::array();
    for (const EditOp& op : recipe.ops) ops.push_back(op_to_json(op));
    json doc = {{"schema_version", recipe.schema_version}, {"garment_id", recipe.garment_id}};
    if (!recipe.created_at.empty()) doc["created_at"] = recipe.created_at;
    doc["ops"] = std::move(ops);
    return doc;
}

std::string recipe_to_string(const Recipe& recipe) { return to_json(recipe).dump(2); }

}  // namespace uvforge
