#include "naive_ops.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

namespace naive {

Labels classify(const TextureAtlas& mask, const std::vector<uvforge::PartLabel>& parts) {
    Labels out;
    out.width = mask.width();
    out.height = mask.height();
    for (int y = 0; y < mask.height(); ++y) {
        for (int x = 0; x < mask.width(); ++x) {
            const Rgba8 p = mask.at(x, y);
            int found = -1;
            if (p.a != 0) {
                for (std::size_t i = 0; i < parts.size() && found < 0; ++i) {
                    const Rgb8 c = parts[i].color;
                    const int t = parts[i].tolerance;
                    if (std::abs(p.r - c.r) <= t && std::abs(p.g - c.g) <= t &&
                        std::abs(p.b - c.b) <= t) {
                        found = static_cast<int>(i);
                    }
                }
            }
            out.label.push_back(found);
            out.coverage.push_back(found >= 0 ? p.a : 0);
        }
    }
    return out;
}

std::optional<Box> bbox(const Labels& labels, int part) {
    std::optional<Box> box;
    for (int y = 0; y < labels.height; ++y) {
        for (int x = 0; x < labels.width; ++x) {
            if (labels.at(x, y) != part) continue;
            if (!box) {
                box = Box{x, y, x, y};
            } else {
                box->x0 = std::min(box->x0, x);
                box->y0 = std::min(box->y0, y);
                box->x1 = std::max(box->x1, x);
                box->y1 = std::max(box->y1, y);
            }
        }
    }
    return box;
}

int blend(int a, int b, std::uint64_t num, std::uint64_t den) {
    // Exact target scaled by 2*den: (2a*den + 2(b-a)*num). Pick k with the
    // smallest |2k*den - target|, preferring the larger k on a tie.
    using I = __int128;
    const I target = I(2) * a * I(den) + I(2) * (b - a) * I(num);
    int best = 0;
    I best_err = -1;
    for (int k = 0; k <= 255; ++k) {
        I err = I(2) * k * I(den) - target;
        if (err < 0) err = -err;
        if (best_err < 0 || err <= best_err) {
            best = k;
            best_err = err;
        }
    }
    return best;
}

namespace {

int to_byte(double v) {
    const double r = std::round(v);
    return r <= 0.0 ? 0 : r >= 255.0 ? 255 : static_cast<int>(r);
}

struct Hsl {
    double h, s, l;
};

Hsl to_hsl(Rgb8 c) {
    const double r = c.r / 255.0, g = c.g / 255.0, b = c.b / 255.0;
    const double hi = std::max(r, std::max(g, b));
    const double lo = std::min(r, std::min(g, b));
    Hsl o{0.0, 0.0, (hi + lo) / 2.0};
    if (hi == lo) return o;
    const double d = hi - lo;
    if (o.l > 0.5) {
        o.s = d / (2.0 - hi - lo);
    } else {
        o.s = d / (hi + lo);
    }
    double sector;
    if (hi == r) {
        sector = (g - b) / d;
        if (g < b) sector = sector + 6.0;
    } else if (hi == g) {
        sector = (b - r) / d + 2.0;
    } else {
        sector = (r - g) / d + 4.0;
    }
    o.h = sector * 60.0;
    return o;
}

double channel(double p, double q, double t) {
    if (t < 0.0) t = t + 1.0;
    if (t > 1.0) t = t - 1.0;
    if (t < 1.0 / 6.0) return p + (q - p) * 6.0 * t;
    if (t < 0.5) return q;
    if (t < 2.0 / 3.0) return p + (q - p) * (2.0 / 3.0 - t) * 6.0;
    return p;
}

struct Sample {
    double c[4];
};

double px(const Rgba8& p, int k) { return k == 0 ? p.r : k == 1 ? p.g : k == 2 ? p.b : p.a; }

Sample bilerp(const TextureAtlas& img, int x0, int y0, int x1, int y1, double fx, double fy) {
    Sample s{};
    for (int k = 0; k < 4; ++k) {
        const double a = px(img.at(x0, y0), k), b = px(img.at(x1, y0), k);
        const double c = px(img.at(x0, y1), k), d = px(img.at(x1, y1), k);
        const double top = a + (b - a) * fx;
        const double bottom = c + (d - c) * fx;
        s.c[k] = top + (bottom - top) * fy;
    }
    return s;
}

Sample clamp_sample(const TextureAtlas& img, double x, double y) {
    x = x < 0.0 ? 0.0 : x > img.width() - 1.0 ? img.width() - 1.0 : x;
    y = y < 0.0 ? 0.0 : y > img.height() - 1.0 ? img.height() - 1.0 : y;
    const int x0 = static_cast<int>(std::floor(x)), y0 = static_cast<int>(std::floor(y));
    return bilerp(img, x0, y0, std::min(x0 + 1, img.width() - 1), std::min(y0 + 1, img.height() - 1),
                  x - x0, y - y0);
}

Sample wrap_sample(const TextureAtlas& img, double x, double y) {
    const double w = img.width(), h = img.height();
    x = std::fmod(x, w);
    y = std::fmod(y, h);
    if (x < 0.0) x = x + w;
    if (y < 0.0) y = y + h;
    int x0 = static_cast<int>(std::floor(x)), y0 = static_cast<int>(std::floor(y));
    if (x0 >= img.width()) x0 = img.width() - 1;
    if (y0 >= img.height()) y0 = img.height() - 1;
    return bilerp(img, x0, y0, (x0 + 1) % img.width(), (y0 + 1) % img.height(), x - x0, y - y0);
}

Rgba8 put(Rgba8 src, int r, int g, int b) {
    return {static_cast<std::uint8_t>(r), static_cast<std::uint8_t>(g), static_cast<std::uint8_t>(b),
            src.a};
}

Rgba8 blend_px(Rgba8 src, int r, int g, int b, std::uint64_t num, std::uint64_t den) {
    return put(src, blend(src.r, r, num, den), blend(src.g, g, num, den), blend(src.b, b, num, den));
}

}  // namespace

double lightness(Rgb8 c) { return to_hsl(c).l; }

Rgb8 shade(Rgb8 source, Rgb8 target) {
    const double l = to_hsl(source).l;
    const Hsl t = to_hsl(target);
    double r = l, g = l, b = l;
    if (t.s != 0.0) {
        const double q = l < 0.5 ? l * (1.0 + t.s) : l + t.s - l * t.s;
        const double p = 2.0 * l - q;
        const double h = t.h / 360.0;
        r = channel(p, q, h + 1.0 / 3.0);
        g = channel(p, q, h);
        b = channel(p, q, h - 1.0 / 3.0);
    }
    return {static_cast<std::uint8_t>(to_byte(r * 255.0)), static_cast<std::uint8_t>(to_byte(g * 255.0)),
            static_cast<std::uint8_t>(to_byte(b * 255.0))};
}

TextureAtlas recolor(const TextureAtlas& atlas, const Labels& labels, int part, Rgb8 target,
                     bool preserve) {
    TextureAtlas out = atlas;
    for (int y = 0; y < atlas.height(); ++y) {
        for (int x = 0; x < atlas.width(); ++x) {
            if (labels.at(x, y) != part) continue;
            const Rgba8 src = atlas.at(x, y);
            const Rgb8 repl = preserve ? shade(src.rgb(), target) : target;
            out.at(x, y) = blend_px(src, repl.r, repl.g, repl.b, static_cast<std::uint64_t>(labels.cov(x, y)), 255);
        }
    }
    return out;
}

TextureAtlas fill(const TextureAtlas& atlas, const Labels& labels, int part,
                  const TextureAtlas& image, bool tile, double tile_scale, Weight opacity) {
    TextureAtlas out = atlas;
    const std::optional<Box> box = bbox(labels, part);
    if (!box) return out;
    const int bw = box->x1 - box->x0 + 1, bh = box->y1 - box->y0 + 1;
    for (int y = 0; y < atlas.height(); ++y) {
        for (int x = 0; x < atlas.width(); ++x) {
            if (labels.at(x, y) != part) continue;
            const int rx = x - box->x0, ry = y - box->y0;
            int c[3];
            if (tile && tile_scale == 1.0) {
                const Rgba8 p = image.at(rx % image.width(), ry % image.height());
                c[0] = p.r, c[1] = p.g, c[2] = p.b;
            } else {
                const Sample s = tile ? wrap_sample(image, rx / tile_scale, ry / tile_scale)
                                      : clamp_sample(image,
                                                     (rx + 0.5) * (static_cast<double>(image.width()) / bw) - 0.5,
                                                     (ry + 0.5) * (static_cast<double>(image.height()) / bh) - 0.5);
                for (int k = 0; k < 3; ++k) c[k] = to_byte(s.c[k]);
            }
            out.at(x, y) = blend_px(atlas.at(x, y), c[0], c[1], c[2],
                                    static_cast<std::uint64_t>(labels.cov(x, y)) * opacity.num, 255 * opacity.den);
        }
    }
    return out;
}

TextureAtlas stamp(const TextureAtlas& atlas, const Labels& labels, int part,
                   const TextureAtlas& logo, double u, double v, double scale, double rot_deg,
                   Weight opacity) {
    TextureAtlas out = atlas;
    const std::optional<Box> box = bbox(labels, part);
    if (!box) return out;
    const double cx = box->x0 + u * (box->x1 - box->x0 + 1);
    const double cy = box->y0 + v * (box->y1 - box->y0 + 1);
    const double theta = rot_deg * 3.14159265358979323846 / 180.0;
    const double c = std::cos(theta), s = std::sin(theta);
    for (int y = 0; y < atlas.height(); ++y) {
        for (int x = 0; x < atlas.width(); ++x) {
            if (labels.at(x, y) != part) continue;
            const double dx = x + 0.5 - cx, dy = y + 0.5 - cy;
            const double lx = (c * dx + s * dy) / scale + logo.width() / 2.0;
            const double ly = (-s * dx + c * dy) / scale + logo.height() / 2.0;
            if (!(lx >= 0.0 && ly >= 0.0 && lx < logo.width() && ly < logo.height())) continue;
            const Sample smp = clamp_sample(logo, lx - 0.5, ly - 0.5);
            const std::uint64_t alpha = static_cast<std::uint64_t>(to_byte(smp.c[3]));
            const std::uint64_t num = static_cast<std::uint64_t>(labels.cov(x, y)) * opacity.num * alpha;
            const std::uint64_t den = 255ULL * opacity.den * 255ULL;
            out.at(x, y) = blend_px(atlas.at(x, y), to_byte(smp.c[0]), to_byte(smp.c[1]), to_byte(smp.c[2]),
                                    num, den);
        }
    }
    return out;
}

}  // namespace naive
