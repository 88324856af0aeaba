#include "uvforge/color.hpp"

#include <algorithm>
#include <cmath>

namespace uvforge {

Fraction Fraction::from_double(double value) {
    return {static_cast<std::uint64_t>(std::llround(value * static_cast<double>(kOpacityDenominator))),
            kOpacityDenominator};
}

std::uint8_t mix(std::uint8_t a, std::uint8_t b, Fraction t) {
    if (t.num >= t.den) return b;
    if (t.num == 0) return a;
    const auto den = static_cast<std::int64_t>(t.den);
    const std::int64_t n = static_cast<std::int64_t>(a) * den +
                           (static_cast<std::int64_t>(b) - a) * static_cast<std::int64_t>(t.num);
    // n >= 0 because the result lies between a and b; half away from zero is
    // then floor(n/den + 1/2).
    return static_cast<std::uint8_t>((2 * n + den) / (2 * den));
}

Rgb8 mix(Rgb8 a, Rgb8 b, Fraction t) {
    return {mix(a.r, b.r, t), mix(a.g, b.g, t), mix(a.b, b.b, t)};
}

std::uint8_t quantize(double value) {
    const double r = std::round(value);
    if (!(r > 0.0)) return 0;
    if (r >= 255.0) return 255;
    return static_cast<std::uint8_t>(r);
}

Hsl rgb_to_hsl(Rgb8 color) {
    const double r = color.r / 255.0;
    const double g = color.g / 255.0;
    const double b = color.b / 255.0;
    const double hi = std::max({r, g, b});
    const double lo = std::min({r, g, b});
    Hsl out;
    out.l = (hi + lo) / 2.0;
    if (hi == lo) return out;
    const double d = hi - lo;
    out.s = out.l > 0.5 ? d / (2.0 - hi - lo) : d / (hi + lo);
    double h;
    if (hi == r) {
        h = (g - b) / d + (g < b ? 6.0 : 0.0);
    } else if (hi == g) {
        h = (b - r) / d + 2.0;
    } else {
        h = (r - g) / d + 4.0;
    }
    out.h = h * 60.0;
    return out;
}

namespace {

double hue_to_channel(double p, double q, double t) {
    if (t < 0.0) t += 1.0;
    if (t > 1.0) t -= 1.0;
    if (t < 1.0 / 6.0) return p + (q - p) * 6.0 * t;
    if (t < 1.0 / 2.0) return q;
    if (t < 2.0 / 3.0) return p + (q - p) * (2.0 / 3.0 - t) * 6.0;
    return p;
}

}  // namespace

void hsl_to_rgb(const Hsl& hsl, double& r, double& g, double& b) {
    if (hsl.s == 0.0) {
        r = g = b = hsl.l;
        return;
    }
    const double q = hsl.l < 0.5 ? hsl.l * (1.0 + hsl.s) : hsl.l + hsl.s - hsl.l * hsl.s;
    const double p = 2.0 * hsl.l - q;
    const double h = hsl.h / 360.0;
    r = hue_to_channel(p, q, h + 1.0 / 3.0);
    g = hue_to_channel(p, q, h);
    b = hue_to_channel(p, q, h - 1.0 / 3.0);
}

Rgb8 shade_preserving_color(Rgb8 source, Rgb8 target) {
    const Hsl src = rgb_to_hsl(source);
    Hsl out = rgb_to_hsl(target);
    out.l = src.l;
    double r, g, b;
    hsl_to_rgb(out, r, g, b);
    return {quantize(r * 255.0), quantize(g * 255.0), quantize(b * 255.0)};
}

}  // namespace uvforge
