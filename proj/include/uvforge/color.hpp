#pragma once

#include <cstdint>

#include "uvforge/atlas.hpp"

namespace uvforge {

/// Exact non-negative rational in [0,1] used as a blend weight.
struct Fraction {
    std::uint64_t num = 0;
    std::uint64_t den = 1;

    static constexpr Fraction zero() { return {0, 1}; }
    static constexpr Fraction one() { return {1, 1}; }
    /// Alpha/coverage byte as byte/255.
    static constexpr Fraction from_byte(std::uint8_t b) { return {b, 255}; }
    /// Nearest multiple of 1e-6; values are clamped to [0,1] by the caller's
    /// validation, not here.
    static Fraction from_double(double value);

    double to_double() const { return static_cast<double>(num) / static_cast<double>(den); }
    bool is_zero() const { return num == 0; }

    /// Value equality.
    friend constexpr bool operator==(Fraction a, Fraction b) {
        return a.num * b.den == b.num * a.den;
    }
    friend constexpr Fraction operator*(Fraction a, Fraction b) {
        return {a.num * b.num, a.den * b.den};
    }
};

inline constexpr std::uint64_t kOpacityDenominator = 1'000'000;

/// round(a + (b - a) * t), half away from zero, computed exactly.
std::uint8_t mix(std::uint8_t a, std::uint8_t b, Fraction t);
Rgb8 mix(Rgb8 a, Rgb8 b, Fraction t);

/// Real channel value (nominally 0..255) to a byte, half away from zero,
/// clamped.
std::uint8_t quantize(double value);

struct Hsl {
    double h = 0.0;  // degrees in [0,360)
    double s = 0.0;  // [0,1]
    double l = 0.0;  // [0,1]
};

/// Channels are byte/255.
Hsl rgb_to_hsl(Rgb8 color);
/// Returns channels in [0,1].
void hsl_to_rgb(const Hsl& hsl, double& r, double& g, double& b);

/// Source lightness with the target's hue and saturation, quantized.
Rgb8 shade_preserving_color(Rgb8 source, Rgb8 target);

}  // namespace uvforge
