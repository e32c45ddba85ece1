#pragma once

// Decibel and linear power/loss scalars.
//
// Power references are milliwatts: 0 dBm == 1 mW.  Losses and gains are
// dimensionless ratios in the linear domain.  All sums and differences of
// powers are done on PowerLinear; Decibel is for I/O and for the handful of
// closed-form expressions that are naturally written in dB.

#include <cmath>
#include <compare>
#include <stdexcept>
#include <string>

namespace femtopc {

class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

struct Decibel {
    double value = 0.0;

    constexpr auto operator<=>(const Decibel&) const = default;
};

struct PowerLinear {
    double value = 0.0;

    constexpr auto operator<=>(const PowerLinear&) const = default;
};

constexpr Decibel operator+(Decibel a, Decibel b) { return {a.value + b.value}; }
constexpr Decibel operator-(Decibel a, Decibel b) { return {a.value - b.value}; }
constexpr Decibel operator-(Decibel a) { return {-a.value}; }

constexpr PowerLinear operator+(PowerLinear a, PowerLinear b) { return {a.value + b.value}; }
constexpr PowerLinear operator-(PowerLinear a, PowerLinear b) { return {a.value - b.value}; }
constexpr PowerLinear operator*(PowerLinear a, PowerLinear b) { return {a.value * b.value}; }
constexpr PowerLinear operator/(PowerLinear a, PowerLinear b) { return {a.value / b.value}; }
constexpr PowerLinear operator*(double s, PowerLinear a) { return {s * a.value}; }
constexpr PowerLinear operator*(PowerLinear a, double s) { return {s * a.value}; }
constexpr PowerLinear operator/(PowerLinear a, double s) { return {a.value / s}; }

inline PowerLinear db_to_linear(Decibel x) { return {std::pow(10.0, x.value / 10.0)}; }

inline Decibel linear_to_db(PowerLinear x)
{
    if (!(x.value > 0.0)) {
        throw DomainError("linear_to_db: non-positive argument " + std::to_string(x.value));
    }
    return {10.0 * std::log10(x.value)};
}

inline PowerLinear min(PowerLinear a, PowerLinear b) { return b < a ? b : a; }

inline namespace literals {

constexpr Decibel operator""_dB(long double v) { return {static_cast<double>(v)}; }
constexpr Decibel operator""_dB(unsigned long long v) { return {static_cast<double>(v)}; }
// dBm is the same scalar as dB on a milliwatt reference.
constexpr Decibel operator""_dBm(long double v) { return {static_cast<double>(v)}; }
constexpr Decibel operator""_dBm(unsigned long long v) { return {static_cast<double>(v)}; }

} // namespace literals

} // namespace femtopc
