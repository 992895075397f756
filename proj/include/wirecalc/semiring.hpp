#pragma once

#include <cmath>
#include <compare>
#include <concepts>
#include <cstdint>
#include <limits>
#include <string>

#include "wirecalc/errors.hpp"

namespace wirecalc {

/// Extended naturals N ∪ {∞} with checked 64-bit arithmetic. Overflow of
/// finite values is an error, never saturation: steady-state counts must
/// stay exact.
class Nat64 {
public:
    constexpr Nat64() : value_(0), infinite_(false) {}
    constexpr Nat64(std::uint64_t value) : value_(value), infinite_(false) {}

    static constexpr Nat64 infinity() {
        Nat64 n;
        n.infinite_ = true;
        return n;
    }
    static constexpr Nat64 zero() { return Nat64(0); }
    static constexpr Nat64 one() { return Nat64(1); }

    bool is_infinite() const { return infinite_; }
    bool is_zero() const { return !infinite_ && value_ == 0; }
    std::uint64_t value() const {
        if (infinite_) throw Error(ErrorKind::WrongInterpretation, "infinite count has no value");
        return value_;
    }

    friend Nat64 operator+(Nat64 a, Nat64 b) {
        if (a.infinite_ || b.infinite_) return infinity();
        if (a.value_ > std::numeric_limits<std::uint64_t>::max() - b.value_)
            throw Error(ErrorKind::ArithmeticOverflow, "natural addition overflow");
        return Nat64(a.value_ + b.value_);
    }

    friend Nat64 operator*(Nat64 a, Nat64 b) {
        if (a.is_zero() || b.is_zero()) return zero();
        if (a.infinite_ || b.infinite_) return infinity();
        if (a.value_ > std::numeric_limits<std::uint64_t>::max() / b.value_)
            throw Error(ErrorKind::ArithmeticOverflow, "natural multiplication overflow");
        return Nat64(a.value_ * b.value_);
    }

    Nat64& operator+=(Nat64 other) { return *this = *this + other; }

    bool operator==(const Nat64& other) const {
        if (infinite_ != other.infinite_) return false;
        return infinite_ || value_ == other.value_;
    }

    std::string to_string() const { return infinite_ ? "inf" : std::to_string(value_); }

private:
    std::uint64_t value_;
    bool infinite_;
};

/// Non-negative reals with +∞, under the complete-semiring convention
/// 0·∞ = 0 (native IEEE would give NaN).
class RealPlus {
public:
    RealPlus() : value_(0.0) {}
    RealPlus(double value) : value_(value) {
        if (std::isnan(value) || value < 0.0)
            throw Error(ErrorKind::InvalidArgument, "RealPlus requires a non-negative value");
    }

    static RealPlus infinity() { return RealPlus(std::numeric_limits<double>::infinity()); }
    static RealPlus zero() { return RealPlus(0.0); }
    static RealPlus one() { return RealPlus(1.0); }

    bool is_infinite() const { return std::isinf(value_); }
    bool is_zero() const { return value_ == 0.0; }
    double value() const { return value_; }

    friend RealPlus operator+(RealPlus a, RealPlus b) { return RealPlus(a.value_ + b.value_); }

    friend RealPlus operator*(RealPlus a, RealPlus b) {
        if (a.is_zero() || b.is_zero()) return zero();
        return RealPlus(a.value_ * b.value_);
    }

    RealPlus& operator+=(RealPlus other) { return *this = *this + other; }

    bool operator==(const RealPlus& other) const { return value_ == other.value_; }

    std::string to_string() const {
        if (is_infinite()) return "inf";
        std::string s = std::to_string(value_);
        return s;
    }

private:
    double value_;
};

template <typename R>
concept SemiringElement = requires(R a, R b) {
    { R::zero() } -> std::convertible_to<R>;
    { R::one() } -> std::convertible_to<R>;
    { a + b } -> std::convertible_to<R>;
    { a* b } -> std::convertible_to<R>;
    { a.is_zero() } -> std::convertible_to<bool>;
    { a == b } -> std::convertible_to<bool>;
    { a.to_string() } -> std::convertible_to<std::string>;
};

}  // namespace wirecalc
