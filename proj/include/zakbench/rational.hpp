#pragma once

#include <charconv>
#include <compare>
#include <cstdint>
#include <numeric>
#include <ostream>
#include <string>
#include <string_view>

#include "error.hpp"

namespace zakbench {

/// Exact rational number with 64-bit numerator and positive denominator,
/// always kept in lowest terms. Intermediate products use 128-bit integers
/// and overflow is reported rather than wrapped.
class Rational {
public:
    constexpr Rational() = default;
    constexpr Rational(std::int64_t n) : num_(n), den_(1) {}  // NOLINT(implicit)
    Rational(std::int64_t n, std::int64_t d) { assign(n, d); }

    std::int64_t num() const noexcept { return num_; }
    std::int64_t den() const noexcept { return den_; }

    bool is_integer() const noexcept { return den_ == 1; }
    double to_double() const noexcept {
        return static_cast<double>(num_) / static_cast<double>(den_);
    }

    /// Largest integer not exceeding the value.
    std::int64_t floor() const noexcept {
        std::int64_t q = num_ / den_;
        if ((num_ % den_ != 0) && (num_ < 0)) --q;
        return q;
    }

    /// Representative in [0, 1).
    Rational frac() const { return *this - Rational(floor()); }

    std::string str() const {
        return std::to_string(num_) + "/" + std::to_string(den_);
    }

    /// Parses "p/q", "p" or a finite decimal such as "1.5" or "-0.25".
    static Rational parse(std::string_view text) {
        auto bad = [&] { fail("malformed rational '" + std::string(text) + "' (expected p/q)"); };
        if (text.empty()) bad();
        if (auto slash = text.find('/'); slash != std::string_view::npos) {
            std::int64_t n = parse_int(text.substr(0, slash), bad);
            std::int64_t d = parse_int(text.substr(slash + 1), bad);
            if (d == 0) fail("malformed rational '" + std::string(text) + "' (zero denominator)");
            return Rational(n, d);
        }
        if (auto dot = text.find('.'); dot != std::string_view::npos) {
            std::string_view int_part = text.substr(0, dot);
            std::string_view frac_part = text.substr(dot + 1);
            bool negative = !int_part.empty() && int_part.front() == '-';
            if (negative || (!int_part.empty() && int_part.front() == '+')) int_part.remove_prefix(1);
            if (frac_part.size() > 17) bad();
            std::int64_t whole = int_part.empty() ? 0 : parse_int(int_part, bad);
            std::int64_t scale = 1;
            for (std::size_t i = 0; i < frac_part.size(); ++i) scale *= 10;
            std::int64_t fractional = frac_part.empty() ? 0 : parse_int(frac_part, bad);
            if (frac_part.find_first_not_of("0123456789") != std::string_view::npos) bad();
            Rational r = Rational(whole) + Rational(fractional, scale);
            return negative ? -r : r;
        }
        return Rational(parse_int(text, bad));
    }

    friend Rational operator+(const Rational& a, const Rational& b) {
        return from_wide(static_cast<__int128>(a.num_) * b.den_ + static_cast<__int128>(b.num_) * a.den_,
                         static_cast<__int128>(a.den_) * b.den_);
    }
    friend Rational operator-(const Rational& a, const Rational& b) { return a + (-b); }
    friend Rational operator*(const Rational& a, const Rational& b) {
        return from_wide(static_cast<__int128>(a.num_) * b.num_,
                         static_cast<__int128>(a.den_) * b.den_);
    }
    friend Rational operator/(const Rational& a, const Rational& b) {
        if (b.num_ == 0) fail("division by zero rational");
        return from_wide(static_cast<__int128>(a.num_) * b.den_,
                         static_cast<__int128>(a.den_) * b.num_);
    }
    Rational operator-() const { return Rational(-num_, den_); }

    Rational& operator+=(const Rational& o) { return *this = *this + o; }
    Rational& operator-=(const Rational& o) { return *this = *this - o; }
    Rational& operator*=(const Rational& o) { return *this = *this * o; }

    friend bool operator==(const Rational&, const Rational&) = default;
    friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
        __int128 lhs = static_cast<__int128>(a.num_) * b.den_;
        __int128 rhs = static_cast<__int128>(b.num_) * a.den_;
        if (lhs < rhs) return std::strong_ordering::less;
        if (lhs > rhs) return std::strong_ordering::greater;
        return std::strong_ordering::equal;
    }

    friend std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.str(); }

private:
    template <class OnError>
    static std::int64_t parse_int(std::string_view s, OnError&& on_error) {
        if (!s.empty() && s.front() == '+') s.remove_prefix(1);
        std::int64_t value = 0;
        auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
        if (ec != std::errc{} || ptr != s.data() + s.size()) on_error();
        return value;
    }

    static Rational from_wide(__int128 n, __int128 d) {
        if (d < 0) { n = -n; d = -d; }
        __int128 a = n < 0 ? -n : n, b = d;
        while (b != 0) { __int128 t = a % b; a = b; b = t; }
        if (a > 1) { n /= a; d /= a; }
        constexpr __int128 lim = INT64_MAX;
        if (n > lim || n < -lim || d > lim) fail("rational overflow");
        Rational r;
        r.num_ = static_cast<std::int64_t>(n);
        r.den_ = static_cast<std::int64_t>(d);
        return r;
    }

    void assign(std::int64_t n, std::int64_t d) {
        if (d == 0) fail("rational with zero denominator");
        *this = from_wide(n, d);
    }

    std::int64_t num_ = 0;
    std::int64_t den_ = 1;
};

inline std::int64_t lcm_of(std::initializer_list<std::int64_t> values) {
    std::int64_t acc = 1;
    for (auto v : values) acc = std::lcm(acc, v < 0 ? -v : v);
    return acc;
}

/// Index of x on a grid of `n` points per unit, or -1 style failure via the
/// returned flag when x is not a grid point.
inline bool grid_index(const Rational& x, std::int64_t n, std::int64_t& index) {
    Rational scaled = x * Rational(n);
    if (!scaled.is_integer()) return false;
    index = scaled.num();
    return true;
}

}  // namespace zakbench
