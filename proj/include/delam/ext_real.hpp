#pragma once

#include <stdexcept>
#include <string>

namespace delam {

/// Extended real number used for functionals that may take the value +infinity
/// (unidirectional dissipation, brittle indicator, support distance with empty
/// reference). Infinity is a flag, never an IEEE Inf inside arithmetic.
class ExtReal {
public:
    constexpr ExtReal() = default;
    constexpr ExtReal(double v) : value_(v) {}  // NOLINT(google-explicit-constructor)

    static constexpr ExtReal infinity()
    {
        ExtReal r;
        r.infinite_ = true;
        return r;
    }

    constexpr bool is_finite() const { return !infinite_; }
    constexpr bool is_infinite() const { return infinite_; }

    double value() const
    {
        if (infinite_)
            throw std::domain_error("ExtReal: value() requested from +infinity sentinel");
        return value_;
    }

    constexpr double value_or(double fallback) const { return infinite_ ? fallback : value_; }

    friend constexpr ExtReal operator+(ExtReal a, ExtReal b)
    {
        if (a.infinite_ || b.infinite_)
            return infinity();
        return ExtReal(a.value_ + b.value_);
    }

    friend constexpr bool operator==(ExtReal a, ExtReal b)
    {
        if (a.infinite_ || b.infinite_)
            return a.infinite_ == b.infinite_;
        return a.value_ == b.value_;
    }

    friend constexpr bool operator<(ExtReal a, ExtReal b)
    {
        if (a.infinite_)
            return false;
        if (b.infinite_)
            return true;
        return a.value_ < b.value_;
    }

    friend constexpr bool operator<=(ExtReal a, ExtReal b) { return !(b < a); }

    std::string to_string() const;

private:
    double value_ = 0.0;
    bool infinite_ = false;
};

}  // namespace delam
