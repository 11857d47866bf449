#ifndef GAMMATC_DIMENSION_HPP
#define GAMMATC_DIMENSION_HPP

#include <limits>
#include <stdexcept>
#include <string>

namespace gammatc {

// Upper dimension bound N in a curvature-dimension condition: a real
// number >= 1 or infinity.  Infinity compares greater than every finite
// value and contributes 1/N = 0 wherever a reciprocal appears, so code
// can write the finite formulas once.
class DimensionBound {
public:
    static DimensionBound finite(double n) {
        if (!(n >= 1.0) || n == std::numeric_limits<double>::infinity())
            throw std::invalid_argument("DimensionBound: finite bound must satisfy N >= 1, got " +
                                        std::to_string(n));
        return DimensionBound(n);
    }
    static DimensionBound infinite() {
        return DimensionBound(std::numeric_limits<double>::infinity());
    }

    bool is_infinite() const { return value_ == std::numeric_limits<double>::infinity(); }
    // +inf when infinite; callers needing a finite number must check first.
    double value() const { return value_; }
    // 1/N with the convention 1/inf = 0.
    double reciprocal() const { return is_infinite() ? 0.0 : 1.0 / value_; }

    friend bool operator<(DimensionBound a, DimensionBound b) { return a.value_ < b.value_; }
    friend bool operator>(DimensionBound a, DimensionBound b) { return a.value_ > b.value_; }
    friend bool operator<=(DimensionBound a, DimensionBound b) { return a.value_ <= b.value_; }
    friend bool operator>=(DimensionBound a, DimensionBound b) { return a.value_ >= b.value_; }
    friend bool operator==(DimensionBound a, DimensionBound b) { return a.value_ == b.value_; }

    std::string str() const { return is_infinite() ? "inf" : std::to_string(value_); }

private:
    explicit DimensionBound(double v) : value_(v) {}
    double value_;
};

} // namespace gammatc

#endif
