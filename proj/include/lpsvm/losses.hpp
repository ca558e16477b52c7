#pragma once

#include <limits>
#include <span>
#include <cstddef>

namespace lpsvm {

// Value on the extended real line (-inf excluded): finite or +infinity.
class ExtendedReal {
public:
    constexpr ExtendedReal(double value) : value_(value), infinite_(false) {}  // NOLINT
    static constexpr ExtendedReal infinity() { return ExtendedReal(); }

    constexpr bool is_finite() const noexcept { return !infinite_; }
    constexpr bool is_infinite() const noexcept { return infinite_; }
    // Only meaningful when finite.
    constexpr double value() const noexcept { return value_; }

private:
    constexpr ExtendedReal() : value_(0.0), infinite_(true) {}
    double value_;
    bool infinite_;
};

// An L-regular loss: bounds the 0-1 loss, L-Lipschitz, nonincreasing, zero at `zero_point`.
struct LossSpec {
    enum class Kind { hinge, margin };

    Kind kind = Kind::hinge;
    double rho = 1.0;  // margin width, margin loss only
    double lipschitz = 1.0;
    double zero_point = 1.0;
    // sup over the hypothesis class of the loss; +inf for the hinge unless supplied.
    double bound = std::numeric_limits<double>::infinity();

    static LossSpec hinge(double bound = std::numeric_limits<double>::infinity());
    static LossSpec margin(double rho);

    double operator()(double t) const noexcept { return eval(t); }
    double eval(double t) const noexcept;
};

// Conjugate of t -> (1 - t)_+ : s on [-1, 0], +inf elsewhere.
ExtendedReal conjugate_hinge(double s) noexcept;

// h[y] - max_{j != y} h[j]. Throws InvalidArgument when fewer than two scores or y is out of range.
double margin_of(std::span<const double> scores, std::size_t y);

}  // namespace lpsvm
