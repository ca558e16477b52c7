#include "lpsvm/losses.hpp"

#include <algorithm>

#include "lpsvm/error.hpp"

namespace lpsvm {

LossSpec LossSpec::hinge(double bound) {
    LossSpec l;
    l.kind = Kind::hinge;
    l.rho = 1.0;
    l.lipschitz = 1.0;
    l.zero_point = 1.0;
    l.bound = bound;
    return l;
}

LossSpec LossSpec::margin(double rho) {
    if (!(rho > 0.0)) throw InvalidArgument("margin loss requires rho > 0");
    LossSpec l;
    l.kind = Kind::margin;
    l.rho = rho;
    l.lipschitz = 1.0 / rho;
    l.zero_point = rho;
    l.bound = 1.0;
    return l;
}

double LossSpec::eval(double t) const noexcept {
    switch (kind) {
        case Kind::hinge:
            return std::max(1.0 - t, 0.0);
        case Kind::margin:
            if (t <= 0.0) return 1.0;
            if (t <= rho) return 1.0 - t / rho;
            return 0.0;
    }
    return 0.0;
}

ExtendedReal conjugate_hinge(double s) noexcept {
    if (s >= -1.0 && s <= 0.0) return s;
    return ExtendedReal::infinity();
}

double margin_of(std::span<const double> scores, std::size_t y) {
    if (scores.size() < 2) throw InvalidArgument("margin needs at least two classes");
    if (y >= scores.size()) throw InvalidArgument("class index out of range");
    double best_other = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < scores.size(); ++j)
        if (j != y) best_other = std::max(best_other, scores[j]);
    return scores[y] - best_other;
}

}  // namespace lpsvm
