#pragma once

#include <cstddef>
#include <random>
#include <vector>

#include "lpsvm/data.hpp"
#include "lpsvm/matrix.hpp"

namespace lpsvm::testing {

struct SubproblemInstance {
    std::vector<double> g, a, u;
};

// c in [2, max_c]; a > 0; u >= 0 with some entries exactly zero, as in the solver.
inline SubproblemInstance random_subproblem(std::mt19937_64& rng, std::size_t max_c = 4) {
    std::uniform_int_distribution<std::size_t> c_dist(2, max_c);
    std::uniform_real_distribution<double> g_dist(-2.0, 2.0), a_dist(0.2, 3.0), u_dist(0.0, 1.5);
    std::bernoulli_distribution zero_cap(0.5);
    const std::size_t c = c_dist(rng);
    SubproblemInstance s{std::vector<double>(c), std::vector<double>(c), std::vector<double>(c)};
    for (std::size_t j = 0; j < c; ++j) {
        s.g[j] = g_dist(rng);
        s.a[j] = a_dist(rng);
        s.u[j] = zero_cap(rng) ? 0.0 : u_dist(rng);
    }
    if (s.u[0] == 0.0) s.u[0] = u_dist(rng) + 0.01;
    return s;
}

// Feasible for the hinge dual: alpha_ij <= C 1[j = y_i], sum_j alpha_ij = 0.
inline Matrix random_feasible_alpha(const Dataset& data, double C, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const std::size_t c = data.num_classes();
    Matrix alpha(data.size(), c);
    for (std::size_t i = 0; i < data.size(); ++i) {
        const std::size_t y = data.y(i);
        const double top = C * unit(rng);
        std::vector<double> share(c, 0.0);
        double total = 0.0;
        for (std::size_t j = 0; j < c; ++j)
            if (j != y) total += share[j] = unit(rng);
        alpha(i, y) = top;
        for (std::size_t j = 0; j < c; ++j)
            if (j != y) alpha(i, j) = -top * share[j] / total;
    }
    return alpha;
}

// A dataset of the d unit vectors, so that class_sums(alpha) is alpha transposed.
inline Dataset unit_vector_dataset(std::size_t d, std::size_t c) {
    std::vector<SparseVector> xs;
    std::vector<std::size_t> ys;
    for (std::size_t k = 0; k < d; ++k) {
        xs.emplace_back(std::vector<Entry>{{k, 1.0}});
        ys.push_back(k % c);
    }
    std::vector<Label> labels(c);
    for (std::size_t j = 0; j < c; ++j) labels[j] = static_cast<Label>(j);
    return Dataset(std::move(xs), std::move(ys), c, d, std::move(labels));
}

}  // namespace lpsvm::testing
