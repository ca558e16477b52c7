#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numeric>
#include <random>

#include "lpsvm/error.hpp"
#include "lpsvm/model.hpp"
#include "lpsvm/solver.hpp"
#include "oracles.hpp"
#include "random_instances.hpp"
#include "synthetic.hpp"

using namespace lpsvm;
using namespace lpsvm::testing;

namespace {

Dataset single_example() {
    return Dataset({SparseVector({{0, 1.0}})}, {0}, 2, 1, {1, 2});
}

double sum_of(std::span<const double> x) { return std::accumulate(x.begin(), x.end(), 0.0); }

// beta produced by the closed-form update for the weight matrix w (given through unit vectors).
std::vector<double> closed_form_beta(const Matrix& w, double p) {
    const Dataset data = unit_vector_dataset(w.cols(), w.rows());
    HyperParams hp;
    hp.p = p;
    DualState s = init_state(data, hp);
    s.beta.assign(w.rows(), 1.0);
    for (std::size_t k = 0; k < w.cols(); ++k)
        for (std::size_t j = 0; j < w.rows(); ++j) s.alpha(k, j) = w(j, k);
    resync_weights(s, data);
    update_class_weights(s, data, hp);
    return s.beta;
}

std::vector<double> squared_row_norms(const Matrix& w) {
    std::vector<double> out(w.rows(), 0.0);
    for (std::size_t j = 0; j < w.rows(); ++j)
        for (double x : w.row(j)) out[j] += x * x;
    return out;
}

Matrix random_matrix(std::size_t r, std::size_t c, std::mt19937_64& rng) {
    std::normal_distribution<double> normal;
    Matrix m(r, c);
    for (double& x : m.data()) x = normal(rng);
    return m;
}

double q_norm(std::span<const double> b, double q) {
    double s = 0.0;
    for (double x : b) s += std::pow(x, q);
    return std::pow(s, 1.0 / q);
}

}  // namespace

TEST_CASE("hyperparameter validation and derived exponents") {
    HyperParams hp;
    CHECK_NOTHROW(hp.validate());
    hp.p = 3.0;
    CHECK_THROWS_WITH_AS(hp.validate(), "p must lie in [1,2]", InvalidArgument);
    hp.p = 0.5;
    CHECK_THROWS_AS(hp.validate(), InvalidArgument);
    hp.p = 1.5;
    hp.C = 0.0;
    CHECK_THROWS_AS(hp.validate(), InvalidArgument);
    hp.C = 1.0;
    hp.outer_tol = 0.0;
    CHECK_THROWS_AS(hp.validate(), InvalidArgument);

    HyperParams q;
    q.p = 1.5;
    CHECK(q.p_bar() == doctest::Approx(3.0));
    CHECK(q.p_star() == doctest::Approx(3.0));
    q.p = 2.0;
    CHECK(std::isinf(q.p_bar()));
    q.p = 1.0;
    CHECK(std::isinf(q.p_star()));
    CHECK(q.p_bar() == 1.0);
}

TEST_CASE("init_state class weights") {
    const Dataset four = gaussian_blobs(8, 4, 3, 1);
    HyperParams hp;
    hp.p = 1.0;
    auto s = init_state(four, hp);
    for (double b : s.beta) CHECK(b == doctest::Approx(0.25).epsilon(1e-15));
    hp.p = 2.0;
    s = init_state(four, hp);
    for (double b : s.beta) CHECK(b == 1.0);
    hp.p = 4.0 / 3.0;
    s = init_state(gaussian_blobs(4, 2, 3, 1), hp);
    for (double b : s.beta) CHECK(b == doctest::Approx(std::sqrt(0.5)).epsilon(1e-14));
    CHECK(s.alpha == Matrix(4, 2));
    CHECK(s.w == Matrix(2, 3));
    CHECK(init_state(four, hp).self_k[0] == doctest::Approx(four.x(0).squared_norm()));
}

TEST_CASE("gradient_row") {
    const Dataset three = gaussian_blobs(6, 3, 2, 2);
    auto s = init_state(three, {});
    CHECK(gradient_row(s, three, 2) == std::vector<double>{0.0, 0.0, 1.0});

    // Saturated true class.
    const Dataset one({SparseVector({{1, 2.0}})}, {1}, 2, 2, {0, 1});
    auto t = init_state(one, {});
    t.w(1, 1) = 0.5;
    CHECK(gradient_row(t, one, 0)[1] == 0.0);
}

TEST_CASE("gradient matches central differences of the partial dual") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> bdist(0.1, 1.0);
    for (int rep = 0; rep < 10; ++rep) {
        const Dataset data = gaussian_blobs(12, 3, 4, 100 + rep, 1.0);
        auto s = init_state(data, {});
        s.alpha = random_feasible_alpha(data, 1.0, rng);
        for (double& b : s.beta) b = bdist(rng);
        resync_weights(s, data);
        const double h = 1e-5;
        double worst = 0.0;
        for (std::size_t i = 0; i < data.size(); ++i) {
            const auto g = gradient_row(s, data, i);
            for (std::size_t j = 0; j < 3; ++j) {
                Matrix plus = s.alpha, minus = s.alpha;
                plus(i, j) += h;
                minus(i, j) -= h;
                const double fd = (partial_dual_objective(plus, s.beta, data) -
                                   partial_dual_objective(minus, s.beta, data)) / (2 * h);
                worst = std::max(worst, std::abs(fd - g[j]));
            }
        }
        CHECK(worst <= 1e-6);
        CHECK(partial_dual_objective(s.alpha, s.beta, data) ==
              doctest::Approx(dense_partial_dual(s.alpha, s.beta, data)).epsilon(1e-12));
    }
}

TEST_CASE("solve_subproblem hand instances") {
    const std::vector<double> g{1, 0}, a{1, 1}, u{1, 0};
    const auto d = solve_subproblem(g, a, u);
    CHECK(d[0] == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(d[1] == doctest::Approx(-0.5).epsilon(1e-14));

    const std::vector<double> zeros{0, 0, 0}, a3{1, 2, 3}, u3{1, 0, 0};
    for (double x : solve_subproblem(zeros, a3, u3)) CHECK(x == 0.0);

    const std::vector<double> bad_a{1, 0}, bad_u{1, -1};
    CHECK_THROWS_AS(solve_subproblem(g, bad_a, u), InvalidArgument);
    CHECK_THROWS_AS(solve_subproblem(g, a, bad_u), InvalidArgument);
}

TEST_CASE("solve_subproblem matches exhaustive oracles") {
    std::mt19937_64 rng(2024);
    for (int rep = 0; rep < 300; ++rep) {
        const auto inst = random_subproblem(rng);
        const auto d = solve_subproblem(inst.g, inst.a, inst.u);
        REQUIRE(d.size() == inst.g.size());
        for (std::size_t j = 0; j < d.size(); ++j) CHECK(d[j] <= inst.u[j]);
        CHECK(std::abs(sum_of(d)) <= 1e-12);
        const double obj = subproblem_objective(inst.g, inst.a, d);
        CHECK(obj >= active_set_subproblem(inst.g, inst.a, inst.u) - 1e-10);
        if (rep < 40) CHECK(obj >= brute_force_subproblem(inst.g, inst.a, inst.u) - 2e-3);
    }
}

TEST_CASE("inner_solve on the single-example instance") {
    const Dataset data = single_example();
    HyperParams hp;
    hp.inner_tol = 1e-12;
    auto s = init_state(data, hp);
    const auto r = inner_solve(s, data, hp);
    CHECK(r.updates == 1);
    CHECK(s.alpha(0, 0) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(s.alpha(0, 1) == doctest::Approx(-0.5).epsilon(1e-14));

    // A second call starts at the optimum.
    const auto again = inner_solve(s, data, hp);
    CHECK(again.updates == 0);
    CHECK(again.kkt_violation <= hp.inner_tol);
}

TEST_CASE("inner_solve keeps feasibility and never decreases the partial dual") {
    for (std::uint64_t seed : {1, 2, 3}) {
        const Dataset data = gaussian_blobs(60, 4, 6, seed, 2.0);
        HyperParams hp;
        hp.C = 2.0;
        hp.p = 1.5;
        hp.inner_tol = 1e-6;
        auto s = init_state(data, hp);
        double last = partial_dual_objective(s.alpha, s.beta, data);
        bool feasible = true, monotone = true;
        for (int outer = 0; outer < 3; ++outer) {
            inner_solve(s, data, hp, [&](const DualState& st, std::size_t) {
                const double f = partial_dual_objective(st.alpha, st.beta, data);
                if (f < last - 1e-10 * std::abs(f)) monotone = false;
                last = f;
                if (!is_dual_feasible(st.alpha, data, hp.C, 1e-9)) feasible = false;
            });
            update_class_weights(s, data, hp);
            last = partial_dual_objective(s.alpha, s.beta, data);
        }
        CHECK(feasible);
        CHECK(monotone);
    }
}

TEST_CASE("zero self-kernel examples are skipped") {
    const Dataset data({SparseVector({{0, 1.0}}), SparseVector(), SparseVector({{0, -1.0}})}, {0, 1, 1}, 2, 1,
                       {1, 2});
    auto r = train(data, {});
    CHECK(r.report.skipped_examples == 1);
    CHECK(r.state.alpha(1, 0) == 0.0);
    CHECK(r.state.alpha(1, 1) == 0.0);
}

TEST_CASE("update_class_weights examples") {
    Matrix w(2, 3);
    w(0, 0) = 3.0;
    w(1, 2) = -3.0;
    auto b = closed_form_beta(w, 1.0);
    CHECK(b[0] == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(b[1] == doctest::Approx(0.5).epsilon(1e-14));

    std::mt19937_64 rng(9);
    b = closed_form_beta(random_matrix(4, 5, rng), 2.0);
    for (double x : b) CHECK(x == 1.0);

    // All-zero weights leave beta untouched.
    const Dataset data = gaussian_blobs(6, 3, 2, 4);
    HyperParams hp;
    hp.p = 1.5;
    auto s = init_state(data, hp);
    const auto before = s.beta;
    update_class_weights(s, data, hp);
    CHECK(s.beta == before);
}

TEST_CASE("update_class_weights matches a numeric minimiser and any sampled candidate") {
    std::mt19937_64 rng(31);
    for (int rep = 0; rep < 40; ++rep) {
        const Matrix w = random_matrix(3, 4, rng);
        const auto sq = squared_row_norms(w);
        const double p = 1.5, q = 3.0;
        const auto b = closed_form_beta(w, p);
        CHECK(q_norm(b, q) <= 1.0 + 1e-9);
        const double closed = beta_objective(sq, b);
        const double numeric = beta_objective(sq, numeric_beta_minimizer(sq, p));
        CHECK(std::abs(closed - numeric) <= 1e-8 * std::max(1.0, numeric));

        std::uniform_real_distribution<double> unit(1e-3, 1.0);
        for (int k = 0; k < 200; ++k) {
            std::vector<double> cand(3);
            for (double& x : cand) x = unit(rng);
            const double nrm = q_norm(cand, q);
            for (double& x : cand) x /= nrm;
            CHECK(closed <= beta_objective(sq, cand) + 1e-8);
        }
    }
}

TEST_CASE("flooring keeps the class weights on the unit ball") {
    for (double p : {1.0, 1.3, 1.7}) {
        Matrix w(3, 2);
        w(0, 0) = 1.0;
        w(1, 1) = 1e-14;
        const auto b = closed_form_beta(w, p);
        CHECK(b[2] == 1e-8);
        CHECK(b[1] >= 1e-8);
        CHECK(q_norm(b, p / (2.0 - p)) <= 1.0 + 1e-9);
    }
}

TEST_CASE("primal objective") {
    const Dataset data = single_example();
    HyperParams hp;
    CHECK(primal_objective(Matrix(2, 1), data, hp) == 1.0);
    const Dataset blobs = gaussian_blobs(10, 2, 3, 5);
    hp.C = 2.5;
    CHECK(primal_objective(Matrix(2, 3), blobs, hp) == 25.0);

    Matrix w(2, 1);
    w(0, 0) = 1.0;
    w(1, 0) = -1.0;
    hp.C = 1.0;
    CHECK(primal_objective(w, data, hp) == doctest::Approx(1.0).epsilon(1e-15));
    hp.p = 1.0;
    CHECK(primal_objective(w, data, hp) == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("complete dual objective") {
    const Dataset data = gaussian_blobs(20, 3, 4, 6);
    HyperParams hp;
    CHECK(complete_dual_objective(Matrix(20, 3), data, hp) == 0.0);

    std::mt19937_64 rng(3);
    const Matrix alpha = random_feasible_alpha(data, hp.C, rng);
    // At p = 2 the value is the Crammer-Singer dual.
    CHECK(complete_dual_objective(alpha, data, hp) ==
          doctest::Approx(dense_partial_dual(alpha, std::vector<double>(3, 1.0), data)).epsilon(1e-12));

    Matrix bad = alpha;
    bad(0, data.y(0)) += 2.0;
    CHECK_THROWS_AS(complete_dual_objective(bad, data, hp), InvalidArgument);

    // At p = 1: -1/2 max ||v_j||^2 + sum alpha_iy.
    hp.p = 1.0;
    const Matrix v = class_sums(alpha, data);
    double m = 0.0, lin = 0.0;
    for (std::size_t j = 0; j < 3; ++j) {
        double s = 0.0;
        for (double x : v.row(j)) s += x * x;
        m = std::max(m, s);
    }
    for (std::size_t i = 0; i < 20; ++i) lin += alpha(i, data.y(i));
    CHECK(complete_dual_objective(alpha, data, hp) == doctest::Approx(-0.5 * m + lin).epsilon(1e-12));
}

TEST_CASE("weak duality on random feasible points") {
    std::mt19937_64 rng(77);
    for (double p : {1.0, 1.25, 1.5, 2.0}) {
        const Dataset data = gaussian_blobs(25, 3, 4, 8, 1.5);
        HyperParams hp;
        hp.p = p;
        for (int k = 0; k < 20; ++k) {
            const Matrix alpha = random_feasible_alpha(data, hp.C, rng);
            const Matrix w = random_matrix(3, 4, rng);
            CHECK(complete_dual_objective(alpha, data, hp) <= primal_objective(w, data, hp) + 1e-12);
        }
    }
}

TEST_CASE("recover_weights") {
    const Dataset data = gaussian_blobs(15, 3, 3, 2);
    std::mt19937_64 rng(5);
    const Matrix alpha = random_feasible_alpha(data, 1.0, rng);
    CHECK(recover_weights(alpha, data, 2.0) == class_sums(alpha, data));
    CHECK(recover_weights(Matrix(15, 3), data, 1.5) == Matrix(3, 3));
    CHECK_THROWS_AS(recover_weights(alpha, data, 1.0), InvalidArgument);

    // The recovered weights satisfy <w, v> = ||v||_{2,p*}^2 and ||w||_{2,p} = ||v||_{2,p*}.
    const double p = 1.5, ps = 3.0;
    const Matrix w = recover_weights(alpha, data, p);
    const Matrix v = class_sums(alpha, data);
    double inner = 0.0, vnorm = 0.0;
    for (std::size_t j = 0; j < 3; ++j) {
        double s = 0.0;
        for (std::size_t k = 0; k < 3; ++k) inner += w(j, k) * v(j, k), s += v(j, k) * v(j, k);
        vnorm += std::pow(std::sqrt(s), ps);
    }
    vnorm = std::pow(vnorm, 1.0 / ps);
    CHECK(inner == doctest::Approx(vnorm * vnorm).epsilon(1e-12));
    CHECK(block_norm(w, p) == doctest::Approx(vnorm).epsilon(1e-12));
}

TEST_CASE("train on the single-example instance reaches the analytic optimum") {
    for (double p : {1.0, 1.5, 2.0}) {
        HyperParams hp;
        hp.p = p;
        hp.outer_tol = 1e-6;
        hp.inner_tol = 1e-12;
        const auto r = train(single_example(), hp);
        CHECK(r.report.converged);
        CHECK(r.report.iterations.size() <= 3);
        CHECK(r.report.gap <= 1e-6);
    }
    HyperParams hp;
    hp.outer_tol = 1e-9;
    hp.inner_tol = 1e-12;
    const auto r = train(single_example(), hp);
    CHECK(r.report.primal == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(r.report.dual == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("p = 2 training leaves beta at one and matches the reference solver") {
    const Dataset data = gaussian_blobs(80, 3, 5, 12, 1.5);
    HyperParams hp;
    hp.outer_tol = 1e-10;
    hp.inner_tol = 1e-10;
    hp.max_inner_epochs = 5000;
    const auto r = train(data, hp);
    for (double b : r.model.beta) CHECK(b == 1.0);
    const auto ref = crammer_singer_reference(data, hp.C);
    const double dref = crammer_singer_dual(ref, data);
    CHECK(std::abs(r.report.dual - dref) <= 1e-4 * std::abs(dref));
}

TEST_CASE("train on separable synthetic data") {
    const Dataset data = gaussian_blobs(200, 5, 20, 3);
    HyperParams hp;
    hp.p = 1.5;
    hp.C = 10.0;
    const auto r = train(data, hp);
    CHECK(r.report.converged);
    CHECK(r.report.gap <= 1e-3);
    CHECK(evaluate(r.model, data).accuracy >= 0.99);
    for (const auto& rec : r.report.iterations) CHECK(rec.dual <= rec.primal + 1e-9 * std::abs(rec.primal));
}

TEST_CASE("non-convergence is reported") {
    const Dataset data = gaussian_blobs(100, 4, 5, 3, 0.5);
    HyperParams hp;
    hp.p = 1.25;
    hp.C = 10.0;
    hp.outer_tol = 1e-12;
    hp.max_outer = 1;
    hp.max_inner_epochs = 2;
    const auto r = train(data, hp);
    CHECK_FALSE(r.report.converged);
    CHECK(r.report.iterations.size() == 1);
    CHECK(r.report.gap > hp.outer_tol);

    hp.p = 3.0;
    CHECK_THROWS_WITH_AS(train(data, hp), "p must lie in [1,2]", InvalidArgument);
}
