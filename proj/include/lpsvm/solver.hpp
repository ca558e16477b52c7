#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "lpsvm/data.hpp"
#include "lpsvm/matrix.hpp"
#include "lpsvm/model.hpp"

namespace lpsvm {

struct HyperParams {
    double p = 2.0;             // block-norm exponent, 1 <= p <= 2
    double C = 1.0;
    double outer_tol = 1e-3;    // relative duality gap target
    double inner_tol = 1e-3;    // max per-example KKT violation of an inner pass
    std::size_t max_outer = 50;
    std::size_t max_inner_epochs = 200;
    double beta_floor = 1e-8;
    double subproblem_tol = 1e-12;
    std::uint64_t seed = 1;

    // Throws InvalidArgument ("p must lie in [1,2]", ...).
    void validate() const;

    // p / (2 - p); +inf at p = 2.
    double p_bar() const noexcept;
    // p / (p - 1); +inf at p = 1.
    double p_star() const noexcept;
};

// Iterates of the alternating scheme. alpha is n x c, w is c x d with w_j = beta_j * sum_i alpha_ij x_i.
struct DualState {
    Matrix alpha;
    std::vector<double> beta;
    Matrix w;
    std::vector<double> self_k;
    std::mt19937_64 rng;
};

DualState init_state(const Dataset& data, const HyperParams& hp);

// v_j = sum_i alpha_ij x_i, a c x d matrix.
Matrix class_sums(const Matrix& alpha, const Dataset& data);
// Recomputes w = beta o class_sums(alpha) from scratch.
void resync_weights(DualState& state, const Dataset& data);

// d f / d alpha_ij = 1[y_i = j] - <w_j, x_i> of the partial dual.
std::vector<double> gradient_row(const DualState& state, const Dataset& data, std::size_t i);

// Partial dual at fixed beta: -1/2 sum_j beta_j ||v_j||^2 + sum_i alpha_{i y_i}.
double partial_dual_objective(const Matrix& alpha, std::span<const double> beta, const Dataset& data);

// Exact maximiser of -1/2 sum a_j d_j^2 + sum g_j d_j  s.t. d <= u, sum d = 0.
// Requires a > 0 and u >= 0; throws InvalidArgument otherwise.
std::vector<double> solve_subproblem(std::span<const double> g, std::span<const double> a,
                                     std::span<const double> u, double tol = 1e-12);

struct InnerResult {
    double kkt_violation = 0.0;
    std::size_t epochs = 0;
    std::size_t updates = 0;
};

using UpdateObserver = std::function<void(const DualState&, std::size_t example)>;

// Dual coordinate ascent on the partial dual with beta held fixed.
InnerResult inner_solve(DualState& state, const Dataset& data, const HyperParams& hp,
                        const UpdateObserver& on_update = {});

// Closed-form class-weight step followed by flooring and a w resync.
void update_class_weights(DualState& state, const Dataset& data, const HyperParams& hp);

// 1/2 ||w||_{2,p}^2 + C sum_i (1 - t_i)_+ with t_i the multi-class margin.
double primal_objective(const Matrix& w, const Dataset& data, const HyperParams& hp);
double primal_objective(const DualState& state, const Dataset& data, const HyperParams& hp);

// Complete hinge dual; at p = 1 the (max_j ||v_j||)^2 limit is used. Throws on infeasible alpha.
double complete_dual_objective(const Matrix& alpha, const Dataset& data, const HyperParams& hp);
double complete_dual_objective(const DualState& state, const Dataset& data, const HyperParams& hp);

// Checks alpha_ij <= C 1[j = y_i] and |sum_j alpha_ij| <= tol for every row.
bool is_dual_feasible(const Matrix& alpha, const Dataset& data, double C, double tol = 1e-9);

// Primal weights minimising the Lagrangian for the given alpha. Requires p > 1.
Matrix recover_weights(const Matrix& alpha, const Dataset& data, double p);

struct OuterRecord {
    std::size_t iteration = 0;
    std::size_t inner_epochs = 0;
    double kkt_violation = 0.0;
    double inner_tol = 0.0;  // working inner tolerance of this iteration
    double primal = 0.0;
    double dual = 0.0;
    double gap = 0.0;  // (primal - dual) / max(1, |primal|)
};

struct TrainReport {
    std::vector<OuterRecord> iterations;
    bool converged = false;
    double primal = 0.0;
    double dual = 0.0;
    double gap = 0.0;
    std::size_t skipped_examples = 0;  // zero self-kernel rows
};

struct TrainResult {
    Model model;
    TrainReport report;
    DualState state;
};

TrainResult train(const Dataset& data, const HyperParams& hp);

}  // namespace lpsvm
