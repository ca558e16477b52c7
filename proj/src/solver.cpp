#include "lpsvm/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "lpsvm/error.hpp"

namespace lpsvm {

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();
constexpr std::size_t resync_every_epochs = 10;
constexpr double min_inner_tol = 1e-12;

std::vector<double> row_norms(const Matrix& m) {
    std::vector<double> out(m.rows());
    for (std::size_t j = 0; j < m.rows(); ++j) {
        double s = 0.0;
        for (double v : m.row(j)) s += v * v;
        out[j] = std::sqrt(s);
    }
    return out;
}

// (sum_j x_j^q)^(e) evaluated as m^(q e) (sum (x_j/m)^q)^e, returned as the pair (m, normalised sum).
struct ScaledPowerSum {
    double max = 0.0;
    double sum = 0.0;  // sum_j (x_j / max)^q
};

ScaledPowerSum scaled_power_sum(std::span<const double> x, double q) {
    ScaledPowerSum r;
    for (double v : x) r.max = std::max(r.max, v);
    if (r.max == 0.0) return r;
    for (double v : x) r.sum += std::pow(v / r.max, q);
    return r;
}

std::uint64_t below(std::mt19937_64& rng, std::uint64_t bound) { return rng() % bound; }

}  // namespace

void HyperParams::validate() const {
    if (!(p >= 1.0 && p <= 2.0)) throw InvalidArgument("p must lie in [1,2]");
    if (!(C > 0.0) || !std::isfinite(C)) throw InvalidArgument("C must be a positive finite number");
    if (!(outer_tol > 0.0)) throw InvalidArgument("outer_tol must be positive");
    if (!(inner_tol > 0.0)) throw InvalidArgument("inner_tol must be positive");
    if (!(subproblem_tol > 0.0)) throw InvalidArgument("subproblem_tol must be positive");
    if (!(beta_floor > 0.0 && beta_floor < 1.0)) throw InvalidArgument("beta_floor must lie in (0,1)");
    if (max_outer == 0) throw InvalidArgument("max_outer must be at least 1");
    if (max_inner_epochs == 0) throw InvalidArgument("max_inner_epochs must be at least 1");
}

double HyperParams::p_bar() const noexcept { return p >= 2.0 ? inf : p / (2.0 - p); }

double HyperParams::p_star() const noexcept { return p <= 1.0 ? inf : p / (p - 1.0); }

DualState init_state(const Dataset& data, const HyperParams& hp) {
    hp.validate();
    const std::size_t n = data.size(), c = data.num_classes(), d = data.dimension();
    DualState s;
    s.alpha = Matrix(n, c);
    s.beta.assign(c, std::pow(1.0 / static_cast<double>(c), 1.0 / hp.p_bar()));
    s.w = Matrix(c, d);
    s.self_k.resize(n);
    for (std::size_t i = 0; i < n; ++i) s.self_k[i] = data.x(i).squared_norm();
    s.rng.seed(hp.seed);
    return s;
}

Matrix class_sums(const Matrix& alpha, const Dataset& data) {
    Matrix v(data.num_classes(), data.dimension());
    for (std::size_t i = 0; i < data.size(); ++i)
        for (std::size_t j = 0; j < v.rows(); ++j)
            if (alpha(i, j) != 0.0) axpy(alpha(i, j), data.x(i), v.row(j));
    return v;
}

void resync_weights(DualState& state, const Dataset& data) {
    state.w = class_sums(state.alpha, data);
    for (std::size_t j = 0; j < state.w.rows(); ++j)
        for (double& x : state.w.row(j)) x *= state.beta[j];
}

std::vector<double> gradient_row(const DualState& state, const Dataset& data, std::size_t i) {
    const std::size_t c = state.w.rows();
    std::vector<double> g(c);
    const std::size_t yi = data.y(i);
    for (std::size_t j = 0; j < c; ++j) g[j] = (j == yi ? 1.0 : 0.0) - dot(state.w.row(j), data.x(i));
    return g;
}

double partial_dual_objective(const Matrix& alpha, std::span<const double> beta, const Dataset& data) {
    const Matrix v = class_sums(alpha, data);
    double quad = 0.0;
    for (std::size_t j = 0; j < v.rows(); ++j) {
        double s = 0.0;
        for (double x : v.row(j)) s += x * x;
        quad += beta[j] * s;
    }
    double lin = 0.0;
    for (std::size_t i = 0; i < data.size(); ++i) lin += alpha(i, data.y(i));
    return -0.5 * quad + lin;
}

namespace {

std::vector<double> deltas_at(double lambda, std::span<const double> g, std::span<const double> a,
                              std::span<const double> u) {
    std::vector<double> d(g.size());
    for (std::size_t j = 0; j < g.size(); ++j) d[j] = std::min(u[j], (g[j] - lambda) / a[j]);
    return d;
}

double sum_of(std::span<const double> x) { return std::accumulate(x.begin(), x.end(), 0.0); }

// Moves the rounding residual of sum(delta) onto the coordinate with the most room below its cap.
void absorb_residual(std::vector<double>& delta, std::span<const double> u) {
    const double r = sum_of(delta);
    if (r == 0.0) return;
    std::size_t best = 0;
    double room = -inf;
    for (std::size_t j = 0; j < delta.size(); ++j) {
        if (u[j] - delta[j] > room) {
            room = u[j] - delta[j];
            best = j;
        }
    }
    delta[best] -= r;
    delta[best] = std::min(delta[best], u[best]);
}

std::vector<double> bisect_subproblem(std::span<const double> g, std::span<const double> a,
                                      std::span<const double> u, double tol) {
    // sum_j delta_j(lambda) is nonincreasing; bracket its root.
    double lo = inf, hi = -inf;
    for (std::size_t j = 0; j < g.size(); ++j) {
        lo = std::min(lo, g[j] - a[j] * u[j]);
        hi = std::max(hi, g[j]);
    }
    lo -= 1.0;
    hi += 1.0;
    if (!(sum_of(deltas_at(lo, g, a, u)) >= 0.0) || !(sum_of(deltas_at(hi, g, a, u)) <= 0.0))
        throw InternalError("subproblem: no finite multiplier bracket");
    for (int it = 0; it < 2000; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double s = sum_of(deltas_at(mid, g, a, u));
        if (std::abs(s) <= tol || mid == lo || mid == hi) {
            lo = hi = mid;
            break;
        }
        (s > 0.0 ? lo : hi) = mid;
    }
    auto d = deltas_at(0.5 * (lo + hi), g, a, u);
    absorb_residual(d, u);
    return d;
}

}  // namespace

std::vector<double> solve_subproblem(std::span<const double> g, std::span<const double> a,
                                     std::span<const double> u, double tol) {
    const std::size_t c = g.size();
    if (a.size() != c || u.size() != c) throw InvalidArgument("subproblem: size mismatch");
    for (std::size_t j = 0; j < c; ++j) {
        if (!(a[j] > 0.0) || !std::isfinite(a[j])) throw InvalidArgument("subproblem: curvature must be positive");
        if (!(u[j] >= 0.0)) throw InvalidArgument("subproblem: upper bounds must be nonnegative");
        if (!std::isfinite(g[j])) throw InvalidArgument("subproblem: gradient must be finite");
    }
    if (sum_of(u) == 0.0) return std::vector<double>(c, 0.0);

    // Breakpoints b_j = g_j - a_j u_j: delta_j is capped at u_j while lambda <= b_j.
    std::vector<double> b(c);
    for (std::size_t j = 0; j < c; ++j) b[j] = g[j] - a[j] * u[j];
    std::vector<std::size_t> order(c);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t l, std::size_t r) { return b[l] < b[r]; });

    double free_g = 0.0, free_inv_a = 0.0, capped_u = sum_of(u);
    double lambda = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t k = 0; k < c; ++k) {
        const std::size_t j = order[k];
        free_g += g[j] / a[j];
        free_inv_a += 1.0 / a[j];
        capped_u -= u[j];
        const double candidate = (free_g + capped_u) / free_inv_a;
        if (k + 1 == c || candidate <= b[order[k + 1]]) {
            lambda = candidate;
            break;
        }
    }

    auto delta = deltas_at(lambda, g, a, u);
    absorb_residual(delta, u);
    if (!std::isfinite(lambda) || !(std::abs(sum_of(delta)) <= tol)) return bisect_subproblem(g, a, u, tol);
    return delta;
}

InnerResult inner_solve(DualState& state, const Dataset& data, const HyperParams& hp,
                        const UpdateObserver& on_update) {
    const std::size_t n = data.size(), c = data.num_classes();
    InnerResult result;
    std::vector<std::size_t> order(n);
    std::vector<double> a(c), u(c);

    for (std::size_t epoch = 1; epoch <= hp.max_inner_epochs; ++epoch) {
        std::iota(order.begin(), order.end(), 0);
        for (std::size_t k = n; k > 1; --k) std::swap(order[k - 1], order[below(state.rng, k)]);

        double max_violation = 0.0;
        for (std::size_t i : order) {
            if (state.self_k[i] == 0.0) continue;
            const std::size_t yi = data.y(i);
            const auto g = gradient_row(state, data, i);
            auto row = state.alpha.row(i);

            double max_free = -inf, min_all = inf;
            for (std::size_t j = 0; j < c; ++j) {
                u[j] = std::max(0.0, (j == yi ? hp.C : 0.0) - row[j]);
                a[j] = state.beta[j] * state.self_k[i];
                if (u[j] > 0.0) max_free = std::max(max_free, g[j]);
                min_all = std::min(min_all, g[j]);
            }
            const double violation = std::max(0.0, max_free - min_all);
            max_violation = std::max(max_violation, violation);
            if (violation <= hp.inner_tol) continue;

            const auto delta = solve_subproblem(g, a, u, hp.subproblem_tol);
            for (std::size_t j = 0; j < c; ++j) {
                if (delta[j] == 0.0) continue;
                row[j] += delta[j];
                axpy(state.beta[j] * delta[j], data.x(i), state.w.row(j));
            }
            // Caps are hard constraints; clip rounding excursions.
            for (std::size_t j = 0; j < c; ++j) row[j] = std::min(row[j], j == yi ? hp.C : 0.0);
            ++result.updates;
            if (on_update) on_update(state, i);
        }
        result.epochs = epoch;
        result.kkt_violation = max_violation;
        if (epoch % resync_every_epochs == 0) resync_weights(state, data);
        if (max_violation <= hp.inner_tol) break;
    }
    return result;
}

void update_class_weights(DualState& state, const Dataset& data, const HyperParams& hp) {
    const std::size_t c = state.beta.size();
    const Matrix v = class_sums(state.alpha, data);
    const auto v_norms = row_norms(v);
    std::vector<double> w_norms(c);
    for (std::size_t j = 0; j < c; ++j) w_norms[j] = state.beta[j] * v_norms[j];

    const auto scaled = scaled_power_sum(w_norms, hp.p);
    if (scaled.max > 0.0) {
        const double q = hp.p_bar();
        std::vector<double> beta(c, 1.0);
        if (std::isfinite(q)) {
            // beta_j = ||w_j||^(2-p) (sum ||w||^p)^((p-2)/p), evaluated scale-free.
            const double norm_factor = std::pow(scaled.sum, (hp.p - 2.0) / hp.p);
            for (std::size_t j = 0; j < c; ++j) beta[j] = std::pow(w_norms[j] / scaled.max, 2.0 - hp.p) * norm_factor;

            // Floor, then shrink the unfloored weights so that ||beta||_q stays at 1.
            std::size_t floored = 0;
            double rest = 0.0;
            for (double& bj : beta) {
                if (bj < hp.beta_floor) {
                    bj = hp.beta_floor;
                    ++floored;
                } else {
                    rest += std::pow(bj, q);
                }
            }
            const double budget = 1.0 - static_cast<double>(floored) * std::pow(hp.beta_floor, q);
            if (floored > 0 && rest > 0.0 && budget > 0.0) {
                const double shrink = std::pow(budget / rest, 1.0 / q);
                for (double& bj : beta)
                    if (bj > hp.beta_floor) bj = std::max(hp.beta_floor, bj * shrink);
            }
        }
        state.beta = std::move(beta);
    }

    state.w = v;
    for (std::size_t j = 0; j < c; ++j)
        for (double& x : state.w.row(j)) x *= state.beta[j];
}

double primal_objective(const Matrix& w, const Dataset& data, const HyperParams& hp) {
    const std::size_t c = w.rows();
    if (c < 2) throw InvalidArgument("primal objective needs at least two classes");
    const double norm = block_norm(w, hp.p);
    double loss = 0.0;
    std::vector<double> s(c);
    for (std::size_t i = 0; i < data.size(); ++i) {
        for (std::size_t j = 0; j < c; ++j) s[j] = dot(w.row(j), data.x(i));
        const std::size_t yi = data.y(i);
        double other = -inf;
        for (std::size_t j = 0; j < c; ++j)
            if (j != yi) other = std::max(other, s[j]);
        loss += std::max(0.0, 1.0 - (s[yi] - other));
    }
    return 0.5 * norm * norm + hp.C * loss;
}

double primal_objective(const DualState& state, const Dataset& data, const HyperParams& hp) {
    return primal_objective(state.w, data, hp);
}

bool is_dual_feasible(const Matrix& alpha, const Dataset& data, double C, double tol) {
    if (alpha.rows() != data.size() || alpha.cols() != data.num_classes()) return false;
    for (std::size_t i = 0; i < alpha.rows(); ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < alpha.cols(); ++j) {
            const double cap = j == data.y(i) ? C : 0.0;
            if (!(alpha(i, j) <= cap + tol)) return false;
            s += alpha(i, j);
        }
        if (std::abs(s) > tol * std::max(1.0, C)) return false;
    }
    return true;
}

double complete_dual_objective(const Matrix& alpha, const Dataset& data, const HyperParams& hp) {
    if (!is_dual_feasible(alpha, data, hp.C)) throw InvalidArgument("complete dual: alpha is infeasible");
    const auto norms = row_norms(class_sums(alpha, data));
    double lin = 0.0;
    for (std::size_t i = 0; i < data.size(); ++i) lin += alpha(i, data.y(i));

    double quad = 0.0;  // ||v||_{2,p*}^2
    if (hp.p <= 1.0) {
        const double m = *std::max_element(norms.begin(), norms.end());
        quad = m * m;
    } else if (hp.p >= 2.0) {
        for (double nj : norms) quad += nj * nj;
    } else {
        const double q = hp.p_star();
        const auto scaled = scaled_power_sum(norms, q);
        if (scaled.max > 0.0) quad = scaled.max * scaled.max * std::pow(scaled.sum, 2.0 / q);
    }
    return -0.5 * quad + lin;
}

double complete_dual_objective(const DualState& state, const Dataset& data, const HyperParams& hp) {
    return complete_dual_objective(state.alpha, data, hp);
}

Matrix recover_weights(const Matrix& alpha, const Dataset& data, double p) {
    if (!(p > 1.0 && p <= 2.0)) throw InvalidArgument("recover_weights requires 1 < p <= 2");
    Matrix v = class_sums(alpha, data);
    if (p == 2.0) return v;
    const double q = p / (p - 1.0);
    const auto norms = row_norms(v);
    const auto scaled = scaled_power_sum(norms, q);
    if (scaled.max == 0.0) return Matrix(v.rows(), v.cols());
    // w_j = S^(2/q - 1) r_j^(q - 2) v_j with r_j = ||v_j|| / max ||v||, S = sum r^q.
    const double common = std::pow(scaled.sum, 2.0 / q - 1.0);
    for (std::size_t j = 0; j < v.rows(); ++j) {
        const double scale = norms[j] == 0.0 ? 0.0 : common * std::pow(norms[j] / scaled.max, q - 2.0);
        for (double& x : v.row(j)) x *= scale;
    }
    return v;
}

TrainResult train(const Dataset& data, const HyperParams& hp) {
    hp.validate();
    if (data.num_classes() < 2) throw InvalidArgument("training needs at least two classes");

    TrainResult result{Model{}, TrainReport{}, init_state(data, hp)};
    DualState& state = result.state;
    TrainReport& report = result.report;
    report.skipped_examples = static_cast<std::size_t>(std::count(state.self_k.begin(), state.self_k.end(), 0.0));

    // A loose inner tolerance can park the alternation at a point whose gap never reaches
    // outer_tol; the working tolerance shrinks whenever an outer step fails to halve the gap.
    HyperParams working = hp;
    double previous_gap = std::numeric_limits<double>::infinity();
    for (std::size_t outer = 1; outer <= hp.max_outer; ++outer) {
        const InnerResult inner = inner_solve(state, data, working);
        update_class_weights(state, data, hp);

        OuterRecord rec;
        rec.iteration = outer;
        rec.inner_epochs = inner.epochs;
        rec.kkt_violation = inner.kkt_violation;
        rec.inner_tol = working.inner_tol;
        rec.primal = primal_objective(state, data, hp);
        rec.dual = complete_dual_objective(state, data, hp);
        rec.gap = (rec.primal - rec.dual) / std::max(1.0, std::abs(rec.primal));
        report.iterations.push_back(rec);
        report.primal = rec.primal;
        report.dual = rec.dual;
        report.gap = rec.gap;
        if (rec.gap <= hp.outer_tol) {
            report.converged = true;
            break;
        }
        if (rec.gap > 0.5 * previous_gap) working.inner_tol = std::max(min_inner_tol, 0.1 * working.inner_tol);
        previous_gap = rec.gap;
    }

    Model& m = result.model;
    m.p = hp.p;
    m.C = hp.C;
    m.beta = state.beta;
    m.w = state.w;
    m.label_map.assign(data.label_map().begin(), data.label_map().end());
    return result;
}

}  // namespace lpsvm
