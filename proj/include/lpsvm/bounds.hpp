#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

#include "lpsvm/data.hpp"
#include "lpsvm/losses.hpp"
#include "lpsvm/matrix.hpp"
#include "lpsvm/model.hpp"

namespace lpsvm {

struct BoundInputs {
    double p = 2.0;
    std::size_t num_classes = 2;
    double norm_budget = 1.0;  // Lambda with ||w||_{2,p} <= Lambda
    double lipschitz = 1.0;
    double loss_bound = 1.0;   // B_l
    double delta = 0.05;
    std::size_t n = 1;
    double trace = 0.0;        // sum_i k(x_i, x_i)
    double empirical_risk = 0.0;

    void validate() const;
};

enum class BoundBranch { log, poly };
std::string_view to_string(BoundBranch b) noexcept;

struct BoundResult {
    double bound = 0.0;
    BoundBranch branch = BoundBranch::log;
    double factor = 0.0;
    double threshold = 0.0;
    double complexity_term = 0.0;
    double confidence_term = 0.0;
};

// 2 ln c / (2 ln c - 1): the log branch applies for p at or below this value.
double branch_threshold(std::size_t c);
// sqrt(e) (4 ln c)^(1 + 1/(2 ln c)), independent of p.
double log_branch_factor(std::size_t c);
// (2p/(p-1))^(2 - 1/p) c^((p-1)/p), defined for p > 1.
double poly_branch_factor(double p, std::size_t c);

BoundResult corollary_bound(const BoundInputs& in);

// (1/n) sum_i l(rho_h(x_i, y_i)). Labels are matched through their original values;
// a label the model does not know throws InvalidArgument.
double empirical_risk(const Model& model, const Dataset& data, const LossSpec& loss);

// Each member is a c x d weight matrix giving h_j(x) = <w_j, x>.
struct FiniteHypothesisSet {
    std::vector<Matrix> members;

    std::size_t num_classes() const;
    std::size_t dimension() const;
    void validate() const;
};

// Text form: a header line "hypotheses c=<c> d=<d> members=<m>" followed by m*c lines of d
// whitespace-separated reals (member-major, then class). '#' lines are skipped.
FiniteHypothesisSet read_hypothesis_set(std::istream& in);
void write_hypothesis_set(std::ostream& out, const FiniteHypothesisSet& H);

struct ComplexityEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    std::size_t draws = 0;
};

enum class ComplexityMode {
    scalar_on_labels,  // sup_h (1/n) sum_i s_i h_{y_i}(x_i)
    max_operator,      // sup_h (1/n) sum_i s_i max_j h_j(x_i)
    full_sum,          // sup_h (1/n) sum_i sum_j s_{jn+i} h_j(x_i), n*c noise variables
};
std::string_view to_string(ComplexityMode m) noexcept;
ComplexityMode parse_complexity_mode(std::string_view name);

inline constexpr std::size_t min_complexity_draws = 100;

// Monte-Carlo estimates; each draw d uses its own generator seeded from (seed, d), so the
// result does not depend on `threads`.
ComplexityEstimate estimate_gaussian_complexity(const FiniteHypothesisSet& H, const Dataset& S, std::size_t draws,
                                                std::uint64_t seed, ComplexityMode mode, std::size_t threads = 1);
ComplexityEstimate estimate_rademacher_complexity(const FiniteHypothesisSet& H, const Dataset& S, std::size_t draws,
                                                  std::uint64_t seed, ComplexityMode mode, std::size_t threads = 1);

// Per-class component sets: components[j] holds d-vectors u with h_j(x) = <u, x>.
using ComponentSet = std::vector<std::vector<double>>;

// Monte-Carlo estimate of sum_j R_S(H_j). All classes share each draw's sign vector, so the
// standard error is that of the per-draw sum.
ComplexityEstimate structural_baseline(std::span<const ComponentSet> components, const Dataset& S, std::size_t draws,
                                       std::uint64_t seed, std::size_t threads = 1);

}  // namespace lpsvm
