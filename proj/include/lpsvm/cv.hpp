#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lpsvm/data.hpp"
#include "lpsvm/model.hpp"
#include "lpsvm/solver.hpp"

namespace lpsvm {

struct Fold {
    std::vector<std::size_t> train;
    std::vector<std::size_t> validation;
};

// Seeded shuffle into k disjoint validation folds covering [0, n); the first n % k folds hold one extra index.
std::vector<Fold> kfold_split(std::size_t n, std::size_t k, std::uint64_t seed);

// Second stage around the first-stage winner: p in [p* - fine_radius, p* + fine_radius] with step fine_step.
struct Refinement {
    double coarse_step = 0.5;  // builds the first-stage p grid over [1,2] when p_values is empty
    double fine_step = 0.1;
    double fine_radius = 0.5;
};

struct GridSpec {
    std::vector<double> C_values;
    std::vector<double> p_values;
    std::size_t folds = 5;
    std::uint64_t seed = 1;
    std::optional<Refinement> refinement;
};

// lo, lo + step, ..., up to hi inclusive (with 1e-9 slack), each rounded to 12 significant digits.
std::vector<double> grid_range(double lo, double hi, double step);

struct CellResult {
    double C = 0.0;
    double p = 0.0;
    int stage = 1;
    std::vector<double> fold_accuracies;
    double mean_accuracy = 0.0;
    double std_accuracy = 0.0;  // sample standard deviation over folds
    bool valid = true;
    std::string error;
};

struct GridSearchResult {
    double best_C = 0.0;
    double best_p = 0.0;
    std::vector<CellResult> table;
    std::vector<double> rejected_p;  // grid points outside [1,2]
};

using CellTrainer = std::function<Model(const Dataset& train, const HyperParams& hp)>;
// Receives the exact row indices a cell's training subset was built from.
using FoldObserver = std::function<void(double C, double p, std::size_t fold, std::span<const std::size_t> train_rows,
                                        std::span<const std::size_t> validation_rows)>;

struct GridSearchOptions {
    std::size_t threads = 1;
    CellTrainer trainer;     // defaults to train(...).model
    FoldObserver on_fold;    // must be thread-safe when threads > 1
};

// Mean and sample standard deviation, as used for CellResult.
std::pair<double, double> mean_and_std(std::span<const double> values);

// Best cell maximises mean validation accuracy; ties prefer smaller p, then smaller C.
// Throws Error when every cell fails.
GridSearchResult grid_search(const Dataset& data, const GridSpec& grid, const HyperParams& hp_template,
                             const GridSearchOptions& options = {});

}  // namespace lpsvm
