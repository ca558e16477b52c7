#include "lpsvm/cv.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <numeric>
#include <random>
#include <thread>

#include "lpsvm/error.hpp"

namespace lpsvm {

std::vector<Fold> kfold_split(std::size_t n, std::size_t k, std::uint64_t seed) {
    if (k < 2) throw InvalidArgument("at least two folds are required");
    if (k > n) throw InvalidArgument("more folds than examples");
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::mt19937_64 rng(seed);
    for (std::size_t i = n; i > 1; --i) std::swap(perm[i - 1], perm[rng() % i]);

    std::vector<Fold> folds(k);
    std::size_t start = 0;
    for (std::size_t f = 0; f < k; ++f) {
        const std::size_t size = n / k + (f < n % k ? 1 : 0);
        folds[f].validation.assign(perm.begin() + static_cast<std::ptrdiff_t>(start),
                                   perm.begin() + static_cast<std::ptrdiff_t>(start + size));
        std::sort(folds[f].validation.begin(), folds[f].validation.end());
        start += size;
    }
    for (std::size_t f = 0; f < k; ++f) {
        for (std::size_t g = 0; g < k; ++g)
            if (g != f) folds[f].train.insert(folds[f].train.end(), folds[g].validation.begin(), folds[g].validation.end());
        std::sort(folds[f].train.begin(), folds[f].train.end());
    }
    return folds;
}

namespace {

double tidy(double v) {
    if (v == 0.0) return 0.0;
    const double scale = std::pow(10.0, 11 - static_cast<int>(std::floor(std::log10(std::abs(v)))));
    return std::round(v * scale) / scale;
}

}  // namespace

std::vector<double> grid_range(double lo, double hi, double step) {
    if (!(step > 0.0)) throw InvalidArgument("grid step must be positive");
    if (!(hi >= lo)) throw InvalidArgument("grid range is empty");
    std::vector<double> out;
    for (std::size_t k = 0;; ++k) {
        const double v = lo + static_cast<double>(k) * step;
        if (v > hi + 1e-9) break;
        out.push_back(tidy(v));
    }
    return out;
}

std::pair<double, double> mean_and_std(std::span<const double> values) {
    if (values.empty()) return {0.0, 0.0};
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(values.size());
    if (values.size() < 2) return {mean, 0.0};
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    return {mean, std::sqrt(ss / static_cast<double>(values.size() - 1))};
}

namespace {

struct Task {
    std::size_t cell;
    std::size_t fold;
};

struct TaskOutcome {
    double accuracy = 0.0;
    bool ok = false;
    std::string error;
};

bool better(const CellResult& a, const CellResult& b) {
    if (a.mean_accuracy != b.mean_accuracy) return a.mean_accuracy > b.mean_accuracy;
    if (a.p != b.p) return a.p < b.p;
    return a.C < b.C;
}

void run_cells(const Dataset& data, const std::vector<Fold>& folds, std::vector<CellResult>& cells,
               std::size_t first_cell, const HyperParams& hp_template, const GridSearchOptions& options) {
    std::vector<Task> tasks;
    for (std::size_t c = first_cell; c < cells.size(); ++c)
        for (std::size_t f = 0; f < folds.size(); ++f) tasks.push_back({c, f});
    std::vector<TaskOutcome> outcomes(tasks.size());

    const CellTrainer trainer = options.trainer ? options.trainer
                                                : CellTrainer([](const Dataset& d, const HyperParams& hp) {
                                                      return train(d, hp).model;
                                                  });
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t t = next++; t < tasks.size(); t = next++) {
            const CellResult& cell = cells[tasks[t].cell];
            const Fold& fold = folds[tasks[t].fold];
            TaskOutcome& out = outcomes[t];
            try {
                HyperParams hp = hp_template;
                hp.C = cell.C;
                hp.p = cell.p;
                if (options.on_fold) options.on_fold(cell.C, cell.p, tasks[t].fold, fold.train, fold.validation);
                const Model model = trainer(data.subset(fold.train), hp);
                out.accuracy = evaluate(model, data.subset(fold.validation)).accuracy;
                out.ok = true;
            } catch (const std::exception& e) {
                out.error = e.what();
            }
        }
    };
    const std::size_t threads = std::clamp<std::size_t>(options.threads, 1, std::max<std::size_t>(tasks.size(), 1));
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    for (std::size_t t = 0; t < tasks.size(); ++t) {
        CellResult& cell = cells[tasks[t].cell];
        const TaskOutcome& out = outcomes[t];
        if (!out.ok) {
            if (cell.valid) cell.error = "fold " + std::to_string(tasks[t].fold) + ": " + out.error;
            cell.valid = false;
        }
        cell.fold_accuracies.push_back(out.accuracy);
    }
    for (std::size_t c = first_cell; c < cells.size(); ++c) {
        auto [mean, sd] = mean_and_std(cells[c].fold_accuracies);
        cells[c].mean_accuracy = mean;
        cells[c].std_accuracy = sd;
    }
}

const CellResult* best_cell(const std::vector<CellResult>& cells) {
    const CellResult* best = nullptr;
    for (const auto& c : cells)
        if (c.valid && (!best || better(c, *best))) best = &c;
    return best;
}

bool contains(const std::vector<double>& xs, double v) {
    return std::any_of(xs.begin(), xs.end(), [v](double x) { return std::abs(x - v) <= 1e-9; });
}

}  // namespace

GridSearchResult grid_search(const Dataset& data, const GridSpec& grid, const HyperParams& hp_template,
                             const GridSearchOptions& options) {
    if (grid.C_values.empty()) throw InvalidArgument("grid needs at least one C value");
    for (double C : grid.C_values)
        if (!(C > 0.0) || !std::isfinite(C)) throw InvalidArgument("grid C values must be positive");
    std::vector<double> p_candidates = grid.p_values;
    if (p_candidates.empty() && grid.refinement) p_candidates = grid_range(1.0, 2.0, grid.refinement->coarse_step);
    if (p_candidates.empty()) throw InvalidArgument("grid needs at least one p value");

    GridSearchResult result;
    std::vector<double> p_values;
    for (double p : p_candidates) {
        if (p >= 1.0 && p <= 2.0) {
            if (!contains(p_values, p)) p_values.push_back(p);
        } else {
            result.rejected_p.push_back(p);
        }
    }
    if (p_values.empty()) throw InvalidArgument("no grid p value lies in [1,2]");
    const auto folds = kfold_split(data.size(), grid.folds, grid.seed);

    std::vector<CellResult>& cells = result.table;
    for (double p : p_values)
        for (double C : grid.C_values) {
            CellResult cell;
            cell.C = C;
            cell.p = p;
            cells.push_back(cell);
        }
    run_cells(data, folds, cells, 0, hp_template, options);

    if (grid.refinement) {
        const CellResult* stage1 = best_cell(cells);
        if (stage1) {
            const Refinement& ref = *grid.refinement;
            const double centre = stage1->p;
            std::vector<double> fine;
            if (!(ref.fine_step > 0.0) || !(ref.fine_radius >= 0.0)) throw InvalidArgument("bad refinement steps");
            const auto reach = static_cast<long>(std::floor(ref.fine_radius / ref.fine_step + 1e-9));
            for (long k = -reach; k <= reach; ++k) {
                const double p = tidy(centre + static_cast<double>(k) * ref.fine_step);
                if (p >= 1.0 && p <= 2.0 && !contains(p_values, p) && !contains(fine, p)) fine.push_back(p);
            }
            const std::size_t first = cells.size();
            for (double p : fine)
                for (double C : grid.C_values) {
                    CellResult cell;
                    cell.C = C;
                    cell.p = p;
                    cell.stage = 2;
                    cells.push_back(cell);
                }
            run_cells(data, folds, cells, first, hp_template, options);
        }
    }

    const CellResult* best = best_cell(cells);
    if (!best) throw Error("every grid cell failed to train");
    result.best_C = best->C;
    result.best_p = best->p;
    return result;
}

}  // namespace lpsvm
