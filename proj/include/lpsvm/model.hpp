#pragma once

#include <cstddef>
#include <iosfwd>
#include <vector>

#include "lpsvm/data.hpp"
#include "lpsvm/matrix.hpp"

namespace lpsvm {

// Linear multi-class hypothesis x -> (<w_1, x>, ..., <w_c, x>) with its training metadata.
struct Model {
    double p = 2.0;
    double C = 1.0;
    std::vector<double> beta;
    Matrix w;                     // num_classes x dimension
    std::vector<Label> label_map;  // class index -> original label
    // The last feature is a constant 1 appended at load time.
    bool bias = false;

    std::size_t num_classes() const noexcept { return w.rows(); }
    std::size_t dimension() const noexcept { return w.cols(); }

    // Checks c >= 2, finite weights, a bijective label map and matching sizes.
    void validate() const;

    friend bool operator==(const Model&, const Model&) = default;
};

// (sum_j ||w_j||_2^p)^(1/p)
double block_norm(const Matrix& w, double p);

std::vector<double> scores(const Model& model, const SparseVector& x);

// Class index of the largest score; ties go to the smallest index.
// Features at or beyond the model dimension are ignored and counted in `ignored_features`.
std::size_t predict_class(const Model& model, const SparseVector& x, std::size_t* ignored_features = nullptr);
Label predict(const Model& model, const SparseVector& x, std::size_t* ignored_features = nullptr);

struct Evaluation {
    double accuracy = 0.0;
    std::size_t correct = 0;
    std::size_t total = 0;
    // confusion(true class, predicted class) over the dataset's classes x model classes.
    std::vector<std::vector<std::size_t>> confusion;
    // Examples whose label has no class in the model; always counted as errors.
    std::size_t unknown_labels = 0;
    std::size_t ignored_features = 0;
};

// Compares by original label, so a dataset with its own label map can be scored.
Evaluation evaluate(const Model& model, const Dataset& data);

inline constexpr int model_format_major = 1;

void save_model(std::ostream& out, const Model& model);
Model load_model(std::istream& in);

}  // namespace lpsvm
