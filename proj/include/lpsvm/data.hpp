#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace lpsvm {

using Label = std::int64_t;

struct Entry {
    std::size_t index;
    double value;

    friend bool operator==(const Entry&, const Entry&) = default;
};

// Sparse row with strictly increasing indices, no stored zeros and finite values.
class SparseVector {
public:
    SparseVector() = default;
    // Validates the invariants; throws InvalidArgument on violation. Zero values are dropped.
    explicit SparseVector(std::vector<Entry> entries);

    std::span<const Entry> entries() const noexcept { return entries_; }
    std::size_t nnz() const noexcept { return entries_.size(); }
    bool empty() const noexcept { return entries_.empty(); }
    // One past the largest stored index, 0 for an empty row.
    std::size_t extent() const noexcept { return entries_.empty() ? 0 : entries_.back().index + 1; }
    double squared_norm() const noexcept;

    friend bool operator==(const SparseVector&, const SparseVector&) = default;

private:
    std::vector<Entry> entries_;
};

double dot(const SparseVector& a, const SparseVector& b) noexcept;
// Dense/sparse inner product; entries at or beyond dense.size() are ignored.
double dot(std::span<const double> dense, const SparseVector& x) noexcept;
// dense += s * a. Entries at or beyond dense.size() are ignored.
void axpy(double s, const SparseVector& a, std::span<double> dense) noexcept;

class Dataset {
public:
    Dataset(std::vector<SparseVector> examples, std::vector<std::size_t> labels,
            std::size_t num_classes, std::size_t dimension, std::vector<Label> label_map);

    std::size_t size() const noexcept { return examples_.size(); }
    std::size_t num_classes() const noexcept { return num_classes_; }
    std::size_t dimension() const noexcept { return dimension_; }
    const SparseVector& x(std::size_t i) const { return examples_[i]; }
    std::size_t y(std::size_t i) const { return labels_[i]; }
    std::span<const SparseVector> examples() const noexcept { return examples_; }
    std::span<const std::size_t> labels() const noexcept { return labels_; }
    // class index -> original label
    std::span<const Label> label_map() const noexcept { return label_map_; }

    // Rows picked by indices; class count, dimension and label map are kept.
    Dataset subset(std::span<const std::size_t> indices) const;
    // Every class index occurs at least once.
    bool covers_all_classes() const;

    friend bool operator==(const Dataset&, const Dataset&) = default;

private:
    std::vector<SparseVector> examples_;
    std::vector<std::size_t> labels_;
    std::size_t num_classes_;
    std::size_t dimension_;
    std::vector<Label> label_map_;
};

struct ParseOptions {
    // Feature dimension override; must cover every index in the file.
    std::optional<std::size_t> dimension;
    // Append a constant-1 feature at index `dimension` (after inference/override).
    bool bias = false;
    // Pre-existing label map (class index -> label). Labels not in it get new indices.
    std::vector<Label> known_labels;
};

// Reads LIBSVM sparse text (1-based ascending indices). Lines starting with '#' are skipped.
Dataset parse_libsvm(std::istream& in, const ParseOptions& options = {});
// Writes LIBSVM text using original labels and 1-based indices.
void write_libsvm(std::ostream& out, const Dataset& data);

// Sum of k(x_i, x_i) for the linear kernel.
double kernel_diag_sum(const Dataset& data) noexcept;

}  // namespace lpsvm
