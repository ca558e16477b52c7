#include "lpsvm/data.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <unordered_map>

#include "lpsvm/error.hpp"
#include "lpsvm/format.hpp"

namespace lpsvm {

SparseVector::SparseVector(std::vector<Entry> entries) {
    entries_.reserve(entries.size());
    for (std::size_t k = 0; k < entries.size(); ++k) {
        const Entry& e = entries[k];
        if (!std::isfinite(e.value)) throw InvalidArgument("non-finite feature value");
        if (k > 0 && e.index <= entries[k - 1].index)
            throw InvalidArgument("feature indices must be strictly increasing");
        if (e.value != 0.0) entries_.push_back(e);
    }
}

double SparseVector::squared_norm() const noexcept {
    double s = 0.0;
    for (const Entry& e : entries_) s += e.value * e.value;
    return s;
}

double dot(const SparseVector& a, const SparseVector& b) noexcept {
    auto ia = a.entries().begin(), ea = a.entries().end();
    auto ib = b.entries().begin(), eb = b.entries().end();
    double s = 0.0;
    while (ia != ea && ib != eb) {
        if (ia->index == ib->index) {
            s += ia->value * ib->value;
            ++ia;
            ++ib;
        } else if (ia->index < ib->index) {
            ++ia;
        } else {
            ++ib;
        }
    }
    return s;
}

double dot(std::span<const double> dense, const SparseVector& x) noexcept {
    double s = 0.0;
    for (const Entry& e : x.entries()) {
        if (e.index >= dense.size()) break;
        s += dense[e.index] * e.value;
    }
    return s;
}

void axpy(double s, const SparseVector& a, std::span<double> dense) noexcept {
    for (const Entry& e : a.entries()) {
        if (e.index >= dense.size()) break;
        dense[e.index] += s * e.value;
    }
}

Dataset::Dataset(std::vector<SparseVector> examples, std::vector<std::size_t> labels,
                 std::size_t num_classes, std::size_t dimension, std::vector<Label> label_map)
    : examples_(std::move(examples)),
      labels_(std::move(labels)),
      num_classes_(num_classes),
      dimension_(dimension),
      label_map_(std::move(label_map)) {
    if (examples_.empty()) throw InvalidArgument("dataset must contain at least one example");
    if (examples_.size() != labels_.size()) throw InvalidArgument("examples and labels differ in length");
    if (num_classes_ == 0) throw InvalidArgument("dataset needs at least one class");
    if (dimension_ == 0) throw InvalidArgument("dataset dimension must be positive");
    if (label_map_.size() != num_classes_) throw InvalidArgument("label map size must equal class count");
    for (std::size_t i = 0; i < examples_.size(); ++i) {
        if (labels_[i] >= num_classes_) throw InvalidArgument("label out of range");
        if (examples_[i].extent() > dimension_) throw InvalidArgument("feature index exceeds dimension");
    }
}

Dataset Dataset::subset(std::span<const std::size_t> indices) const {
    std::vector<SparseVector> xs;
    std::vector<std::size_t> ys;
    xs.reserve(indices.size());
    ys.reserve(indices.size());
    for (std::size_t i : indices) {
        xs.push_back(examples_.at(i));
        ys.push_back(labels_.at(i));
    }
    return Dataset(std::move(xs), std::move(ys), num_classes_, dimension_, label_map_);
}

bool Dataset::covers_all_classes() const {
    std::vector<bool> seen(num_classes_, false);
    for (std::size_t y : labels_) seen[y] = true;
    return std::all_of(seen.begin(), seen.end(), [](bool b) { return b; });
}

namespace {

Label parse_label(std::string_view token, std::size_t line) {
    if (auto v = parse_int(token)) return *v;
    if (auto d = parse_double(token); d && std::isfinite(*d) && std::trunc(*d) == *d &&
                                      std::abs(*d) < 9.0e15)
        return static_cast<Label>(*d);
    throw ParseError(line, "label is not an integer: '" + std::string(token) + "'");
}

}  // namespace

Dataset parse_libsvm(std::istream& in, const ParseOptions& options) {
    std::vector<SparseVector> xs;
    std::vector<std::size_t> ys;
    std::vector<Label> label_map = options.known_labels;
    std::unordered_map<Label, std::size_t> class_of;
    for (std::size_t k = 0; k < label_map.size(); ++k) {
        if (!class_of.emplace(label_map[k], k).second)
            throw InvalidArgument("duplicate label in known label map");
    }

    std::size_t max_extent = 0;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::size_t first = line.find_first_not_of(" \t");
        if (first == std::string::npos) continue;
        if (line[first] == '#') continue;

        std::istringstream tokens(line);
        std::string token;
        tokens >> token;
        const Label label = parse_label(token, lineno);

        std::vector<Entry> entries;
        while (tokens >> token) {
            const auto colon = token.find(':');
            if (colon == std::string::npos) throw ParseError(lineno, "expected <index>:<value>, got '" + token + "'");
            const std::string_view view(token);
            const auto idx = parse_int(view.substr(0, colon));
            const auto val = parse_double(view.substr(colon + 1));
            if (!idx || *idx < 1) throw ParseError(lineno, "feature index must be a positive integer");
            if (!val) throw ParseError(lineno, "malformed feature value '" + token + "'");
            if (!std::isfinite(*val)) throw ParseError(lineno, "non-finite feature value");
            const std::size_t index = static_cast<std::size_t>(*idx - 1);
            if (!entries.empty() && index <= entries.back().index)
                throw ParseError(lineno, "non-ascending feature indices");
            entries.push_back({index, *val});
        }
        SparseVector x(std::move(entries));
        max_extent = std::max(max_extent, x.extent());

        auto [it, inserted] = class_of.emplace(label, label_map.size());
        if (inserted) label_map.push_back(label);
        xs.push_back(std::move(x));
        ys.push_back(it->second);
    }
    if (xs.empty()) throw ParseError(0, "empty input");

    std::size_t dimension = std::max<std::size_t>(max_extent, 1);
    if (options.dimension) {
        if (*options.dimension < max_extent)
            throw ParseError(0, "feature index " + std::to_string(max_extent) + " exceeds dimension " +
                                    std::to_string(*options.dimension));
        dimension = std::max<std::size_t>(*options.dimension, 1);
    }
    if (options.bias) {
        for (auto& x : xs) {
            std::vector<Entry> entries(x.entries().begin(), x.entries().end());
            entries.push_back({dimension, 1.0});
            x = SparseVector(std::move(entries));
        }
        ++dimension;
    }
    const std::size_t c = label_map.size();
    return Dataset(std::move(xs), std::move(ys), c, dimension, std::move(label_map));
}

void write_libsvm(std::ostream& out, const Dataset& data) {
    for (std::size_t i = 0; i < data.size(); ++i) {
        out << data.label_map()[data.y(i)];
        for (const Entry& e : data.x(i).entries()) out << ' ' << (e.index + 1) << ':' << format_double(e.value);
        out << '\n';
    }
}

double kernel_diag_sum(const Dataset& data) noexcept {
    double s = 0.0;
    for (const auto& x : data.examples()) s += x.squared_norm();
    return s;
}

}  // namespace lpsvm
