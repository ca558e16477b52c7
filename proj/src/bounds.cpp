#include "lpsvm/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <limits>
#include <numbers>
#include <random>
#include <string>
#include <thread>
#include <unordered_map>

#include "lpsvm/error.hpp"
#include "lpsvm/format.hpp"

namespace lpsvm {

void BoundInputs::validate() const {
    if (!(p >= 1.0 && p <= 2.0)) throw InvalidArgument("p must lie in [1,2]");
    if (num_classes < 2) throw InvalidArgument("bound needs at least two classes");
    if (!(delta > 0.0 && delta < 1.0)) throw InvalidArgument("delta must lie in (0,1)");
    if (n == 0) throw InvalidArgument("sample size must be positive");
    if (!(norm_budget >= 0.0) || !std::isfinite(norm_budget)) throw InvalidArgument("norm budget must be finite and >= 0");
    if (!(lipschitz > 0.0) || !std::isfinite(lipschitz)) throw InvalidArgument("Lipschitz constant must be positive");
    if (!(loss_bound > 0.0) || !std::isfinite(loss_bound)) throw InvalidArgument("loss bound must be positive and finite");
    if (!(trace >= 0.0) || !std::isfinite(trace)) throw InvalidArgument("kernel trace must be finite and >= 0");
    if (!(empirical_risk >= 0.0) || !std::isfinite(empirical_risk)) throw InvalidArgument("empirical risk must be >= 0");
}

std::string_view to_string(BoundBranch b) noexcept { return b == BoundBranch::log ? "log" : "poly"; }

double branch_threshold(std::size_t c) {
    if (c < 2) throw InvalidArgument("bound needs at least two classes");
    const double two_log_c = 2.0 * std::log(static_cast<double>(c));
    return two_log_c / (two_log_c - 1.0);
}

double log_branch_factor(std::size_t c) {
    if (c < 2) throw InvalidArgument("bound needs at least two classes");
    const double log_c = std::log(static_cast<double>(c));
    return std::sqrt(std::numbers::e) * std::pow(4.0 * log_c, 1.0 + 1.0 / (2.0 * log_c));
}

double poly_branch_factor(double p, std::size_t c) {
    if (c < 2) throw InvalidArgument("bound needs at least two classes");
    if (!(p > 1.0 && p <= 2.0)) throw InvalidArgument("polynomial branch needs 1 < p <= 2");
    return std::pow(2.0 * p / (p - 1.0), 2.0 - 1.0 / p) * std::pow(static_cast<double>(c), (p - 1.0) / p);
}

BoundResult corollary_bound(const BoundInputs& in) {
    in.validate();
    BoundResult r;
    r.threshold = branch_threshold(in.num_classes);
    if (in.p <= r.threshold) {
        r.branch = BoundBranch::log;
        r.factor = log_branch_factor(in.num_classes);
    } else {
        r.branch = BoundBranch::poly;
        r.factor = poly_branch_factor(in.p, in.num_classes);
    }
    const double n = static_cast<double>(in.n);
    r.complexity_term = 2.0 * in.lipschitz * in.norm_budget / n * std::sqrt(in.trace) * r.factor;
    r.confidence_term = 3.0 * in.loss_bound * std::sqrt(std::log(2.0 / in.delta) / (2.0 * n));
    r.bound = in.empirical_risk + r.confidence_term + r.complexity_term;
    return r;
}

double empirical_risk(const Model& model, const Dataset& data, const LossSpec& loss) {
    std::unordered_map<Label, std::size_t> model_class;
    for (std::size_t j = 0; j < model.label_map.size(); ++j) model_class.emplace(model.label_map[j], j);
    double total = 0.0;
    for (std::size_t i = 0; i < data.size(); ++i) {
        auto it = model_class.find(data.label_map()[data.y(i)]);
        if (it == model_class.end()) throw InvalidArgument("dataset label unknown to the model");
        const auto s = scores(model, data.x(i));
        total += loss(margin_of(s, it->second));
    }
    return total / static_cast<double>(data.size());
}

std::size_t FiniteHypothesisSet::num_classes() const { return members.empty() ? 0 : members.front().rows(); }
std::size_t FiniteHypothesisSet::dimension() const { return members.empty() ? 0 : members.front().cols(); }

void FiniteHypothesisSet::validate() const {
    if (members.empty()) throw InvalidArgument("hypothesis set is empty");
    for (const auto& m : members)
        if (m.rows() != num_classes() || m.cols() != dimension())
            throw InvalidArgument("hypothesis members must share dimensions");
    if (num_classes() == 0) throw InvalidArgument("hypotheses need at least one class");
}

FiniteHypothesisSet read_hypothesis_set(std::istream& in) {
    std::string line;
    std::size_t lineno = 0;
    auto next_line = [&]() -> bool {
        while (std::getline(in, line)) {
            ++lineno;
            const auto first = line.find_first_not_of(" \t\r");
            if (first != std::string::npos && line[first] != '#') return true;
        }
        return false;
    };
    if (!next_line()) throw ParseError(0, "empty hypothesis file");

    std::istringstream header(line);
    std::string tag;
    header >> tag;
    if (tag != "hypotheses") throw ParseError(lineno, "expected 'hypotheses' header");
    std::size_t c = 0, d = 0, m = 0;
    std::string field;
    while (header >> field) {
        const auto eq = field.find('=');
        const auto v = eq == std::string::npos ? std::nullopt : parse_int(std::string_view(field).substr(eq + 1));
        if (!v || *v <= 0) throw ParseError(lineno, "bad header field '" + field + "'");
        const std::string key = field.substr(0, eq);
        if (key == "c") c = static_cast<std::size_t>(*v);
        else if (key == "d") d = static_cast<std::size_t>(*v);
        else if (key == "members") m = static_cast<std::size_t>(*v);
        else throw ParseError(lineno, "unknown header field '" + key + "'");
    }
    if (!c || !d || !m) throw ParseError(lineno, "header needs c, d and members");

    FiniteHypothesisSet H;
    for (std::size_t k = 0; k < m; ++k) {
        Matrix w(c, d);
        for (std::size_t j = 0; j < c; ++j) {
            if (!next_line()) throw ParseError(lineno, "hypothesis file truncated");
            std::istringstream row(line);
            std::string tok;
            std::size_t col = 0;
            while (row >> tok) {
                const auto v = parse_double(tok);
                if (!v || !std::isfinite(*v)) throw ParseError(lineno, "bad weight '" + tok + "'");
                if (col >= d) throw ParseError(lineno, "too many weights on row");
                w(j, col++) = *v;
            }
            if (col != d) throw ParseError(lineno, "expected " + std::to_string(d) + " weights");
        }
        H.members.push_back(std::move(w));
    }
    return H;
}

void write_hypothesis_set(std::ostream& out, const FiniteHypothesisSet& H) {
    H.validate();
    out << "hypotheses c=" << H.num_classes() << " d=" << H.dimension() << " members=" << H.members.size() << '\n';
    for (const auto& w : H.members)
        for (std::size_t j = 0; j < w.rows(); ++j) {
            for (std::size_t k = 0; k < w.cols(); ++k) out << (k ? " " : "") << format_double(w(j, k));
            out << '\n';
        }
}

std::string_view to_string(ComplexityMode m) noexcept {
    switch (m) {
        case ComplexityMode::scalar_on_labels: return "scalar_on_labels";
        case ComplexityMode::max_operator: return "max_operator";
        case ComplexityMode::full_sum: return "full_sum";
    }
    return "?";
}

ComplexityMode parse_complexity_mode(std::string_view name) {
    if (name == "scalar_on_labels") return ComplexityMode::scalar_on_labels;
    if (name == "max_operator") return ComplexityMode::max_operator;
    if (name == "full_sum") return ComplexityMode::full_sum;
    throw InvalidArgument("unknown complexity mode '" + std::string(name) + "'");
}

namespace {

enum class Noise { gaussian, rademacher };

std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

void fill_noise(std::vector<double>& out, Noise kind, std::uint64_t seed, std::size_t draw) {
    std::mt19937_64 rng(splitmix64(seed ^ splitmix64(draw + 1)));
    if (kind == Noise::gaussian) {
        std::normal_distribution<double> normal(0.0, 1.0);
        for (double& v : out) v = normal(rng);
    } else {
        for (double& v : out) v = (rng() >> 63) ? 1.0 : -1.0;
    }
}

// Evaluates stat(draw) for every draw, parallel over contiguous draw ranges, then reduces in order.
template <class Stat>
ComplexityEstimate monte_carlo(std::size_t draws, std::size_t threads, Stat&& stat) {
    if (draws < min_complexity_draws)
        throw InvalidArgument("at least " + std::to_string(min_complexity_draws) + " draws are required");
    std::vector<double> values(draws);
    threads = std::clamp<std::size_t>(threads, 1, draws);
    auto run = [&](std::size_t begin, std::size_t end) {
        for (std::size_t d = begin; d < end; ++d) values[d] = stat(d);
    };
    if (threads == 1) {
        run(0, draws);
    } else {
        std::vector<std::thread> pool;
        const std::size_t chunk = (draws + threads - 1) / threads;
        for (std::size_t t = 0; t < threads; ++t) {
            const std::size_t b = t * chunk, e = std::min(draws, b + chunk);
            if (b < e) pool.emplace_back(run, b, e);
        }
        for (auto& th : pool) th.join();
    }
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(draws);
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    const double var = ss / static_cast<double>(draws - 1);
    return {mean, std::sqrt(var / static_cast<double>(draws)), draws};
}

// values[m][j * n + i] = h_j(x_i) for member m.
std::vector<std::vector<double>> evaluate_members(const FiniteHypothesisSet& H, const Dataset& S) {
    const std::size_t n = S.size(), c = H.num_classes();
    std::vector<std::vector<double>> out;
    out.reserve(H.members.size());
    for (const auto& w : H.members) {
        std::vector<double> v(c * n);
        for (std::size_t j = 0; j < c; ++j)
            for (std::size_t i = 0; i < n; ++i) v[j * n + i] = dot(w.row(j), S.x(i));
        out.push_back(std::move(v));
    }
    return out;
}

ComplexityEstimate estimate(const FiniteHypothesisSet& H, const Dataset& S, std::size_t draws, std::uint64_t seed,
                            ComplexityMode mode, std::size_t threads, Noise kind) {
    H.validate();
    const std::size_t n = S.size(), c = H.num_classes();
    if (mode == ComplexityMode::scalar_on_labels) {
        for (std::size_t y : S.labels())
            if (y >= c) throw InvalidArgument("sample label outside the hypothesis classes");
    }
    const auto values = evaluate_members(H, S);

    // Reduce each member to the per-example function the noise multiplies.
    std::vector<std::vector<double>> reduced;
    if (mode != ComplexityMode::full_sum) {
        for (const auto& v : values) {
            std::vector<double> r(n);
            for (std::size_t i = 0; i < n; ++i) {
                if (mode == ComplexityMode::scalar_on_labels) {
                    r[i] = v[S.y(i) * n + i];
                } else {
                    double m = v[i];
                    for (std::size_t j = 1; j < c; ++j) m = std::max(m, v[j * n + i]);
                    r[i] = m;
                }
            }
            reduced.push_back(std::move(r));
        }
    }
    const auto& table = mode == ComplexityMode::full_sum ? values : reduced;
    const std::size_t width = mode == ComplexityMode::full_sum ? n * c : n;
    const double inv_n = 1.0 / static_cast<double>(n);

    return monte_carlo(draws, threads, [&](std::size_t d) {
        std::vector<double> noise(width);
        fill_noise(noise, kind, seed, d);
        double best = -std::numeric_limits<double>::infinity();
        for (const auto& f : table) {
            double s = 0.0;
            for (std::size_t k = 0; k < width; ++k) s += noise[k] * f[k];
            best = std::max(best, s);
        }
        return best * inv_n;
    });
}

}  // namespace

ComplexityEstimate estimate_gaussian_complexity(const FiniteHypothesisSet& H, const Dataset& S, std::size_t draws,
                                                std::uint64_t seed, ComplexityMode mode, std::size_t threads) {
    return estimate(H, S, draws, seed, mode, threads, Noise::gaussian);
}

ComplexityEstimate estimate_rademacher_complexity(const FiniteHypothesisSet& H, const Dataset& S, std::size_t draws,
                                                  std::uint64_t seed, ComplexityMode mode, std::size_t threads) {
    return estimate(H, S, draws, seed, mode, threads, Noise::rademacher);
}

ComplexityEstimate structural_baseline(std::span<const ComponentSet> components, const Dataset& S, std::size_t draws,
                                       std::uint64_t seed, std::size_t threads) {
    const std::size_t n = S.size();
    if (components.empty()) throw InvalidArgument("structural baseline needs at least one class");
    std::vector<std::vector<std::vector<double>>> values(components.size());
    for (std::size_t j = 0; j < components.size(); ++j) {
        if (components[j].empty()) throw InvalidArgument("component set is empty");
        for (const auto& u : components[j]) {
            std::vector<double> v(n);
            for (std::size_t i = 0; i < n; ++i) v[i] = dot(u, S.x(i));
            values[j].push_back(std::move(v));
        }
    }
    const double inv_n = 1.0 / static_cast<double>(n);
    return monte_carlo(draws, threads, [&](std::size_t d) {
        std::vector<double> noise(n);
        fill_noise(noise, Noise::rademacher, seed, d);
        double total = 0.0;
        for (const auto& cls : values) {
            double best = -std::numeric_limits<double>::infinity();
            for (const auto& f : cls) {
                double s = 0.0;
                for (std::size_t i = 0; i < n; ++i) s += noise[i] * f[i];
                best = std::max(best, s);
            }
            total += best;
        }
        return total * inv_n;
    });
}

}  // namespace lpsvm
