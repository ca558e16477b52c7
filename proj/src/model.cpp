#include "lpsvm/model.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <unordered_map>

#include "lpsvm/error.hpp"
#include "lpsvm/format.hpp"

namespace lpsvm {

void Model::validate() const {
    const std::size_t c = w.rows();
    if (c < 2) throw InvalidArgument("model needs at least two classes");
    if (w.cols() == 0) throw InvalidArgument("model dimension must be positive");
    if (beta.size() != c || label_map.size() != c) throw InvalidArgument("model field sizes disagree");
    if (std::set<Label>(label_map.begin(), label_map.end()).size() != c)
        throw InvalidArgument("label map is not a bijection");
    for (double v : w.data())
        if (!std::isfinite(v)) throw InvalidArgument("model weights must be finite");
    for (double b : beta)
        if (!std::isfinite(b)) throw InvalidArgument("class weights must be finite");
}

double block_norm(const Matrix& w, double p) {
    std::vector<double> norms(w.rows());
    double m = 0.0;
    for (std::size_t j = 0; j < w.rows(); ++j) {
        double s = 0.0;
        for (double v : w.row(j)) s += v * v;
        norms[j] = std::sqrt(s);
        m = std::max(m, norms[j]);
    }
    if (m == 0.0) return 0.0;
    double s = 0.0;
    for (double nj : norms) s += std::pow(nj / m, p);
    return m * std::pow(s, 1.0 / p);
}

std::vector<double> scores(const Model& model, const SparseVector& x) {
    std::vector<double> out(model.num_classes());
    for (std::size_t j = 0; j < out.size(); ++j) out[j] = dot(model.w.row(j), x);
    return out;
}

std::size_t predict_class(const Model& model, const SparseVector& x, std::size_t* ignored_features) {
    if (ignored_features && x.extent() > model.dimension()) {
        for (const Entry& e : x.entries())
            if (e.index >= model.dimension()) ++*ignored_features;
    }
    const auto s = scores(model, x);
    std::size_t best = 0;
    for (std::size_t j = 1; j < s.size(); ++j)
        if (s[j] > s[best]) best = j;
    return best;
}

Label predict(const Model& model, const SparseVector& x, std::size_t* ignored_features) {
    return model.label_map[predict_class(model, x, ignored_features)];
}

Evaluation evaluate(const Model& model, const Dataset& data) {
    std::unordered_map<Label, std::size_t> model_class;
    for (std::size_t j = 0; j < model.label_map.size(); ++j) model_class.emplace(model.label_map[j], j);

    Evaluation ev;
    ev.total = data.size();
    ev.confusion.assign(data.num_classes(), std::vector<std::size_t>(model.num_classes(), 0));
    for (std::size_t i = 0; i < data.size(); ++i) {
        const std::size_t predicted = predict_class(model, data.x(i), &ev.ignored_features);
        ++ev.confusion[data.y(i)][predicted];
        auto it = model_class.find(data.label_map()[data.y(i)]);
        if (it == model_class.end()) {
            ++ev.unknown_labels;
            continue;
        }
        if (it->second == predicted) ++ev.correct;
    }
    ev.accuracy = static_cast<double>(ev.correct) / static_cast<double>(ev.total);
    return ev;
}

namespace {

constexpr std::string_view format_prefix = "format=lpmcsvm v";

std::string render_body(const Model& m) {
    std::ostringstream os;
    os << format_prefix << model_format_major << '\n';
    os << "p=" << format_double(m.p) << '\n';
    os << "C=" << format_double(m.C) << '\n';
    os << "num_classes=" << m.num_classes() << '\n';
    os << "dimension=" << m.dimension() << '\n';
    os << "bias=" << (m.bias ? 1 : 0) << '\n';
    os << "label_map=";
    for (std::size_t j = 0; j < m.label_map.size(); ++j) os << (j ? " " : "") << m.label_map[j];
    os << '\n';
    os << "beta=";
    for (std::size_t j = 0; j < m.beta.size(); ++j) os << (j ? " " : "") << format_double(m.beta[j]);
    os << '\n';
    for (std::size_t j = 0; j < m.num_classes(); ++j) {
        const auto row = m.w.row(j);
        const auto nnz = static_cast<std::size_t>(std::count_if(row.begin(), row.end(), [](double v) { return v != 0.0 || std::signbit(v); }));
        os << "w " << j << ' ' << nnz;
        for (std::size_t k = 0; k < row.size(); ++k)
            if (row[k] != 0.0 || std::signbit(row[k])) os << ' ' << k << ':' << format_double(row[k]);
        os << '\n';
    }
    return os.str();
}

[[noreturn]] void malformed(const std::string& what) {
    throw ModelFormatError(ModelFormatError::Kind::malformed, "model file: " + what);
}

std::string expect_key(const std::string& line, std::string_view key) {
    if (line.size() < key.size() + 1 || line.compare(0, key.size(), key) != 0 || line[key.size()] != '=')
        malformed("expected '" + std::string(key) + "=' but found '" + line + "'");
    return line.substr(key.size() + 1);
}

double to_double(const std::string& token) {
    auto v = parse_double(token);
    if (!v) malformed("bad number '" + token + "'");
    return *v;
}

std::size_t to_size(const std::string& token) {
    auto v = parse_int(token);
    if (!v || *v < 0) malformed("bad count '" + token + "'");
    return static_cast<std::size_t>(*v);
}

}  // namespace

void save_model(std::ostream& out, const Model& model) {
    model.validate();
    const std::string body = render_body(model);
    out << body << "checksum=" << hex64(fnv1a64(body)) << '\n';
}

Model load_model(std::istream& in) {
    std::string body;
    std::vector<std::string> lines;
    std::string line;
    std::string checksum;
    bool have_checksum = false;
    while (std::getline(in, line)) {
        if (lines.empty()) {
            if (line.rfind(format_prefix, 0) != 0)
                throw ModelFormatError(ModelFormatError::Kind::version, "not an lpmcsvm model: bad format header");
            const auto major = parse_int(std::string_view(line).substr(format_prefix.size()));
            if (!major) throw ModelFormatError(ModelFormatError::Kind::version, "unreadable model format version");
            if (*major > model_format_major)
                throw ModelFormatError(ModelFormatError::Kind::version,
                                       "model format v" + std::to_string(*major) + " is newer than supported v" +
                                           std::to_string(model_format_major));
            if (*major != model_format_major)
                throw ModelFormatError(ModelFormatError::Kind::version, "unsupported model format version");
        }
        if (line.rfind("checksum=", 0) == 0) {
            checksum = line.substr(9);
            have_checksum = true;
            break;
        }
        body += line;
        body += '\n';
        lines.push_back(line);
    }
    if (lines.empty()) throw ModelFormatError(ModelFormatError::Kind::truncated, "empty model stream");
    if (!have_checksum) throw ModelFormatError(ModelFormatError::Kind::truncated, "model stream truncated");
    if (checksum != hex64(fnv1a64(body)))
        throw ModelFormatError(ModelFormatError::Kind::checksum, "model checksum mismatch");
    if (lines.size() < 8) malformed("missing header fields");

    Model m;
    m.p = to_double(expect_key(lines[1], "p"));
    m.C = to_double(expect_key(lines[2], "C"));
    const std::size_t c = to_size(expect_key(lines[3], "num_classes"));
    const std::size_t d = to_size(expect_key(lines[4], "dimension"));
    const std::string bias = expect_key(lines[5], "bias");
    if (bias != "0" && bias != "1") malformed("bias must be 0 or 1");
    m.bias = bias == "1";
    {
        std::istringstream ls(expect_key(lines[6], "label_map"));
        std::string tok;
        while (ls >> tok) {
            auto v = parse_int(tok);
            if (!v) malformed("bad label '" + tok + "'");
            m.label_map.push_back(*v);
        }
    }
    {
        std::istringstream bs(expect_key(lines[7], "beta"));
        std::string tok;
        while (bs >> tok) m.beta.push_back(to_double(tok));
    }
    if (lines.size() != 8 + c) malformed("expected " + std::to_string(c) + " weight rows");
    m.w = Matrix(c, d);
    for (std::size_t j = 0; j < c; ++j) {
        std::istringstream rs(lines[8 + j]);
        std::string tag, tok;
        rs >> tag;
        if (tag != "w") malformed("expected weight row");
        rs >> tok;
        if (to_size(tok) != j) malformed("weight rows out of order");
        rs >> tok;
        const std::size_t nnz = to_size(tok);
        std::size_t seen = 0;
        while (rs >> tok) {
            const auto colon = tok.find(':');
            if (colon == std::string::npos) malformed("bad weight entry '" + tok + "'");
            const std::size_t k = to_size(tok.substr(0, colon));
            if (k >= d) malformed("weight index out of range");
            m.w(j, k) = to_double(tok.substr(colon + 1));
            ++seen;
        }
        if (seen != nnz) malformed("weight row length mismatch");
    }
    try {
        m.validate();
    } catch (const InvalidArgument& e) {
        malformed(e.what());
    }
    return m;
}

}  // namespace lpsvm
