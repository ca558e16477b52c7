#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>

#include "CLI11.hpp"
#include "lpsvm/bounds.hpp"
#include "lpsvm/cv.hpp"
#include "lpsvm/data.hpp"
#include "lpsvm/error.hpp"
#include "lpsvm/format.hpp"
#include "lpsvm/model.hpp"
#include "lpsvm/solver.hpp"
#include "record.hpp"

namespace lpsvm::cli {

namespace fs = std::filesystem;

namespace {

// ---------------------------------------------------------------- helpers

void require_readable(const std::string& path, std::string_view what) {
    std::ifstream probe(path);
    if (!probe) throw Error("cannot read " + std::string(what) + " '" + path + "'");
}

void require_writable_target(const std::string& path) {
    if (path.empty()) throw Error("output path is empty");
    const fs::path parent = fs::path(path).parent_path();
    if (!parent.empty() && !fs::is_directory(parent))
        throw Error("output directory '" + parent.string() + "' does not exist");
}

Dataset read_dataset(const std::string& path, const ParseOptions& options) {
    std::ifstream in(path);
    if (!in) throw Error("cannot read data file '" + path + "'");
    return parse_libsvm(in, options);
}

Model read_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot read model file '" + path + "'");
    return load_model(in);
}

// Reads data for an existing model; indices beyond the model dimension are a mismatch.
Dataset read_dataset_for(const Model& model, const std::string& path) {
    ParseOptions opts;
    opts.bias = model.bias;
    opts.dimension = model.dimension() - (model.bias ? 1 : 0);
    opts.known_labels = model.label_map;
    try {
        return read_dataset(path, opts);
    } catch (const ParseError& e) {
        if (e.line() == 0 && std::string(e.what()).find("exceeds dimension") != std::string::npos)
            throw Error("dimension mismatch: " + std::string(e.what()));
        throw;
    }
}

// "0.5", "2^-3" or "2e1".
double parse_grid_value(const std::string& token) {
    const auto caret = token.find('^');
    if (caret != std::string::npos) {
        const auto base = parse_double(std::string_view(token).substr(0, caret));
        const auto expo = parse_double(std::string_view(token).substr(caret + 1));
        if (!base || !expo) throw InvalidArgument("bad grid value '" + token + "'");
        return std::pow(*base, *expo);
    }
    const auto v = parse_double(token);
    if (!v) throw InvalidArgument("bad grid value '" + token + "'");
    return *v;
}

// Comma-separated values, or "lo:hi:step" for an inclusive arithmetic range.
std::vector<double> parse_grid(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        if (std::count(item.begin(), item.end(), ':') == 2) {
            const auto a = item.find(':'), b = item.find(':', a + 1);
            const auto range = grid_range(parse_grid_value(item.substr(0, a)), parse_grid_value(item.substr(a + 1, b - a - 1)),
                                          parse_grid_value(item.substr(b + 1)));
            out.insert(out.end(), range.begin(), range.end());
        } else {
            out.push_back(parse_grid_value(item));
        }
    }
    if (out.empty()) throw InvalidArgument("empty grid '" + text + "'");
    return out;
}

// Values "a:b" in the C grid are exponents of two: "-2:2" -> 2^-2 ... 2^2.
std::vector<double> parse_c_grid(const std::string& text) {
    if (std::count(text.begin(), text.end(), ':') == 1 && text.find(',') == std::string::npos) {
        const auto a = text.find(':');
        const auto lo = parse_int(std::string_view(text).substr(0, a));
        const auto hi = parse_int(std::string_view(text).substr(a + 1));
        if (!lo || !hi || *hi < *lo) throw InvalidArgument("bad C exponent range '" + text + "'");
        std::vector<double> out;
        for (auto e = *lo; e <= *hi; ++e) out.push_back(std::ldexp(1.0, static_cast<int>(e)));
        return out;
    }
    return parse_grid(text);
}

std::string join(const std::vector<double>& xs, char sep) {
    std::string out;
    for (std::size_t k = 0; k < xs.size(); ++k) {
        if (k) out += sep;
        out += format_double(xs[k]);
    }
    return out;
}

std::size_t worker_threads() {
    std::size_t threads = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("LPMCSVM_THREADS")) {
        const auto cap = parse_int(env);
        if (!cap || *cap < 1) throw InvalidArgument("LPMCSVM_THREADS must be a positive integer");
        threads = std::min<std::size_t>(threads, static_cast<std::size_t>(*cap));
    }
    return threads;
}

struct SolverFlags {
    double p = 2.0;
    double C = 1.0;
    double tol = 1e-3;
    double inner_tol = 1e-3;
    std::size_t max_outer = 50;
    std::size_t max_inner = 200;

    void attach(CLI::App* app) {
        app->add_option("--p", p, "block-norm exponent in [1,2]");
        app->add_option("--C", C, "loss weight");
        app->add_option("--tol", tol, "relative duality-gap target");
        app->add_option("--inner-tol", inner_tol, "inner KKT violation target");
        app->add_option("--max-outer", max_outer, "outer iteration cap");
        app->add_option("--max-inner", max_inner, "inner epoch cap per outer iteration");
    }

    HyperParams params(std::uint64_t seed) const {
        HyperParams hp;
        hp.p = p;
        hp.C = C;
        hp.outer_tol = tol;
        hp.inner_tol = inner_tol;
        hp.max_outer = max_outer;
        hp.max_inner_epochs = max_inner;
        hp.seed = seed;
        return hp;
    }

    void fingerprint(ConfigFingerprint& f) const {
        f.add("p", p).add("C", C).add("tol", tol).add("inner_tol", inner_tol);
        f.add("max_outer", std::uint64_t{max_outer}).add("max_inner", std::uint64_t{max_inner});
    }
};

std::string render(const std::vector<Record>& records) {
    std::string text;
    for (const auto& r : records) {
        text += r.str();
        text += '\n';
    }
    return text;
}

// ---------------------------------------------------------------- train

struct TrainArgs {
    std::string data, out, report;
    std::optional<std::size_t> dim;
    bool bias = false;
    std::uint64_t seed = 1;
    SolverFlags solver;
};

int cmd_train(const TrainArgs& a, std::ostream& out) {
    const HyperParams hp = a.solver.params(a.seed);
    hp.validate();
    require_readable(a.data, "data file");
    require_writable_target(a.out);
    const std::string report_path = a.report.empty() ? a.out + ".report" : a.report;
    require_writable_target(report_path);

    ParseOptions opts;
    opts.dimension = a.dim;
    opts.bias = a.bias;
    const Dataset data = read_dataset(a.data, opts);
    TrainResult result = train(data, hp);
    result.model.bias = a.bias;

    ConfigFingerprint config;
    config.add("command", "train").add("data", a.data).add("dim", a.dim ? std::to_string(*a.dim) : "auto");
    config.add("bias", a.bias ? "1" : "0");
    a.solver.fingerprint(config);
    config.add("seed", a.seed);

    std::vector<Record> records;
    records.push_back(provenance("train_config", config, a.seed)
                          .add("p", hp.p)
                          .add("C", hp.C)
                          .add("outer_tol", hp.outer_tol)
                          .add("inner_tol", hp.inner_tol)
                          .add("n", data.size())
                          .add("classes", data.num_classes())
                          .add("dimension", data.dimension()));
    for (const auto& it : result.report.iterations) {
        records.push_back(provenance("iteration", config, a.seed)
                              .add("iter", it.iteration)
                              .add("inner_epochs", it.inner_epochs)
                              .add("kkt", it.kkt_violation)
                              .add("inner_tol", it.inner_tol)
                              .add("primal", it.primal)
                              .add("dual", it.dual)
                              .add("gap", it.gap));
    }
    const TrainReport& rep = result.report;
    records.push_back(provenance("train_summary", config, a.seed)
                          .add("converged", rep.converged)
                          .add("outer_iterations", rep.iterations.size())
                          .add("primal", rep.primal)
                          .add("dual", rep.dual)
                          .add("gap", rep.gap)
                          .add("skipped_examples", rep.skipped_examples)
                          .add("warning", rep.converged ? "none" : "max_outer_reached"));

    std::ostringstream model_text;
    save_model(model_text, result.model);
    write_file_atomic(a.out, model_text.str());
    write_file_atomic(report_path, render(records));

    out << "trained p=" << format_double(hp.p) << " C=" << format_double(hp.C) << " on n=" << data.size()
        << " c=" << data.num_classes() << " d=" << data.dimension() << ": " << rep.iterations.size()
        << " outer iterations, relative gap " << format_double(rep.gap)
        << (rep.converged ? "" : " (not converged: max outer iterations reached)") << '\n';
    return rep.converged ? exit_ok : exit_warning;
}

// ---------------------------------------------------------------- predict / evaluate

struct PredictArgs {
    std::string model, data, out;
};

int cmd_predict(const PredictArgs& a, std::ostream& out) {
    require_readable(a.model, "model file");
    require_readable(a.data, "data file");
    require_writable_target(a.out);
    const Model model = read_model(a.model);
    const Dataset data = read_dataset_for(model, a.data);
    std::string text;
    std::size_t ignored = 0;
    for (const auto& x : data.examples()) {
        text += std::to_string(predict(model, x, &ignored));
        text += '\n';
    }
    write_file_atomic(a.out, text);
    out << "wrote " << data.size() << " predictions to " << a.out << '\n';
    return exit_ok;
}

struct EvaluateArgs {
    std::string model, data, out;
    std::uint64_t seed = 1;
};

int cmd_evaluate(const EvaluateArgs& a, std::ostream& out) {
    require_readable(a.model, "model file");
    require_readable(a.data, "data file");
    if (!a.out.empty()) require_writable_target(a.out);
    const Model model = read_model(a.model);
    const Dataset data = read_dataset_for(model, a.data);
    const Evaluation ev = evaluate(model, data);

    ConfigFingerprint config;
    config.add("command", "evaluate").add("model", a.model).add("data", a.data).add("seed", a.seed);
    std::string confusion;
    for (std::size_t r = 0; r < ev.confusion.size(); ++r) {
        if (r) confusion += ';';
        for (std::size_t k = 0; k < ev.confusion[r].size(); ++k) {
            if (k) confusion += ',';
            confusion += std::to_string(ev.confusion[r][k]);
        }
    }
    Record rec = provenance("evaluation", config, a.seed);
    rec.add("accuracy", ev.accuracy)
        .add("correct", ev.correct)
        .add("total", ev.total)
        .add("unknown_labels", ev.unknown_labels)
        .add("ignored_features", ev.ignored_features)
        .add("p", model.p)
        .add("C", model.C)
        .add("confusion", std::string_view(confusion));
    if (!a.out.empty()) write_file_atomic(a.out, rec.str() + "\n");
    out << "accuracy " << format_double(ev.accuracy) << " (" << ev.correct << "/" << ev.total << ")";
    if (ev.unknown_labels) out << ", " << ev.unknown_labels << " examples with labels unknown to the model";
    out << '\n';
    if (a.out.empty()) out << rec.str() << '\n';
    return exit_ok;
}

// ---------------------------------------------------------------- tune

struct TuneArgs {
    std::string data, out, summary, retrain;
    std::string grid_c = "-2:2";
    std::string grid_p = "1,1.5,2";
    std::size_t folds = 5;
    std::optional<std::size_t> dim;
    bool bias = false;
    bool refine = false;
    double fine_step = 0.1;
    double fine_radius = 0.5;
    std::uint64_t seed = 1;
    SolverFlags solver;
};

int cmd_tune(const TuneArgs& a, std::ostream& out, std::ostream& err) {
    require_readable(a.data, "data file");
    require_writable_target(a.out);
    const std::string summary_path = a.summary.empty() ? a.out + ".summary" : a.summary;
    require_writable_target(summary_path);
    if (!a.retrain.empty()) require_writable_target(a.retrain);

    GridSpec grid;
    grid.C_values = parse_c_grid(a.grid_c);
    grid.p_values = parse_grid(a.grid_p);
    grid.folds = a.folds;
    grid.seed = a.seed;
    if (a.refine) grid.refinement = Refinement{0.5, a.fine_step, a.fine_radius};

    HyperParams hp = a.solver.params(a.seed);
    hp.p = 2.0;  // overwritten per cell
    hp.C = 1.0;
    hp.validate();

    ParseOptions opts;
    opts.dimension = a.dim;
    opts.bias = a.bias;
    const Dataset data = read_dataset(a.data, opts);

    GridSearchOptions gopts;
    gopts.threads = worker_threads();
    const GridSearchResult res = grid_search(data, grid, hp, gopts);
    for (double p : res.rejected_p)
        err << "warning: grid point p=" << format_double(p) << " rejected (p must lie in [1,2])\n";

    ConfigFingerprint config;
    config.add("command", "tune").add("data", a.data).add("grid_c", join(grid.C_values, ','));
    config.add("grid_p", join(grid.p_values, ',')).add("folds", std::uint64_t{a.folds});
    config.add("dim", a.dim ? std::to_string(*a.dim) : "auto").add("bias", a.bias ? "1" : "0");
    config.add("refine", a.refine ? "1" : "0").add("fine_step", a.fine_step).add("fine_radius", a.fine_radius);
    a.solver.fingerprint(config);
    config.add("seed", a.seed);

    std::string table = "C\tp\tstage\tmean_acc\tstd_acc\tfold_accs\tstatus\n";
    std::size_t valid = 0;
    const CellResult* best = nullptr;
    for (const auto& cell : res.table) {
        valid += cell.valid ? 1 : 0;
        if (cell.C == res.best_C && cell.p == res.best_p) best = &cell;
        table += format_double(cell.C) + '\t' + format_double(cell.p) + '\t' + std::to_string(cell.stage) + '\t' +
                 format_double(cell.mean_accuracy) + '\t' + format_double(cell.std_accuracy) + '\t' +
                 join(cell.fold_accuracies, ',') + '\t' + (cell.valid ? "ok" : "invalid") + '\n';
        if (!cell.valid)
            err << "warning: cell C=" << format_double(cell.C) << " p=" << format_double(cell.p)
                << " excluded: " << cell.error << '\n';
    }

    Record summary = provenance("tune_summary", config, a.seed);
    summary.add("best_C", res.best_C)
        .add("best_p", res.best_p)
        .add("best_mean_acc", best ? best->mean_accuracy : 0.0)
        .add("best_std_acc", best ? best->std_accuracy : 0.0)
        .add("cells", res.table.size())
        .add("valid_cells", valid)
        .add("folds", a.folds)
        .add("rejected_p", std::string_view(res.rejected_p.empty() ? "none" : join(res.rejected_p, ',')));

    std::string model_text;
    if (!a.retrain.empty()) {
        HyperParams final_hp = hp;
        final_hp.p = res.best_p;
        final_hp.C = res.best_C;
        TrainResult final_fit = train(data, final_hp);
        final_fit.model.bias = a.bias;
        std::ostringstream os;
        save_model(os, final_fit.model);
        model_text = os.str();
        summary.add("retrained", true).add("retrain_converged", final_fit.report.converged);
    }

    write_file_atomic(a.out, table);
    write_file_atomic(summary_path, summary.str() + "\n");
    if (!model_text.empty()) write_file_atomic(a.retrain, model_text);
    out << "best C=" << format_double(res.best_C) << " p=" << format_double(res.best_p) << " mean accuracy "
        << format_double(best ? best->mean_accuracy : 0.0) << " over " << valid << "/" << res.table.size()
        << " valid cells\n";
    return exit_ok;
}

// ---------------------------------------------------------------- bound

struct BoundArgs {
    std::string model, data, out;
    std::string loss = "margin";
    double rho = 1.0;
    std::optional<double> p, lambda, trace, risk;
    std::optional<std::size_t> classes, n;
    double lipschitz = 1.0;
    double loss_bound = 1.0;
    double delta = 0.05;
    std::uint64_t seed = 1;
};

int cmd_bound(const BoundArgs& a, std::ostream& out) {
    if (!(a.delta > 0.0 && a.delta < 1.0)) throw InvalidArgument("delta must lie in (0,1)");
    if (!a.out.empty()) require_writable_target(a.out);

    BoundInputs in;
    in.delta = a.delta;
    bool posthoc = false;
    ConfigFingerprint config;
    config.add("command", "bound").add("delta", a.delta);

    if (!a.model.empty()) {
        if (a.data.empty()) throw InvalidArgument("--model requires --data for the trace and empirical risk");
        require_readable(a.model, "model file");
        require_readable(a.data, "data file");
        const Model model = read_model(a.model);
        const Dataset data = read_dataset_for(model, a.data);
        in.p = model.p;
        in.num_classes = model.num_classes();
        in.norm_budget = block_norm(model.w, model.p);
        in.n = data.size();
        in.trace = kernel_diag_sum(data);
        double max_norm = 0.0;
        for (const auto& x : data.examples()) max_norm = std::max(max_norm, std::sqrt(x.squared_norm()));
        LossSpec loss;
        if (a.loss == "margin") {
            loss = LossSpec::margin(a.rho);
        } else if (a.loss == "hinge") {
            // |t| <= 2 Lambda max ||x|| on the norm ball, so the hinge stays below 1 + that.
            loss = LossSpec::hinge(1.0 + 2.0 * in.norm_budget * max_norm);
        } else {
            throw InvalidArgument("--loss must be 'margin' or 'hinge'");
        }
        in.lipschitz = loss.lipschitz;
        in.loss_bound = loss.bound;
        in.empirical_risk = empirical_risk(model, data, loss);
        posthoc = true;
        config.add("model", a.model).add("data", a.data).add("loss", a.loss).add("rho", a.rho);
    } else {
        if (!a.p || !a.classes || !a.lambda || !a.n || !a.trace)
            throw InvalidArgument("explicit bound inputs need --p, --classes, --lambda, --n and --trace (or use --model)");
        in.p = *a.p;
        in.num_classes = *a.classes;
        in.norm_budget = *a.lambda;
        in.n = *a.n;
        in.trace = *a.trace;
        in.empirical_risk = a.risk.value_or(0.0);
        in.lipschitz = a.lipschitz;
        in.loss_bound = a.loss_bound;
        config.add("p", in.p).add("classes", std::uint64_t{in.num_classes}).add("lambda", in.norm_budget);
        config.add("n", std::uint64_t{in.n}).add("trace", in.trace).add("risk", in.empirical_risk);
        config.add("lipschitz", in.lipschitz).add("loss_bound", in.loss_bound);
    }
    config.add("seed", a.seed);

    const BoundResult r = corollary_bound(in);
    Record rec = provenance("bound", config, a.seed);
    rec.add("p", in.p)
        .add("c", in.num_classes)
        .add("branch", to_string(r.branch))
        .add("factor", r.factor)
        .add("bound", r.bound)
        .add("empirical_risk", in.empirical_risk)
        .add("confidence_term", r.confidence_term)
        .add("complexity_term", r.complexity_term)
        .add("threshold", r.threshold)
        .add("lambda", in.norm_budget)
        .add("lambda_posthoc", posthoc)
        .add("lipschitz", in.lipschitz)
        .add("loss_bound", in.loss_bound)
        .add("delta", in.delta)
        .add("n", in.n)
        .add("trace", in.trace);
    if (!a.out.empty()) write_file_atomic(a.out, rec.str() + "\n");
    out << "generalization bound " << format_double(r.bound) << " (" << to_string(r.branch) << " branch, factor "
        << format_double(r.factor) << ")";
    if (posthoc) out << "; Lambda taken post hoc from the model's ||w||_{2,p}";
    out << '\n';
    if (a.out.empty()) out << rec.str() << '\n';
    return exit_ok;
}

// ---------------------------------------------------------------- complexity

struct ComplexityArgs {
    std::string hyp, data, out;
    std::string mode = "full_sum";
    std::string noise = "gaussian";
    std::size_t draws = 10000;
    std::uint64_t seed = 1;
};

int cmd_complexity(const ComplexityArgs& a, std::ostream& out) {
    require_readable(a.hyp, "hypothesis file");
    require_readable(a.data, "data file");
    if (!a.out.empty()) require_writable_target(a.out);
    const ComplexityMode mode = parse_complexity_mode(a.mode);
    if (a.noise != "gaussian" && a.noise != "rademacher") throw InvalidArgument("--noise must be gaussian or rademacher");

    FiniteHypothesisSet H;
    {
        std::ifstream in(a.hyp);
        H = read_hypothesis_set(in);
    }
    ParseOptions opts;
    opts.dimension = H.dimension();
    const Dataset data = read_dataset(a.data, opts);
    const std::size_t threads = worker_threads();
    const ComplexityEstimate est = a.noise == "gaussian"
                                       ? estimate_gaussian_complexity(H, data, a.draws, a.seed, mode, threads)
                                       : estimate_rademacher_complexity(H, data, a.draws, a.seed, mode, threads);

    ConfigFingerprint config;
    config.add("command", "complexity").add("hyp", a.hyp).add("data", a.data).add("mode", a.mode);
    config.add("noise", a.noise).add("draws", std::uint64_t{a.draws}).add("seed", a.seed);
    Record rec = provenance("complexity", config, a.seed);
    rec.add("noise", std::string_view(a.noise))
        .add("mode", to_string(mode))
        .add("mean", est.mean)
        .add("std_error", est.std_error)
        .add("draws", est.draws)
        .add("members", H.members.size())
        .add("n", data.size());
    if (!a.out.empty()) write_file_atomic(a.out, rec.str() + "\n");
    out << a.noise << " complexity (" << to_string(mode) << "): " << format_double(est.mean) << " +/- "
        << format_double(est.std_error) << " over " << est.draws << " draws\n";
    if (a.out.empty()) out << rec.str() << '\n';
    return exit_ok;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Block-norm regularized multi-class SVM: training, evaluation, model selection and bounds",
                 std::string(tool_name)};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(tool_version));

    TrainArgs train_args;
    auto* train_cmd = app.add_subcommand("train", "train a model");
    train_cmd->add_option("--data", train_args.data, "LIBSVM training file")->required();
    train_cmd->add_option("--out", train_args.out, "model output path")->required();
    train_cmd->add_option("--report", train_args.report, "training log (default <out>.report)");
    train_cmd->add_option("--dim", train_args.dim, "feature dimension override");
    train_cmd->add_flag("--bias", train_args.bias, "append a constant-1 feature");
    train_cmd->add_option("--seed", train_args.seed, "random seed");
    train_args.solver.attach(train_cmd);

    PredictArgs predict_args;
    auto* predict_cmd = app.add_subcommand("predict", "write one predicted label per input line");
    predict_cmd->add_option("--model", predict_args.model)->required();
    predict_cmd->add_option("--data", predict_args.data)->required();
    predict_cmd->add_option("--out", predict_args.out, "labels output path")->required();

    EvaluateArgs eval_args;
    auto* eval_cmd = app.add_subcommand("evaluate", "accuracy of a model on a labelled file");
    eval_cmd->add_option("--model", eval_args.model)->required();
    eval_cmd->add_option("--data", eval_args.data)->required();
    eval_cmd->add_option("--out", eval_args.out, "evaluation record path");
    eval_cmd->add_option("--seed", eval_args.seed);

    TuneArgs tune_args;
    auto* tune_cmd = app.add_subcommand("tune", "k-fold cross-validated grid search over (C, p)");
    tune_cmd->add_option("--data", tune_args.data)->required();
    tune_cmd->add_option("--out", tune_args.out, "sweep table path (tab separated)")->required();
    tune_cmd->add_option("--summary", tune_args.summary, "best-cell record path (default <out>.summary)");
    tune_cmd->add_option("--retrain", tune_args.retrain, "retrain on all data with the winner and save the model here");
    tune_cmd->add_option("--grid-c", tune_args.grid_c, "C values: 'a:b' exponents of two, or a list like '0.5,1,2^3'");
    tune_cmd->add_option("--grid-p", tune_args.grid_p, "p values: list and/or 'lo:hi:step' ranges");
    tune_cmd->add_option("--folds", tune_args.folds, "number of folds");
    tune_cmd->add_option("--dim", tune_args.dim);
    tune_cmd->add_flag("--bias", tune_args.bias);
    tune_cmd->add_flag("--refine", tune_args.refine, "second, finer p stage around the winner");
    tune_cmd->add_option("--fine-step", tune_args.fine_step);
    tune_cmd->add_option("--fine-radius", tune_args.fine_radius);
    tune_cmd->add_option("--seed", tune_args.seed);
    tune_args.solver.attach(tune_cmd);

    BoundArgs bound_args;
    auto* bound_cmd = app.add_subcommand("bound", "evaluate the block-norm generalization bound");
    bound_cmd->add_option("--model", bound_args.model);
    bound_cmd->add_option("--data", bound_args.data);
    bound_cmd->add_option("--out", bound_args.out, "bound record path");
    bound_cmd->add_option("--loss", bound_args.loss, "margin or hinge (with --model)");
    bound_cmd->add_option("--rho", bound_args.rho, "margin loss width");
    bound_cmd->add_option("--p", bound_args.p);
    bound_cmd->add_option("--classes", bound_args.classes);
    bound_cmd->add_option("--lambda", bound_args.lambda, "norm budget ||w||_{2,p} <= lambda");
    bound_cmd->add_option("--n", bound_args.n);
    bound_cmd->add_option("--trace", bound_args.trace, "sum_i k(x_i, x_i)");
    bound_cmd->add_option("--risk", bound_args.risk, "empirical loss");
    bound_cmd->add_option("--lipschitz", bound_args.lipschitz);
    bound_cmd->add_option("--loss-bound", bound_args.loss_bound);
    bound_cmd->add_option("--delta", bound_args.delta, "confidence parameter in (0,1)");
    bound_cmd->add_option("--seed", bound_args.seed);

    ComplexityArgs cx_args;
    auto* cx_cmd = app.add_subcommand("complexity", "Monte-Carlo complexity of a finite hypothesis set");
    cx_cmd->add_option("--hyp", cx_args.hyp, "hypothesis file")->required();
    cx_cmd->add_option("--data", cx_args.data)->required();
    cx_cmd->add_option("--out", cx_args.out);
    cx_cmd->add_option("--mode", cx_args.mode, "scalar_on_labels, max_operator or full_sum");
    cx_cmd->add_option("--noise", cx_args.noise, "gaussian or rademacher");
    cx_cmd->add_option("--draws", cx_args.draws);
    cx_cmd->add_option("--seed", cx_args.seed);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return exit_ok;
    } catch (const CLI::CallForVersion&) {
        out << tool_version << '\n';
        return exit_ok;
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            out << app.help();
            return exit_ok;
        }
        err << "error: " << e.what() << '\n';
        return exit_error;
    }

    try {
        if (train_cmd->parsed()) return cmd_train(train_args, out);
        if (predict_cmd->parsed()) return cmd_predict(predict_args, out);
        if (eval_cmd->parsed()) return cmd_evaluate(eval_args, out);
        if (tune_cmd->parsed()) return cmd_tune(tune_args, out, err);
        if (bound_cmd->parsed()) return cmd_bound(bound_args, out);
        if (cx_cmd->parsed()) return cmd_complexity(cx_args, out);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return exit_error;
    }
    err << "error: no subcommand\n";
    return exit_error;
}

}  // namespace lpsvm::cli
