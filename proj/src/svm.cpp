#include "mrpred/svm.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <numeric>
#include <ostream>

#include "mrpred/error.hpp"
#include "mrpred/rng.hpp"

namespace mrpred::svm {

namespace {

double dot_augmented(std::span<const double> w, std::span<const double> x) {
    double s = w.back();  // constant-1 bias feature
    for (std::size_t j = 0; j < x.size(); ++j) s += w[j] * x[j];
    return s;
}

}  // namespace

Model fit(const numerics::DenseMatrix& x, std::span<const int> y, const Params& params) {
    const std::size_t n = x.rows();
    const std::size_t dim = x.cols();
    if (!(params.c > 0.0)) throw Error("svm: c must be positive");
    if (params.max_iter == 0) throw Error("svm: max_iter must be positive");
    if (y.size() != n) throw Error("svm: label count mismatch");
    if (n < 2) throw Error("svm: need at least 2 points");
    if (!x.all_finite()) throw Error("svm: non-finite feature values");

    bool has0 = false;
    bool has1 = false;
    for (int label : y) {
        if (label == 0) has0 = true;
        else if (label == 1) has1 = true;
        else throw Error("svm: labels must be 0 or 1");
    }
    if (!has0 || !has1) throw Error("svm: both classes must be present");

    std::vector<double> sign(n);
    for (std::size_t i = 0; i < n; ++i) sign[i] = y[i] == 1 ? 1.0 : -1.0;

    // Q_ii = |x_i|^2 + 1 (augmented bias column); always positive.
    std::vector<double> q_diag(n);
    for (std::size_t i = 0; i < n; ++i) {
        double s = 1.0;
        for (double v : x.row(i)) s += v * v;
        q_diag[i] = s;
    }

    std::vector<double> w(dim + 1, 0.0);
    std::vector<double> alpha(n, 0.0);
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(params.seed);

    Model model;
    model.params = params;
    model.objective_trace.reserve(std::min<std::size_t>(params.max_iter, 4096));

    for (std::size_t epoch = 0; epoch < params.max_iter; ++epoch) {
        rng.shuffle(order);
        double max_violation = 0.0;
        for (const std::size_t i : order) {
            const double margin = sign[i] * dot_augmented(w, x.row(i));
            const double gradient = margin - 1.0;
            double projected = gradient;
            if (alpha[i] <= 0.0) projected = std::min(gradient, 0.0);
            else if (alpha[i] >= params.c) projected = std::max(gradient, 0.0);
            max_violation = std::max(max_violation, std::fabs(projected));
            if (projected == 0.0) continue;
            const double updated =
                std::clamp(alpha[i] - gradient / q_diag[i], 0.0, params.c);
            const double step = (updated - alpha[i]) * sign[i];
            if (step == 0.0) continue;
            alpha[i] = updated;
            auto xi = x.row(i);
            for (std::size_t j = 0; j < dim; ++j) w[j] += step * xi[j];
            w[dim] += step;
        }
        // Dual objective 0.5*|w|^2 - sum(alpha); exact per-coordinate
        // minimization makes this non-increasing across epochs.
        double w_norm2 = 0.0;
        for (double v : w) w_norm2 += v * v;
        model.objective_trace.push_back(
            0.5 * w_norm2 - std::accumulate(alpha.begin(), alpha.end(), 0.0));
        if (max_violation < params.tol) break;
    }

    model.weights.assign(w.begin(), w.begin() + dim);
    model.bias = w[dim];
    model.final_objective = primal_objective(model, x, y);
    return model;
}

double decision_value(const Model& model, std::span<const double> x) {
    if (x.size() != model.weights.size()) throw Error("svm: feature dimension mismatch");
    double s = model.bias;
    for (std::size_t j = 0; j < x.size(); ++j) s += model.weights[j] * x[j];
    return s;
}

std::vector<int> predict(const Model& model, const numerics::DenseMatrix& x) {
    if (x.rows() > 0 && x.cols() != model.weights.size()) {
        throw Error("svm: feature dimension mismatch");
    }
    std::vector<int> labels(x.rows());
    for (std::size_t i = 0; i < x.rows(); ++i) {
        labels[i] = decision_value(model, x.row(i)) > 0.0 ? 1 : 0;
    }
    return labels;
}

double primal_objective(const Model& model, const numerics::DenseMatrix& x,
                        std::span<const int> y) {
    double reg = model.bias * model.bias;
    for (double v : model.weights) reg += v * v;
    double hinge = 0.0;
    for (std::size_t i = 0; i < x.rows(); ++i) {
        const double sign = y[i] == 1 ? 1.0 : -1.0;
        hinge += std::max(0.0, 1.0 - sign * decision_value(model, x.row(i)));
    }
    return 0.5 * reg + model.params.c * hinge;
}

void save(const Model& model, std::ostream& out) {
    out << std::setprecision(17);
    out << "mrpred-model 1 svm\n";
    out << "c " << model.params.c << '\n';
    out << "max_iter " << model.params.max_iter << '\n';
    out << "tol " << model.params.tol << '\n';
    out << "seed " << model.params.seed << '\n';
    out << "final_objective " << model.final_objective << '\n';
    out << "weights " << model.weights.size() << '\n';
    for (std::size_t j = 0; j < model.weights.size(); ++j) {
        if (j > 0) out << ' ';
        out << model.weights[j];
    }
    out << '\n';
    out << "bias " << model.bias << '\n';
    out << "trace " << model.objective_trace.size() << '\n';
    for (std::size_t j = 0; j < model.objective_trace.size(); ++j) {
        if (j > 0) out << ' ';
        out << model.objective_trace[j];
    }
    out << '\n';
    out << "end\n";
}

Model load(std::istream& in) {
    std::string magic;
    int version = 0;
    std::string kind;
    if (!(in >> magic >> version >> kind) || magic != "mrpred-model") {
        throw Error("model load: bad header");
    }
    if (version != 1) throw Error("model load: unsupported version");
    if (kind != "svm") throw Error("model load: not an svm model");

    Model model;
    auto expect_key = [&](std::string_view key) {
        std::string word;
        if (!(in >> word) || word != key) {
            throw Error("model load: expected '" + std::string(key) + "'");
        }
    };
    expect_key("c");
    in >> model.params.c;
    expect_key("max_iter");
    in >> model.params.max_iter;
    expect_key("tol");
    in >> model.params.tol;
    expect_key("seed");
    in >> model.params.seed;
    expect_key("final_objective");
    in >> model.final_objective;
    expect_key("weights");
    std::size_t dim = 0;
    in >> dim;
    model.weights.resize(dim);
    for (double& v : model.weights) in >> v;
    expect_key("bias");
    in >> model.bias;
    expect_key("trace");
    std::size_t trace_len = 0;
    in >> trace_len;
    model.objective_trace.resize(trace_len);
    for (double& v : model.objective_trace) in >> v;
    expect_key("end");
    if (!in) throw Error("model load: truncated svm model");
    return model;
}

}  // namespace mrpred::svm
