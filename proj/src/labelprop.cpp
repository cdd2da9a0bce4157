#include "mrpred/labelprop.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <ostream>

#include "mrpred/error.hpp"

namespace mrpred::labelprop {

std::string_view kernel_name(Kernel k) {
    return k == Kernel::kKnn ? "knn" : "rbf";
}

Kernel kernel_from_name(std::string_view name) {
    if (name == "knn") return Kernel::kKnn;
    if (name == "rbf") return Kernel::kRbf;
    throw Error("unknown kernel: " + std::string(name));
}

numerics::DenseMatrix build_transition(const numerics::DenseMatrix& weights) {
    if (weights.rows() != weights.cols()) throw Error("build_transition: matrix not square");
    const std::size_t n = weights.rows();
    numerics::DenseMatrix t(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        double col_sum = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (weights.at(i, j) < 0.0) throw Error("build_transition: negative weight");
            col_sum += weights.at(i, j);
        }
        if (col_sum == 0.0) {
            const double uniform = 1.0 / static_cast<double>(n);
            for (std::size_t i = 0; i < n; ++i) t.at(i, j) = uniform;
        } else {
            for (std::size_t i = 0; i < n; ++i) t.at(i, j) = weights.at(i, j) / col_sum;
        }
    }
    return t;
}

namespace {

void check_params(const Params& p) {
    if (p.max_iter == 0) throw Error("labelprop: max_iter must be positive");
    if (!(p.tol > 0.0)) throw Error("labelprop: tol must be positive");
}

numerics::DenseMatrix kernel_weights(const numerics::DenseMatrix& points, const Params& p) {
    if (p.kernel == Kernel::kKnn) return numerics::knn_weights(points, p.n_neighbors);
    return numerics::rbf_weights(points, p.gamma);
}

double squared_distance(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

int argmax_row(double p0, double p1) {
    return p1 > p0 ? 1 : 0;  // ties toward class 0
}

}  // namespace

Model fit(const numerics::DenseMatrix& x_labeled, std::span<const int> y_labeled,
          const numerics::DenseMatrix& x_unlabeled, const Params& params) {
    check_params(params);
    const std::size_t n_labeled = x_labeled.rows();
    const std::size_t n_unlabeled = x_unlabeled.rows();
    const std::size_t n = n_labeled + n_unlabeled;
    if (n_labeled == 0) throw Error("labelprop: no labeled points");
    if (y_labeled.size() != n_labeled) throw Error("labelprop: label count mismatch");
    if (n_unlabeled > 0 && x_unlabeled.cols() != x_labeled.cols()) {
        throw Error("labelprop: feature dimension mismatch");
    }
    if (n < 2) throw Error("labelprop: need at least 2 points");
    for (int y : y_labeled) {
        if (y != 0 && y != 1) throw Error("labelprop: labels must be 0 or 1");
    }

    Model model;
    model.params = params;
    model.training_points = numerics::DenseMatrix(n, x_labeled.cols());
    for (std::size_t i = 0; i < n_labeled; ++i) {
        std::ranges::copy(x_labeled.row(i), model.training_points.row(i).begin());
    }
    for (std::size_t i = 0; i < n_unlabeled; ++i) {
        std::ranges::copy(x_unlabeled.row(i), model.training_points.row(n_labeled + i).begin());
    }
    if (!model.training_points.all_finite()) {
        throw Error("labelprop: non-finite feature values");
    }
    model.labeled_mask.assign(n, false);
    std::fill(model.labeled_mask.begin(), model.labeled_mask.begin() + n_labeled, true);

    const numerics::DenseMatrix transition =
        build_transition(kernel_weights(model.training_points, params));

    numerics::DenseMatrix y(n, 2, 0.5);
    for (std::size_t i = 0; i < n_labeled; ++i) {
        y.at(i, 0) = y_labeled[i] == 0 ? 1.0 : 0.0;
        y.at(i, 1) = y_labeled[i] == 1 ? 1.0 : 0.0;
    }

    for (std::size_t iter = 1; iter <= params.max_iter; ++iter) {
        numerics::DenseMatrix next = numerics::multiply(transition, y);
        for (std::size_t i = 0; i < n; ++i) {
            const double row_sum = next.at(i, 0) + next.at(i, 1);
            if (row_sum == 0.0) {
                next.at(i, 0) = 0.5;
                next.at(i, 1) = 0.5;
            } else {
                next.at(i, 0) /= row_sum;
                next.at(i, 1) /= row_sum;
            }
        }
        for (std::size_t i = 0; i < n_labeled; ++i) {
            next.at(i, 0) = y_labeled[i] == 0 ? 1.0 : 0.0;
            next.at(i, 1) = y_labeled[i] == 1 ? 1.0 : 0.0;
        }
        double delta = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            delta = std::max(delta, std::fabs(next.at(i, 0) - y.at(i, 0)));
            delta = std::max(delta, std::fabs(next.at(i, 1) - y.at(i, 1)));
        }
        y = std::move(next);
        model.iterations_run = iter;
        if (delta < params.tol) {
            model.converged = true;
            break;
        }
    }
    model.label_distributions = std::move(y);
    return model;
}

std::vector<int> predict(const Model& model, const numerics::DenseMatrix& x_test,
                         std::size_t* zero_weight_count) {
    const std::size_t n_train = model.training_points.rows();
    if (x_test.rows() > 0 && x_test.cols() != model.training_points.cols()) {
        throw Error("labelprop: test feature dimension mismatch");
    }
    std::vector<int> labels(x_test.rows(), 0);
    std::vector<double> weights(n_train);
    std::vector<std::pair<double, std::size_t>> order(n_train);
    for (std::size_t t = 0; t < x_test.rows(); ++t) {
        std::fill(weights.begin(), weights.end(), 0.0);
        if (model.params.kernel == Kernel::kKnn) {
            for (std::size_t j = 0; j < n_train; ++j) {
                order[j] = {squared_distance(x_test.row(t), model.training_points.row(j)), j};
            }
            std::sort(order.begin(), order.end());
            const std::size_t k = std::min(model.params.n_neighbors, n_train);
            for (std::size_t r = 0; r < k; ++r) weights[order[r].second] = 1.0;
        } else {
            for (std::size_t j = 0; j < n_train; ++j) {
                weights[j] = std::exp(
                    -model.params.gamma *
                    squared_distance(x_test.row(t), model.training_points.row(j)));
            }
        }
        double score0 = 0.0;
        double score1 = 0.0;
        bool any = false;
        for (std::size_t j = 0; j < n_train; ++j) {
            if (weights[j] == 0.0) continue;
            any = true;
            score0 += weights[j] * model.label_distributions.at(j, 0);
            score1 += weights[j] * model.label_distributions.at(j, 1);
        }
        if (!any) {
            if (zero_weight_count != nullptr) ++*zero_weight_count;
            labels[t] = 0;
            continue;
        }
        labels[t] = argmax_row(score0, score1);
    }
    return labels;
}

std::vector<int> transductive_labels(const Model& model) {
    std::vector<int> labels(model.label_distributions.rows());
    for (std::size_t i = 0; i < labels.size(); ++i) {
        labels[i] = argmax_row(model.label_distributions.at(i, 0),
                               model.label_distributions.at(i, 1));
    }
    return labels;
}

// ---------------------------------------------------------------------------
// Serialization (shared "mrpred-model" text format, version 1)
// ---------------------------------------------------------------------------

namespace {

void write_matrix(std::ostream& out, std::string_view tag,
                  const numerics::DenseMatrix& m) {
    out << tag << ' ' << m.rows() << ' ' << m.cols() << '\n';
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t j = 0; j < m.cols(); ++j) {
            if (j > 0) out << ' ';
            out << m.at(i, j);
        }
        out << '\n';
    }
}

numerics::DenseMatrix read_matrix(std::istream& in, std::string_view tag) {
    std::string word;
    std::size_t rows = 0;
    std::size_t cols = 0;
    if (!(in >> word) || word != tag || !(in >> rows >> cols)) {
        throw Error("model load: expected '" + std::string(tag) + "' section");
    }
    numerics::DenseMatrix m(rows, cols);
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t j = 0; j < cols; ++j) {
            if (!(in >> m.at(i, j))) throw Error("model load: truncated matrix");
        }
    }
    return m;
}

}  // namespace

void save(const Model& model, std::ostream& out) {
    out << std::setprecision(17);
    out << "mrpred-model 1 labelprop\n";
    out << "kernel " << kernel_name(model.params.kernel) << '\n';
    out << "n_neighbors " << model.params.n_neighbors << '\n';
    out << "gamma " << model.params.gamma << '\n';
    out << "max_iter " << model.params.max_iter << '\n';
    out << "tol " << model.params.tol << '\n';
    out << "iterations_run " << model.iterations_run << '\n';
    out << "converged " << (model.converged ? 1 : 0) << '\n';
    write_matrix(out, "points", model.training_points);
    out << "mask";
    for (bool b : model.labeled_mask) out << ' ' << (b ? 1 : 0);
    out << '\n';
    write_matrix(out, "distributions", model.label_distributions);
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
    if (kind != "labelprop") throw Error("model load: not a labelprop model");

    Model model;
    auto expect_key = [&](std::string_view key) {
        std::string word;
        if (!(in >> word) || word != key) {
            throw Error("model load: expected '" + std::string(key) + "'");
        }
    };
    std::string kernel;
    expect_key("kernel");
    in >> kernel;
    model.params.kernel = kernel_from_name(kernel);
    expect_key("n_neighbors");
    in >> model.params.n_neighbors;
    expect_key("gamma");
    in >> model.params.gamma;
    expect_key("max_iter");
    in >> model.params.max_iter;
    expect_key("tol");
    in >> model.params.tol;
    expect_key("iterations_run");
    in >> model.iterations_run;
    expect_key("converged");
    int converged = 0;
    in >> converged;
    model.converged = converged != 0;
    if (!in) throw Error("model load: truncated parameter section");

    model.training_points = read_matrix(in, "points");
    expect_key("mask");
    model.labeled_mask.assign(model.training_points.rows(), false);
    for (std::size_t i = 0; i < model.labeled_mask.size(); ++i) {
        int bit = 0;
        if (!(in >> bit)) throw Error("model load: truncated mask");
        model.labeled_mask[i] = bit != 0;
    }
    model.label_distributions = read_matrix(in, "distributions");
    expect_key("end");
    return model;
}

}  // namespace mrpred::labelprop
