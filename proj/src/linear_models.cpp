#include "bpt/linear_models.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include "bpt/binary_io.hpp"
#include "bpt/rng.hpp"

namespace bpt {

namespace {

void require(bool ok, const std::string& msg) {
    if (!ok) throw InvalidArgument(msg);
}

int checked_dimension(const std::vector<LabeledExample>& data) {
    require(!data.empty(), "training data must be nonempty");
    const int d = static_cast<int>(data.front().features.size());
    for (const auto& ex : data) {
        require(static_cast<int>(ex.features.size()) == d, "inconsistent feature dimensions");
        require(ex.label == 1 || ex.label == -1, "labels must be +1 or -1");
    }
    return d;
}

struct Standardizer {
    std::vector<double> mean;
    std::vector<double> scale;  // per-dimension stddev, floored away from 0

    static Standardizer fit(const std::vector<LabeledExample>& data, int d) {
        Standardizer s;
        s.mean.assign(static_cast<std::size_t>(d), 0.0);
        s.scale.assign(static_cast<std::size_t>(d), 1.0);
        const double m = static_cast<double>(data.size());
        for (const auto& ex : data)
            for (int j = 0; j < d; ++j) s.mean[static_cast<std::size_t>(j)] += ex.features[static_cast<std::size_t>(j)];
        for (auto& v : s.mean) v /= m;
        std::vector<double> var(static_cast<std::size_t>(d), 0.0);
        for (const auto& ex : data)
            for (int j = 0; j < d; ++j) {
                const double c = ex.features[static_cast<std::size_t>(j)] - s.mean[static_cast<std::size_t>(j)];
                var[static_cast<std::size_t>(j)] += c * c;
            }
        for (int j = 0; j < d; ++j) {
            const double v = var[static_cast<std::size_t>(j)] / m;
            s.scale[static_cast<std::size_t>(j)] = v > 1e-12 ? std::sqrt(v) : 1.0;
        }
        return s;
    }
};

// Loss interface used by the shared SGD loop: value(margin) and the factor
// g with dLoss/dscore = g * (-y), i.e. g = 1 for an active hinge and
// sigmoid(-margin) for the logistic loss.
struct HingeLoss {
    static double value(double margin) { return std::max(0.0, 1.0 - margin); }
    static double slope(double margin) { return margin < 1.0 ? 1.0 : 0.0; }
};

struct LogLoss {
    static double value(double margin) {
        // log(1 + exp(-margin)) without overflow.
        return margin > 0.0 ? std::log1p(std::exp(-margin)) : -margin + std::log1p(std::exp(margin));
    }
    static double slope(double margin) { return 1.0 / (1.0 + std::exp(margin)); }
};

template <typename Loss>
double objective_impl(const LinearModel& m, const std::vector<LabeledExample>& data, double l2) {
    require(!data.empty(), "objective needs data");
    double loss = 0.0;
    for (const auto& ex : data) {
        require(static_cast<int>(ex.features.size()) == m.dimension(), "dimension mismatch");
        const double margin = ex.label * decide(m, ex.features);
        loss += Loss::value(margin);
    }
    loss /= static_cast<double>(data.size());
    double reg = 0.0;
    for (double w : m.weights) reg += w * w;
    return loss + 0.5 * l2 * reg;
}

template <typename Loss>
Gradient gradient_impl(const LinearModel& m, const std::vector<LabeledExample>& data, double l2) {
    require(!data.empty(), "gradient needs data");
    const int d = m.dimension();
    Gradient g;
    g.weights.assign(static_cast<std::size_t>(d), 0.0);
    const double inv_m = 1.0 / static_cast<double>(data.size());
    for (const auto& ex : data) {
        require(static_cast<int>(ex.features.size()) == d, "dimension mismatch");
        const double margin = ex.label * decide(m, ex.features);
        const double coeff = -ex.label * Loss::slope(margin) * inv_m;
        if (coeff == 0.0) continue;
        for (int j = 0; j < d; ++j) g.weights[static_cast<std::size_t>(j)] += coeff * ex.features[static_cast<std::size_t>(j)];
        g.bias += coeff;
    }
    for (int j = 0; j < d; ++j) g.weights[static_cast<std::size_t>(j)] += l2 * m.weights[static_cast<std::size_t>(j)];
    return g;
}

template <typename Loss>
LinearModel train_impl(const std::vector<LabeledExample>& data, const TrainConfig& cfg,
                       const std::optional<LinearModel>& warm_start) {
    const int d = checked_dimension(data);
    require(cfg.epochs >= 0, "epochs must be >= 0");
    require(cfg.batch_size >= 1, "batch_size must be >= 1");
    require(cfg.learning_rate > 0.0, "learning_rate must be > 0");
    require(cfg.l2 >= 0.0, "l2 must be >= 0");
    if (warm_start)
        require(warm_start->dimension() == d, "warm start dimension mismatch");
    if (!cfg.allow_single_class) {
        bool pos = false, neg = false;
        for (const auto& ex : data) (ex.label == 1 ? pos : neg) = true;
        require(pos && neg, "single-class data: decision function degenerate");
    }
    if (cfg.epochs == 0) return warm_start ? *warm_start : LinearModel::zeros(d);

    const Standardizer std_ = Standardizer::fit(data, d);
    std::vector<LabeledExample> z(data.size());
    for (std::size_t i = 0; i < data.size(); ++i) {
        z[i].label = data[i].label;
        z[i].features.resize(static_cast<std::size_t>(d));
        for (int j = 0; j < d; ++j)
            z[i].features[static_cast<std::size_t>(j)] =
                (data[i].features[static_cast<std::size_t>(j)] - std_.mean[static_cast<std::size_t>(j)]) /
                std_.scale[static_cast<std::size_t>(j)];
    }

    // Warm start arrives in raw feature space; lift it into the standardized
    // space the optimizer works in.
    LinearModel cur = LinearModel::zeros(d);
    if (warm_start) {
        for (int j = 0; j < d; ++j) {
            cur.weights[static_cast<std::size_t>(j)] =
                warm_start->weights[static_cast<std::size_t>(j)] * std_.scale[static_cast<std::size_t>(j)];
            cur.bias += warm_start->weights[static_cast<std::size_t>(j)] * std_.mean[static_cast<std::size_t>(j)];
        }
        cur.bias += warm_start->bias;
    }

    LinearModel best = cur;
    double best_obj = objective_impl<Loss>(cur, z, cfg.l2);

    Rng rng(cfg.seed);
    std::vector<std::size_t> order(z.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::vector<double> grad_w(static_cast<std::size_t>(d));
    long t = 0;
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        rng.shuffle(order);
        for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(cfg.batch_size)) {
            const std::size_t stop = std::min(order.size(), start + static_cast<std::size_t>(cfg.batch_size));
            const double inv_b = 1.0 / static_cast<double>(stop - start);
            std::fill(grad_w.begin(), grad_w.end(), 0.0);
            double grad_b = 0.0;
            for (std::size_t idx = start; idx < stop; ++idx) {
                const auto& ex = z[order[idx]];
                const double margin = ex.label * decide(cur, ex.features);
                const double coeff = -ex.label * Loss::slope(margin) * inv_b;
                if (coeff == 0.0) continue;
                for (int j = 0; j < d; ++j)
                    grad_w[static_cast<std::size_t>(j)] += coeff * ex.features[static_cast<std::size_t>(j)];
                grad_b += coeff;
            }
            const double eta = cfg.learning_rate / (1.0 + cfg.l2 * static_cast<double>(t));
            for (int j = 0; j < d; ++j) {
                auto& w = cur.weights[static_cast<std::size_t>(j)];
                w -= eta * (grad_w[static_cast<std::size_t>(j)] + cfg.l2 * w);
            }
            cur.bias -= eta * grad_b;
            ++t;
        }
        const double obj = objective_impl<Loss>(cur, z, cfg.l2);
        if (obj < best_obj) {
            best_obj = obj;
            best = cur;
        }
    }

    // Fold the standardization into the returned model so decide() consumes
    // raw features: w'_j = w_j / sigma_j, b' = b - sum_j w_j mu_j / sigma_j.
    LinearModel out = LinearModel::zeros(d);
    out.bias = best.bias;
    for (int j = 0; j < d; ++j) {
        out.weights[static_cast<std::size_t>(j)] =
            best.weights[static_cast<std::size_t>(j)] / std_.scale[static_cast<std::size_t>(j)];
        out.bias -= best.weights[static_cast<std::size_t>(j)] * std_.mean[static_cast<std::size_t>(j)] /
                    std_.scale[static_cast<std::size_t>(j)];
    }
    return out;
}

}  // namespace

LinearModel train_svm(const std::vector<LabeledExample>& data, const TrainConfig& cfg,
                      const std::optional<LinearModel>& warm_start) {
    return train_impl<HingeLoss>(data, cfg, warm_start);
}

LinearModel train_logistic(const std::vector<LabeledExample>& data, const TrainConfig& cfg,
                           const std::optional<LinearModel>& warm_start) {
    return train_impl<LogLoss>(data, cfg, warm_start);
}

double decide(const LinearModel& model, const std::vector<double>& features) {
    require(static_cast<int>(features.size()) == model.dimension(), "dimension mismatch in decide");
    double s = model.bias;
    for (std::size_t j = 0; j < features.size(); ++j) s += model.weights[j] * features[j];
    return s;
}

int predict(const LinearModel& model, const std::vector<double>& features) {
    return decide(model, features) > 0.0 ? 1 : -1;
}

double svm_objective(const LinearModel& m, const std::vector<LabeledExample>& data, double l2) {
    return objective_impl<HingeLoss>(m, data, l2);
}

Gradient svm_gradient(const LinearModel& m, const std::vector<LabeledExample>& data, double l2) {
    return gradient_impl<HingeLoss>(m, data, l2);
}

double logistic_objective(const LinearModel& m, const std::vector<LabeledExample>& data, double l2) {
    return objective_impl<LogLoss>(m, data, l2);
}

Gradient logistic_gradient(const LinearModel& m, const std::vector<LabeledExample>& data, double l2) {
    return gradient_impl<LogLoss>(m, data, l2);
}

PcaModel pca_fit(const std::vector<std::vector<double>>& data, int k, std::uint64_t seed) {
    require(!data.empty(), "pca needs data");
    const int d = static_cast<int>(data.front().size());
    require(k >= 1 && k <= d, "pca requires 1 <= k <= dimension");
    require(d <= static_cast<int>(data.size()), "pca requires dimension <= #data");
    for (const auto& x : data)
        require(static_cast<int>(x.size()) == d, "inconsistent pca input dimensions");

    PcaModel model;
    model.mean.assign(static_cast<std::size_t>(d), 0.0);
    for (const auto& x : data)
        for (int j = 0; j < d; ++j) model.mean[static_cast<std::size_t>(j)] += x[static_cast<std::size_t>(j)];
    for (auto& v : model.mean) v /= static_cast<double>(data.size());

    // Dense covariance; teacher-side dimensionalities stay in the hundreds.
    std::vector<double> cov(static_cast<std::size_t>(d) * d, 0.0);
    std::vector<double> centered(static_cast<std::size_t>(d));
    for (const auto& x : data) {
        for (int j = 0; j < d; ++j)
            centered[static_cast<std::size_t>(j)] = x[static_cast<std::size_t>(j)] - model.mean[static_cast<std::size_t>(j)];
        for (int i = 0; i < d; ++i) {
            const double ci = centered[static_cast<std::size_t>(i)];
            if (ci == 0.0) continue;
            double* row = cov.data() + static_cast<std::size_t>(i) * d;
            for (int j = 0; j < d; ++j) row[j] += ci * centered[static_cast<std::size_t>(j)];
        }
    }
    const double denom = data.size() > 1 ? static_cast<double>(data.size() - 1) : 1.0;
    for (auto& v : cov) v /= denom;

    Rng rng(seed);
    auto matvec = [&](const std::vector<double>& v, std::vector<double>& out) {
        for (int i = 0; i < d; ++i) {
            const double* row = cov.data() + static_cast<std::size_t>(i) * d;
            double acc = 0.0;
            for (int j = 0; j < d; ++j) acc += row[j] * v[static_cast<std::size_t>(j)];
            out[static_cast<std::size_t>(i)] = acc;
        }
    };
    auto deflate = [&](std::vector<double>& v) {
        for (const auto& q : model.components) {
            double dot = 0.0;
            for (int j = 0; j < d; ++j) dot += q[static_cast<std::size_t>(j)] * v[static_cast<std::size_t>(j)];
            for (int j = 0; j < d; ++j) v[static_cast<std::size_t>(j)] -= dot * q[static_cast<std::size_t>(j)];
        }
    };
    auto normalize = [&](std::vector<double>& v) {
        double norm = 0.0;
        for (double x : v) norm += x * x;
        norm = std::sqrt(norm);
        if (norm > 0.0)
            for (double& x : v) x /= norm;
        return norm;
    };

    std::vector<double> v(static_cast<std::size_t>(d)), w(static_cast<std::size_t>(d));
    for (int comp = 0; comp < k; ++comp) {
        for (auto& x : v) x = rng.normal();
        deflate(v);
        if (normalize(v) == 0.0) {
            // Degenerate draw; fall back to the first basis direction not yet spanned.
            v.assign(static_cast<std::size_t>(d), 0.0);
            v[static_cast<std::size_t>(comp)] = 1.0;
            deflate(v);
            normalize(v);
        }
        double lambda_prev = 0.0;
        for (int it = 0; it < 1000; ++it) {
            matvec(v, w);
            deflate(w);
            const double norm = normalize(w);
            if (norm <= 1e-300) break;  // remaining spectrum is numerically zero
            double align = 0.0;
            for (int j = 0; j < d; ++j) align += w[static_cast<std::size_t>(j)] * v[static_cast<std::size_t>(j)];
            if (align < 0.0)
                for (auto& x : w) x = -x;
            v.swap(w);
            if (std::abs(norm - lambda_prev) <= 1e-12 * std::max(1.0, norm)) break;
            lambda_prev = norm;
        }
        model.components.push_back(v);
    }
    return model;
}

std::vector<double> pca_transform(const PcaModel& m, const std::vector<double>& x) {
    require(static_cast<int>(x.size()) == m.input_dimension(), "pca transform dimension mismatch");
    std::vector<double> out(static_cast<std::size_t>(m.k()), 0.0);
    for (int c = 0; c < m.k(); ++c) {
        const auto& q = m.components[static_cast<std::size_t>(c)];
        double acc = 0.0;
        for (std::size_t j = 0; j < x.size(); ++j) acc += q[j] * (x[j] - m.mean[j]);
        out[static_cast<std::size_t>(c)] = acc;
    }
    return out;
}

double f1_score(double precision, double recall) {
    const double denom = precision + recall;
    return denom > 0.0 ? 2.0 * precision * recall / denom : 0.0;
}

MetricsRecord compute_metrics(const std::vector<int>& predicted, const std::vector<int>& truth) {
    require(!predicted.empty(), "metrics need at least one prediction");
    require(predicted.size() == truth.size(), "prediction/truth length mismatch");
    MetricsRecord r;
    for (std::size_t i = 0; i < predicted.size(); ++i) {
        require(predicted[i] == 1 || predicted[i] == -1, "predictions must be +1/-1");
        require(truth[i] == 1 || truth[i] == -1, "truth must be +1/-1");
        if (predicted[i] == 1)
            (truth[i] == 1 ? r.tp : r.fp)++;
        else
            (truth[i] == -1 ? r.tn : r.fn)++;
    }
    const double total = static_cast<double>(r.tp + r.fp + r.tn + r.fn);
    r.accuracy = static_cast<double>(r.tp + r.tn) / total;
    r.precision = (r.tp + r.fp) > 0 ? static_cast<double>(r.tp) / static_cast<double>(r.tp + r.fp) : 0.0;
    r.recall = (r.tp + r.fn) > 0 ? static_cast<double>(r.tp) / static_cast<double>(r.tp + r.fn) : 0.0;
    r.f1 = f1_score(r.precision, r.recall);
    return r;
}

void save_model(const std::string& path, const LinearModel& model) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FormatError("cannot open model file for writing: " + path);
    out.write("BPTM", 4);
    write_u32(out, 1u);
    write_u32(out, static_cast<std::uint32_t>(model.dimension()));
    write_f64(out, model.bias);
    for (double w : model.weights) write_f64(out, w);
    if (!out) throw FormatError("failed writing model file: " + path);
}

LinearModel load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open model file: " + path);
    char magic[4];
    in.read(magic, 4);
    if (!in || std::string(magic, 4) != "BPTM") throw FormatError("bad model magic in " + path);
    const std::uint32_t version = read_u32(in);
    if (version != 1u) throw FormatError("unsupported model version in " + path);
    const std::uint32_t dim = read_u32(in);
    LinearModel m;
    m.bias = read_f64(in);
    m.weights.resize(dim);
    for (auto& w : m.weights) w = read_f64(in);
    if (!std::isfinite(m.bias)) throw FormatError("non-finite bias in " + path);
    for (double w : m.weights)
        if (!std::isfinite(w)) throw FormatError("non-finite weight in " + path);
    in.peek();
    if (!in.eof()) throw FormatError("trailing bytes in model file " + path);
    return m;
}

}  // namespace bpt
