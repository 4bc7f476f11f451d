#include "bpt/error_dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace bpt {

namespace {

void require(bool ok, const std::string& msg) {
    if (!ok) throw InvalidArgument(msg);
}

}  // namespace

TeacherProfile::TeacherProfile(double precision_, double recall_)
    : precision(precision_), recall(recall_) {
    require(precision >= 0.0 && precision <= 1.0, "teacher precision must be in [0,1]");
    require(recall >= 0.0 && recall <= 1.0, "teacher recall must be in [0,1]");
}

TransitionMatrix::TransitionMatrix(int n, double fill) : n_(n) {
    require(n >= 1, "transition matrix dimension must be >= 1");
    entries_.assign(static_cast<std::size_t>(n) * n, fill);
}

ErrorState TransitionMatrix::apply(const ErrorState& e) const {
    require(static_cast<int>(e.size()) == n_, "error state dimension mismatch");
    ErrorState out(e.size(), 0.0);
    for (int i = 0; i < n_; ++i) {
        double acc = 0.0;
        for (int j = 0; j < n_; ++j) acc += at(i, j) * e[static_cast<std::size_t>(j)];
        out[static_cast<std::size_t>(i)] = acc;
    }
    return out;
}

bool TransitionMatrix::is_zero() const {
    return std::all_of(entries_.begin(), entries_.end(), [](double v) { return v == 0.0; });
}

ConfusionMix::ConfusionMix(int n, std::vector<double> entries) : n_(n), entries_(std::move(entries)) {
    require(n >= 2, "confusion mix needs n >= 2");
    require(entries_.size() == static_cast<std::size_t>(n) * n, "confusion mix entry count mismatch");
    for (int i = 0; i < n; ++i) {
        require(at(i, i) == 0.0, "confusion mix diagonal must be exactly 0");
        for (int j = 0; j < n; ++j)
            require(at(i, j) >= 0.0 && at(i, j) <= 1.0, "confusion mix entries must be in [0,1]");
    }
    for (int j = 0; j < n; ++j) {
        double col = 0.0;
        for (int i = 0; i < n; ++i)
            if (i != j) col += at(i, j);
        require(std::abs(col - 1.0) <= 1e-9, "confusion mix column must sum to 1");
    }
}

ConfusionMix ConfusionMix::uniform(int n) {
    require(n >= 2, "confusion mix needs n >= 2");
    std::vector<double> a(static_cast<std::size_t>(n) * n, 1.0 / (n - 1));
    for (int i = 0; i < n; ++i) a[static_cast<std::size_t>(i) * n + i] = 0.0;
    return ConfusionMix(n, std::move(a));
}

TransitionMatrix build_binary_matrix(const TeacherProfile& positive, const TeacherProfile& negative) {
    if (positive.precision <= 0.0 || negative.precision <= 0.0)
        throw InvalidArgument("degenerate teacher: zero precision leaves the transition matrix undefined");
    TransitionMatrix m(2);
    m.at(0, 0) = 1.0 - negative.recall;
    m.at(0, 1) = (1.0 - positive.precision) / positive.precision * positive.recall;
    m.at(1, 0) = (1.0 - negative.precision) / negative.precision * negative.recall;
    m.at(1, 1) = 1.0 - positive.recall;
    return m;
}

TransitionMatrix build_multiclass_matrix(const std::vector<TeacherProfile>& profiles,
                                         const ConfusionMix& mix) {
    const int n = static_cast<int>(profiles.size());
    require(n >= 2, "multiclass matrix needs at least 2 profiles");
    require(n == mix.n(), "profile count and confusion mix dimension mismatch");
    for (const auto& t : profiles)
        if (t.precision <= 0.0)
            throw InvalidArgument("degenerate teacher: zero precision leaves the transition matrix undefined");

    TransitionMatrix m(n);
    for (int I = 0; I < n; ++I) {
        double removed = 0.0;
        for (int i = 0; i < n; ++i)
            if (i != I) removed += profiles[static_cast<std::size_t>(i)].recall * mix.at(i, I);
        m.at(I, I) = 1.0 - removed;
        const auto& tI = profiles[static_cast<std::size_t>(I)];
        const double off = (1.0 - tI.precision) / tI.precision * tI.recall;
        for (int j = 0; j < n; ++j)
            if (j != I) m.at(I, j) = off;
    }
    return m;
}

std::vector<double> symmetric_eigenvalues(double p, double r, int n) {
    require(p > 0.0, "symmetric eigenvalues need p > 0");
    require(n >= 2, "symmetric eigenvalues need n >= 2");
    std::vector<double> lambda(static_cast<std::size_t>(n), (p - r) / p);
    lambda.back() = (p + (n - 1) * r - n * p * r) / p;
    return lambda;
}

double spectral_radius(const TransitionMatrix& m, const SpectralRadiusOptions& opts) {
    const int n = m.n();
    for (double v : m.entries())
        require(v >= 0.0, "spectral_radius expects a nonnegative matrix");
    if (m.is_zero()) return 0.0;

    // Power iteration on B = M + I. B's Perron root is rho(M) + 1 and strictly
    // dominates |lambda + 1| for every other eigenvalue, so the iteration
    // cannot stall on +/- pairs of equal modulus.
    std::vector<double> x(static_cast<std::size_t>(n), 1.0 / std::sqrt(static_cast<double>(n)));
    std::vector<double> y(static_cast<std::size_t>(n));
    double estimate = 0.0;
    for (int it = 0; it < opts.max_iterations; ++it) {
        for (int i = 0; i < n; ++i) {
            double acc = x[static_cast<std::size_t>(i)];
            for (int j = 0; j < n; ++j) acc += m.at(i, j) * x[static_cast<std::size_t>(j)];
            y[static_cast<std::size_t>(i)] = acc;
        }
        double rayleigh = 0.0;
        for (int i = 0; i < n; ++i) rayleigh += x[static_cast<std::size_t>(i)] * y[static_cast<std::size_t>(i)];

        double residual = 0.0;
        for (int i = 0; i < n; ++i)
            residual = std::max(residual, std::abs(y[static_cast<std::size_t>(i)] -
                                                   rayleigh * x[static_cast<std::size_t>(i)]));

        const double scale = std::max(1.0, std::abs(rayleigh));
        const bool settled = std::abs(rayleigh - (estimate + 1.0)) <= opts.tolerance * scale &&
                             residual <= opts.tolerance * scale;
        estimate = rayleigh - 1.0;
        if (settled && it > 0) return estimate;

        double norm = 0.0;
        for (double v : y) norm += v * v;
        norm = std::sqrt(norm);
        for (int i = 0; i < n; ++i) x[static_cast<std::size_t>(i)] = y[static_cast<std::size_t>(i)] / norm;
    }
    throw ConvergenceError("spectral radius power iteration exceeded iteration cap", estimate);
}

std::vector<ErrorState> iterate_errors(const TransitionMatrix& m, const ErrorState& e0, int steps) {
    require(static_cast<int>(e0.size()) == m.n(), "error state dimension mismatch");
    require(steps >= 0, "steps must be >= 0");
    for (double v : e0) require(v >= 0.0, "error state entries must be >= 0");
    std::vector<ErrorState> trajectory;
    trajectory.reserve(static_cast<std::size_t>(steps) + 1);
    trajectory.push_back(e0);
    for (int k = 0; k < steps; ++k) trajectory.push_back(m.apply(trajectory.back()));
    return trajectory;
}

bool check_bpt_condition(const TeacherProfile& positive, const TeacherProfile& negative) {
    return positive.recall * negative.recall != 0.0 && positive.precision + negative.precision > 1.0;
}

namespace {

double log_choose(int n, int k) {
    return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

}  // namespace

double ensemble_misroute_probability(double p_accuracy, int n, int k) {
    require(p_accuracy >= 0.0 && p_accuracy <= 1.0, "p_accuracy must be in [0,1]");
    require(n >= 2, "ensemble size must be >= 2");
    if (k < 0 || k > n - 1) throw InvalidArgument("misroute count k out of range [0, n-1]");
    const double binom = std::exp(log_choose(n - 1, k));
    return binom * std::pow(p_accuracy, n - k) * std::pow(1.0 - p_accuracy, k);
}

double ensemble_correct_probability(double p_accuracy, double p_assemble, int n) {
    require(p_accuracy >= 0.0 && p_accuracy <= 1.0, "p_accuracy must be in [0,1]");
    require(p_assemble >= 0.0 && p_assemble <= 1.0, "p_assemble must be in [0,1]");
    require(n >= 2, "ensemble size must be >= 2");
    double total = 0.0;
    for (int k = 0; k < n; ++k)
        total += ensemble_misroute_probability(p_accuracy, n, k) * std::pow(p_assemble, k);
    return total;
}

}  // namespace bpt
