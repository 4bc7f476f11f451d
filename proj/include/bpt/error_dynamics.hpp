#pragma once

#include <vector>

#include "bpt/common.hpp"

namespace bpt {

// Precision/recall pair of an error-picking expert. Both in [0, 1].
struct TeacherProfile {
    TeacherProfile(double precision_, double recall_);

    double precision;
    double recall;
};

// Per-class mis-assignment counts (or rates). e[i] is the number of examples
// currently mis-assigned to class i; for the binary case, (alpha, beta) =
// (false positives, false negatives).
using ErrorState = std::vector<double>;

// Square nonnegative matrix driving the error recursion e(k+1) = M e(k).
class TransitionMatrix {
public:
    TransitionMatrix(int n, double fill = 0.0);

    int n() const { return n_; }
    double& at(int i, int j) { return entries_[static_cast<std::size_t>(i) * n_ + j]; }
    double at(int i, int j) const { return entries_[static_cast<std::size_t>(i) * n_ + j]; }
    const std::vector<double>& entries() const { return entries_; }

    ErrorState apply(const ErrorState& e) const;
    bool is_zero() const;

private:
    int n_;
    std::vector<double> entries_;  // row-major
};

// Mix matrix a[i][j]: proportion of examples mis-assigned to class j whose
// true class is i. Zero diagonal; every column sums to 1 over i != j.
class ConfusionMix {
public:
    ConfusionMix(int n, std::vector<double> entries);

    // a[i][j] = 1/(n-1) for all i != j.
    static ConfusionMix uniform(int n);

    int n() const { return n_; }
    double at(int i, int j) const { return entries_[static_cast<std::size_t>(i) * n_ + j]; }

private:
    int n_;
    std::vector<double> entries_;
};

// 2x2 transition matrix of the binary error recursion:
//   [ 1-R-,          (1-P+)/P+ * R+ ]
//   [ (1-P-)/P- * R-, 1-R+          ]
// Throws InvalidArgument("degenerate teacher ...") if either precision is 0.
TransitionMatrix build_binary_matrix(const TeacherProfile& positive, const TeacherProfile& negative);

// NxN transition matrix of the multi-class error recursion. Diagonal entry
// (I,I) = 1 - sum_{i != I} R_i * a[i][I]; off-diagonal (I,j) = (1-P_I)/P_I * R_I.
// Entries are constants; the recursion itself is linear.
TransitionMatrix build_multiclass_matrix(const std::vector<TeacherProfile>& profiles,
                                         const ConfusionMix& mix);

// Closed-form spectrum of the symmetric case (uniform mix, identical
// profiles): n-1 copies of (p-r)/p followed by (p + (n-1) r - n p r)/p.
std::vector<double> symmetric_eigenvalues(double p, double r, int n);

struct SpectralRadiusOptions {
    double tolerance = 1e-10;
    int max_iterations = 100000;
};

// Largest |eigenvalue| of a nonnegative matrix (its Perron root), by power
// iteration on M + I from the all-ones vector. The +I shift removes the
// cyclic-matrix stall without changing the dominant eigenpair ordering.
// Throws ConvergenceError carrying the last iterate if the cap is hit.
double spectral_radius(const TransitionMatrix& m, const SpectralRadiusOptions& opts = {});

// Trajectory [e(0), e(1), ..., e(steps)] under e(k+1) = M e(k).
std::vector<ErrorState> iterate_errors(const TransitionMatrix& m, const ErrorState& e0, int steps);

// Sufficient convergence condition for teacher-guided retraining:
// R+ R- != 0 and P+ + P- > 1.
bool check_bpt_condition(const TeacherProfile& positive, const TeacherProfile& negative);

// Probability that the designated one-vs-rest classifier is right while
// exactly k of the other n-1 misfire: C(n-1,k) p^(n-k) (1-p)^k.
// Binomial coefficients are evaluated in log space (stable through n = 64).
double ensemble_misroute_probability(double p_accuracy, int n, int k);

// Probability the full ensemble emits the right class:
// sum_{K=0}^{n-1} p_K * p_assemble^K.
double ensemble_correct_probability(double p_accuracy, double p_assemble, int n);

}  // namespace bpt
