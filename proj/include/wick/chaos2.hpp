#pragma once

#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "wick/errors.hpp"

namespace wick {

/// Finite-rank element f of the symmetric square of a discretized Hilbert
/// space: grid functions with inner product <u,v> = sum_i w_i u_i v_i.
/// `matrix` holds the kernel values, `weights` the grid metric. The
/// associated Hilbert-Schmidt operator acts as A_f u = F diag(w) u.
class Chaos2Kernel {
public:
    Chaos2Kernel(Eigen::MatrixXd matrix, Eigen::VectorXd weights, std::string label = "");

    int size() const { return static_cast<int>(weights_.size()); }
    const Eigen::MatrixXd& matrix() const { return matrix_; }
    const Eigen::VectorXd& weights() const { return weights_; }
    const std::string& label() const { return label_; }

    /// diag(sqrt w) F diag(sqrt w): the matrix of A_f in the orthonormal
    /// grid basis. Traces and quadratic-form sampling use this.
    const Eigen::MatrixXd& scaled() const { return scaled_; }

    double inner(const Chaos2Kernel& other) const;
    double hs_norm2() const { return inner(*this); }

    /// f = scale * h (x) h for a grid function h.
    static Chaos2Kernel rank_one(const Eigen::VectorXd& h, const Eigen::VectorXd& weights,
                                 double scale = 1.0, std::string label = "");

    void require_same_grid(const Chaos2Kernel& other) const;

    std::string to_json() const;
    static Chaos2Kernel from_json(const std::string& text);

private:
    Eigen::MatrixXd matrix_;
    Eigen::VectorXd weights_;
    Eigen::MatrixXd scaled_;
    std::string label_;
};

/// Kernel of the operator composition A_f A_g, i.e. the contraction
/// F diag(w) G. Not symmetric in general; symmetrize before reading it as
/// a second-chaos integrand.
Eigen::MatrixXd operator_apply(const Chaos2Kernel& f, const Chaos2Kernel& g);

Chaos2Kernel symmetrized(const Eigen::MatrixXd& m, const Eigen::VectorXd& weights,
                         std::string label = "");

/// Tr(A_{f_1} ... A_{f_k}) with the weight metric.
double trace_chain(const std::vector<const Chaos2Kernel*>& kernels);
double trace_power(const Chaos2Kernel& f, int m);

/// Joint cumulant of the second-chaos variables attached to the kernels:
/// 2^{m-1} sum over permutations sigma of the first m-1 kernels of
/// Tr(A_{f_sigma(1)} ... A_{f_sigma(m-1)} A_{f_m}); for identical kernels
/// this reduces to 2^{m-1} (m-1)! Tr(A_f^m).
double joint_cumulant_trace(const std::vector<Chaos2Kernel>& kernels, int max_m = 8);

/// One grouped term of a change-of-chaos expansion on 2-slot rows: the
/// diagrams that contract the same rows in the same chain order.
struct ChaosProductTerm {
    double coefficient = 0;                    // number of diagrams in the group
    std::vector<std::vector<std::string>> factor_words; // labels per chain factor
    std::vector<Eigen::MatrixXd> factors;      // contracted kernel per chain
};

/// The full change-of-chaos expansion of I2(f_1) <> ... <> I2(f_m) into
/// Wick products (w.r.t. the underlying Gaussian) of second-chaos
/// integrals of contracted kernels, grouped by contraction pattern and
/// keyed by the sorted factor words.
std::map<std::string, ChaosProductTerm>
chaos2_change_of_chaos_groups(const std::vector<Chaos2Kernel>& kernels);

/// The two-kernel decomposition
///   I2(f) <> I2(g) = I2(f) <>_W I2(g) + 2 I2(A_f g) + 2 I2(A_g f).
struct Chaos2ChangeOfChaos {
    struct Term {
        double coefficient;
        Chaos2Kernel kernel;
    };
    std::vector<Term> contraction_terms; // the 2 I2(A_f g) + 2 I2(A_g f) part
};
Chaos2ChangeOfChaos chaos2_change_of_chaos(const Chaos2Kernel& f, const Chaos2Kernel& g);

} // namespace wick
