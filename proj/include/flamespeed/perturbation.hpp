/** \file    perturbation.hpp
    \brief   Weak-flow expansion H_d(p) = |p| + delta a1 + delta^2 a2 + O(delta^3) in n dimensions.

    V(x) = sum_k lambda_k exp(2 pi i k.x) with complex lambda_k in C^n, k.lambda_k = 0
    and lambda_{-k} = conj(lambda_k).  For a unit direction p:

        a1 = p . lambda_0
        a2 = 1/2 sum_{k != 0} |p.lambda_k|^2 s_k / (4 pi^2 d^2 s_k^2 + (p.k)^2),   s_k = |k|^2 - (p.k)^2.

    The factor s_k in the numerator comes from the second-order term of |p + Dw|,
    (|Dw|^2 - (p.Dw)^2)/2.
*/
#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "flamespeed/cell_solver.hpp"
#include "flamespeed/flow_model.hpp"

namespace flamespeed {

struct FourierMode {
    std::vector<int> k;
    std::vector<std::complex<double>> lambda;
};

class VectorFieldFourier {
public:
    VectorFieldFourier() = default;
    explicit VectorFieldFourier(int dim) : dim_(dim) {}

    int dim() const { return dim_; }
    const std::vector<FourierMode>& modes() const { return modes_; }
    /// adds a mode; a repeated k accumulates into the existing coefficient
    void add(std::vector<int> k, std::vector<std::complex<double>> lambda);

    /// largest |k . lambda_k| / (|k| |lambda_k|) over k != 0 (0 for a divergence-free field)
    double divergence_defect() const;
    /// largest |lambda_{-k} - conj(lambda_k)|, with a missing partner counted as 0
    double reality_defect() const;
    bool incompressible(double tol = 1e-12) const { return divergence_defect() <= tol; }
    bool real_valued(double tol = 1e-12) const { return reality_defect() <= tol; }
    /// largest Euclidean |k|
    double max_wavenumber() const;

private:
    int dim_ = 0;
    std::vector<FourierMode> modes_;
};

/** Reads lines `k1 .. kn  re1 im1 .. ren imn`; blank lines and lines starting with '#' are skipped.
    The dimension is inferred from the first data line (3n tokens).  Throws std::runtime_error with the
    line number on malformed input. */
VectorFieldFourier read_vector_field(const std::string& path);
VectorFieldFourier parse_vector_field(const std::string& text);

/// Shear field V = (v(x2), 0) built from a flow spec (dimension 2).
VectorFieldFourier shear_field(const FlowSpec& v);

/** Random real, divergence-free field with modes 0 < |k| <= kmax and amplitude ~ |k|^-decay. */
VectorFieldFourier random_incompressible_field(int dim, int kmax, double decay, std::uint64_t seed);

struct DiophantineResult {
    bool ok = false;
    double margin = 0;              ///< min over 0 < |k| <= K of |p.k| |k|^beta
    std::vector<int> worst_k;       ///< lattice vector attaining the margin
};

/** Finite scan of the Diophantine condition |p.k| >= C / |k|^beta over 0 < |k| <= K (Euclidean).
    Throws std::invalid_argument unless |p| = 1 to 1e-12 and K >= 1. */
DiophantineResult diophantine_check(const std::vector<double>& p, int K, double beta, double C);

struct PerturbationResult {
    double alpha1 = 0;
    double alpha2 = 0;
    double H_approx = 0;
    int truncation_K = 0;           ///< largest |k| present (rounded up)
    double diophantine_margin = 0;  ///< min over the modes present of |p.k| |k|^beta with beta = 1
};

/** alpha1, alpha2 and |p| + delta alpha1 + delta^2 alpha2.
    Throws std::invalid_argument for non-unit p, d <= 0, a compressible or non-real field,
    or a dimension mismatch. */
PerturbationResult effective_speed_expansion(const VectorFieldFourier& V, const std::vector<double>& p, double d,
                                             double delta);

struct ShearCrossCheck {
    double H_solver = 0;
    double H_expansion = 0;
    double error = 0;
};

/** Viscous solver on the flow delta v versus the expansion, for a unit p = (gamma, mu). */
ShearCrossCheck cross_check_shear(const FlowSpec& v, const Momentum& p, double d, double delta, int grid_n = 0,
                                  const SolverOptions& opt = {});

}  // namespace flamespeed
