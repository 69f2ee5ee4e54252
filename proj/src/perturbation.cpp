#include "flamespeed/perturbation.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>

#include "flamespeed/problem.hpp"

namespace flamespeed {

namespace {

using cplx = std::complex<double>;

double norm2(const std::vector<int>& k) {
    double s = 0;
    for (int x : k) s += double(x) * x;
    return s;
}

double dot(const std::vector<double>& p, const std::vector<int>& k) {
    double s = 0;
    for (std::size_t i = 0; i < k.size(); ++i) s += p[i] * k[i];
    return s;
}

bool is_zero(const std::vector<int>& k) {
    return std::all_of(k.begin(), k.end(), [](int x) { return x == 0; });
}

void require_unit(const std::vector<double>& p, const char* who) {
    double s = 0;
    for (double x : p) s += x * x;
    if (p.empty() || std::abs(std::sqrt(s) - 1) > 1e-12)
        throw std::invalid_argument(std::string(who) + ": p must be a unit vector (rescale it first)");
}

// Neumaier summation of the terms sorted by magnitude, so the result does not depend on input order
double stable_sum(std::vector<double> terms) {
    std::sort(terms.begin(), terms.end(), [](double a, double b) { return std::abs(a) < std::abs(b); });
    double s = 0, c = 0;
    for (double t : terms) {
        const double u = s + t;
        c += std::abs(s) >= std::abs(t) ? (s - u) + t : (t - u) + s;
        s = u;
    }
    return s + c;
}

}  // namespace

void VectorFieldFourier::add(std::vector<int> k, std::vector<cplx> lambda) {
    if (int(k.size()) != dim_ || int(lambda.size()) != dim_)
        throw std::invalid_argument("VectorFieldFourier::add: dimension mismatch");
    for (auto& m : modes_)
        if (m.k == k) {
            for (int i = 0; i < dim_; ++i) m.lambda[i] += lambda[i];
            return;
        }
    modes_.push_back({std::move(k), std::move(lambda)});
}

double VectorFieldFourier::divergence_defect() const {
    double worst = 0;
    for (const auto& m : modes_) {
        if (is_zero(m.k)) continue;
        cplx s = 0;
        double lam = 0;
        for (int i = 0; i < dim_; ++i) {
            s += double(m.k[i]) * m.lambda[i];
            lam += std::norm(m.lambda[i]);
        }
        if (lam > 0) worst = std::max(worst, std::abs(s) / std::sqrt(norm2(m.k) * lam));
    }
    return worst;
}

double VectorFieldFourier::reality_defect() const {
    std::map<std::vector<int>, const FourierMode*> index;
    for (const auto& m : modes_) index[m.k] = &m;
    double worst = 0;
    for (const auto& m : modes_) {
        std::vector<int> neg(m.k);
        for (int& x : neg) x = -x;
        const auto it = index.find(neg);
        for (int i = 0; i < dim_; ++i) {
            const cplx partner = it == index.end() ? cplx(0) : it->second->lambda[i];
            worst = std::max(worst, std::abs(partner - std::conj(m.lambda[i])));
        }
    }
    return worst;
}

double VectorFieldFourier::max_wavenumber() const {
    double r = 0;
    for (const auto& m : modes_) r = std::max(r, std::sqrt(norm2(m.k)));
    return r;
}

VectorFieldFourier parse_vector_field(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    int lineno = 0, dim = 0;
    VectorFieldFourier field;
    while (std::getline(in, line)) {
        ++lineno;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        std::istringstream ls(line);
        std::vector<std::string> tok;
        for (std::string t; ls >> t;) tok.push_back(t);
        if (dim == 0) {
            if (tok.size() % 3 != 0) {
                throw std::runtime_error("vector field line " + std::to_string(lineno) +
                                         ": expected 3n tokens (n wavenumbers, n complex coefficients)");
            }
            dim = int(tok.size() / 3);
            field = VectorFieldFourier(dim);
        }
        if (int(tok.size()) != 3 * dim)
            throw std::runtime_error("vector field line " + std::to_string(lineno) + ": expected " +
                                     std::to_string(3 * dim) + " tokens, got " + std::to_string(tok.size()));
        std::vector<int> k(dim);
        std::vector<cplx> lam(dim);
        try {
            for (int i = 0; i < dim; ++i) {
                std::size_t used = 0;
                k[i] = std::stoi(tok[i], &used);
                if (used != tok[i].size()) throw std::invalid_argument("wavenumber");
            }
            for (int i = 0; i < dim; ++i) {
                std::size_t u1 = 0, u2 = 0;
                const double re = std::stod(tok[dim + 2 * i], &u1);
                const double im = std::stod(tok[dim + 2 * i + 1], &u2);
                if (u1 != tok[dim + 2 * i].size() || u2 != tok[dim + 2 * i + 1].size() || !std::isfinite(re) ||
                    !std::isfinite(im))
                    throw std::invalid_argument("coefficient");
                lam[i] = {re, im};
            }
        } catch (const std::exception&) {
            throw std::runtime_error("vector field line " + std::to_string(lineno) + ": malformed number");
        }
        field.add(std::move(k), std::move(lam));
    }
    if (dim == 0) throw std::runtime_error("vector field: no data lines");
    return field;
}

VectorFieldFourier read_vector_field(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open vector field file " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_vector_field(ss.str());
}

VectorFieldFourier shear_field(const FlowSpec& v) {
    VectorFieldFourier V(2);
    V.add({0, 0}, {v.offset, 0.0});
    const std::size_t K = std::max(v.cosine.size(), v.sine.size());
    for (std::size_t j = 0; j < K; ++j) {
        const double a = j < v.cosine.size() ? v.cosine[j] : 0.0;
        const double b = j < v.sine.size() ? v.sine[j] : 0.0;
        if (a == 0 && b == 0) continue;
        // a cos + b sin = c e^{i t} + conj(c) e^{-i t} with c = (a - i b)/2
        const cplx c(a / 2, -b / 2);
        const int k = int(j + 1);
        V.add({0, k}, {c, 0.0});
        V.add({0, -k}, {std::conj(c), 0.0});
    }
    return V;
}

VectorFieldFourier random_incompressible_field(int dim, int kmax, double decay, std::uint64_t seed) {
    if (dim < 2) throw std::invalid_argument("random_incompressible_field: need dim >= 2");
    if (kmax < 1) throw std::invalid_argument("random_incompressible_field: need kmax >= 1");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    VectorFieldFourier V(dim);

    std::vector<double> mean(dim);
    for (double& x : mean) x = 0.3 * normal(rng);
    std::vector<cplx> lam0(dim);
    for (int i = 0; i < dim; ++i) lam0[i] = mean[i];
    V.add(std::vector<int>(dim, 0), lam0);

    // enumerate the half lattice (first nonzero entry positive) inside the ball |k| <= kmax
    std::vector<int> k(dim, -kmax);
    for (;;) {
        const double r2 = norm2(k);
        const auto lead = std::find_if(k.begin(), k.end(), [](int x) { return x != 0; });
        if (r2 > 0 && r2 <= double(kmax) * kmax && *lead > 0) {
            std::vector<cplx> lam(dim);
            for (auto& x : lam) x = {normal(rng), normal(rng)};
            // project out the k component: lam -= (k.lam / |k|^2) k
            cplx s = 0;
            for (int i = 0; i < dim; ++i) s += double(k[i]) * lam[i];
            const double amp = std::pow(std::sqrt(r2), -decay);
            for (int i = 0; i < dim; ++i) lam[i] = amp * (lam[i] - s * double(k[i]) / r2);
            std::vector<int> neg(k);
            for (int& x : neg) x = -x;
            std::vector<cplx> conj(dim);
            for (int i = 0; i < dim; ++i) conj[i] = std::conj(lam[i]);
            V.add(k, lam);
            V.add(neg, conj);
        }
        int i = dim - 1;
        while (i >= 0 && k[i] == kmax) k[i--] = -kmax;
        if (i < 0) break;
        ++k[i];
    }
    return V;
}

DiophantineResult diophantine_check(const std::vector<double>& p, int K, double beta, double C) {
    require_unit(p, "diophantine_check");
    if (K < 1) throw std::invalid_argument("diophantine_check: K must be >= 1");
    const int n = int(p.size());
    DiophantineResult out;
    out.margin = std::numeric_limits<double>::infinity();
    std::vector<int> k(n, -K);
    for (;;) {
        const double r2 = norm2(k);
        if (r2 > 0 && r2 <= double(K) * K) {
            const double m = std::abs(dot(p, k)) * std::pow(std::sqrt(r2), beta);
            if (m < out.margin) {
                out.margin = m;
                out.worst_k = k;
            }
        }
        int i = n - 1;
        while (i >= 0 && k[i] == K) k[i--] = -K;
        if (i < 0) break;
        ++k[i];
    }
    out.ok = out.margin >= C;
    return out;
}

PerturbationResult effective_speed_expansion(const VectorFieldFourier& V, const std::vector<double>& p, double d,
                                             double delta) {
    require_unit(p, "effective_speed_expansion");
    if (int(p.size()) != V.dim()) throw std::invalid_argument("effective_speed_expansion: dimension mismatch");
    if (!(d > 0)) throw std::invalid_argument("effective_speed_expansion: d must be positive");
    if (!V.incompressible(1e-10)) throw std::invalid_argument("effective_speed_expansion: field is not divergence free");
    if (!V.real_valued(1e-10)) throw std::invalid_argument("effective_speed_expansion: field is not real valued");

    const int n = V.dim();
    const double four_pi2 = 4 * std::numbers::pi * std::numbers::pi;
    PerturbationResult out;
    out.diophantine_margin = std::numeric_limits<double>::infinity();
    std::vector<double> terms;
    for (const auto& m : V.modes()) {
        cplx pl = 0;
        for (int i = 0; i < n; ++i) pl += p[i] * m.lambda[i];
        if (is_zero(m.k)) {
            out.alpha1 += pl.real();
            continue;
        }
        const double pk = dot(p, m.k);
        const double k2 = norm2(m.k);
        const double s = std::max(k2 - pk * pk, 0.0);
        out.truncation_K = std::max(out.truncation_K, int(std::ceil(std::sqrt(k2) - 1e-12)));
        const double a2 = std::norm(pl);
        if (a2 == 0) continue;
        out.diophantine_margin = std::min(out.diophantine_margin, std::abs(pk) * std::sqrt(k2));
        const double denom = four_pi2 * d * d * s * s + pk * pk;
        terms.push_back(0.5 * a2 * s / denom);
    }
    if (!std::isfinite(out.diophantine_margin)) out.diophantine_margin = 0;
    out.alpha2 = stable_sum(std::move(terms));
    out.H_approx = 1.0 + delta * out.alpha1 + delta * delta * out.alpha2;
    return out;
}

ShearCrossCheck cross_check_shear(const FlowSpec& v, const Momentum& p, double d, double delta, int grid_n,
                                  const SolverOptions& opt) {
    if (p.gamma == 0) throw std::invalid_argument("cross_check_shear: gamma must be nonzero");
    if (std::abs(p.norm() - 1) > 1e-12)
        throw std::invalid_argument("cross_check_shear: p must be a unit vector (rescale it first)");
    ShearCrossCheck out;
    const PerturbationResult pr = effective_speed_expansion(shear_field(v), {p.gamma, p.mu}, d, delta);
    out.H_expansion = pr.H_approx;
    if (delta == 0) {
        out.H_solver = p.norm();
    } else {
        out.H_solver = effective_hamiltonian(build_flow(v.scaled(delta)), p, d, grid_n, opt);
    }
    out.error = std::abs(out.H_solver - out.H_expansion);
    return out;
}

}  // namespace flamespeed
