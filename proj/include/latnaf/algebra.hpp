#pragma once

#include <algorithm>
#include <array>
#include <complex>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "latnaf/errors.hpp"
#include "latnaf/numeric.hpp"

namespace latnaf {

inline constexpr int kMaxDegree = 4;

/// Element of Z[tau] with exact integer coordinates in the basis
/// {1, tau, ..., tau^{n-1}}. Equality is coefficient-wise; ordering is
/// lexicographic on the coefficient vector.
class LatticeElement {
public:
    LatticeElement() : n_(0) {}
    explicit LatticeElement(int n) : n_(n) {}

    static LatticeElement zero(int n) { return LatticeElement(n); }

    static LatticeElement from_coeffs(std::vector<BigInt> coeffs) {
        LatticeElement z(static_cast<int>(coeffs.size()));
        for (int i = 0; i < z.n_; ++i) z.c_[i] = std::move(coeffs[i]);
        return z;
    }

    static LatticeElement from_ints(std::initializer_list<long long> coeffs) {
        LatticeElement z(static_cast<int>(coeffs.size()));
        int i = 0;
        for (long long v : coeffs) z.c_[i++] = v;
        return z;
    }

    static LatticeElement from_int(const BigInt& value, int n) {
        LatticeElement z(n);
        z.c_[0] = value;
        return z;
    }

    int degree() const { return n_; }
    const BigInt& operator[](int i) const { return c_[i]; }
    BigInt& operator[](int i) { return c_[i]; }

    bool is_zero() const {
        for (int i = 0; i < n_; ++i)
            if (c_[i] != 0) return false;
        return true;
    }

    friend bool operator==(const LatticeElement& a, const LatticeElement& b) {
        if (a.n_ != b.n_) return false;
        for (int i = 0; i < a.n_; ++i)
            if (a.c_[i] != b.c_[i]) return false;
        return true;
    }
    friend bool operator!=(const LatticeElement& a, const LatticeElement& b) { return !(a == b); }

    friend bool operator<(const LatticeElement& a, const LatticeElement& b) {
        for (int i = 0; i < a.n_; ++i) {
            if (a.c_[i] != b.c_[i]) return a.c_[i] < b.c_[i];
        }
        return false;
    }

    friend LatticeElement operator+(const LatticeElement& a, const LatticeElement& b) {
        LatticeElement r(a.n_);
        for (int i = 0; i < a.n_; ++i) r.c_[i] = a.c_[i] + b.c_[i];
        return r;
    }
    friend LatticeElement operator-(const LatticeElement& a, const LatticeElement& b) {
        LatticeElement r(a.n_);
        for (int i = 0; i < a.n_; ++i) r.c_[i] = a.c_[i] - b.c_[i];
        return r;
    }
    LatticeElement operator-() const {
        LatticeElement r(n_);
        for (int i = 0; i < n_; ++i) r.c_[i] = -c_[i];
        return r;
    }
    LatticeElement& operator+=(const LatticeElement& b) {
        for (int i = 0; i < n_; ++i) c_[i] += b.c_[i];
        return *this;
    }
    LatticeElement& operator-=(const LatticeElement& b) {
        for (int i = 0; i < n_; ++i) c_[i] -= b.c_[i];
        return *this;
    }

    std::string str() const {
        std::string s = "(";
        for (int i = 0; i < n_; ++i) {
            if (i) s += ",";
            s += c_[i].str();
        }
        return s + ")";
    }

private:
    std::array<BigInt, kMaxDegree> c_{};
    int n_;
};

/// The base tau: minimal polynomial, conjugate data, the block-diagonal
/// expanding endomorphism Phi, and the norm-compatible embedding of Z[tau]
/// as a unit-covolume lattice in R^n.
struct AlgebraicBase {
    std::vector<BigInt> minpoly_coeffs;  // a_0..a_{n-1} of T^n + a_{n-1}T^{n-1} + ... + a_0
    int degree = 0;                      // n
    double rho = 0.0;                    // common conjugate modulus, > 1
    BigInt norm_abs;                     // rho^n = |a_0|, a positive integer
    long long q = 0;                     // norm_abs as machine integer
    std::vector<std::complex<double>> roots;  // reals ascending, then conjugate
                                              // pairs (Im>0 first) by ascending argument
    int real_embeddings = 0;             // s
    int complex_pairs = 0;               // t, n = s + 2t
    Eigen::MatrixXd phi;                 // n x n block diagonal
    Eigen::MatrixXd phi_inverse;
    Eigen::MatrixXd embedding_matrix;    // n x n, |det| = 1
    Eigen::MatrixXd embedding_inverse;
    std::string label;

    BigInt eval_minpoly(const BigInt& x) const {
        BigInt acc = 1;  // leading T^n coefficient
        for (int i = degree - 1; i >= 0; --i) acc = acc * x + minpoly_coeffs[i];
        return acc;
    }
};

namespace detail {

inline std::complex<double> eval_poly(const AlgebraicBase& base, std::complex<double> x) {
    std::complex<double> acc = 1.0;
    for (int i = base.degree - 1; i >= 0; --i)
        acc = acc * x + base.minpoly_coeffs[i].convert_to<double>();
    return acc;
}

inline std::complex<double> eval_poly_deriv(const AlgebraicBase& base, std::complex<double> x) {
    int n = base.degree;
    std::complex<double> acc = n;
    for (int i = n - 1; i >= 1; --i)
        acc = acc * x + static_cast<double>(i) * base.minpoly_coeffs[i].convert_to<double>();
    return acc;
}

inline std::vector<BigInt> divisors_with_sign(const BigInt& a) {
    std::vector<BigInt> out;
    BigInt aa = abs(a);
    for (BigInt d = 1; d * d <= aa; ++d) {
        if (aa % d == 0) {
            out.push_back(d);
            out.push_back(-d);
            BigInt e = aa / d;
            if (e != d) {
                out.push_back(e);
                out.push_back(-e);
            }
        }
    }
    return out;
}

inline bool has_rational_root(const AlgebraicBase& base) {
    for (const BigInt& d : divisors_with_sign(base.minpoly_coeffs[0]))
        if (base.eval_minpoly(d) == 0) return true;
    return false;
}

// Quartic reducibility over Z into two monic quadratics:
// T^4 + a3 T^3 + a2 T^2 + a1 T + a0 = (T^2 + bT + c)(T^2 + dT + e).
inline bool has_quadratic_factor(const AlgebraicBase& base) {
    const BigInt &a0 = base.minpoly_coeffs[0], &a1 = base.minpoly_coeffs[1],
                 &a2 = base.minpoly_coeffs[2], &a3 = base.minpoly_coeffs[3];
    for (const BigInt& c : divisors_with_sign(a0)) {
        BigInt e = a0 / c;
        // b + d = a3, b*d = a2 - c - e, b*e + c*d = a1
        BigInt s = a3, p = a2 - c - e;
        BigInt disc = s * s - 4 * p;
        if (disc < 0) continue;
        BigInt root = sqrt(disc);
        if (root * root != disc) continue;
        for (int sign : {1, -1}) {
            BigInt twob = s + sign * root;
            if (twob % 2 != 0) continue;
            BigInt b = twob / 2, d = s - b;
            if (b * e + c * d == a1) return true;
        }
    }
    return false;
}

}  // namespace detail

/// Builds the base from the minimal polynomial T^n + a_{n-1}T^{n-1} + ... + a_0,
/// given as the coefficient list a_0..a_{n-1}. The embedding folds the norm
/// weights (sqrt(2) on each complex coordinate pair) into the matrix and
/// rescales to unit covolume, so the plain Euclidean norm on the embedded
/// lattice is the weighted conjugate norm up to one global factor and the
/// fundamental cell has measure 1.
inline AlgebraicBase load_base(const std::vector<BigInt>& minpoly_coeffs,
                               const std::string& label = "") {
    AlgebraicBase base;
    base.minpoly_coeffs = minpoly_coeffs;
    base.degree = static_cast<int>(minpoly_coeffs.size());
    base.label = label;
    const int n = base.degree;
    if (n < 1 || n > kMaxDegree)
        throw Error(ErrorKind::DegreeUnsupported,
                    "degree " + std::to_string(n) + " outside supported range 1.." +
                        std::to_string(kMaxDegree));

    base.norm_abs = abs(minpoly_coeffs[0]);
    if (base.norm_abs == 0)
        throw Error(ErrorKind::NormNotInteger, "|a_0| must be a positive integer");
    if (base.norm_abs == 1)
        throw Error(ErrorKind::InvalidBase, "|a_0| = 1 gives rho = 1; base is not expanding");
    base.q = base.norm_abs.convert_to<long long>();
    base.rho = std::pow(base.norm_abs.convert_to<double>(), 1.0 / n);

    // Irreducibility over Q: no rational root, and for n = 4 no factorization
    // into two integer quadratics.
    if (n > 1 && detail::has_rational_root(base))
        throw Error(ErrorKind::InvalidBase, "minimal polynomial has a rational root");
    if (n == 4 && detail::has_quadratic_factor(base))
        throw Error(ErrorKind::InvalidBase, "minimal polynomial splits into quadratics");

    // Roots: companion-matrix eigenvalues polished by Newton.
    std::vector<std::complex<double>> raw;
    if (n == 1) {
        raw.push_back({-minpoly_coeffs[0].convert_to<double>(), 0.0});
    } else {
        Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(n, n);
        for (int i = 0; i < n - 1; ++i) companion(i + 1, i) = 1.0;
        for (int i = 0; i < n; ++i) companion(i, n - 1) = -minpoly_coeffs[i].convert_to<double>();
        Eigen::EigenSolver<Eigen::MatrixXd> solver(companion);
        for (int i = 0; i < n; ++i) {
            std::complex<double> z = solver.eigenvalues()(i);
            for (int it = 0; it < 60; ++it) {
                std::complex<double> f = detail::eval_poly(base, z);
                std::complex<double> df = detail::eval_poly_deriv(base, z);
                if (std::abs(df) == 0.0) break;
                std::complex<double> step = f / df;
                z -= step;
                if (std::abs(step) < 1e-16 * (1.0 + std::abs(z))) break;
            }
            raw.push_back(z);
        }
    }
    for (const auto& z : raw) {
        double res = std::abs(detail::eval_poly(base, z));
        double scale = std::pow(1.0 + std::abs(z), n);
        if (res > 1e-10 * scale)
            throw Error(ErrorKind::InvalidBase, "root residual check failed");
    }

    // Equimodularity: every conjugate modulus equals rho within relative 1e-8.
    for (const auto& z : raw) {
        if (std::abs(std::abs(z) - base.rho) > 1e-8 * base.rho)
            throw Error(ErrorKind::RootsNotEquimodular,
                        "conjugate modulus " + std::to_string(std::abs(z)) +
                            " deviates from rho = " + std::to_string(base.rho));
    }

    // Deterministic embedding order: reals ascending, pairs by ascending
    // argument in (0, pi), representative with positive imaginary part.
    std::vector<double> reals;
    std::vector<std::complex<double>> pairs;
    for (const auto& z : raw) {
        if (std::abs(z.imag()) <= 1e-9 * (1.0 + std::abs(z)))
            reals.push_back(z.real());
        else if (z.imag() > 0)
            pairs.push_back(z);
    }
    std::sort(reals.begin(), reals.end());
    std::sort(pairs.begin(), pairs.end(), [](const auto& a, const auto& b) {
        return std::arg(a) < std::arg(b);
    });
    base.real_embeddings = static_cast<int>(reals.size());
    base.complex_pairs = static_cast<int>(pairs.size());
    if (base.real_embeddings + 2 * base.complex_pairs != n)
        throw Error(ErrorKind::InvalidBase, "embedding signature mismatch");
    base.roots.clear();
    for (double r : reals) base.roots.push_back({r, 0.0});
    for (const auto& z : pairs) {
        base.roots.push_back(z);
        base.roots.push_back(std::conj(z));
    }

    const int s = base.real_embeddings, t = base.complex_pairs;
    base.phi = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < s; ++i) base.phi(i, i) = reals[i];
    for (int k = 0; k < t; ++k) {
        int r0 = s + 2 * k;
        base.phi(r0, r0) = pairs[k].real();
        base.phi(r0, r0 + 1) = -pairs[k].imag();
        base.phi(r0 + 1, r0) = pairs[k].imag();
        base.phi(r0 + 1, r0 + 1) = pairs[k].real();
    }
    base.phi_inverse = base.phi.inverse();

    // Columns are the embedded powers of tau; complex coordinate pairs carry
    // weight sqrt(2), then a global rescale makes |det| = 1.
    Eigen::MatrixXd emb(n, n);
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < s; ++i) emb(i, j) = std::pow(reals[i], j);
        for (int k = 0; k < t; ++k) {
            std::complex<double> p = std::pow(pairs[k], j);
            emb(s + 2 * k, j) = std::sqrt(2.0) * p.real();
            emb(s + 2 * k + 1, j) = std::sqrt(2.0) * p.imag();
        }
    }
    double det = emb.determinant();
    if (std::abs(det) < 1e-10)
        throw Error(ErrorKind::DegenerateLattice, "embedding matrix is singular");
    emb /= std::pow(std::abs(det), 1.0 / n);
    base.embedding_matrix = emb;
    base.embedding_inverse = emb.inverse();

    // Structural sanity: Phi is a similarity with ratio rho.
    Eigen::MatrixXd gram = base.phi.transpose() * base.phi;
    double rho2 = base.rho * base.rho;
    if ((gram - rho2 * Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff() > 1e-9 * rho2)
        throw Error(ErrorKind::InvalidBase, "Phi is not conformal with ratio rho");

    return base;
}

inline AlgebraicBase load_base(std::initializer_list<long long> coeffs,
                               const std::string& label = "") {
    std::vector<BigInt> v;
    for (long long c : coeffs) v.emplace_back(c);
    return load_base(v, label);
}

/// tau * z through the companion matrix of the minimal polynomial:
/// r_0 = -a_0 z_{n-1}, r_i = z_{i-1} - a_i z_{n-1}.
inline LatticeElement mul_by_tau(const LatticeElement& z, const AlgebraicBase& base) {
    const int n = base.degree;
    LatticeElement r(n);
    r[0] = -base.minpoly_coeffs[0] * z[n - 1];
    for (int i = 1; i < n; ++i) r[i] = z[i - 1] - base.minpoly_coeffs[i] * z[n - 1];
    return r;
}

/// Exact division by tau. z is divisible iff a_0 | z_0; then the quotient is
/// integral in all coordinates.
inline bool div_by_tau_inplace(LatticeElement& z, const AlgebraicBase& base) {
    const int n = base.degree;
    if (z[0] % base.minpoly_coeffs[0] != 0) return false;
    BigInt top = -z[0] / base.minpoly_coeffs[0];
    for (int i = 1; i < n; ++i) z[i - 1] = z[i] + base.minpoly_coeffs[i] * top;
    z[n - 1] = std::move(top);
    return true;
}

inline std::optional<LatticeElement> div_by_tau(const LatticeElement& z,
                                                const AlgebraicBase& base) {
    LatticeElement r = z;
    if (!div_by_tau_inplace(r, base)) return std::nullopt;
    return r;
}

inline bool divisible_by_tau(const LatticeElement& z, const AlgebraicBase& base) {
    return z[0] % base.minpoly_coeffs[0] == 0;
}

inline LatticeElement mul_by_tau_pow(LatticeElement z, const AlgebraicBase& base, int k) {
    for (int i = 0; i < k; ++i) z = mul_by_tau(z, base);
    return z;
}

inline Eigen::VectorXd embed(const LatticeElement& z, const AlgebraicBase& base) {
    Eigen::VectorXd c(base.degree);
    for (int i = 0; i < base.degree; ++i) c(i) = z[i].convert_to<double>();
    return base.embedding_matrix * c;
}

inline double embed_norm(const LatticeElement& z, const AlgebraicBase& base) {
    return embed(z, base).norm();
}

/// x == y modulo Phi^w Lambda, i.e. tau^w | x - y, by repeated exact division.
inline bool congruent_mod_tau_pow(const LatticeElement& x, const LatticeElement& y, int w,
                                  const AlgebraicBase& base) {
    LatticeElement d = x - y;
    for (int i = 0; i < w; ++i) {
        if (!div_by_tau_inplace(d, base)) return false;
    }
    return true;
}

/// Canonical residue key modulo tau^m: the m digits of the tau-adic expansion
/// of z with digit set {0, ..., q-1}, packed most-significant-step first.
/// Distinct residue classes mod tau^m map to distinct keys.
inline std::uint64_t residue_key(const LatticeElement& z, int m, const AlgebraicBase& base) {
    const long long q = base.q;
    double width = static_cast<double>(m) * std::log2(static_cast<double>(q));
    if (width > 62.0)
        throw Error(ErrorKind::BudgetExceeded, "residue key space exceeds 2^62");
    LatticeElement v = z;
    std::uint64_t key = 0;
    for (int i = 0; i < m; ++i) {
        BigInt r = v[0] % q;
        if (r < 0) r += q;
        long long d = r.convert_to<long long>();
        key = key * static_cast<std::uint64_t>(q) + static_cast<std::uint64_t>(d);
        v[0] -= d;
        bool ok = div_by_tau_inplace(v, base);
        (void)ok;  // holds by construction: v[0] == 0 mod q
    }
    return key;
}

/// The canonical small representative of a residue key: sum d_i tau^i with
/// the key's digits d_i in {0, ..., q-1}.
inline LatticeElement element_from_key(std::uint64_t key, int m, const AlgebraicBase& base) {
    const auto q = static_cast<std::uint64_t>(base.q);
    std::vector<long long> digits(m);
    for (int i = m - 1; i >= 0; --i) {
        digits[i] = static_cast<long long>(key % q);
        key /= q;
    }
    // key digits are most-significant-step first: digits[0] is the residue mod tau
    LatticeElement v = LatticeElement::zero(base.degree);
    for (int i = m - 1; i >= 0; --i) {
        v = mul_by_tau(v, base);
        v[0] += digits[i];
    }
    return v;
}

}  // namespace latnaf
