#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "latnaf/algebra.hpp"
#include "latnaf/errors.hpp"
#include "latnaf/numeric.hpp"
#include "latnaf/tiling.hpp"

namespace latnaf {

/// Reduced residue digit set modulo Phi^w: 0 plus one minimal-norm
/// representative of every residue class mod tau^w not divisible by tau.
/// Index 0 is always the zero digit.
struct DigitSet {
    int w = 0;
    std::vector<LatticeElement> digits;
    std::unordered_map<std::uint64_t, std::uint32_t> residue_index;
    long long q = 0;
    int tie_classes = 0;  // classes whose minimal representative needed the lex tie-break
    std::string fingerprint;

    std::size_t size() const { return digits.size(); }
    std::size_t nonzero_count() const { return digits.size() - 1; }
};

/// Existence condition for w-NAF expansions: R/r < rho^w - 1 (strict).
inline bool check_existence(const AlgebraicBase& base, const VoronoiCell& cell, int w) {
    return cell.circumradius / cell.inradius < std::pow(base.rho, w) - 1.0;
}

/// Closed-form digit set cardinality rho^{n(w-1)} (rho^n - 1) + 1.
inline BigInt digit_set_cardinality(const AlgebraicBase& base, int w) {
    return pow_bigint(base.norm_abs, static_cast<unsigned>(w - 1)) * (base.norm_abs - 1) + 1;
}

/// Builds the digit set: per residue class the representative of minimal
/// embedded norm (equivalently the one whose Phi^{-w} image lies in the
/// Voronoi cell), ties resolved to the lexicographically smallest coefficient
/// vector. Invariants are verified after construction.
inline DigitSet build_digit_set(const AlgebraicBase& base, const VoronoiCell& cell, int w) {
    if (w < 1) throw Error(ErrorKind::UsageError, "w must be a positive integer");
    if (!check_existence(base, cell, w))
        throw Error(ErrorKind::ExistenceConditionViolated,
                    "R/r >= rho^w - 1: no reduced residue digit set with unique w-NAFs");
    double key_bits = w * std::log2(static_cast<double>(base.q));
    if (key_bits > 26.0)
        throw Error(ErrorKind::BudgetExceeded, "residue class space rho^{nw} exceeds the budget");

    DigitSet ds;
    ds.w = w;
    ds.q = base.q;
    ds.digits.push_back(LatticeElement::zero(base.degree));

    const auto q = static_cast<std::uint64_t>(base.q);
    std::uint64_t total = 1;
    for (int i = 0; i < w; ++i) total *= q;

    Eigen::MatrixXd phi_inv_w = Eigen::MatrixXd::Identity(base.degree, base.degree);
    for (int i = 0; i < w; ++i) phi_inv_w = phi_inv_w * base.phi_inverse;

    for (std::uint64_t key = 0; key < total; ++key) {
        // First digit of the key is the residue mod tau; skip classes in tau*Lambda.
        if (key / (total / q) == 0) continue;
        LatticeElement z0 = element_from_key(key, w, base);
        Eigen::VectorXd target = phi_inv_w * embed(z0, base);
        std::vector<LatticeElement> ties = nearest_lattice_points(target, cell, base);
        LatticeElement best(base.degree);
        bool first = true;
        for (const auto& u : ties) {
            LatticeElement cand = z0 - mul_by_tau_pow(u, base, w);
            if (first || cand < best) {
                best = cand;
                first = false;
            }
        }
        if (ties.size() > 1) ++ds.tie_classes;
        ds.residue_index.emplace(key, static_cast<std::uint32_t>(ds.digits.size()));
        ds.digits.push_back(best);
    }

    // Post-construction validation.
    BigInt expected = digit_set_cardinality(base, w);
    if (BigInt(ds.digits.size()) != expected)
        throw Error(ErrorKind::CardinalityMismatch,
                    "constructed " + std::to_string(ds.digits.size()) + " digits, expected " +
                        expected.str());
    double norm_cap = std::pow(base.rho, w) * cell.circumradius * (1.0 + 1e-9) + 1e-9;
    for (std::size_t i = 1; i < ds.digits.size(); ++i) {
        const LatticeElement& d = ds.digits[i];
        if (divisible_by_tau(d, base))
            throw Error(ErrorKind::CardinalityMismatch, "digit divisible by tau: " + d.str());
        if (embed_norm(d, base) > norm_cap)
            throw Error(ErrorKind::CardinalityMismatch, "digit outside Phi^w T: " + d.str());
        if (residue_key(d, w, base) == 0 ||
            ds.residue_index.at(residue_key(d, w, base)) != i)
            throw Error(ErrorKind::CardinalityMismatch, "digit/residue table inconsistent");
    }

    std::string material = "minpoly=";
    for (const auto& a : base.minpoly_coeffs) material += a.str() + ",";
    material += ";w=" + std::to_string(w) + ";digits=";
    for (const auto& d : ds.digits) material += d.str();
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(fnv1a(material)));
    ds.fingerprint = buf;
    return ds;
}

/// The unique digit congruent to z modulo tau^w. z must not be divisible by tau.
inline const LatticeElement& digit_for_residue(const LatticeElement& z, const DigitSet& ds,
                                               const AlgebraicBase& base) {
    if (divisible_by_tau(z, base))
        throw Error(ErrorKind::DivisibleByTau, "element is divisible by tau: " + z.str());
    std::uint64_t key = residue_key(z, ds.w, base);
    return ds.digits[ds.residue_index.at(key)];
}

/// Digit-set index of the digit congruent to z (0 is never returned).
inline std::uint32_t digit_index_for_residue(const LatticeElement& z, const DigitSet& ds,
                                             const AlgebraicBase& base) {
    if (divisible_by_tau(z, base))
        throw Error(ErrorKind::DivisibleByTau, "element is divisible by tau: " + z.str());
    return ds.residue_index.at(residue_key(z, ds.w, base));
}

}  // namespace latnaf
