#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "latnaf/algebra.hpp"
#include "latnaf/digits.hpp"
#include "latnaf/errors.hpp"
#include "latnaf/tiling.hpp"

namespace latnaf {

/// Finite w-NAF expansion; entry j is an index into the digit set, position
/// j = 0 least significant. The most significant stored digit is nonzero.
struct WNafExpansion {
    std::vector<std::uint32_t> digit_indices;

    int length() const { return static_cast<int>(digit_indices.size()); }
    bool empty() const { return digit_indices.empty(); }
    int msd_position() const { return length() - 1; }

    /// Number of nonzero digits.
    int weight() const {
        int wgt = 0;
        for (auto d : digit_indices) wgt += d != 0;
        return wgt;
    }
};

/// Window check: every w consecutive positions contain at most one nonzero.
inline bool validate_syntax(const std::vector<std::uint32_t>& digits, int w) {
    int last_nonzero = -w;
    for (int j = 0; j < static_cast<int>(digits.size()); ++j) {
        if (digits[j] != 0) {
            if (j - last_nonzero < w) return false;
            last_nonzero = j;
        }
    }
    return true;
}

namespace detail {

inline long long max_coeff_bits(const LatticeElement& z) {
    long long bits = 1;
    for (int i = 0; i < z.degree(); ++i) {
        BigInt a = abs(z[i]);
        if (a > 0) bits = std::max<long long>(bits, msb(a) + 1);
    }
    return bits;
}

}  // namespace detail

/// Digit extraction, least significant first: while z != 0 either divide by
/// tau (digit 0) or subtract the residue digit and divide. The iteration cap
/// turns a broken digit set into a loud NonTermination error instead of a
/// hang; the theory guarantees termination well inside the cap.
inline WNafExpansion expand(const LatticeElement& z, const DigitSet& ds,
                            const AlgebraicBase& base) {
    WNafExpansion e;
    LatticeElement v = z;
    const long long cap =
        static_cast<long long>(base.degree) * ds.w * (64 + detail::max_coeff_bits(z));
    long long iter = 0;
    while (!v.is_zero()) {
        if (++iter > cap)
            throw Error(ErrorKind::NonTermination,
                        "expansion exceeded iteration cap; digit set is invalid");
        if (divisible_by_tau(v, base)) {
            e.digit_indices.push_back(0);
            div_by_tau_inplace(v, base);
        } else {
            std::uint32_t idx = digit_index_for_residue(v, ds, base);
            v -= ds.digits[idx];
            e.digit_indices.push_back(idx);
            // (z - d) is divisible by tau^w; the next w-1 digits are zero.
            if (!div_by_tau_inplace(v, base))
                throw Error(ErrorKind::NonTermination,
                            "digit subtraction left a non-divisible element");
            for (int k = 1; k < ds.w && !v.is_zero(); ++k) {
                e.digit_indices.push_back(0);
                if (!div_by_tau_inplace(v, base))
                    throw Error(ErrorKind::NonTermination,
                                "digit subtraction left a non-divisible element");
                ++iter;
            }
        }
    }
    return e;
}

/// Occurrence count of one digit index over the expansion of z, without
/// materializing the expansion. Returns {occurrences, length}.
inline std::pair<long long, int> expand_count(LatticeElement v, const DigitSet& ds,
                                              const AlgebraicBase& base, std::uint32_t eta_index) {
    const long long cap =
        static_cast<long long>(base.degree) * ds.w * (64 + detail::max_coeff_bits(v));
    long long iter = 0, hits = 0;
    int len = 0;
    while (!v.is_zero()) {
        if (++iter > cap)
            throw Error(ErrorKind::NonTermination,
                        "expansion exceeded iteration cap; digit set is invalid");
        if (divisible_by_tau(v, base)) {
            ++len;
            div_by_tau_inplace(v, base);
        } else {
            std::uint32_t idx = digit_index_for_residue(v, ds, base);
            v -= ds.digits[idx];
            hits += idx == eta_index;
            ++len;
            if (!div_by_tau_inplace(v, base))
                throw Error(ErrorKind::NonTermination,
                            "digit subtraction left a non-divisible element");
            for (int k = 1; k < ds.w && !v.is_zero(); ++k) {
                ++len;
                if (!div_by_tau_inplace(v, base))
                    throw Error(ErrorKind::NonTermination,
                                "digit subtraction left a non-divisible element");
                ++iter;
            }
        }
    }
    return {hits, len};
}

/// Value of the expansion, sum_j tau^j eta_j, by exact Horner evaluation.
inline LatticeElement value(const WNafExpansion& e, const DigitSet& ds,
                            const AlgebraicBase& base) {
    LatticeElement v = LatticeElement::zero(base.degree);
    for (int j = e.length() - 1; j >= 0; --j) {
        v = mul_by_tau(v, base);
        v += ds.digits[e.digit_indices[j]];
    }
    return v;
}

/// rho^{largest index where the expansions differ}, 0 if equal. Expansions
/// are aligned at position 0.
inline double naf_distance(const WNafExpansion& a, const WNafExpansion& b, double rho) {
    int top = std::max(a.length(), b.length());
    for (int j = top - 1; j >= 0; --j) {
        std::uint32_t da = j < a.length() ? a.digit_indices[j] : 0;
        std::uint32_t db = j < b.length() ? b.digit_indices[j] : 0;
        if (da != db) return std::pow(rho, j);
    }
    return 0.0;
}

/// Norm bounds for NAF values relative to the most significant position,
/// the grid shift J_0 for balls of radius 1, and the zero-run threshold k_0.
struct BoundsReport {
    double B_U = 0.0;
    double B_L = 0.0;
    int J_0 = 0;
    int k_0 = 0;
};

inline BoundsReport compute_bounds(const AlgebraicBase& base, const VoronoiCell& cell,
                                   const DigitSet& ds) {
    const double rho = base.rho, r = cell.inradius, R = cell.circumradius;
    const int w = ds.w;
    BoundsReport rep;
    rep.B_U = std::pow(rho, w) * R / (1.0 - std::pow(rho, -w));
    rep.B_L = r - std::pow(rho, -2 * w) * rep.B_U;
    double alt = r - R / (std::pow(rho, w) - 1.0);
    if (std::abs(rep.B_L - alt) > 1e-12 * (1.0 + std::abs(rep.B_L)))
        throw Error(ErrorKind::CardinalityMismatch, "B_L cross-check mismatch");
    if (!(rep.B_L > 0.0))
        throw Error(ErrorKind::ExistenceConditionViolated, "B_L <= 0");
    rep.J_0 = static_cast<int>(std::floor(-std::log(rep.B_L) / std::log(rho) + 1e-9)) + 1;
    double k_threshold =
        2.0 * w - std::log((r / R) * (std::pow(rho, w) - 1.0) - 1.0) / std::log(rho);
    rep.k_0 = static_cast<int>(std::floor(k_threshold + 1e-9)) + 1;
    return rep;
}

/// Corollary bounds: rho^J B_L <= ||value|| <= rho^J B_U with J the most
/// significant position. True for the empty expansion by convention.
inline bool check_value_bounds(const WNafExpansion& e, const BoundsReport& rep,
                               const AlgebraicBase& base, const DigitSet& ds) {
    if (e.empty()) return true;
    double nrm = embed_norm(value(e, ds, base), base);
    double scale = std::pow(base.rho, e.msd_position());
    double lowtol = 1e-9 * (1.0 + scale * rep.B_L);
    double hitol = 1e-9 * (1.0 + scale * rep.B_U);
    return nrm >= scale * rep.B_L - lowtol && nrm <= scale * rep.B_U + hitol;
}

}  // namespace latnaf
