#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <unordered_set>
#include <vector>

#include "latnaf/algebra.hpp"
#include "latnaf/digits.hpp"
#include "latnaf/errors.hpp"
#include "latnaf/numeric.hpp"
#include "latnaf/tiling.hpp"
#include "latnaf/wnaf.hpp"

namespace latnaf {

inline constexpr std::uint64_t kEnumerationBudget = 1ull << 24;

/// Number of NAF strings of length m over the digit set (leading zeros
/// allowed): C_m = 1 + m|D*| for m < w, C_m = C_{m-1} + |D*| C_{m-w} after.
inline BigInt count_nafs(int m, const DigitSet& ds) {
    if (m < 0) throw Error(ErrorKind::UsageError, "m must be nonnegative");
    const BigInt nz(ds.nonzero_count());
    const int w = ds.w;
    std::vector<BigInt> c(static_cast<std::size_t>(m) + 1);
    for (int i = 0; i <= m; ++i) {
        if (i < w)
            c[i] = 1 + BigInt(i) * nz;
        else
            c[i] = c[i - 1] + nz * c[i - w];
    }
    return c[m];
}

/// E = 1 / (rho^{n(w-1)} ((rho^n - 1) w + 1)), exact.
inline Rational expectation_constant(const AlgebraicBase& base, int w) {
    BigInt q = base.norm_abs;
    BigInt denom = pow_bigint(q, static_cast<unsigned>(w - 1)) * ((q - 1) * w + 1);
    return Rational(BigInt(1), denom);
}

/// mu = (1 + 1/(rho^n w^3))^{-1}, exact.
inline Rational error_decay_rate(const AlgebraicBase& base, int w) {
    BigInt qw3 = base.norm_abs * BigInt(w) * w * w;
    return Rational(qw3, qw3 + 1);
}

struct BlockStats {
    int w = 0;
    BigInt q;
    Rational E;
    Rational mu;
    std::vector<BigInt> counts;  // C_0 .. C_mmax
};

inline BlockStats block_stats(const AlgebraicBase& base, const DigitSet& ds, int m_max) {
    BlockStats bs;
    bs.w = ds.w;
    bs.q = base.norm_abs;
    bs.E = expectation_constant(base, ds.w);
    bs.mu = error_decay_rate(base, ds.w);
    for (int m = 0; m <= m_max; ++m) bs.counts.push_back(count_nafs(m, ds));
    return bs;
}

enum class MeanMode { Auto, Enumerate, ClosedForm };

/// Exact mean number of occurrences of the digit with index eta over all
/// C_m NAF strings of length m. Enumerates below the threshold, otherwise
/// uses the position split: a nonzero digit at position p leaves free NAF
/// strings of lengths m-p-w and p-w+1 on either side.
inline Rational mean_digit_count(int m, std::uint32_t eta, const DigitSet& ds,
                                 MeanMode mode = MeanMode::Auto) {
    if (eta == 0 || eta >= ds.digits.size())
        throw Error(ErrorKind::UsageError, "eta must index a nonzero digit");
    if (m == 0) return Rational(0);
    const int w = ds.w;
    BigInt cm = count_nafs(m, ds);
    bool enumerate = mode == MeanMode::Enumerate || (mode == MeanMode::Auto && m <= 14);
    if (enumerate) {
        if (count_nafs(m, ds) > BigInt(kEnumerationBudget))
            throw Error(ErrorKind::BudgetExceeded, "string enumeration over budget");
        BigInt total = 0;
        const auto nd = static_cast<std::uint32_t>(ds.digits.size());
        std::function<void(int, int, int)> rec = [&](int pos, int block, int hits) {
            if (pos == m) {
                total += hits;
                return;
            }
            rec(pos + 1, block > 0 ? block - 1 : 0, hits);
            if (block == 0) {
                for (std::uint32_t d = 1; d < nd; ++d)
                    rec(pos + 1, w - 1, hits + (d == eta ? 1 : 0));
            }
        };
        rec(0, 0, 0);
        return Rational(total, cm);
    }
    BigInt total = 0;
    for (int p = 0; p < m; ++p) {
        BigInt left = count_nafs(std::max(m - p - w, 0), ds);
        BigInt right = count_nafs(std::max(p - w + 1, 0), ds);
        total += left * right;
    }
    return Rational(total, cm);
}

/// Depth-truncated fundamental domain: the values of all NAF tails of
/// right-length <= depth, rescaled to lattice points (cell indices at scale
/// Phi^{-depth}).
struct FundamentalDomainApprox {
    int depth = 0;
    std::vector<LatticeElement> cells;
    double measure = 0.0;  // |cells| * d_Lambda * rho^{-n*depth}
};

inline std::vector<LatticeElement> naf_string_values(int length, const DigitSet& ds,
                                                     const AlgebraicBase& base) {
    if (count_nafs(length, ds) > BigInt(kEnumerationBudget))
        throw Error(ErrorKind::BudgetExceeded, "NAF tail enumeration over budget");
    // tau^p * d for every position and nonzero digit
    std::vector<std::vector<LatticeElement>> shifted(static_cast<std::size_t>(length) + 1);
    for (int p = 0; p < length; ++p) {
        shifted[p].reserve(ds.digits.size());
        for (const auto& d : ds.digits) shifted[p].push_back(mul_by_tau_pow(d, base, p));
    }
    std::vector<LatticeElement> out;
    LatticeElement acc = LatticeElement::zero(base.degree);
    std::function<void(int, int)> rec = [&](int pos, int block) {
        if (pos == length) {
            out.push_back(acc);
            return;
        }
        rec(pos + 1, block > 0 ? block - 1 : 0);
        if (block == 0) {
            for (std::size_t d = 1; d < ds.digits.size(); ++d) {
                acc += shifted[pos][d];
                rec(pos + 1, ds.w - 1);
                acc -= shifted[pos][d];
            }
        }
    };
    rec(0, 0);
    std::sort(out.begin(), out.end());
    return out;
}

inline FundamentalDomainApprox fundamental_domain_cells(int depth, const DigitSet& ds,
                                                        const AlgebraicBase& base,
                                                        const VoronoiCell& cell) {
    FundamentalDomainApprox fd;
    fd.depth = depth;
    fd.cells = naf_string_values(depth, ds, base);
    fd.measure = static_cast<double>(fd.cells.size()) * cell.cell_volume *
                 std::pow(base.rho, -base.degree * depth);
    return fd;
}

/// Target measure of the fundamental domain, rho^{nw} d_Lambda / ((rho^n-1)w+1).
inline double fundamental_domain_measure(const AlgebraicBase& base, const VoronoiCell& cell,
                                         int w) {
    double qn = base.norm_abs.convert_to<double>();
    return std::pow(qn, w) * cell.cell_volume /
           ((qn - 1.0) * w + 1.0);
}

/// j-th approximation of the characteristic set for a digit: cell indices at
/// scale Phi^{-(j+w)} covering the values of NAF tails of right-length
/// <= j+w whose digit at distance w from the point equals eta.
struct CharSetApprox {
    std::uint32_t eta = 0;
    int j = 0;
    std::vector<LatticeElement> cells;
    std::unordered_set<std::uint64_t> cell_keys;  // residue keys mod tau^{j+w}
    double measure = 0.0;
    double beta_j = 0.0;
    Rational beta_exact;  // measure/d_Lambda - E, exact
};

inline CharSetApprox charset_approx(std::uint32_t eta, int j, const DigitSet& ds,
                                    const AlgebraicBase& base, const VoronoiCell& cell) {
    if (eta == 0 || eta >= ds.digits.size())
        throw Error(ErrorKind::UsageError, "eta must index a nonzero digit");
    if (j < 0) throw Error(ErrorKind::UsageError, "j must be nonnegative");
    const int w = ds.w;
    double bits = (j + w) * std::log2(base.norm_abs.convert_to<double>());
    if (bits > 24.0)
        throw Error(ErrorKind::BudgetExceeded, "(j+w) log2 rho^n exceeds the 2^24 budget");

    CharSetApprox cs;
    cs.eta = eta;
    cs.j = j;
    // Scaled values split as tau^j * eta + (free NAF value of length j-w+1):
    // positions j-w+1..j-1 and j+1..j+w-1 are forced zeros.
    LatticeElement shift = mul_by_tau_pow(ds.digits[eta], base, j);
    std::vector<LatticeElement> low = naf_string_values(std::max(j - w + 1, 0), ds, base);
    cs.cells.reserve(low.size());
    for (const auto& v : low) cs.cells.push_back(shift + v);
    std::sort(cs.cells.begin(), cs.cells.end());
    for (const auto& c : cs.cells) cs.cell_keys.insert(residue_key(c, j + w, base));
    if (cs.cell_keys.size() != cs.cells.size())
        throw Error(ErrorKind::CardinalityMismatch, "characteristic-set cells not distinct");

    BigInt scale = pow_bigint(base.norm_abs, static_cast<unsigned>(j + w));
    cs.measure = static_cast<double>(cs.cells.size()) * cell.cell_volume /
                 scale.convert_to<double>();
    Rational e = expectation_constant(base, w);
    cs.beta_exact = Rational(BigInt(cs.cells.size()), scale) - e;
    cs.beta_j = cs.measure - cell.cell_volume * to_double(e);
    return cs;
}

/// Membership test of the Lemma route: reduce Phi^{-(j+w)} Sigma(z) by the
/// fractional part, identify the enclosing scale cell, then test it against
/// the covering modulo tau^{j+w}. Exact: equivalent to comparing the first
/// j+w expansion digits.
inline bool charset_contains(const CharSetApprox& cs, const LatticeElement& z,
                             const DigitSet& ds, const AlgebraicBase& base,
                             const VoronoiCell& cell) {
    const int m = cs.j + ds.w;
    Eigen::VectorXd y = embed(z, base);
    for (int i = 0; i < m; ++i) y = base.phi_inverse * y;
    FractionalPart fp = fractional_part(y, cell, base);
    LatticeElement enclosing = z - mul_by_tau_pow(fp.integer_part, base, m);
    return cs.cell_keys.count(residue_key(enclosing, m, base)) > 0;
}

/// Upper bound for the box (and hence Hausdorff) dimension of the
/// fundamental-domain boundary, via the Perron root of the automaton that
/// counts NAF tails with no zero-run of length k.
struct DimensionReport {
    int k = 0;             // k_0 + w - 1
    double sigma = 0.0;    // Perron root / rho^n
    double bound = 0.0;    // n + log_rho sigma
    Rational q_at_rho;     // q(rho^{-n}), exact
    bool identity_ok = false;  // q(rho^{-n}) == (rho^n - 1) rho^{n(w-k-2)}
};

namespace detail {

/// Adjacency matrix of the zero-run automaton on states
/// {D, Z_1, ..., Z_{k-1}}: after a nonzero digit, between w-1 and k-1 zeros
/// may be read before the next nonzero digit.
inline std::vector<std::vector<long long>> zero_run_matrix(long long nonzero_digits, int w,
                                                           int k) {
    std::vector<std::vector<long long>> M(k, std::vector<long long>(k, 0));
    if (k >= 2) M[0][1] = 1;                       // D --0--> Z_1
    for (int i = 1; i + 1 <= k - 1; ++i) M[i][i + 1] = 1;  // Z_i --0--> Z_{i+1}
    for (int i = std::max(w - 1, 1); i <= k - 1; ++i) M[i][0] = nonzero_digits;
    return M;
}

}  // namespace detail

/// Exact count of NAF tails of right-length <= j with no zero-run of length
/// k, via the automaton transfer matrix.
inline BigInt count_Uj(int j, const DigitSet& ds, int k) {
    if (j < 1) throw Error(ErrorKind::UsageError, "j must be positive");
    auto M = detail::zero_run_matrix(static_cast<long long>(ds.nonzero_count()), ds.w, k);
    // walks of length l from the start state = |D*| * sum of the row vector
    // after l-1 automaton steps from D
    std::vector<BigInt> row(k, 0), next(k, 0);
    row[0] = 1;
    std::vector<BigInt> u_tilde(static_cast<std::size_t>(j) + 1);
    u_tilde[0] = 1;  // the all-zero tail
    for (int l = 1; l <= j; ++l) {
        BigInt s = 0;
        for (int i = 0; i < k; ++i) s += row[i];
        u_tilde[l] = BigInt(ds.nonzero_count()) * s;
        for (int c = 0; c < k; ++c) {
            BigInt acc = 0;
            for (int r = 0; r < k; ++r)
                if (M[r][c] != 0) acc += row[r] * M[r][c];
            next[c] = acc;
        }
        row.swap(next);
    }
    BigInt total = 0;
    for (int l = std::max(j - k + 1, 0); l <= j; ++l) total += u_tilde[l];
    return total;
}

inline DimensionReport boundary_dimension_bound(const AlgebraicBase& base,
                                                const VoronoiCell& cell, const DigitSet& ds,
                                                int w) {
    if (w != ds.w) throw Error(ErrorKind::UsageError, "w disagrees with the digit set");
    BoundsReport bounds = compute_bounds(base, cell, ds);
    DimensionReport rep;
    rep.k = bounds.k_0 + w - 1;

    auto M = detail::zero_run_matrix(static_cast<long long>(ds.nonzero_count()), w, rep.k);
    const int k = rep.k;
    std::vector<double> v(k, 1.0), nv(k, 0.0);
    double lambda = 0.0;
    for (int it = 0; it < 100000; ++it) {
        for (int c = 0; c < k; ++c) {
            double acc = 0.0;
            for (int r = 0; r < k; ++r) acc += v[r] * static_cast<double>(M[r][c]);
            nv[c] = acc;
        }
        double norm = 0.0;
        for (double x : nv) norm = std::max(norm, std::abs(x));
        for (double& x : nv) x /= norm;
        v.swap(nv);
        if (std::abs(norm - lambda) <= 1e-12 * std::max(1.0, norm) && it > 10) {
            lambda = norm;
            break;
        }
        lambda = norm;
    }
    double qn = base.norm_abs.convert_to<double>();
    rep.sigma = lambda / qn;
    rep.bound = base.degree + std::log(rep.sigma) / std::log(base.rho);

    // q(rho^{-n}) = 1 - 1/q - |D*| q^{-w} + |D*| q^{-(k+1)}, evaluated exactly
    // and compared with (q-1) q^{w-k-2}.
    BigInt q = base.norm_abs;
    BigInt dstar = BigInt(ds.nonzero_count());
    Rational value = Rational(1) - Rational(1, q) -
                     Rational(dstar, pow_bigint(q, static_cast<unsigned>(w))) +
                     Rational(dstar, pow_bigint(q, static_cast<unsigned>(rep.k + 1)));
    Rational expected(q - 1, pow_bigint(q, static_cast<unsigned>(rep.k + 2 - w)));
    rep.q_at_rho = value;
    rep.identity_ok = value == expected;
    return rep;
}

}  // namespace latnaf
