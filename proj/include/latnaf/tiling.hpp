#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "latnaf/algebra.hpp"
#include "latnaf/errors.hpp"

namespace latnaf {

/// Voronoi cell of the embedded lattice around 0: facet (relevant) vectors,
/// vertices, inradius r, circumradius R and the cell volume d_Lambda.
struct VoronoiCell {
    std::vector<LatticeElement> relevant_coeffs;
    std::vector<Eigen::VectorXd> relevant_vectors;
    std::vector<double> relevant_halfnorm2;  // ||v||^2 / 2, the facet offsets
    std::vector<Eigen::VectorXd> vertices;
    double inradius = 0.0;      // r
    double circumradius = 0.0;  // R
    double cell_volume = 0.0;   // d_Lambda = |det embedding_matrix|
};

namespace detail {

/// Iterates integer coefficient vectors c with lo[i] <= c[i] <= hi[i] in
/// lexicographic order, maintaining the running embedded point. Visitor gets
/// (coeffs, embedded_point).
template <typename F>
void scan_coefficient_box(const AlgebraicBase& base, const std::array<long long, kMaxDegree>& lo,
                          const std::array<long long, kMaxDegree>& hi, F&& visit) {
    const int n = base.degree;
    std::array<long long, kMaxDegree> c{};
    std::array<Eigen::VectorXd, kMaxDegree + 1> partial;
    partial[0] = Eigen::VectorXd::Zero(n);
    std::function<void(int)> rec = [&](int d) {
        if (d == n) {
            visit(c, partial[n]);
            return;
        }
        for (long long v = lo[d]; v <= hi[d]; ++v) {
            c[d] = v;
            partial[d + 1] = partial[d] + static_cast<double>(v) * base.embedding_matrix.col(d);
            rec(d + 1);
        }
    };
    rec(0);
}

inline std::array<long long, kMaxDegree> box_lo(const AlgebraicBase& base,
                                                const Eigen::VectorXd& center, double radius,
                                                std::array<long long, kMaxDegree>* hi_out) {
    const int n = base.degree;
    Eigen::VectorXd cc = base.embedding_inverse * center;
    std::array<long long, kMaxDegree> lo{}, hi{};
    for (int i = 0; i < n; ++i) {
        double k = base.embedding_inverse.row(i).norm() * radius;
        lo[i] = static_cast<long long>(std::floor(cc(i) - k - 1e-9));
        hi[i] = static_cast<long long>(std::ceil(cc(i) + k + 1e-9));
    }
    *hi_out = hi;
    return lo;
}

inline LatticeElement element_from_array(const std::array<long long, kMaxDegree>& c, int n) {
    LatticeElement z(n);
    for (int i = 0; i < n; ++i) z[i] = c[i];
    return z;
}

}  // namespace detail

/// All lattice points whose cell midpoint test certifies a Voronoi facet,
/// plus cell vertices and radii. Verified on construction by a seeded
/// random-point membership check.
inline VoronoiCell build_voronoi(const AlgebraicBase& base) {
    const int n = base.degree;
    const Eigen::MatrixXd& B = base.embedding_matrix;
    if (std::abs(B.determinant()) < 1e-10)
        throw Error(ErrorKind::DegenerateLattice, "embedding matrix is singular");

    VoronoiCell cell;
    cell.cell_volume = std::abs(B.determinant());

    // Covering-radius upper bound from the Gram-Schmidt lengths of the basis
    // (Babai bound); relevant vectors have norm <= 2 * covering radius.
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(B);
    Eigen::MatrixXd Rtri = qr.matrixQR().triangularView<Eigen::Upper>();
    double cover_bound_sq = 0.0;
    for (int i = 0; i < n; ++i) cover_bound_sq += 0.25 * Rtri(i, i) * Rtri(i, i);
    double search_radius = 2.0 * std::sqrt(cover_bound_sq) * (1.0 + 1e-9) + 1e-9;

    struct Cand {
        std::array<long long, kMaxDegree> c;
        Eigen::VectorXd v;
        double norm2;
    };
    std::vector<Cand> cands;
    std::array<long long, kMaxDegree> lo{}, hi{};
    lo = detail::box_lo(base, Eigen::VectorXd::Zero(n), search_radius, &hi);
    detail::scan_coefficient_box(base, lo, hi, [&](const auto& c, const Eigen::VectorXd& v) {
        double n2 = v.squaredNorm();
        bool zero = true;
        for (int i = 0; i < n; ++i) zero = zero && c[i] == 0;
        if (!zero && n2 <= search_radius * search_radius)
            cands.push_back({c, v, n2});
    });
    if (cands.empty()) throw Error(ErrorKind::DegenerateLattice, "no lattice vectors found");

    double min_norm2 = cands[0].norm2;
    for (const auto& cd : cands) min_norm2 = std::min(min_norm2, cd.norm2);
    cell.inradius = 0.5 * std::sqrt(min_norm2);

    // Midpoint criterion: v is a facet vector iff v/2 is strictly closer to 0
    // (and v) than to every other lattice point.
    for (const auto& cd : cands) {
        Eigen::VectorXd mid = 0.5 * cd.v;
        double d0 = mid.squaredNorm();
        bool relevant = true;
        for (const auto& other : cands) {
            if (&other == &cd) continue;
            double d = (mid - other.v).squaredNorm();
            if (d <= d0 * (1.0 + 1e-9)) {
                relevant = false;
                break;
            }
        }
        if (relevant) {
            cell.relevant_coeffs.push_back(detail::element_from_array(cd.c, n));
            cell.relevant_vectors.push_back(cd.v);
            cell.relevant_halfnorm2.push_back(0.5 * cd.norm2);
        }
    }
    // Deterministic order.
    {
        std::vector<std::size_t> idx(cell.relevant_coeffs.size());
        for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
        std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
            return cell.relevant_coeffs[a] < cell.relevant_coeffs[b];
        });
        VoronoiCell sorted = cell;
        sorted.relevant_coeffs.clear();
        sorted.relevant_vectors.clear();
        sorted.relevant_halfnorm2.clear();
        for (std::size_t i : idx) {
            sorted.relevant_coeffs.push_back(cell.relevant_coeffs[i]);
            sorted.relevant_vectors.push_back(cell.relevant_vectors[i]);
            sorted.relevant_halfnorm2.push_back(cell.relevant_halfnorm2[i]);
        }
        cell = std::move(sorted);
    }

    // Vertices: intersections of n facet hyperplanes <x, v_i> = ||v_i||^2/2
    // that satisfy every other facet constraint.
    const std::size_t m = cell.relevant_vectors.size();
    if (n == 1) {
        Eigen::VectorXd v(1);
        v(0) = cell.inradius;
        cell.vertices.push_back(v);
        cell.vertices.push_back(-v);
    } else {
        std::vector<std::size_t> comb(n);
        std::function<void(std::size_t, int)> pick = [&](std::size_t start, int depth) {
            if (depth == n) {
                Eigen::MatrixXd A(n, n);
                Eigen::VectorXd b(n);
                for (int i = 0; i < n; ++i) {
                    A.row(i) = cell.relevant_vectors[comb[i]].transpose();
                    b(i) = cell.relevant_halfnorm2[comb[i]];
                }
                Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
                if (!lu.isInvertible()) return;
                Eigen::VectorXd x = lu.solve(b);
                for (std::size_t k = 0; k < m; ++k) {
                    if (cell.relevant_vectors[k].dot(x) >
                        cell.relevant_halfnorm2[k] + 1e-9 * (1.0 + cell.relevant_halfnorm2[k]))
                        return;
                }
                cell.vertices.push_back(x);
                return;
            }
            for (std::size_t i = start; i < m; ++i) {
                comb[depth] = i;
                pick(i + 1, depth + 1);
            }
        };
        pick(0, 0);
    }
    if (cell.vertices.empty())
        throw Error(ErrorKind::DegenerateLattice, "Voronoi cell has no vertices");
    double max_v2 = 0.0;
    for (const auto& v : cell.vertices) max_v2 = std::max(max_v2, v.squaredNorm());
    cell.circumradius = std::sqrt(max_v2);

    // Verification: random points reduced into the cell are at least as close
    // to 0 as to every relevant vector.
    {
        std::uint64_t state = 0x9e3779b97f4a7c15ull;
        auto next01 = [&state]() {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            return static_cast<double>(state >> 11) / 9007199254740992.0;
        };
        for (int trial = 0; trial < 1000; ++trial) {
            Eigen::VectorXd x(n);
            for (int i = 0; i < n; ++i) x(i) = (next01() * 2.0 - 1.0) * 4.0 * cell.circumradius;
            // Reduce x into the cell: subtracting a violated facet vector
            // strictly decreases the norm, so this terminates.
            for (int steps = 0; steps < 4096; ++steps) {
                bool moved = false;
                for (std::size_t k = 0; k < m; ++k) {
                    if (cell.relevant_vectors[k].dot(x) > cell.relevant_halfnorm2[k] + 1e-12) {
                        x -= cell.relevant_vectors[k];
                        moved = true;
                        break;
                    }
                }
                if (!moved) break;
            }
            for (std::size_t k = 0; k < m; ++k) {
                double lhs = x.squaredNorm();
                double rhs = (x - cell.relevant_vectors[k]).squaredNorm();
                if (lhs > rhs + 1e-6 * (1.0 + rhs))
                    throw Error(ErrorKind::DegenerateLattice,
                                "Voronoi verification failed: reduced point closer to a neighbor");
            }
        }
    }
    return cell;
}

/// Nearest lattice points to x (ties within relative 1e-9), sorted
/// lexicographically by coefficient vector.
inline std::vector<LatticeElement> nearest_lattice_points(const Eigen::VectorXd& x,
                                                          const VoronoiCell& cell,
                                                          const AlgebraicBase& base) {
    const int n = base.degree;
    Eigen::VectorXd cc = base.embedding_inverse * x;
    std::array<long long, kMaxDegree> lo{}, hi{};
    for (int i = 0; i < n; ++i) {
        double k = base.embedding_inverse.row(i).norm() * (cell.circumradius * (1.0 + 1e-9)) + 0.5;
        lo[i] = static_cast<long long>(std::floor(cc(i) - k));
        hi[i] = static_cast<long long>(std::ceil(cc(i) + k));
    }
    double best = std::numeric_limits<double>::infinity();
    std::vector<std::pair<std::array<long long, kMaxDegree>, double>> pts;
    detail::scan_coefficient_box(base, lo, hi, [&](const auto& c, const Eigen::VectorXd& v) {
        double d2 = (x - v).squaredNorm();
        best = std::min(best, d2);
        pts.push_back({c, d2});
    });
    std::vector<LatticeElement> ties;
    double cut = best * (1.0 + 1e-9) + 1e-15;
    for (const auto& [c, d2] : pts)
        if (d2 <= cut) ties.push_back(detail::element_from_array(c, n));
    std::sort(ties.begin(), ties.end());
    return ties;
}

struct FractionalPart {
    LatticeElement integer_part;
    Eigen::VectorXd fractional;
};

/// x = Sigma(u) + v with v in the half-open cell; ties between equidistant
/// lattice points resolve to the lexicographically smallest coefficient
/// vector, which is translation-invariant and hence idempotent.
inline FractionalPart fractional_part(const Eigen::VectorXd& x, const VoronoiCell& cell,
                                      const AlgebraicBase& base) {
    std::vector<LatticeElement> ties = nearest_lattice_points(x, cell, base);
    const LatticeElement& u = ties.front();
    return {u, x - embed(u, base)};
}

/// Streams lattice points z with ||Sigma(z)|| < N (strict) in lexicographic
/// coefficient order. Visitor signature: f(coeffs, norm_squared).
template <typename F>
void for_each_lattice_point_in_ball(double N, const AlgebraicBase& base, F&& f) {
    if (!(N >= 0.0) || !std::isfinite(N))
        throw Error(ErrorKind::RegionUnbounded, "ball radius must be finite and nonnegative");
    if (N == 0.0) return;
    const int n = base.degree;
    std::array<long long, kMaxDegree> lo{}, hi{};
    lo = detail::box_lo(base, Eigen::VectorXd::Zero(n), N, &hi);
    const double n2max = N * N;
    detail::scan_coefficient_box(base, lo, hi, [&](const auto& c, const Eigen::VectorXd& v) {
        double d2 = v.squaredNorm();
        if (d2 < n2max) f(c, d2);
    });
}

/// Exactly { z : ||Sigma(z)|| < N }, sorted by coefficient vector.
inline std::vector<LatticeElement> lattice_points_in_ball(double N, const AlgebraicBase& base,
                                                          const VoronoiCell& cell) {
    (void)cell;
    std::vector<LatticeElement> out;
    for_each_lattice_point_in_ball(N, base, [&](const auto& c, double) {
        out.push_back(detail::element_from_array(c, base.degree));
    });
    return out;
}

struct Ball {
    Eigen::VectorXd center;
    double radius = 0.0;
};

enum class CellRoundMode { Floor, Ceil, Cover, Boundary };

/// Euclidean distance from p to the cell polytope (active-set enumeration
/// over facet subsets; exact for n <= 4 at desk scale).
inline double point_to_cell_distance(const Eigen::VectorXd& p, const VoronoiCell& cell) {
    const std::size_t m = cell.relevant_vectors.size();
    const int n = static_cast<int>(p.size());
    bool inside = true;
    for (std::size_t k = 0; k < m; ++k) {
        if (cell.relevant_vectors[k].dot(p) > cell.relevant_halfnorm2[k] + 1e-12) {
            inside = false;
            break;
        }
    }
    if (inside) return 0.0;
    double tol = 1e-9 * (1.0 + p.norm() + cell.circumradius);
    double best = std::numeric_limits<double>::infinity();
    std::vector<std::size_t> comb;
    auto consider = [&]() {
        const int k = static_cast<int>(comb.size());
        Eigen::MatrixXd V(n, k);
        Eigen::VectorXd b(k);
        for (int i = 0; i < k; ++i) {
            V.col(i) = cell.relevant_vectors[comb[i]];
            b(i) = cell.relevant_halfnorm2[comb[i]];
        }
        Eigen::MatrixXd G = V.transpose() * V;
        Eigen::VectorXd rhs = V.transpose() * p - b;
        Eigen::FullPivLU<Eigen::MatrixXd> lu(G);
        if (!lu.isInvertible()) return;
        Eigen::VectorXd lambda = lu.solve(rhs);
        for (int i = 0; i < k; ++i)
            if (lambda(i) < -tol) return;
        Eigen::VectorXd x = p - V * lambda;
        for (std::size_t f = 0; f < m; ++f) {
            if (cell.relevant_vectors[f].dot(x) > cell.relevant_halfnorm2[f] + tol) return;
        }
        best = std::min(best, (p - x).norm());
    };
    std::function<void(std::size_t, int)> pick = [&](std::size_t start, int left) {
        if (!comb.empty()) consider();
        if (left == 0) return;
        for (std::size_t i = start; i < m; ++i) {
            comb.push_back(i);
            pick(i + 1, left - 1);
            comb.pop_back();
        }
    };
    pick(0, n);
    return best;
}

/// Cell rounding over the region Phi^j B for an open ball B. Returns the
/// index set {z} per mode: floor = cells inside, ceil = cells meeting the
/// region, cover = cells of lattice points in the region, boundary = ceil
/// minus floor. Output sorted by coefficient vector.
inline std::vector<LatticeElement> cell_round(const Ball& region, CellRoundMode mode, int j,
                                              const AlgebraicBase& base, const VoronoiCell& cell) {
    if (!std::isfinite(region.radius) || region.radius < 0.0)
        throw Error(ErrorKind::RegionUnbounded, "cell_round needs a bounded region");
    if (j < -64 || j > 64)
        throw Error(ErrorKind::RegionUnbounded, "scale |j| must not exceed 64");
    std::vector<LatticeElement> out;
    if (region.radius == 0.0) return out;

    // Phi is a similarity, so Phi^j maps balls to balls.
    Eigen::VectorXd center = region.center;
    const Eigen::MatrixXd& step = j >= 0 ? base.phi : base.phi_inverse;
    for (int i = 0; i < std::abs(j); ++i) center = step * center;
    double radius = region.radius * std::pow(base.rho, j);

    const int n = base.degree;
    std::array<long long, kMaxDegree> lo{}, hi{};
    lo = detail::box_lo(base, center, radius + cell.circumradius * (1.0 + 1e-9) + 1e-9, &hi);
    detail::scan_coefficient_box(base, lo, hi, [&](const auto& c, const Eigen::VectorXd& v) {
        Eigen::VectorXd d = v - center;
        double dist = d.norm();
        if (dist > radius + cell.circumradius + 1e-9) return;
        bool keep = false;
        switch (mode) {
            case CellRoundMode::Cover:
                keep = dist < radius;
                break;
            case CellRoundMode::Floor: {
                double far = 0.0;
                for (const auto& vert : cell.vertices)
                    far = std::max(far, (d + vert).norm());
                keep = far < radius;
                break;
            }
            case CellRoundMode::Ceil:
                keep = point_to_cell_distance(-d, cell) < radius;
                break;
            case CellRoundMode::Boundary: {
                double far = 0.0;
                for (const auto& vert : cell.vertices)
                    far = std::max(far, (d + vert).norm());
                bool in_floor = far < radius;
                keep = !in_floor && point_to_cell_distance(-d, cell) < radius;
                break;
            }
        }
        if (keep) out.push_back(detail::element_from_array(c, n));
    });
    return out;
}

/// |boundary cells of the ball of radius N| with an annulus pre-filter; used
/// for the growth-exponent check (expected exponent about n-1).
inline std::size_t count_boundary_cells(double N, const AlgebraicBase& base,
                                        const VoronoiCell& cell) {
    if (!(N > 0.0)) return 0;
    const int n = base.degree;
    std::array<long long, kMaxDegree> lo{}, hi{};
    lo = detail::box_lo(base, Eigen::VectorXd::Zero(n), N + cell.circumradius + 1e-9, &hi);
    const double margin = cell.circumradius + 1e-9;
    std::size_t count = 0;
    detail::scan_coefficient_box(base, lo, hi, [&](const auto&, const Eigen::VectorXd& v) {
        double dist = v.norm();
        if (dist + margin < N || dist - margin > N) return;  // certainly floor / outside
        double far = 0.0;
        for (const auto& vert : cell.vertices) far = std::max(far, (v + vert).norm());
        if (far < N) return;  // floor cell
        if (point_to_cell_distance(-v, cell) < N) ++count;
    });
    return count;
}

}  // namespace latnaf
