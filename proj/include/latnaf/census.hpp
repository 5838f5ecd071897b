#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <string>
#include <thread>
#include <vector>

#include "latnaf/algebra.hpp"
#include "latnaf/analysis.hpp"
#include "latnaf/digits.hpp"
#include "latnaf/errors.hpp"
#include "latnaf/numeric.hpp"
#include "latnaf/tiling.hpp"
#include "latnaf/wnaf.hpp"

namespace latnaf {

inline constexpr double kCensusPointBudget = 1.25e6;

/// Lebesgue measure of the Euclidean unit ball in R^n.
inline double unit_ball_volume(int n) {
    return std::pow(M_PI, n / 2.0) / std::tgamma(n / 2.0 + 1.0);
}

struct CensusSample {
    double N = 0.0;
    BigInt Z;
    double main_term = 0.0;
    double psi_hat = 0.0;
};

struct CensusReport {
    std::uint32_t eta = 0;
    int degree = 0;
    double rho = 0.0;
    Rational E;
    double lambda_U = 0.0;
    int per_period = 0;
    std::string config;  // base/w/digit-set fingerprint
    std::vector<CensusSample> samples;
};

namespace detail {

/// Splits the outermost coefficient axis into contiguous chunks and runs the
/// per-point tally in parallel; the reduction is integer addition in chunk
/// order, so the result does not depend on scheduling.
template <typename PerPoint>
void parallel_ball_scan(double N, const AlgebraicBase& base, int jobs, PerPoint&& per_point) {
    const int n = base.degree;
    std::array<long long, kMaxDegree> lo{}, hi{};
    lo = box_lo(base, Eigen::VectorXd::Zero(n), N, &hi);
    jobs = std::max(1, jobs);
    long long span = hi[0] - lo[0] + 1;
    jobs = static_cast<int>(std::min<long long>(jobs, span));
    std::vector<std::thread> workers;
    const double n2max = N * N;
    for (int t = 0; t < jobs; ++t) {
        long long a = lo[0] + span * t / jobs;
        long long b = lo[0] + span * (t + 1) / jobs - 1;
        workers.emplace_back([&, t, a, b]() {
            auto slab_lo = lo;
            auto slab_hi = hi;
            slab_lo[0] = a;
            slab_hi[0] = b;
            scan_coefficient_box(base, slab_lo, slab_hi,
                                 [&](const auto& c, const Eigen::VectorXd& v) {
                                     double d2 = v.squaredNorm();
                                     if (d2 < n2max) per_point(t, c, d2);
                                 });
        });
    }
    for (auto& th : workers) th.join();
}

}  // namespace detail

/// Z_eta(N): total occurrences of the digit with index eta over the w-NAF
/// expansions of all lattice points with ||Sigma(z)|| < N. Exact; asserts the
/// expansion-length bound floor(log_rho N) + J_0 + 1.
inline BigInt census(std::uint32_t eta, double N, const AlgebraicBase& base,
                     const VoronoiCell& cell, const DigitSet& ds, int jobs = 1) {
    if (!(N > 0.0)) throw Error(ErrorKind::UsageError, "N must be positive");
    if (eta == 0 || eta >= ds.digits.size())
        throw Error(ErrorKind::UsageError, "eta must index a nonzero digit");
    BoundsReport bounds = compute_bounds(base, cell, ds);
    const int max_len =
        static_cast<int>(std::floor(std::log(N) / std::log(base.rho) + 1e-12)) + bounds.J_0 + 1;
    jobs = std::max(1, jobs);
    std::vector<BigInt> tallies(jobs, BigInt(0));
    std::vector<int> max_lens(jobs, 0);
    detail::parallel_ball_scan(N, base, jobs, [&](int t, const auto& c, double) {
        LatticeElement z = detail::element_from_array(c, base.degree);
        auto [hits, len] = expand_count(std::move(z), ds, base, eta);
        tallies[t] += hits;
        max_lens[t] = std::max(max_lens[t], len);
    });
    BigInt total = 0;
    int observed = 0;
    for (int t = 0; t < jobs; ++t) {
        total += tallies[t];
        observed = std::max(observed, max_lens[t]);
    }
    if (observed > max_len)
        throw Error(ErrorKind::CardinalityMismatch,
                    "expansion length " + std::to_string(observed) +
                        " exceeds the bound " + std::to_string(max_len));
    return total;
}

/// Geometric sweep N_i = N_min rho^{i/K} spanning at least three full
/// periods of log_rho N. Enumerates the largest ball once and reads every
/// sample off per-point (norm, count) prefix sums.
inline CensusReport sweep(std::uint32_t eta, double n_min, double n_max, int per_period,
                          const AlgebraicBase& base, const VoronoiCell& cell, const DigitSet& ds,
                          int jobs = 1) {
    if (eta == 0 || eta >= ds.digits.size())
        throw Error(ErrorKind::UsageError, "eta must index a nonzero digit");
    if (!(n_min > 0.0) || !(n_max > n_min))
        throw Error(ErrorKind::UsageError, "need 0 < n_min < n_max");
    if (per_period < 1) throw Error(ErrorKind::UsageError, "per-period must be positive");
    const double logrho = std::log(base.rho);
    const double span = std::log(n_max / n_min) / logrho;
    if (span < 3.0 - 1e-9)
        throw Error(ErrorKind::UsageError, "sweep must span at least 3 periods of log_rho N");
    const int n = base.degree;
    double lambda_u = unit_ball_volume(n);
    double expected_points = lambda_u * std::pow(n_max, n) / cell.cell_volume;
    if (expected_points > kCensusPointBudget)
        throw Error(ErrorKind::BudgetExceeded,
                    "about " + std::to_string(static_cast<long long>(expected_points)) +
                        " lattice points at N_max; budget is 10^6");

    CensusReport rep;
    rep.eta = eta;
    rep.degree = n;
    rep.rho = base.rho;
    rep.E = expectation_constant(base, ds.w);
    rep.lambda_U = lambda_u;
    rep.per_period = per_period;
    {
        std::string mp;
        for (const auto& a : base.minpoly_coeffs) mp += (mp.empty() ? "" : ",") + a.str();
        rep.config = "minpoly=" + mp + ";w=" + std::to_string(ds.w) +
                     ";digitset=" + ds.fingerprint + ";eta=" + std::to_string(eta);
    }

    // Grid, each radius nudged by +1e-9 to step off lattice-shell norms.
    std::vector<double> grid;
    int count = static_cast<int>(std::floor(span * per_period + 1e-9)) + 1;
    for (int i = 0; i < count; ++i)
        grid.push_back(n_min * std::pow(base.rho, static_cast<double>(i) / per_period) + 1e-9);

    BoundsReport bounds = compute_bounds(base, cell, ds);
    const double big_n = grid.back();
    const int max_len =
        static_cast<int>(std::floor(std::log(big_n) / std::log(base.rho) + 1e-12)) +
        bounds.J_0 + 1;

    jobs = std::max(1, jobs);
    struct PointStat {
        double norm2;
        std::uint32_t hits;
    };
    std::vector<std::vector<PointStat>> slabs(jobs);
    std::vector<int> max_lens(jobs, 0);
    detail::parallel_ball_scan(big_n, base, jobs, [&](int t, const auto& c, double d2) {
        LatticeElement z = detail::element_from_array(c, base.degree);
        auto [hits, len] = expand_count(std::move(z), ds, base, eta);
        slabs[t].push_back({d2, static_cast<std::uint32_t>(hits)});
        max_lens[t] = std::max(max_lens[t], len);
    });
    std::vector<PointStat> stats;
    for (int t = 0; t < jobs; ++t) {
        stats.insert(stats.end(), slabs[t].begin(), slabs[t].end());
        if (max_lens[t] > max_len)
            throw Error(ErrorKind::CardinalityMismatch, "expansion length bound violated");
        slabs[t].clear();
        slabs[t].shrink_to_fit();
    }
    std::sort(stats.begin(), stats.end(),
              [](const PointStat& a, const PointStat& b) { return a.norm2 < b.norm2; });

    std::size_t pos = 0;
    BigInt acc = 0;
    double e_val = to_double(rep.E);
    for (double N : grid) {
        double n2 = N * N;
        while (pos < stats.size() && stats[pos].norm2 < n2) acc += stats[pos++].hits;
        CensusSample s;
        s.N = N;
        s.Z = acc;
        double logn = std::log(N) / logrho;
        s.main_term = std::pow(N, n) * lambda_u * e_val * logn;
        s.psi_hat = (acc.convert_to<double>() - s.main_term) / std::pow(N, n);
        rep.samples.push_back(std::move(s));
    }
    return rep;
}

inline void write_census_csv(const CensusReport& rep, std::ostream& out) {
    if (rep.samples.empty()) throw Error(ErrorKind::IoFailure, "empty census report");
    out << "# latnaf census; " << rep.config << "\n";
    out << "# seed=0; per-period=" << rep.per_period << "; rho=" << fmt_double(rep.rho)
        << "; E=" << to_string(rep.E) << "; lambda_U=" << fmt_double(rep.lambda_U) << "\n";
    out << "N,log_rho_N,Z,main,psi_hat\n";
    double logrho = std::log(rep.rho);
    for (const auto& s : rep.samples) {
        out << fmt_double(s.N) << "," << fmt_double(std::log(s.N) / logrho) << "," << s.Z.str()
            << "," << fmt_double(s.main_term) << "," << fmt_double(s.psi_hat) << "\n";
    }
}

inline void write_census_csv(const CensusReport& rep, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::IoFailure, "cannot write " + path);
    write_census_csv(rep, static_cast<std::ostream&>(out));
}

/// Plot of psi-hat against the fractional part of log_rho N; each period is
/// drawn as its own polyline so successive periods overlay.
inline void write_census_svg(const CensusReport& rep, std::ostream& out) {
    if (rep.samples.empty()) throw Error(ErrorKind::IoFailure, "empty census report");
    const double W = 720.0, H = 360.0, ml = 60.0, mr = 20.0, mt = 20.0, mb = 40.0;
    double logrho = std::log(rep.rho);
    double ymin = 1e300, ymax = -1e300;
    for (const auto& s : rep.samples) {
        ymin = std::min(ymin, s.psi_hat);
        ymax = std::max(ymax, s.psi_hat);
    }
    double pad = 0.1 * std::max(ymax - ymin, 1e-12);
    ymin -= pad;
    ymax += pad;
    auto sx = [&](double frac) { return ml + frac * (W - ml - mr); };
    auto sy = [&](double y) { return mt + (ymax - y) / (ymax - ymin) * (H - mt - mb); };
    static const char* palette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                                    "#9467bd", "#8c564b", "#e377c2"};
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 " << W << " " << H
        << "\">\n";
    out << "<!-- latnaf census; " << rep.config << "; seed=0 -->\n";
    out << "<rect width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n";
    out << "<line x1=\"" << sx(0) << "\" y1=\"" << sy(ymin) << "\" x2=\"" << sx(1) << "\" y2=\""
        << sy(ymin) << "\" stroke=\"#444\" stroke-width=\"1\"/>\n";
    out << "<line x1=\"" << sx(0) << "\" y1=\"" << sy(ymin) << "\" x2=\"" << sx(0) << "\" y2=\""
        << sy(ymax) << "\" stroke=\"#444\" stroke-width=\"1\"/>\n";
    out << "<text x=\"" << sx(0.5) << "\" y=\"" << H - 8 << "\" font-size=\"12\" "
        << "text-anchor=\"middle\">fractional part of log_rho N</text>\n";
    out << "<text x=\"14\" y=\"" << sy((ymin + ymax) / 2) << "\" font-size=\"12\" "
        << "transform=\"rotate(-90 14," << sy((ymin + ymax) / 2) << ")\" "
        << "text-anchor=\"middle\">psi_hat</text>\n";

    long long period = std::numeric_limits<long long>::min();
    std::string points;
    int color = -1;
    auto flush = [&]() {
        if (!points.empty()) {
            out << "<polyline fill=\"none\" stroke=\"" << palette[color % 7]
                << "\" stroke-width=\"1.5\" points=\"" << points << "\"/>\n";
            points.clear();
        }
    };
    for (const auto& s : rep.samples) {
        double x = std::log(s.N) / logrho;
        long long p = static_cast<long long>(std::floor(x + 1e-12));
        if (p != period) {
            flush();
            period = p;
            ++color;
        }
        double frac = x - std::floor(x + 1e-12);
        if (!points.empty()) points += " ";
        points += fmt_double(sx(frac), 8) + "," + fmt_double(sy(s.psi_hat), 8);
    }
    flush();
    out << "</svg>\n";
}

inline void write_census_svg(const CensusReport& rep, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::IoFailure, "cannot write " + path);
    write_census_svg(rep, static_cast<std::ostream&>(out));
}

}  // namespace latnaf
