// latnaf command line: numeral systems over lattices with an algebraic
// integer base. Subcommands: base check, tiling info, digitset build,
// expand, stats blocks, render fd|charset, dimension, census.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "latnaf/algebra.hpp"
#include "latnaf/analysis.hpp"
#include "latnaf/base_file.hpp"
#include "latnaf/census.hpp"
#include "latnaf/digits.hpp"
#include "latnaf/render.hpp"
#include "latnaf/tiling.hpp"
#include "latnaf/wnaf.hpp"

namespace {

using namespace latnaf;

constexpr const char* kVersion = "latnaf 1.0.0";

struct Verdict {
    std::string name;
    bool ok;
    std::string detail;
};

void print_verdicts(const std::vector<Verdict>& verdicts, std::ostream& out) {
    bool all = true;
    for (const auto& v : verdicts) {
        out << "  [" << (v.ok ? "ok" : "FAIL") << "] " << v.name;
        if (!v.detail.empty()) out << ": " << v.detail;
        out << "\n";
        all = all && v.ok;
    }
    if (!all) throw Error(ErrorKind::CardinalityMismatch, "invariant verification failed");
}

LatticeElement random_element(std::mt19937_64& rng, int n, long long lo, long long hi) {
    std::uniform_int_distribution<long long> dist(lo, hi);
    LatticeElement z(n);
    for (int i = 0; i < n; ++i) z[i] = dist(rng);
    return z;
}

std::string roots_string(const AlgebraicBase& base) {
    std::string s;
    for (const auto& r : base.roots) {
        if (!s.empty()) s += ", ";
        s += fmt_double(r.real(), 12);
        if (r.imag() != 0.0) s += (r.imag() > 0 ? "+" : "-") + fmt_double(std::abs(r.imag()), 12) + "i";
    }
    return s;
}

void cmd_base_check(const std::string& file, std::uint64_t seed, std::ostream& out) {
    AlgebraicBase base = load_base_file(file);
    out << "base file: " << file << "\n";
    if (!base.label.empty()) out << "label: " << base.label << "\n";
    out << "n = " << base.degree << ", s = " << base.real_embeddings << ", t = "
        << base.complex_pairs << "\n";
    out << "rho = " << fmt_double(base.rho) << ", rho^n = " << base.norm_abs.str() << "\n";
    out << "embeddings: " << roots_string(base) << "\n";
    out << "seed = " << seed << "\n";

    std::vector<Verdict> verdicts;
    double rho = base.rho;
    int n = base.degree;
    double eqm = 0.0;
    for (const auto& r : base.roots) eqm = std::max(eqm, std::abs(std::abs(r) - rho) / rho);
    verdicts.push_back({"roots equimodular", eqm <= 1e-8, "max rel dev " + fmt_double(eqm, 3)});
    double detphi = std::abs(base.phi.determinant());
    verdicts.push_back({"|det Phi| = rho^n",
                        std::abs(detphi - std::pow(rho, n)) <= 1e-9 * std::pow(rho, n),
                        fmt_double(detphi)});
    Eigen::MatrixXd gram = base.phi.transpose() * base.phi;
    double confdev = (gram - rho * rho * Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff();
    verdicts.push_back({"||Phi|| = rho and ||Phi^-1|| = 1/rho", confdev <= 1e-9 * rho * rho,
                        "conformality defect " + fmt_double(confdev, 3)});
    double detb = std::abs(base.embedding_matrix.determinant());
    verdicts.push_back({"unit covolume embedding", std::abs(detb - 1.0) <= 1e-9,
                        "|det| = " + fmt_double(detb)});

    std::mt19937_64 rng(seed);
    double worst_comm = 0.0, worst_add = 0.0;
    for (int i = 0; i < 200; ++i) {
        LatticeElement x = random_element(rng, n, -100, 100);
        LatticeElement y = random_element(rng, n, -100, 100);
        worst_comm = std::max(worst_comm,
                              (embed(mul_by_tau(x, base), base) - base.phi * embed(x, base))
                                  .norm());
        worst_add = std::max(
            worst_add, (embed(x + y, base) - embed(x, base) - embed(y, base)).norm());
    }
    verdicts.push_back({"Sigma(tau x) = Phi Sigma(x)", worst_comm <= 1e-9,
                        "max dev " + fmt_double(worst_comm, 3)});
    verdicts.push_back({"Sigma additive", worst_add <= 1e-9, "max dev " + fmt_double(worst_add, 3)});
    print_verdicts(verdicts, out);
}

void cmd_tiling_info(const std::string& file, std::ostream& out) {
    AlgebraicBase base = load_base_file(file);
    VoronoiCell cell = build_voronoi(base);
    out << "r = " << fmt_double(cell.inradius) << "\n";
    out << "R = " << fmt_double(cell.circumradius) << "\n";
    out << "R/r = " << fmt_double(cell.circumradius / cell.inradius) << "\n";
    out << "d_Lambda = " << fmt_double(cell.cell_volume) << "\n";
    out << "relevant vectors (" << cell.relevant_coeffs.size() << "):\n";
    for (std::size_t i = 0; i < cell.relevant_coeffs.size(); ++i) {
        out << "  " << cell.relevant_coeffs[i].str() << "  ->  (";
        for (int k = 0; k < base.degree; ++k)
            out << (k ? "," : "") << fmt_double(cell.relevant_vectors[i](k), 9);
        out << ")\n";
    }
    out << "vertices: " << cell.vertices.size() << "\n";
}

void cmd_digitset_build(const std::string& file, int w, const std::string& emit,
                        std::ostream& out) {
    AlgebraicBase base = load_base_file(file);
    VoronoiCell cell = build_voronoi(base);
    DigitSet ds = build_digit_set(base, cell, w);
    if (emit == "csv") {
        out << "# latnaf digitset; minpoly-file=" << file << "; w=" << w << "; fingerprint="
            << ds.fingerprint << "\n";
        out << "index,coeffs,norm\n";
        for (std::size_t i = 0; i < ds.digits.size(); ++i) {
            out << i << ",\"" << ds.digits[i].str() << "\","
                << fmt_double(embed_norm(ds.digits[i], base)) << "\n";
        }
        return;
    }
    out << "w = " << w << ", fingerprint = " << ds.fingerprint << "\n";
    out << "digits (" << ds.size() << "):\n";
    for (std::size_t i = 0; i < ds.digits.size(); ++i)
        out << "  [" << i << "] " << ds.digits[i].str()
            << "  norm " << fmt_double(embed_norm(ds.digits[i], base), 9) << "\n";
    std::vector<Verdict> verdicts;
    BigInt expected = digit_set_cardinality(base, w);
    verdicts.push_back({"cardinality rho^{n(w-1)}(rho^n-1)+1", BigInt(ds.size()) == expected,
                        ds.digits.size() < 64 ? expected.str() : ""});
    bool nz_ok = true, norm_ok = true;
    double cap = std::pow(base.rho, w) * cell.circumradius * (1 + 1e-9) + 1e-9;
    for (std::size_t i = 1; i < ds.digits.size(); ++i) {
        nz_ok = nz_ok && !divisible_by_tau(ds.digits[i], base);
        norm_ok = norm_ok && embed_norm(ds.digits[i], base) <= cap;
    }
    verdicts.push_back({"no nonzero digit divisible by tau", nz_ok, ""});
    verdicts.push_back({"digits inside Phi^w T (norm <= rho^w R)", norm_ok, ""});
    verdicts.push_back({"one representative per residue class", ds.residue_index.size() ==
                        ds.size() - 1, ""});
    out << "boundary ties resolved lexicographically: " << ds.tie_classes << " classes\n";
    print_verdicts(verdicts, out);
}

std::vector<BigInt> parse_coeffs(const std::string& txt) {
    std::vector<BigInt> coeffs;
    std::stringstream ss(txt);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        try {
            coeffs.emplace_back(tok);
        } catch (const std::exception&) {
            throw Error(ErrorKind::UsageError, "bad coefficient '" + tok + "'");
        }
    }
    if (coeffs.empty()) throw Error(ErrorKind::UsageError, "empty coefficient list");
    return coeffs;
}

void cmd_expand(const std::string& file, int w, const std::string& ztxt, std::ostream& out) {
    AlgebraicBase base = load_base_file(file);
    VoronoiCell cell = build_voronoi(base);
    DigitSet ds = build_digit_set(base, cell, w);
    std::vector<BigInt> coeffs = parse_coeffs(ztxt);
    if (static_cast<int>(coeffs.size()) != base.degree)
        throw Error(ErrorKind::UsageError, "expected " + std::to_string(base.degree) +
                                               " coefficients");
    LatticeElement z = LatticeElement::from_coeffs(coeffs);
    WNafExpansion e = expand(z, ds, base);
    for (int j = e.length() - 1; j >= 0; --j)
        out << "j=" << j << " d=" << ds.digits[e.digit_indices[j]].str() << "\n";
    LatticeElement back = value(e, ds, base);
    out << "value check: " << (back == z ? "ok" : "FAIL") << " (" << back.str() << ")\n";
    BoundsReport rep = compute_bounds(base, cell, ds);
    out << "corollary bounds check: " << (check_value_bounds(e, rep, base, ds) ? "ok" : "FAIL")
        << " (B_L=" << fmt_double(rep.B_L, 9) << ", B_U=" << fmt_double(rep.B_U, 9) << ")\n";
    if (back != z) throw Error(ErrorKind::CardinalityMismatch, "value(expand(z)) != z");
}

void cmd_stats_blocks(const std::string& file, int w, int m_max, std::ostream& out) {
    AlgebraicBase base = load_base_file(file);
    VoronoiCell cell = build_voronoi(base);
    DigitSet ds = build_digit_set(base, cell, w);
    Rational E = expectation_constant(base, w);
    out << "# latnaf stats blocks; w=" << w << "; E=" << to_string(E)
        << "; mu=" << to_string(error_decay_rate(base, w)) << "; digitset=" << ds.fingerprint
        << "\n";
    out << "m,C_m,mean_count,E_m\n";
    for (int m = 0; m <= m_max; ++m) {
        Rational mean = m == 0 ? Rational(0) : mean_digit_count(m, 1, ds, MeanMode::Auto);
        out << m << "," << count_nafs(m, ds).str() << "," << fmt_double(to_double(mean)) << ","
            << fmt_double(to_double(E) * m) << "\n";
    }
}

void cmd_dimension(const std::string& file, int w, std::ostream& out) {
    AlgebraicBase base = load_base_file(file);
    VoronoiCell cell = build_voronoi(base);
    DigitSet ds = build_digit_set(base, cell, w);
    BoundsReport bounds = compute_bounds(base, cell, ds);
    DimensionReport rep = boundary_dimension_bound(base, cell, ds, w);
    out << "k_0 = " << bounds.k_0 << ", k = " << rep.k << "\n";
    out << "sigma = " << fmt_double(rep.sigma) << " (Perron root " << fmt_double(rep.sigma *
        base.norm_abs.convert_to<double>()) << ")\n";
    out << "boundary box-dimension bound: n + log_rho sigma = " << fmt_double(rep.bound) << "\n";
    out << "q(rho^-n) = " << to_string(rep.q_at_rho) << "\n";
    std::vector<Verdict> verdicts;
    verdicts.push_back({"q(rho^-n) = (rho^n-1) rho^{n(w-k-2)} exactly", rep.identity_ok,
                        to_string(rep.q_at_rho)});
    verdicts.push_back({"sigma < 1", rep.sigma < 1.0, fmt_double(rep.sigma)});
    verdicts.push_back({"bound < n", rep.bound < base.degree, fmt_double(rep.bound)});
    print_verdicts(verdicts, out);
}

void cmd_render(const std::string& kind, const std::string& file, int w, int depth,
                std::uint32_t eta, int j, const std::string& emit, const std::string& outpath) {
    AlgebraicBase base = load_base_file(file);
    VoronoiCell cell = build_voronoi(base);
    DigitSet ds = build_digit_set(base, cell, w);
    std::vector<LatticeElement> cells;
    int scale = 0;
    if (kind == "fd") {
        FundamentalDomainApprox fd = fundamental_domain_cells(depth, ds, base, cell);
        cells = std::move(fd.cells);
        scale = depth;
        std::cout << "cells: " << cells.size() << ", measure estimate " << fmt_double(fd.measure)
                  << " (target " << fmt_double(fundamental_domain_measure(base, cell, w))
                  << ")\n";
    } else {
        CharSetApprox cs = charset_approx(eta, j, ds, base, cell);
        scale = j + w;
        std::cout << "cells: " << cs.cells.size() << ", measure " << fmt_double(cs.measure)
                  << ", beta_j " << fmt_double(cs.beta_j) << "\n";
        cells = std::move(cs.cells);
    }
    if (emit == "ppm")
        render_cells_ppm(cells, scale, base, cell, outpath);
    else
        render_cells_svg(cells, scale, base, cell, outpath);
    std::cout << "wrote " << outpath << "\n";
}

void cmd_census(const std::string& file, int w, std::uint32_t eta, double n_min, double n_max,
                int per_period, const std::string& emit, const std::string& outpath, int jobs) {
    AlgebraicBase base = load_base_file(file);
    VoronoiCell cell = build_voronoi(base);
    DigitSet ds = build_digit_set(base, cell, w);
    CensusReport rep = sweep(eta, n_min, n_max, per_period, base, cell, ds, jobs);
    if (emit == "svg") {
        if (outpath.empty()) throw Error(ErrorKind::UsageError, "svg output needs -o <file>");
        write_census_svg(rep, outpath);
    } else if (!outpath.empty()) {
        write_census_csv(rep, outpath);
    } else {
        write_census_csv(rep, std::cout);
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"w-NAF numeral systems over lattices with an algebraic integer base"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);
    std::uint64_t seed = 0;
    app.add_option("--seed", seed, "seed for randomized verification checks")->capture_default_str();

    std::string file, ztxt, emit, outpath, kind;
    int w = 2, m_max = 20, depth = 6, jcs = 4, per_period = 16, jobs = 1;
    std::uint32_t eta = 1;
    double n_min = 4.0, n_max = 64.0;

    auto* base_cmd = app.add_subcommand("base", "base inspection");
    auto* base_check = base_cmd->add_subcommand("check", "load a base file and verify invariants");
    base_check->add_option("file", file, "base file")->required();

    auto* tiling_cmd = app.add_subcommand("tiling", "Voronoi tiling inspection");
    auto* tiling_info = tiling_cmd->add_subcommand("info", "print r, R, d_Lambda, relevant vectors");
    tiling_info->add_option("file", file, "base file")->required();

    auto* digitset_cmd = app.add_subcommand("digitset", "digit set construction");
    auto* digitset_build = digitset_cmd->add_subcommand("build", "build and validate the digit set");
    digitset_build->add_option("file", file, "base file")->required();
    digitset_build->add_option("--w", w, "window width")->required();
    digitset_build->add_option("--emit", emit, "output format (csv)");
    digitset_build->add_option("-o,--output", outpath, "output file (default stdout)");

    auto* expand_cmd = app.add_subcommand("expand", "w-NAF expansion of a lattice element");
    expand_cmd->add_option("file", file, "base file")->required();
    expand_cmd->add_option("--w", w, "window width")->required();
    expand_cmd->add_option("--z", ztxt, "comma-separated coefficients")->required();

    auto* stats_cmd = app.add_subcommand("stats", "block statistics");
    auto* stats_blocks = stats_cmd->add_subcommand("blocks", "C_m, mean digit count, E*m as CSV");
    stats_blocks->add_option("file", file, "base file")->required();
    stats_blocks->add_option("--w", w, "window width")->required();
    stats_blocks->add_option("--m-max", m_max, "largest length")->capture_default_str();
    stats_blocks->add_option("-o,--output", outpath, "output file (default stdout)");

    auto* render_cmd = app.add_subcommand("render", "fundamental domain / characteristic sets");
    auto* render_fd = render_cmd->add_subcommand("fd", "truncated fundamental domain");
    render_fd->add_option("file", file, "base file")->required();
    render_fd->add_option("--w", w, "window width")->required();
    render_fd->add_option("--depth", depth, "truncation depth")->capture_default_str();
    render_fd->add_option("--emit", emit, "svg (default) or ppm");
    render_fd->add_option("-o,--output", outpath, "output file")->required();
    auto* render_cs = render_cmd->add_subcommand("charset", "characteristic set approximation");
    render_cs->add_option("file", file, "base file")->required();
    render_cs->add_option("--w", w, "window width")->required();
    render_cs->add_option("--eta", eta, "digit index")->required();
    render_cs->add_option("--j", jcs, "approximation index")->capture_default_str();
    render_cs->add_option("--emit", emit, "svg (default) or ppm");
    render_cs->add_option("-o,--output", outpath, "output file")->required();

    auto* dim_cmd = app.add_subcommand("dimension", "boundary box-dimension bound");
    dim_cmd->add_option("file", file, "base file")->required();
    dim_cmd->add_option("--w", w, "window width")->required();

    auto* census_cmd = app.add_subcommand("census", "digit occurrences over norm balls");
    census_cmd->add_option("file", file, "base file")->required();
    census_cmd->add_option("--w", w, "window width")->required();
    census_cmd->add_option("--eta", eta, "digit index")->required();
    census_cmd->add_option("--n-min", n_min, "smallest radius")->required();
    census_cmd->add_option("--n-max", n_max, "largest radius")->required();
    census_cmd->add_option("--per-period", per_period, "samples per log_rho period")
        ->capture_default_str();
    census_cmd->add_option("--emit", emit, "csv (default) or svg");
    census_cmd->add_option("-o,--output", outpath, "output file");
    census_cmd->add_option("--jobs", jobs, "worker threads")->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    try {
        auto with_output = [&](auto&& fn) {
            if (!outpath.empty()) {
                std::ofstream out(outpath, std::ios::binary);
                if (!out) throw latnaf::Error(latnaf::ErrorKind::IoFailure,
                                              "cannot write " + outpath);
                fn(out);
            } else {
                fn(std::cout);
            }
        };
        if (base_check->parsed())
            cmd_base_check(file, seed, std::cout);
        else if (tiling_info->parsed())
            cmd_tiling_info(file, std::cout);
        else if (digitset_build->parsed())
            with_output([&](std::ostream& out) { cmd_digitset_build(file, w, emit, out); });
        else if (expand_cmd->parsed())
            cmd_expand(file, w, ztxt, std::cout);
        else if (stats_blocks->parsed())
            with_output([&](std::ostream& out) { cmd_stats_blocks(file, w, m_max, out); });
        else if (render_fd->parsed())
            cmd_render("fd", file, w, depth, eta, jcs, emit, outpath);
        else if (render_cs->parsed())
            cmd_render("charset", file, w, depth, eta, jcs, emit, outpath);
        else if (dim_cmd->parsed())
            cmd_dimension(file, w, std::cout);
        else if (census_cmd->parsed())
            cmd_census(file, w, eta, n_min, n_max, per_period, emit, outpath, jobs);
        else {
            std::cerr << app.help() << "\n";
            return 1;
        }
    } catch (const latnaf::Error& err) {
        std::cerr << "error (" << latnaf::error_kind_name(err.kind()) << "): " << err.what()
                  << "\n";
        return latnaf::exit_code_for(err.kind());
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << "\n";
        return 3;
    }
    return 0;
}
