#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <string>
#include <unordered_set>
#include <vector>

#include "latnaf/algebra.hpp"
#include "latnaf/errors.hpp"
#include "latnaf/tiling.hpp"

namespace latnaf {

/// Renders a set of cell indices at scale Phi^{-scale} as SVG polygons
/// (one Voronoi translate per cell). Two-dimensional bases only.
inline void render_cells_svg(const std::vector<LatticeElement>& cells, int scale,
                             const AlgebraicBase& base, const VoronoiCell& cell,
                             std::ostream& out, const std::string& fill = "#b0b0b0") {
    if (base.degree != 2)
        throw Error(ErrorKind::UsageError, "rendering is available for n = 2 only");
    if (cells.empty()) throw Error(ErrorKind::IoFailure, "nothing to render");

    // Vertices ordered around the cell once.
    std::vector<Eigen::VectorXd> verts = cell.vertices;
    std::sort(verts.begin(), verts.end(), [](const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
        return std::atan2(a(1), a(0)) < std::atan2(b(1), b(0));
    });

    Eigen::MatrixXd down = Eigen::MatrixXd::Identity(2, 2);
    const Eigen::MatrixXd& step = scale >= 0 ? base.phi_inverse : base.phi;
    for (int i = 0; i < std::abs(scale); ++i) down = step * down;

    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    std::vector<std::vector<std::pair<double, double>>> polys;
    polys.reserve(cells.size());
    for (const auto& c : cells) {
        Eigen::VectorXd center = embed(c, base);
        std::vector<std::pair<double, double>> poly;
        for (const auto& v : verts) {
            Eigen::VectorXd p = down * (center + v);
            poly.emplace_back(p(0), p(1));
            xmin = std::min(xmin, p(0));
            xmax = std::max(xmax, p(0));
            ymin = std::min(ymin, p(1));
            ymax = std::max(ymax, p(1));
        }
        polys.push_back(std::move(poly));
    }
    double w = xmax - xmin, h = ymax - ymin;
    double m = 0.03 * std::max(w, h);
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"" << fmt_double(xmin - m, 8)
        << " " << fmt_double(-(ymax + m), 8) << " " << fmt_double(w + 2 * m, 8) << " "
        << fmt_double(h + 2 * m, 8) << "\">\n";
    for (const auto& poly : polys) {
        out << "<path d=\"";
        for (std::size_t i = 0; i < poly.size(); ++i) {
            out << (i == 0 ? "M" : "L") << fmt_double(poly[i].first, 8) << " "
                << fmt_double(-poly[i].second, 8);
        }
        out << "Z\" fill=\"" << fill << "\" stroke=\"none\"/>\n";
    }
    out << "</svg>\n";
}

inline void render_cells_svg(const std::vector<LatticeElement>& cells, int scale,
                             const AlgebraicBase& base, const VoronoiCell& cell,
                             const std::string& path, const std::string& fill = "#b0b0b0") {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::IoFailure, "cannot write " + path);
    render_cells_svg(cells, scale, base, cell, static_cast<std::ostream&>(out), fill);
}

/// Raster alternative (binary PPM): each pixel is classified by the cell of
/// its Phi^scale image.
inline void render_cells_ppm(const std::vector<LatticeElement>& cells, int scale,
                             const AlgebraicBase& base, const VoronoiCell& cell,
                             const std::string& path, int width = 640) {
    if (base.degree != 2)
        throw Error(ErrorKind::UsageError, "rendering is available for n = 2 only");
    if (cells.empty()) throw Error(ErrorKind::IoFailure, "nothing to render");

    auto pack = [](const LatticeElement& z) {
        auto a = static_cast<std::uint64_t>(z[0].convert_to<long long>() + (1ll << 31));
        auto b = static_cast<std::uint64_t>(z[1].convert_to<long long>() + (1ll << 31));
        return (a << 32) | b;
    };
    std::unordered_set<std::uint64_t> inset;
    for (const auto& c : cells) inset.insert(pack(c));

    Eigen::MatrixXd down = Eigen::MatrixXd::Identity(2, 2);
    {
        const Eigen::MatrixXd& step = scale >= 0 ? base.phi_inverse : base.phi;
        for (int i = 0; i < std::abs(scale); ++i) down = step * down;
    }
    Eigen::MatrixXd up = down.inverse();

    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    for (const auto& c : cells) {
        Eigen::VectorXd p = down * embed(c, base);
        double rad = cell.circumradius * std::pow(base.rho, -scale);
        xmin = std::min(xmin, p(0) - rad);
        xmax = std::max(xmax, p(0) + rad);
        ymin = std::min(ymin, p(1) - rad);
        ymax = std::max(ymax, p(1) + rad);
    }
    int height = static_cast<int>(std::lround(width * (ymax - ymin) / (xmax - xmin)));
    height = std::max(height, 8);

    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::IoFailure, "cannot write " + path);
    out << "P6\n" << width << " " << height << "\n255\n";
    std::vector<unsigned char> row(static_cast<std::size_t>(width) * 3);
    for (int py = 0; py < height; ++py) {
        double y = ymax - (py + 0.5) * (ymax - ymin) / height;
        for (int px = 0; px < width; ++px) {
            double x = xmin + (px + 0.5) * (xmax - xmin) / width;
            Eigen::VectorXd p(2);
            p << x, y;
            Eigen::VectorXd q = up * p;
            std::vector<LatticeElement> near = nearest_lattice_points(q, cell, base);
            bool hit = inset.count(pack(near.front())) > 0;
            unsigned char g = hit ? 176 : 255;
            row[3 * px] = g;
            row[3 * px + 1] = g;
            row[3 * px + 2] = g;
        }
        out.write(reinterpret_cast<const char*>(row.data()), row.size());
    }
}

}  // namespace latnaf
