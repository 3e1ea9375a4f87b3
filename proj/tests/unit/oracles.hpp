#pragma once

// Test-only reference implementations, kept independent of the library code
// paths they are used to check.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <vector>

#include "vectorforge/geometry.hpp"
#include "vectorforge/raster.hpp"

namespace oracles {

using vectorforge::CubicSegment;
using vectorforge::GradientSet;
using vectorforge::Point;
using vectorforge::Scene;
using vectorforge::Shape;

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
    double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    return lo + u * (hi - lo);
}

// --- de Casteljau evaluation (independent of the Bernstein code path)
inline Point de_casteljau(const CubicSegment& s, double t) {
    auto lerp = [&](Point p, Point q) {
        return Point{p.x + t * (q.x - p.x), p.y + t * (q.y - p.y)};
    };
    Point ab = lerp(s.a, s.b), bc = lerp(s.b, s.c), cd = lerp(s.c, s.d);
    Point abbc = lerp(ab, bc), bccd = lerp(bc, cd);
    return lerp(abbc, bccd);
}

// --- discrete Hausdorff distance between closed polylines (dense sampling)
inline double point_polyline_dist(Point p, const std::vector<Point>& poly) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < poly.size(); ++i) {
        Point a = poly[i], b = poly[(i + 1) % poly.size()];
        Point ab = b - a;
        double len2 = vectorforge::dot(ab, ab);
        double t = len2 > 0.0 ? std::clamp(vectorforge::dot(p - a, ab) / len2, 0.0, 1.0) : 0.0;
        Point x = {a.x + t * ab.x, a.y + t * ab.y};
        best = std::min(best, vectorforge::norm(p - x));
    }
    return best;
}

inline double hausdorff(const std::vector<Point>& a, const std::vector<Point>& b) {
    double h = 0.0;
    for (const Point& p : a) h = std::max(h, point_polyline_dist(p, b));
    for (const Point& p : b) h = std::max(h, point_polyline_dist(p, a));
    return h;
}

// --- exact segment-crossing predicate (textbook form, for the statistical
//     soft/exact comparison)
inline bool segments_cross(Point p1, Point p2, Point p3, Point p4) {
    auto sgn = [](Point a, Point b, Point c) {
        double v = (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
        return (v > 0.0) - (v < 0.0);
    };
    return sgn(p3, p4, p1) * sgn(p3, p4, p2) < 0 && sgn(p1, p2, p3) * sgn(p1, p2, p4) < 0;
}

// --- central finite differences over every scene parameter
struct FdOptions {
    double h_points = 1e-3;
    double h_colors = 1e-4;
};

inline GradientSet fd_scene_gradient(const Scene& scene,
                                     const std::function<double(const Scene&)>& f,
                                     FdOptions opts = {}) {
    GradientSet out = vectorforge::zeros_like(scene);
    Scene work = scene;
    auto central = [&](double& slot, double h) {
        double orig = slot;
        slot = orig + h;
        double fp = f(work);
        slot = orig - h;
        double fm = f(work);
        slot = orig;
        return (fp - fm) / (2.0 * h);
    };
    for (std::size_t s = 0; s < scene.shapes.size(); ++s) {
        for (std::size_t p = 0; p < scene.shapes[s].points.size(); ++p) {
            out.shapes[s].points[p].x =
                central(work.shapes[s].points[p].x, opts.h_points);
            out.shapes[s].points[p].y =
                central(work.shapes[s].points[p].y, opts.h_points);
        }
        out.shapes[s].r = central(work.shapes[s].color.r, opts.h_colors);
        out.shapes[s].g = central(work.shapes[s].color.g, opts.h_colors);
        out.shapes[s].b = central(work.shapes[s].color.b, opts.h_colors);
        out.shapes[s].a = central(work.shapes[s].color.a, opts.h_colors);
    }
    return out;
}

// pass when |a-f| <= abs_tol or relative error <= rel_tol
inline bool grad_close(double analytic, double fd, double rel_tol, double abs_tol) {
    double diff = std::fabs(analytic - fd);
    if (diff <= abs_tol) return true;
    double scale = std::max(std::fabs(analytic), std::fabs(fd));
    return diff <= rel_tol * scale;
}

// --- textbook DBSCAN over RGB triplets (brute-force range queries)
struct RefDbscanResult {
    std::vector<int> labels;  // -1 noise
    int cluster_count = 0;
};

inline RefDbscanResult reference_dbscan(const std::vector<std::array<double, 3>>& pts,
                                        double eps, int min_points) {
    const int n = static_cast<int>(pts.size());
    RefDbscanResult res;
    res.labels.assign(static_cast<std::size_t>(n), -2);
    auto neighbors = [&](int i) {
        std::vector<int> out;
        for (int j = 0; j < n; ++j) {
            double dx = pts[i][0] - pts[j][0];
            double dy = pts[i][1] - pts[j][1];
            double dz = pts[i][2] - pts[j][2];
            if (std::sqrt(dx * dx + dy * dy + dz * dz) <= eps) out.push_back(j);
        }
        return out;
    };
    int cluster = 0;
    for (int i = 0; i < n; ++i) {
        if (res.labels[i] != -2) continue;
        std::vector<int> seeds = neighbors(i);
        if (static_cast<int>(seeds.size()) < min_points) {
            res.labels[i] = -1;
            continue;
        }
        res.labels[i] = cluster;
        for (std::size_t k = 0; k < seeds.size(); ++k) {
            int j = seeds[k];
            if (res.labels[j] == -1) res.labels[j] = cluster;
            if (res.labels[j] != -2) continue;
            res.labels[j] = cluster;
            std::vector<int> more = neighbors(j);
            if (static_cast<int>(more.size()) >= min_points)
                seeds.insert(seeds.end(), more.begin(), more.end());
        }
        ++cluster;
    }
    res.cluster_count = cluster;
    return res;
}

// --- scene generators shared by several suites
inline Shape random_blob(std::mt19937_64& rng, double cx, double cy, double r,
                         int segments = 4) {
    std::vector<Point> pts;
    for (int i = 0; i < 3 * segments; ++i) {
        double ang = 2.0 * M_PI * i / (3.0 * segments);
        double rad = r * uniform(rng, 0.6, 1.4);
        pts.push_back({cx + rad * std::cos(ang), cy + rad * std::sin(ang)});
    }
    Shape sh;
    sh.points = std::move(pts);
    sh.color = {uniform(rng, 0.05, 0.95), uniform(rng, 0.05, 0.95),
                uniform(rng, 0.05, 0.95), uniform(rng, 0.3, 1.0)};
    return sh;
}

inline Scene random_scene(std::mt19937_64& rng, int width, int height, int n_shapes) {
    Scene sc;
    sc.width = width;
    sc.height = height;
    sc.background = {uniform(rng, 0.0, 1.0), uniform(rng, 0.0, 1.0), uniform(rng, 0.0, 1.0)};
    for (int i = 0; i < n_shapes; ++i) {
        double cx = uniform(rng, 0.2 * width, 0.8 * width);
        double cy = uniform(rng, 0.2 * height, 0.8 * height);
        double r = uniform(rng, 0.1, 0.3) * std::min(width, height);
        sc.shapes.push_back(random_blob(rng, cx, cy, r));
    }
    return sc;
}

inline vectorforge::RasterImage random_image(std::mt19937_64& rng, int w, int h) {
    vectorforge::RasterImage img;
    img.width = w;
    img.height = h;
    img.data.resize(static_cast<std::size_t>(w) * h * 3);
    for (double& v : img.data) v = uniform(rng, 0.0, 1.0);
    return img;
}

}  // namespace oracles
