#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace vectorforge {

struct Point {
    double x = 0.0;
    double y = 0.0;
};

inline Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
inline Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
inline Point operator*(double s, Point p) { return {s * p.x, s * p.y}; }
inline Point& operator+=(Point& a, Point b) { a.x += b.x; a.y += b.y; return a; }

inline double dot(Point a, Point b) { return a.x * b.x + a.y * b.y; }
inline double norm(Point a) { return std::sqrt(a.x * a.x + a.y * a.y); }

/// Numerically stable logistic sigmoid.
inline double sigmoid(double x) {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    double e = std::exp(x);
    return e / (1.0 + e);
}

struct Rgba {
    double r = 0.0, g = 0.0, b = 0.0, a = 1.0;
};

struct Rgb {
    double r = 1.0, g = 1.0, b = 1.0;
};

/// One cubic Bezier span: start, two handles, end.
struct CubicSegment {
    Point a, b, c, d;
};

/// Closed path of cubic segments plus a fill color.
///
/// Control points are stored once: for k segments the layout is
/// [anchor0, h0a, h0b, anchor1, h1a, h1b, ...] (3k points), and segment i is
/// (points[3i], points[3i+1], points[3i+2], points[3(i+1) mod 3k]). Closure is
/// structural, shared anchors are single parameters.
struct Shape {
    std::vector<Point> points;
    Rgba color;

    std::size_t segment_count() const { return points.size() / 3; }

    CubicSegment segment(std::size_t i) const {
        const std::size_t n = points.size();
        return {points[3 * i], points[3 * i + 1], points[3 * i + 2],
                points[(3 * i + 3) % n]};
    }
};

inline Shape shape_from_segments(const std::vector<CubicSegment>& segs, Rgba color) {
    if (segs.size() < 2) throw std::invalid_argument("shape needs at least 2 segments");
    Shape s;
    s.color = color;
    for (std::size_t i = 0; i < segs.size(); ++i) {
        s.points.push_back(segs[i].a);
        s.points.push_back(segs[i].b);
        s.points.push_back(segs[i].c);
    }
    return s;
}

inline void clamp_color(Rgba& c) {
    c.r = std::clamp(c.r, 0.0, 1.0);
    c.g = std::clamp(c.g, 0.0, 1.0);
    c.b = std::clamp(c.b, 0.0, 1.0);
    c.a = std::clamp(c.a, 0.0, 1.0);
}

inline void validate_shape(const Shape& s) {
    if (s.points.size() < 6 || s.points.size() % 3 != 0)
        throw std::invalid_argument("shape needs at least 2 segments");
    for (const Point& p : s.points)
        if (!std::isfinite(p.x) || !std::isfinite(p.y))
            throw std::invalid_argument("non-finite control point");
    const Rgba& c = s.color;
    for (double v : {c.r, c.g, c.b, c.a})
        if (!(v >= 0.0 && v <= 1.0))
            throw std::invalid_argument("color channel outside [0,1]");
}

/// Ordered list of shapes over an opaque background. Index 0 renders first
/// (bottom of the stack).
struct Scene {
    std::vector<Shape> shapes;
    int width = 0;
    int height = 0;
    Rgb background;
};

inline void validate_scene(const Scene& sc) {
    if (sc.width < 1 || sc.height < 1) throw std::invalid_argument("empty canvas");
    for (const Shape& s : sc.shapes) validate_shape(s);
}

/// Closed polygonal outline (flattened shape boundary).
struct Polyline {
    std::vector<Point> vertices;
};

/// Per-shape derivatives of a scalar loss: one (x,y) slot per stored control
/// point plus the four color channels. Congruent to the Scene it came from.
struct ShapeGradient {
    std::vector<Point> points;
    double r = 0.0, g = 0.0, b = 0.0, a = 0.0;
};

struct GradientSet {
    std::vector<ShapeGradient> shapes;
};

inline GradientSet zeros_like(const Scene& sc) {
    GradientSet g;
    g.shapes.resize(sc.shapes.size());
    for (std::size_t i = 0; i < sc.shapes.size(); ++i)
        g.shapes[i].points.assign(sc.shapes[i].points.size(), Point{});
    return g;
}

inline bool congruent(const GradientSet& g, const Scene& sc) {
    if (g.shapes.size() != sc.shapes.size()) return false;
    for (std::size_t i = 0; i < g.shapes.size(); ++i)
        if (g.shapes[i].points.size() != sc.shapes[i].points.size()) return false;
    return true;
}

// ---------------------------------------------------------------------------
// Soft geometric predicates
// ---------------------------------------------------------------------------

/// Soft clockwise/counter-clockwise indicator of the ordered triple (a,b,c):
/// sigmoid of the raw cross-product term, 0 = clockwise, 1 = counter-clockwise.
/// The argument is not rescaled, so pixel-sized triangles saturate quickly.
inline double orientation(Point a, Point b, Point c) {
    double z = (b.y - a.y) * (c.x - b.x) - (b.x - a.x) * (c.y - b.y);
    return sigmoid(z);
}

struct OrientationGrad {
    double value;
    Point da, db, dc;
};

inline OrientationGrad orientation_grad(Point a, Point b, Point c) {
    double z = (b.y - a.y) * (c.x - b.x) - (b.x - a.x) * (c.y - b.y);
    double o = sigmoid(z);
    double k = o * (1.0 - o);
    OrientationGrad g;
    g.value = o;
    g.da = {k * (c.y - b.y), k * -(c.x - b.x)};
    g.db = {k * (a.y - c.y), k * (c.x - a.x)};
    g.dc = {k * (b.y - a.y), k * -(b.x - a.x)};
    return g;
}

inline double soft_and(double p, double q) { return p * q; }

// As printed in the source formulation: p + q - pq (algebraically a soft OR).
inline double soft_xor(double p, double q) { return p + q - p * q; }

/// Soft indicator that chord AB crosses chord CD.
inline double f_intersect(Point a, Point b, Point c, Point d) {
    double x1 = soft_xor(orientation(a, b, c), orientation(a, b, d));
    double x2 = soft_xor(orientation(c, d, a), orientation(c, d, b));
    return soft_and(x1, x2);
}

/// Soft indicator that [a,b,c] and [b,c,d] share the counter-clockwise
/// orientation.
inline double f_orientation(Point a, Point b, Point c, Point d) {
    return soft_and(orientation(a, b, c), orientation(b, c, d));
}

inline double geom_loss_ab(const CubicSegment& s, double lambda_p) {
    return lambda_p * (f_intersect(s.a, s.b, s.c, s.d) + f_orientation(s.a, s.b, s.c, s.d));
}

namespace detail {

// Angle term ReLU(-cos(u,v)); edges shorter than eps contribute nothing.
inline double angle_term(Point u, Point v) {
    constexpr double eps = 1e-8;
    double nu = norm(u), nv = norm(v);
    if (nu < eps || nv < eps) return 0.0;
    double c = dot(u, v) / (nu * nv);
    return c < 0.0 ? -c : 0.0;
}

}  // namespace detail

inline double geom_loss_angle(const CubicSegment& s) {
    return detail::angle_term(s.b - s.a, s.c - s.b) +
           detail::angle_term(s.c - s.b, s.d - s.c);
}

struct SegmentGrad {
    double value = 0.0;
    Point da, db, dc, dd;
};

/// Gradient of lambda_p * (f_intersect + f_orientation) for one segment.
inline SegmentGrad geom_loss_ab_grad(const CubicSegment& s, double lambda_p) {
    SegmentGrad out;
    const Point a = s.a, b = s.b, c = s.c, d = s.d;

    // f_intersect = AND(XOR(p1,p2), XOR(q1,q2))
    OrientationGrad p1 = orientation_grad(a, b, c);
    OrientationGrad p2 = orientation_grad(a, b, d);
    OrientationGrad q1 = orientation_grad(c, d, a);
    OrientationGrad q2 = orientation_grad(c, d, b);
    double x1 = soft_xor(p1.value, p2.value);
    double x2 = soft_xor(q1.value, q2.value);
    double fi = x1 * x2;
    // d fi / d p1 = x2 * (1 - p2), etc.
    double dp1 = x2 * (1.0 - p2.value);
    double dp2 = x2 * (1.0 - p1.value);
    double dq1 = x1 * (1.0 - q2.value);
    double dq2 = x1 * (1.0 - q1.value);

    // f_orientation = AND(o1, o2)
    OrientationGrad o1 = orientation_grad(a, b, c);
    OrientationGrad o2 = orientation_grad(b, c, d);
    double fo = o1.value * o2.value;
    double do1 = o2.value;
    double do2 = o1.value;

    out.value = lambda_p * (fi + fo);
    auto acc = [&](Point& dst, Point src, double w) { dst += (lambda_p * w) * src; };
    // p1 = O(a,b,c), p2 = O(a,b,d), q1 = O(c,d,a), q2 = O(c,d,b)
    acc(out.da, p1.da, dp1); acc(out.db, p1.db, dp1); acc(out.dc, p1.dc, dp1);
    acc(out.da, p2.da, dp2); acc(out.db, p2.db, dp2); acc(out.dd, p2.dc, dp2);
    acc(out.dc, q1.da, dq1); acc(out.dd, q1.db, dq1); acc(out.da, q1.dc, dq1);
    acc(out.dc, q2.da, dq2); acc(out.dd, q2.db, dq2); acc(out.db, q2.dc, dq2);
    // o1 = O(a,b,c), o2 = O(b,c,d)
    acc(out.da, o1.da, do1); acc(out.db, o1.db, do1); acc(out.dc, o1.dc, do1);
    acc(out.db, o2.da, do2); acc(out.dc, o2.db, do2); acc(out.dd, o2.dc, do2);
    return out;
}

namespace detail {

struct AngleTermGrad {
    double value = 0.0;
    Point du, dv;
};

inline AngleTermGrad angle_term_grad(Point u, Point v) {
    constexpr double eps = 1e-8;
    AngleTermGrad g;
    double nu = norm(u), nv = norm(v);
    if (nu < eps || nv < eps) return g;
    double c = dot(u, v) / (nu * nv);
    if (c >= 0.0) return g;
    g.value = -c;
    // d(-c)/du = -(v/(|u||v|) - c*u/|u|^2)
    double inv = 1.0 / (nu * nv);
    g.du = {-(v.x * inv - c * u.x / (nu * nu)), -(v.y * inv - c * u.y / (nu * nu))};
    g.dv = {-(u.x * inv - c * v.x / (nv * nv)), -(u.y * inv - c * v.y / (nv * nv))};
    return g;
}

}  // namespace detail

inline SegmentGrad geom_loss_angle_grad(const CubicSegment& s) {
    SegmentGrad out;
    auto t1 = detail::angle_term_grad(s.b - s.a, s.c - s.b);
    auto t2 = detail::angle_term_grad(s.c - s.b, s.d - s.c);
    out.value = t1.value + t2.value;
    // u1 = b-a, v1 = c-b
    out.da += -1.0 * t1.du;
    out.db += t1.du - t1.dv;
    out.dc += t1.dv;
    // u2 = c-b, v2 = d-c
    out.db += -1.0 * t2.du;
    out.dc += t2.du - t2.dv;
    out.dd += t2.dv;
    return out;
}

/// Sum of the soft intersection/orientation and angle penalties over every
/// segment of every shape.
inline double geometric_loss(const Scene& sc, double lambda_p) {
    double total = 0.0;
    for (const Shape& sh : sc.shapes) {
        for (std::size_t i = 0; i < sh.segment_count(); ++i) {
            CubicSegment seg = sh.segment(i);
            total += geom_loss_ab(seg, lambda_p) + geom_loss_angle(seg);
        }
    }
    return total;
}

/// Same value as geometric_loss; additionally accumulates `weight` times the
/// control-point gradient into `grads` (which must be congruent to the scene).
inline double geometric_loss_accumulate(const Scene& sc, double lambda_p,
                                        double weight, GradientSet& grads) {
    double total = 0.0;
    for (std::size_t si = 0; si < sc.shapes.size(); ++si) {
        const Shape& sh = sc.shapes[si];
        ShapeGradient& sg = grads.shapes[si];
        const std::size_t n = sh.points.size();
        for (std::size_t i = 0; i < sh.segment_count(); ++i) {
            CubicSegment seg = sh.segment(i);
            SegmentGrad gab = geom_loss_ab_grad(seg, lambda_p);
            SegmentGrad gc = geom_loss_angle_grad(seg);
            total += gab.value + gc.value;
            sg.points[3 * i] += weight * (gab.da + gc.da);
            sg.points[3 * i + 1] += weight * (gab.db + gc.db);
            sg.points[3 * i + 2] += weight * (gab.dc + gc.dc);
            sg.points[(3 * i + 3) % n] += weight * (gab.dd + gc.dd);
        }
    }
    return total;
}

// ---------------------------------------------------------------------------
// Flattening
// ---------------------------------------------------------------------------

inline Point cubic_at(const CubicSegment& s, double t) {
    double u = 1.0 - t;
    double b0 = u * u * u;
    double b1 = 3.0 * u * u * t;
    double b2 = 3.0 * u * t * t;
    double b3 = t * t * t;
    return {b0 * s.a.x + b1 * s.b.x + b2 * s.c.x + b3 * s.d.x,
            b0 * s.a.y + b1 * s.b.y + b2 * s.c.y + b3 * s.d.y};
}

/// Samples the segment at t = k/subdivisions for k = 0..subdivisions.
inline std::vector<Point> flatten(const CubicSegment& s, int subdivisions) {
    if (subdivisions < 1) throw std::invalid_argument("subdivisions must be >= 1");
    std::vector<Point> pts;
    pts.reserve(static_cast<std::size_t>(subdivisions) + 1);
    for (int k = 0; k <= subdivisions; ++k)
        pts.push_back(cubic_at(s, static_cast<double>(k) / subdivisions));
    return pts;
}

/// Flattens a closed shape; each segment contributes `subdivisions` vertices
/// (its endpoint is the next segment's start).
inline Polyline flatten_shape(const Shape& sh, int subdivisions) {
    if (subdivisions < 1) throw std::invalid_argument("subdivisions must be >= 1");
    Polyline poly;
    poly.vertices.reserve(sh.segment_count() * static_cast<std::size_t>(subdivisions));
    for (std::size_t i = 0; i < sh.segment_count(); ++i) {
        CubicSegment seg = sh.segment(i);
        for (int k = 0; k < subdivisions; ++k)
            poly.vertices.push_back(cubic_at(seg, static_cast<double>(k) / subdivisions));
    }
    return poly;
}

namespace detail {

inline int orient_sign(Point a, Point b, Point c) {
    double v = (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
    return (v > 0.0) - (v < 0.0);
}

// Proper (transversal) crossing; touching endpoints and collinear overlaps
// do not count.
inline bool proper_intersect(Point p1, Point p2, Point p3, Point p4) {
    int d1 = orient_sign(p3, p4, p1);
    int d2 = orient_sign(p3, p4, p2);
    int d3 = orient_sign(p1, p2, p3);
    int d4 = orient_sign(p1, p2, p4);
    return d1 * d2 < 0 && d3 * d4 < 0;
}

}  // namespace detail

/// Flattens the shape and counts properly crossing pairs of non-adjacent
/// polyline edges. Exact companion check for the soft intersection loss.
inline int exact_self_intersections(const Shape& sh, int subdivisions) {
    Polyline poly = flatten_shape(sh, subdivisions);
    const std::size_t m = poly.vertices.size();
    if (m < 4) return 0;
    int count = 0;
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = i + 1; j < m; ++j) {
            // skip edges sharing a vertex (cyclic neighbours)
            if (j == i + 1 || (i == 0 && j == m - 1)) continue;
            const Point& a = poly.vertices[i];
            const Point& b = poly.vertices[(i + 1) % m];
            const Point& c = poly.vertices[j];
            const Point& d = poly.vertices[(j + 1) % m];
            if (detail::proper_intersect(a, b, c, d)) ++count;
        }
    }
    return count;
}

}  // namespace vectorforge
