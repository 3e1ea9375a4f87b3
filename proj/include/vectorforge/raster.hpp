#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "vectorforge/geometry.hpp"
#include "vectorforge/parallel.hpp"

namespace vectorforge {

/// H x W x 3 image, channel-interleaved row-major, values in [0,1].
struct RasterImage {
    int width = 0;
    int height = 0;
    std::vector<double> data;

    static RasterImage filled(int w, int h, Rgb color) {
        RasterImage img;
        img.width = w;
        img.height = h;
        img.data.resize(static_cast<std::size_t>(w) * h * 3);
        for (std::size_t p = 0; p < static_cast<std::size_t>(w) * h; ++p) {
            img.data[3 * p] = color.r;
            img.data[3 * p + 1] = color.g;
            img.data[3 * p + 2] = color.b;
        }
        return img;
    }

    double& at(int x, int y, int c) {
        return data[(static_cast<std::size_t>(y) * width + x) * 3 + c];
    }
    double at(int x, int y, int c) const {
        return data[(static_cast<std::size_t>(y) * width + x) * 3 + c];
    }
    std::size_t pixel_count() const { return static_cast<std::size_t>(width) * height; }
};

/// Smoothing bandwidth of the coverage sigmoid, in pixels.
constexpr double kCoverageSigma = 0.5;

/// Distance beyond which coverage is treated as fully saturated. At 16 sigma
/// the sigmoid tail is ~1e-7, far below every tolerance used downstream, and
/// narrow enough to keep the per-edge distance bands cheap.
constexpr double kCoverageCutoff = 8.0;

/// Flattening density used by the renderer and the exact oracles.
constexpr int kFlattenSubdivisions = 16;

/// Dense per-shape soft inside/outside fraction.
struct CoverageField {
    int width = 0;
    int height = 0;
    std::vector<double> values;  // h*w
};

namespace detail {

// Sparse raster data of one shape, restricted to its inflated bounding box.
struct ShapeField {
    int x0 = 0, y0 = 0, w = 0, h = 0;  // pixel-index rect clipped to canvas
    std::vector<double> cov;           // w*h
    std::vector<double> sdist;         // signed distance, valid where edge >= 0
    std::vector<std::int32_t> edge;    // argmin polyline edge, -1 = saturated
    std::vector<double> tparam;        // argmin parameter on that edge
    std::vector<Point> verts;          // flattened closed polyline
    std::size_t idx(int ix, int iy) const {
        return static_cast<std::size_t>(iy) * w + ix;
    }
};

inline void point_segment_dist2(Point p, Point a, Point b, double& d2, double& t) {
    Point ab = b - a;
    double len2 = dot(ab, ab);
    double tt = 0.0;
    if (len2 > 0.0) tt = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
    Point x = {a.x + tt * ab.x, a.y + tt * ab.y};
    double dx = p.x - x.x, dy = p.y - x.y;
    d2 = dx * dx + dy * dy;
    t = tt;
}

inline ShapeField compute_shape_field(const Shape& sh, int width, int height,
                                      bool keep_backward) {
    ShapeField f;
    f.verts = flatten_shape(sh, kFlattenSubdivisions).vertices;
    const std::size_t m = f.verts.size();

    double minx = f.verts[0].x, maxx = f.verts[0].x;
    double miny = f.verts[0].y, maxy = f.verts[0].y;
    for (const Point& v : f.verts) {
        minx = std::min(minx, v.x); maxx = std::max(maxx, v.x);
        miny = std::min(miny, v.y); maxy = std::max(maxy, v.y);
    }
    const double c = kCoverageCutoff;
    // pixels whose center (ix+0.5, iy+0.5) lies within the inflated box
    int x0 = std::max(0, static_cast<int>(std::ceil(minx - c - 0.5)));
    int x1 = std::min(width - 1, static_cast<int>(std::floor(maxx + c - 0.5)));
    int y0 = std::max(0, static_cast<int>(std::ceil(miny - c - 0.5)));
    int y1 = std::min(height - 1, static_cast<int>(std::floor(maxy + c - 0.5)));
    if (x0 > x1 || y0 > y1) return f;  // off canvas
    f.x0 = x0; f.y0 = y0;
    f.w = x1 - x0 + 1; f.h = y1 - y0 + 1;
    const std::size_t npix = static_cast<std::size_t>(f.w) * f.h;
    f.cov.assign(npix, 0.0);
    f.edge.assign(npix, -1);
    std::vector<double> dist2(npix, std::numeric_limits<double>::infinity());
    std::vector<double> tpar(npix, 0.0);
    std::vector<std::uint8_t> inside(npix, 0);

    // nonzero-winding inside test, one scanline per pixel row
    std::vector<std::pair<double, int>> crossings;
    for (int iy = 0; iy < f.h; ++iy) {
        double cy = y0 + iy + 0.5;
        crossings.clear();
        for (std::size_t j = 0; j < m; ++j) {
            const Point& v0 = f.verts[j];
            const Point& v1 = f.verts[(j + 1) % m];
            bool below0 = v0.y <= cy, below1 = v1.y <= cy;
            if (below0 == below1) continue;
            double t = (cy - v0.y) / (v1.y - v0.y);
            double xc = v0.x + t * (v1.x - v0.x);
            crossings.emplace_back(xc, below0 ? 1 : -1);
        }
        std::sort(crossings.begin(), crossings.end());
        std::size_t ci = 0;
        int wind = 0;
        for (int ix = 0; ix < f.w; ++ix) {
            double cx = x0 + ix + 0.5;
            while (ci < crossings.size() && crossings[ci].first <= cx)
                wind += crossings[ci++].second;
            inside[f.idx(ix, iy)] = wind != 0 ? 1 : 0;
        }
    }

    // exact min distance inside the saturation band: each edge updates only
    // the pixels of its own inflated box, which covers everything within the
    // cutoff of that edge
    for (std::size_t j = 0; j < m; ++j) {
        const Point& v0 = f.verts[j];
        const Point& v1 = f.verts[(j + 1) % m];
        double ex0 = std::min(v0.x, v1.x) - c, ex1 = std::max(v0.x, v1.x) + c;
        double ey0 = std::min(v0.y, v1.y) - c, ey1 = std::max(v0.y, v1.y) + c;
        int bx0 = std::max(x0, static_cast<int>(std::ceil(ex0 - 0.5)));
        int bx1 = std::min(x1, static_cast<int>(std::floor(ex1 - 0.5)));
        int by0 = std::max(y0, static_cast<int>(std::ceil(ey0 - 0.5)));
        int by1 = std::min(y1, static_cast<int>(std::floor(ey1 - 0.5)));
        for (int iy = by0 - y0; iy <= by1 - y0; ++iy) {
            for (int ix = bx0 - x0; ix <= bx1 - x0; ++ix) {
                Point p = {x0 + ix + 0.5, y0 + iy + 0.5};
                double d2, t;
                point_segment_dist2(p, v0, v1, d2, t);
                std::size_t id = f.idx(ix, iy);
                if (d2 < dist2[id]) {
                    dist2[id] = d2;
                    f.edge[id] = static_cast<std::int32_t>(j);
                    tpar[id] = t;
                }
            }
        }
    }

    if (keep_backward) {
        f.sdist.assign(npix, 0.0);
        f.tparam.assign(npix, 0.0);
    }
    for (std::size_t id = 0; id < npix; ++id) {
        if (f.edge[id] >= 0) {
            double d = std::sqrt(dist2[id]);
            if (d <= c) {
                double sd = inside[id] ? -d : d;
                f.cov[id] = sigmoid(-sd / kCoverageSigma);
                if (keep_backward) {
                    f.sdist[id] = sd;
                    f.tparam[id] = tpar[id];
                }
                continue;
            }
            f.edge[id] = -1;
        }
        f.cov[id] = inside[id] ? 1.0 : 0.0;
    }
    return f;
}

struct RenderState {
    RasterImage image;
    std::vector<ShapeField> fields;
    std::vector<std::vector<double>> prefix;  // per shape: image under it, bbox only
};

inline RenderState render_scene(const Scene& sc, bool keep_backward) {
    validate_scene(sc);
    RenderState st;
    st.image = RasterImage::filled(sc.width, sc.height, sc.background);
    st.fields.resize(sc.shapes.size());
    parallel_for(sc.shapes.size(), [&](std::size_t k) {
        st.fields[k] = compute_shape_field(sc.shapes[k], sc.width, sc.height, keep_backward);
    });
    if (keep_backward) st.prefix.resize(sc.shapes.size());
    for (std::size_t k = 0; k < sc.shapes.size(); ++k) {
        const ShapeField& f = st.fields[k];
        const Rgba col = sc.shapes[k].color;
        if (keep_backward) {
            std::vector<double>& pre = st.prefix[k];
            pre.resize(static_cast<std::size_t>(f.w) * f.h * 3);
            for (int iy = 0; iy < f.h; ++iy)
                for (int ix = 0; ix < f.w; ++ix)
                    for (int ch = 0; ch < 3; ++ch)
                        pre[3 * f.idx(ix, iy) + ch] =
                            st.image.at(f.x0 + ix, f.y0 + iy, ch);
        }
        for (int iy = 0; iy < f.h; ++iy) {
            for (int ix = 0; ix < f.w; ++ix) {
                double pm = f.cov[f.idx(ix, iy)] * col.a;
                if (pm == 0.0) continue;
                double* px = &st.image.at(f.x0 + ix, f.y0 + iy, 0);
                px[0] = pm * col.r + (1.0 - pm) * px[0];
                px[1] = pm * col.g + (1.0 - pm) * px[1];
                px[2] = pm * col.b + (1.0 - pm) * px[2];
            }
        }
    }
    return st;
}

// Bernstein weights of flattened vertex k (parameter k/subdivisions).
inline void bernstein_weights(int k, int subdivisions, double w[4]) {
    double t = static_cast<double>(k) / subdivisions;
    double u = 1.0 - t;
    w[0] = u * u * u;
    w[1] = 3.0 * u * u * t;
    w[2] = 3.0 * u * t * t;
    w[3] = t * t * t;
}

}  // namespace detail

/// Smooth coverage of a single shape on a canvas: sigmoid of the signed
/// distance (negative inside by nonzero winding) to the flattened boundary.
inline CoverageField compute_coverage(const Shape& sh, int width, int height) {
    validate_shape(sh);
    detail::ShapeField f = detail::compute_shape_field(sh, width, height, false);
    CoverageField out;
    out.width = width;
    out.height = height;
    out.values.assign(static_cast<std::size_t>(width) * height, 0.0);
    for (int iy = 0; iy < f.h; ++iy)
        for (int ix = 0; ix < f.w; ++ix)
            out.values[static_cast<std::size_t>(f.y0 + iy) * width + (f.x0 + ix)] =
                f.cov[f.idx(ix, iy)];
    return out;
}

/// Renders the scene with smooth coverage and front-over-back compositing.
inline RasterImage render(const Scene& sc) {
    return detail::render_scene(sc, false).image;
}

/// Renders the scene with shape `index` removed.
inline RasterImage render_without(const Scene& sc, std::size_t index) {
    if (index >= sc.shapes.size()) throw std::out_of_range("shape index out of range");
    Scene sub = sc;
    sub.shapes.erase(sub.shapes.begin() + static_cast<std::ptrdiff_t>(index));
    return render(sub);
}

/// Adjoint of render: pulls d(loss)/d(pixel) back to every control point and
/// color channel. Accumulation order is fixed, so results do not depend on
/// the worker count.
inline GradientSet render_with_gradients(const Scene& sc, const RasterImage& loss_grad) {
    if (loss_grad.width != sc.width || loss_grad.height != sc.height)
        throw std::invalid_argument("loss gradient dimensions do not match scene canvas");
    detail::RenderState st = detail::render_scene(sc, true);
    GradientSet grads = zeros_like(sc);
    RasterImage g = loss_grad;  // d loss / d composite, peeled layer by layer

    const int subdiv = kFlattenSubdivisions;
    for (std::size_t k = sc.shapes.size(); k-- > 0;) {
        const detail::ShapeField& f = st.fields[k];
        const Shape& sh = sc.shapes[k];
        const Rgba col = sh.color;
        ShapeGradient& sg = grads.shapes[k];
        const std::size_t m = f.verts.size();
        std::vector<Point> vgrad(m, Point{});

        for (int iy = 0; iy < f.h; ++iy) {
            for (int ix = 0; ix < f.w; ++ix) {
                std::size_t id = f.idx(ix, iy);
                double cov = f.cov[id];
                double pm = cov * col.a;
                double* gp = &g.at(f.x0 + ix, f.y0 + iy, 0);
                const double* pre = &st.prefix[k][3 * id];
                double rgb[3] = {col.r, col.g, col.b};
                double dpm = 0.0;
                for (int ch = 0; ch < 3; ++ch) dpm += gp[ch] * (rgb[ch] - pre[ch]);
                sg.r += gp[0] * pm;
                sg.g += gp[1] * pm;
                sg.b += gp[2] * pm;
                sg.a += dpm * cov;
                double dcov = dpm * col.a;
                // below this layer the loss sees (1 - pm) of the pixel
                for (int ch = 0; ch < 3; ++ch) gp[ch] *= (1.0 - pm);

                std::int32_t e = f.edge[id];
                if (e < 0 || dcov == 0.0) continue;  // saturated: flat coverage
                double sd = f.sdist[id];
                double d = std::fabs(sd);
                if (d < 1e-12) continue;
                // cov = sigmoid(-sd/sigma)
                double dsd = dcov * (-cov * (1.0 - cov) / kCoverageSigma);
                double dd = sd < 0.0 ? -dsd : dsd;
                double t = f.tparam[id];
                const Point& v0 = f.verts[static_cast<std::size_t>(e)];
                const Point& v1 = f.verts[(static_cast<std::size_t>(e) + 1) % m];
                Point x = {v0.x + t * (v1.x - v0.x), v0.y + t * (v1.y - v0.y)};
                Point p = {f.x0 + ix + 0.5, f.y0 + iy + 0.5};
                Point u = {(x.x - p.x) / d, (x.y - p.y) / d};
                vgrad[static_cast<std::size_t>(e)] += (dd * (1.0 - t)) * u;
                vgrad[(static_cast<std::size_t>(e) + 1) % m] += (dd * t) * u;
            }
        }

        // polyline vertices -> control points via Bernstein weights
        const std::size_t npts = sh.points.size();
        for (std::size_t j = 0; j < m; ++j) {
            std::size_t seg = j / static_cast<std::size_t>(subdiv);
            int kk = static_cast<int>(j % static_cast<std::size_t>(subdiv));
            double w[4];
            detail::bernstein_weights(kk, subdiv, w);
            std::size_t base = 3 * seg;
            sg.points[base] += w[0] * vgrad[j];
            sg.points[base + 1] += w[1] * vgrad[j];
            sg.points[base + 2] += w[2] * vgrad[j];
            sg.points[(base + 3) % npts] += w[3] * vgrad[j];
        }
    }
    return grads;
}

}  // namespace vectorforge
