#include "sj/siegel/conformal.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>
#include <utility>

#include "sj/error.hpp"

namespace sj::siegel {

using numerics::Dyadic;

namespace {

double cross(Cplx a, Cplx b) { return a.real() * b.imag() - a.imag() * b.real(); }

int orient(Cplx a, Cplx b, Cplx c) {
    const double v = cross(b - a, c - a);
    return (v > 0) - (v < 0);
}

bool on_segment(Cplx a, Cplx b, Cplx p) {
    return std::min(a.real(), b.real()) <= p.real() && p.real() <= std::max(a.real(), b.real()) &&
           std::min(a.imag(), b.imag()) <= p.imag() && p.imag() <= std::max(a.imag(), b.imag());
}

bool segments_meet(Cplx a, Cplx b, Cplx c, Cplx d) {
    const int o1 = orient(a, b, c), o2 = orient(a, b, d), o3 = orient(c, d, a), o4 = orient(c, d, b);
    if (o1 != o2 && o3 != o4) return true;
    if (o1 == 0 && on_segment(a, b, c)) return true;
    if (o2 == 0 && on_segment(a, b, d)) return true;
    if (o3 == 0 && on_segment(c, d, a)) return true;
    if (o4 == 0 && on_segment(c, d, b)) return true;
    return false;
}

// sqrt(z^2 + d^2) on the branch taking the upper half plane minus [0, id]
// onto the upper half plane
Cplx zip_sqrt(Cplx z, double d) {
    const double s = std::max(std::abs(z), d);
    Cplx w;
    if (s > 1e150) {
        const Cplx u = z / s;
        const double e = d / s;
        w = s * std::sqrt(u * u + e * e);
    } else {
        w = std::sqrt(z * z + d * d);
    }
    return w.imag() < 0 ? -w : w;
}

}  // namespace

PolygonCheck check_polygon(const std::vector<Cplx>& v, Cplx base) {
    PolygonCheck out;
    const std::size_t n = v.size();
    if (n < 3) {
        out.simple = false;
        return out;
    }
    // winding number and area
    double area = 0;
    int wind = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const Cplx a = v[i] - base, b = v[(i + 1) % n] - base;
        area += cross(a, b);
        if (a.imag() <= 0) {
            if (b.imag() > 0 && cross(a, b) > 0) ++wind;
        } else {
            if (b.imag() <= 0 && cross(a, b) < 0) --wind;
        }
    }
    out.signed_area = area / 2;
    out.winding = wind;

    // non-adjacent edge intersections, bucketed on a grid
    double x0 = v[0].real(), x1 = x0, y0 = v[0].imag(), y1 = y0;
    for (const Cplx& p : v) {
        x0 = std::min(x0, p.real());
        x1 = std::max(x1, p.real());
        y0 = std::min(y0, p.imag());
        y1 = std::max(y1, p.imag());
    }
    const auto cells = static_cast<long>(std::ceil(std::sqrt(static_cast<double>(n))));
    const double w = std::max({(x1 - x0) / static_cast<double>(cells), (y1 - y0) / static_cast<double>(cells), 1e-300});
    std::unordered_map<long long, std::vector<std::size_t>> grid;
    auto cell_of = [&](double x, double y) {
        return std::pair<long, long>{std::min(cells - 1, static_cast<long>((x - x0) / w)),
                                     std::min(cells - 1, static_cast<long>((y - y0) / w))};
    };
    for (std::size_t i = 0; i < n; ++i) {
        const Cplx a = v[i], b = v[(i + 1) % n];
        if (a == b) {
            out.simple = false;
            return out;
        }
        const auto [ca, ra] = cell_of(std::min(a.real(), b.real()), std::min(a.imag(), b.imag()));
        const auto [cb, rb] = cell_of(std::max(a.real(), b.real()), std::max(a.imag(), b.imag()));
        for (long cx = ca; cx <= cb; ++cx) {
            for (long cy = ra; cy <= rb; ++cy) {
                auto& bucket = grid[cx * (cells + 1) + cy];
                for (std::size_t j : bucket) {
                    const bool adjacent = j + 1 == i || (i + 1) % n == j || (j + 1) % n == i;
                    if (adjacent) continue;
                    if (segments_meet(a, b, v[j], v[(j + 1) % n])) {
                        out.simple = false;
                        return out;
                    }
                }
                bucket.push_back(i);
            }
        }
    }
    return out;
}

double zipper_radius(const std::vector<Cplx>& boundary, Cplx base) {
    const std::size_t n = boundary.size();
    if (n < 3) throw DomainError("zipper_radius: need at least three boundary points");
    std::vector<Cplx> pts(n - 2);
    const Cplx z0 = boundary[0] - base, z1 = boundary[1] - base;
    const Cplx I(0, 1);
    for (std::size_t j = 2; j < n; ++j) {
        const Cplx z = boundary[j] - base;
        pts[j - 2] = I * std::sqrt((z - z1) / (z - z0));
    }
    // image of the base point and log |derivative| along the chain
    const Cplx m = z1 / z0;
    Cplx W = I * std::sqrt(m);
    double dlog = std::log(std::abs((z1 - z0) / (2.0 * std::sqrt(m) * z0 * z0)));

    for (std::size_t k = 0; k < pts.size(); ++k) {
        const double a = pts[k].real(), b = pts[k].imag();
        if (!(b > 0) || !std::isfinite(a)) throw PrecisionExhausted("zipper_radius: boundary left the half plane");
        const double r2 = a * a + b * b;
        if (a != 0) {
            const double c = r2 / a;
            dlog += 2 * std::log(std::abs(c / (c - W)));
            W = c * W / (c - W);
            for (std::size_t j = k + 1; j < pts.size(); ++j) pts[j] = c * pts[j] / (c - pts[j]);
        }
        const double d = r2 / b;
        const Cplx sW = zip_sqrt(W, d);
        dlog += std::log(std::abs(W / sW));
        W = sW;
        for (std::size_t j = k + 1; j < pts.size(); ++j) pts[j] = zip_sqrt(pts[j], d);
    }
    const Cplx Q = W * W;
    dlog += std::log(std::abs(2.0 * W));
    dlog -= std::log(2 * std::fabs(Q.imag()));
    const double r = std::exp(-dlog);
    if (!std::isfinite(r) || !(r > 0)) throw PrecisionExhausted("zipper_radius: non-finite result");
    return r;
}

JordanDomain JordanDomain::polygon(std::vector<Cplx> vertices) {
    if (vertices.size() < 3) throw DomainError("polygon: need at least three vertices");
    for (const Cplx& v : vertices) {
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) throw DomainError("polygon: non-finite vertex");
    }
    JordanDomain d;
    d.vertices_ = std::move(vertices);
    d.name_ = "polygon";
    return d;
}

JordanDomain JordanDomain::disk(double R, Cplx center) {
    if (!(R > 0)) throw DomainError("disk: radius must be positive");
    return curve([R, center](double t) { return center + std::polar(R, 2 * M_PI * t); }, "disk");
}

JordanDomain JordanDomain::curve(std::function<Cplx(double)> gamma, std::string name) {
    if (!gamma) throw DomainError("curve: empty parametrization");
    JordanDomain d;
    d.gamma_ = std::move(gamma);
    d.name_ = std::move(name);
    return d;
}

std::vector<Cplx> JordanDomain::boundary(std::size_t min_points) const {
    std::vector<Cplx> out;
    if (!is_polygon()) {
        const std::size_t n = std::max<std::size_t>(min_points, 3);
        out.reserve(n);
        for (std::size_t i = 0; i < n; ++i) out.push_back(gamma_(static_cast<double>(i) / static_cast<double>(n)));
        return out;
    }
    const std::size_t nv = vertices_.size();
    const std::size_t per = std::max<std::size_t>(1, (min_points + nv - 1) / nv);
    out.reserve(nv * per);
    for (std::size_t i = 0; i < nv; ++i) {
        const Cplx a = vertices_[i], b = vertices_[(i + 1) % nv];
        for (std::size_t k = 0; k < per; ++k) out.push_back(a + (b - a) * (static_cast<double>(k) / static_cast<double>(per)));
    }
    return out;
}

RadiusEstimate conformal_radius(const JordanDomain& d, double tol, Cplx base, std::size_t max_points) {
    if (!(tol > 0)) throw DomainError("conformal_radius: tol must be positive");
    std::size_t n = d.is_polygon() ? std::max<std::size_t>(d.vertices().size() * 4, 64) : 64;

    auto prepared = [&](std::size_t count) {
        std::vector<Cplx> b = d.boundary(count);
        const PolygonCheck pc = check_polygon(b, base);
        if (!pc.simple) throw DomainError("conformal_radius: boundary is not a simple closed curve");
        if (pc.winding == 0) throw DomainError("conformal_radius: base point is not inside the domain");
        if (pc.signed_area < 0) std::reverse(b.begin(), b.end());
        return b;
    };

    double prev = zipper_radius(prepared(n), base);
    std::size_t level = 0;
    while (true) {
        const std::size_t next = 2 * d.boundary(n).size();
        if (next > max_points) throw ResourceExhausted("conformal_radius: point cap reached before tolerance");
        const double cur = zipper_radius(prepared(next), base);
        ++level;
        const double diff = std::fabs(cur - prev);
        if (diff <= tol) {
            RadiusEstimate e;
            e.value = PrecisionReal::from_double(cur);
            e.mapping_error = diff;
            e.certified_error = PrecisionReal::from_double(diff);
            e.level = level;
            e.certified = true;
            e.points = next;
            return e;
        }
        prev = cur;
        n = next;
    }
}

bool perturb_bound_check(double rU, double rV, double eps) {
    if (!(eps >= 0) || !(rU > 0)) return false;
    const double diff = rU - rV;
    return diff > 0 && diff <= 4 * std::sqrt(rU) * std::sqrt(eps);
}

}  // namespace sj::siegel
