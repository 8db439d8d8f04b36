#include "torsolve/geometry.hpp"

#include "torsolve/error.hpp"

#include <Eigen/LU>
#include <boost/math/special_functions/ellint_2.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace torsolve {

namespace {

constexpr double kPi = std::numbers::pi;

// Relative band around the boundary treated as "on the boundary".
constexpr double kBoundaryBand = 1e-12;

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

double cross(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

double signed_area(const std::vector<Vec2>& poly) {
    double twice = 0.0;
    for (std::size_t i = 0; i < poly.size(); ++i) {
        twice += cross(poly[i], poly[(i + 1) % poly.size()]);
    }
    return 0.5 * twice;
}

double segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
    const Vec2 ab = b - a;
    const double len2 = ab.squaredNorm();
    double t = len2 > 0.0 ? (p - a).dot(ab) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    return (p - (a + t * ab)).norm();
}

double polygon_distance(const std::vector<Vec2>& poly, const Vec2& p) {
    double d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < poly.size(); ++i) {
        d = std::min(d, segment_distance(p, poly[i], poly[(i + 1) % poly.size()]));
    }
    return d;
}

// Distance from p to the ellipse x^2/a^2 + y^2/b^2 = 1 by bisection on the
// monotone root equation of the closest-point problem (first quadrant, a >= b).
double ellipse_distance(double a, double b, Vec2 p) {
    double y0 = std::abs(p.x());
    double y1 = std::abs(p.y());
    double e0 = a;
    double e1 = b;
    if (e0 < e1) {
        std::swap(e0, e1);
        std::swap(y0, y1);
    }
    if (y1 > 0.0) {
        if (y0 > 0.0) {
            const double z0 = y0 / e0;
            const double z1 = y1 / e1;
            const double g = z0 * z0 + z1 * z1 - 1.0;
            if (g == 0.0) return 0.0;
            const double r0 = (e0 / e1) * (e0 / e1);
            const double n0 = r0 * z0;
            double s0 = z1 - 1.0;
            double s1 = g < 0.0 ? 0.0 : std::hypot(n0, z1) - 1.0;
            double s = 0.0;
            for (int it = 0; it < 200; ++it) {
                s = 0.5 * (s0 + s1);
                if (s == s0 || s == s1) break;
                const double q0 = n0 / (s + r0);
                const double q1 = z1 / (s + 1.0);
                const double gs = q0 * q0 + q1 * q1 - 1.0;
                if (gs > 0.0) {
                    s0 = s;
                } else if (gs < 0.0) {
                    s1 = s;
                } else {
                    break;
                }
            }
            const double x0 = r0 * y0 / (s + r0);
            const double x1 = y1 / (s + 1.0);
            return std::hypot(x0 - y0, x1 - y1);
        }
        return std::abs(y1 - e1);
    }
    const double numer = e0 * y0;
    const double denom = e0 * e0 - e1 * e1;
    if (numer < denom) {
        const double t = numer / denom;
        return std::hypot(e0 * t - y0, e1 * std::sqrt(1.0 - t * t));
    }
    return std::abs(y0 - e0);
}

// Crossing-number test; boundary handling is left to the caller.
bool polygon_crossing(const std::vector<Vec2>& poly, const Vec2& p) {
    bool inside = false;
    for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) {
        const Vec2& a = poly[i];
        const Vec2& b = poly[j];
        if ((a.y() > p.y()) != (b.y() > p.y())) {
            const double x = a.x() + (p.y() - a.y()) * (b.x() - a.x()) / (b.y() - a.y());
            if (p.x() < x) inside = !inside;
        }
    }
    return inside;
}

bool segments_intersect(const Vec2& p1, const Vec2& p2, const Vec2& q1, const Vec2& q2) {
    const double d1 = cross(q2 - q1, p1 - q1);
    const double d2 = cross(q2 - q1, p2 - q1);
    const double d3 = cross(p2 - p1, q1 - p1);
    const double d4 = cross(p2 - p1, q2 - p1);
    if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0))) {
        return true;
    }
    auto on_segment = [](const Vec2& a, const Vec2& b, const Vec2& c) {
        return std::min(a.x(), b.x()) <= c.x() && c.x() <= std::max(a.x(), b.x()) &&
               std::min(a.y(), b.y()) <= c.y() && c.y() <= std::max(a.y(), b.y());
    };
    return (d1 == 0 && on_segment(q1, q2, p1)) || (d2 == 0 && on_segment(q1, q2, p2)) ||
           (d3 == 0 && on_segment(p1, p2, q1)) || (d4 == 0 && on_segment(p1, p2, q2));
}

void require_positive(double v, const char* what) {
    if (!(v > 0.0) || !std::isfinite(v)) {
        std::ostringstream msg;
        msg << what << " must be positive and finite (got " << v << ")";
        throw GeometryError(msg.str());
    }
}

struct Piece {
    double area = 0.0;
    Vec2 centroid = Vec2::Zero();
};

// Intersection of a polygon with an axis-aligned box (Sutherland-Hodgman).
Piece clip_to_box(const std::vector<Vec2>& poly, const Vec2& lo, const Vec2& hi) {
    std::vector<Vec2> out = poly;
    auto clip = [&out](auto inside, auto intersect) {
        std::vector<Vec2> in;
        in.swap(out);
        if (in.empty()) return;
        Vec2 prev = in.back();
        for (const Vec2& cur : in) {
            const bool cur_in = inside(cur);
            const bool prev_in = inside(prev);
            if (cur_in) {
                if (!prev_in) out.push_back(intersect(prev, cur));
                out.push_back(cur);
            } else if (prev_in) {
                out.push_back(intersect(prev, cur));
            }
            prev = cur;
        }
    };
    auto at_x = [](double x) {
        return [x](const Vec2& a, const Vec2& b) {
            const double t = (x - a.x()) / (b.x() - a.x());
            return Vec2(x, a.y() + t * (b.y() - a.y()));
        };
    };
    auto at_y = [](double y) {
        return [y](const Vec2& a, const Vec2& b) {
            const double t = (y - a.y()) / (b.y() - a.y());
            return Vec2(a.x() + t * (b.x() - a.x()), y);
        };
    };
    clip([&](const Vec2& p) { return p.x() >= lo.x(); }, at_x(lo.x()));
    clip([&](const Vec2& p) { return p.x() <= hi.x(); }, at_x(hi.x()));
    clip([&](const Vec2& p) { return p.y() >= lo.y(); }, at_y(lo.y()));
    clip([&](const Vec2& p) { return p.y() <= hi.y(); }, at_y(hi.y()));
    Piece piece;
    if (out.size() < 3) return piece;
    const double a = signed_area(out);
    if (a == 0.0) return piece;
    Vec2 c = Vec2::Zero();
    for (std::size_t i = 0; i < out.size(); ++i) {
        const Vec2& p = out[i];
        const Vec2& q = out[(i + 1) % out.size()];
        c += (p + q) * cross(p, q);
    }
    piece.area = std::abs(a);
    piece.centroid = c / (6.0 * a);
    return piece;
}

// Resolution used when a curved outline stands in for the exact curve.
constexpr int kCurveResolution = 4096;

}  // namespace

SectionShape::SectionShape(Kind kind) : kind_(std::move(kind)) {}

SectionShape SectionShape::rectangle(double b, double h) {
    require_positive(b, "rectangle width b");
    require_positive(h, "rectangle height h");
    SectionShape s(Rectangle{b, h});
    s.corners_ = {{-b / 2, -h / 2}, {b / 2, -h / 2}, {b / 2, h / 2}, {-b / 2, h / 2}};
    return s;
}

SectionShape SectionShape::equilateral_triangle(double b) {
    require_positive(b, "triangle side b");
    SectionShape s(EquilateralTriangle{b});
    const double t = b * std::sqrt(3.0) / 2.0;
    s.corners_ = {{-b / 2, -t / 3}, {b / 2, -t / 3}, {0.0, 2.0 * t / 3}};
    return s;
}

SectionShape SectionShape::circle(double radius) {
    require_positive(radius, "circle radius");
    return SectionShape(Circle{radius});
}

SectionShape SectionShape::ellipse(double a, double b) {
    require_positive(a, "ellipse semi-axis a");
    require_positive(b, "ellipse semi-axis b");
    return SectionShape(Ellipse{a, b});
}

SectionShape SectionShape::polygon(std::vector<Vec2> vertices) {
    if (vertices.size() >= 2 && vertices.front() == vertices.back()) vertices.pop_back();
    if (vertices.size() < 3) throw GeometryError("polygon needs at least 3 distinct vertices");
    for (const Vec2& v : vertices) {
        if (!v.allFinite()) throw GeometryError("polygon vertex is not finite");
    }
    const std::size_t n = vertices.size();
    double perim = 0.0;
    for (std::size_t i = 0; i < n; ++i) perim += (vertices[(i + 1) % n] - vertices[i]).norm();
    for (std::size_t i = 0; i < n; ++i) {
        const double len = (vertices[(i + 1) % n] - vertices[i]).norm();
        if (len <= kBoundaryBand * perim) {
            std::ostringstream msg;
            msg << "polygon edge " << i << " (vertex " << i << " -> vertex " << (i + 1) % n
                << ") has zero length";
            throw GeometryError(msg.str());
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const bool adjacent = j == i + 1 || (i == 0 && j == n - 1);
            if (adjacent) continue;
            if (segments_intersect(vertices[i], vertices[(i + 1) % n], vertices[j],
                                   vertices[(j + 1) % n])) {
                std::ostringstream msg;
                msg << "polygon is self-intersecting: edge " << i << " crosses edge " << j;
                throw GeometryError(msg.str());
            }
        }
    }
    if (signed_area(vertices) < 0.0) std::reverse(vertices.begin(), vertices.end());
    SectionShape s(Polygon{vertices});
    s.corners_ = std::move(vertices);
    return s;
}

std::string SectionShape::name() const {
    return std::visit(Overloaded{[](const Rectangle&) { return std::string("rectangle"); },
                                 [](const EquilateralTriangle&) { return std::string("equilateral_triangle"); },
                                 [](const Circle&) { return std::string("circle"); },
                                 [](const Ellipse&) { return std::string("ellipse"); },
                                 [](const Polygon&) { return std::string("polygon"); }},
                      kind_);
}

bool SectionShape::is_polygonal() const noexcept { return !corners_.empty(); }

double SectionShape::area() const {
    return std::visit(Overloaded{[](const Circle& c) { return kPi * c.radius * c.radius; },
                                 [](const Ellipse& e) { return kPi * e.a * e.b; },
                                 [this](const auto&) { return signed_area(corners_); }},
                      kind_);
}

double SectionShape::perimeter() const {
    return std::visit(Overloaded{[](const Circle& c) { return 2.0 * kPi * c.radius; },
                                 [](const Ellipse& e) {
                                     const double a = std::max(e.a, e.b);
                                     const double b = std::min(e.a, e.b);
                                     const double k = std::sqrt(1.0 - (b / a) * (b / a));
                                     return 4.0 * a * boost::math::ellint_2(k);
                                 },
                                 [this](const auto&) {
                                     double p = 0.0;
                                     for (std::size_t i = 0; i < corners_.size(); ++i) {
                                         p += (corners_[(i + 1) % corners_.size()] - corners_[i]).norm();
                                     }
                                     return p;
                                 }},
                      kind_);
}

BoundingBox SectionShape::bounds() const {
    return std::visit(Overloaded{[](const Circle& c) {
                                     return BoundingBox{{-c.radius, -c.radius}, {c.radius, c.radius}};
                                 },
                                 [](const Ellipse& e) { return BoundingBox{{-e.a, -e.b}, {e.a, e.b}}; },
                                 [this](const auto&) {
                                     BoundingBox box{corners_.front(), corners_.front()};
                                     for (const Vec2& v : corners_) {
                                         box.lo = box.lo.cwiseMin(v);
                                         box.hi = box.hi.cwiseMax(v);
                                     }
                                     return box;
                                 }},
                      kind_);
}

bool SectionShape::contains(const Vec2& p) const {
    return std::visit(Overloaded{[&](const Circle& c) {
                                     return p.squaredNorm() < c.radius * c.radius * (1.0 - kBoundaryBand);
                                 },
                                 [&](const Ellipse& e) {
                                     const double u = p.x() / e.a;
                                     const double v = p.y() / e.b;
                                     return u * u + v * v < 1.0 - kBoundaryBand;
                                 },
                                 [&](const auto&) {
                                     if (!polygon_crossing(corners_, p)) return false;
                                     return polygon_distance(corners_, p) > kBoundaryBand * perimeter();
                                 }},
                      kind_);
}

double SectionShape::boundary_distance(const Vec2& p) const {
    return std::visit(Overloaded{[&](const Circle& c) { return std::abs(c.radius - p.norm()); },
                                 [&](const Ellipse& e) { return ellipse_distance(e.a, e.b, p); },
                                 [&](const auto&) { return polygon_distance(corners_, p); }},
                      kind_);
}

std::vector<Vec2> SectionShape::outline(int n) const {
    if (is_polygonal()) return corners_;
    std::vector<Vec2> pts;
    pts.reserve(n);
    std::visit(Overloaded{[&](const Circle& c) {
                              for (int k = 0; k < n; ++k) {
                                  const double t = 2.0 * kPi * k / n;
                                  pts.emplace_back(c.radius * std::cos(t), c.radius * std::sin(t));
                              }
                          },
                          [&](const Ellipse& e) {
                              for (int k = 0; k < n; ++k) {
                                  const double t = 2.0 * kPi * k / n;
                                  pts.emplace_back(e.a * std::cos(t), e.b * std::sin(t));
                              }
                          },
                          [](const auto&) {}},
               kind_);
    return pts;
}

double BoundaryMesh::perimeter() const {
    double p = 0.0;
    for (const auto& e : elements) p += e.length;
    return p;
}

double BoundaryMesh::enclosed_area() const {
    double a = 0.0;
    for (const auto& e : elements) a += 0.5 * e.midpoint.dot(e.normal) * e.length;
    return a;
}

Vec2 BoundaryMesh::closure_defect() const {
    Vec2 s = Vec2::Zero();
    for (const auto& e : elements) s += e.length * e.normal;
    return s;
}

bool BoundaryMesh::encloses(const Vec2& p) const {
    double angle = 0.0;
    for (const auto& e : elements) {
        const Vec2 a = e.start - p;
        const Vec2 b = e.end - p;
        angle += std::atan2(cross(a, b), a.dot(b));
    }
    if (std::abs(angle - 2.0 * kPi) > 1e-6) return false;
    return distance(p) > kBoundaryBand * perimeter();
}

double BoundaryMesh::distance(const Vec2& p) const {
    double d = std::numeric_limits<double>::infinity();
    for (const auto& e : elements) d = std::min(d, segment_distance(p, e.start, e.end));
    return d;
}

double CollocationSet::min_pair_distance() const {
    double d = std::numeric_limits<double>::infinity();
    for (int i = 0; i < size(); ++i) {
        for (int j = i + 1; j < size(); ++j) d = std::min(d, distance(i, j));
    }
    return d;
}

BoundaryMesh discretize_boundary(const SectionShape& shape, int n) {
    if (n < 8) throw GeometryError("boundary discretization needs at least 8 elements");
    const std::vector<Vec2> poly = shape.outline(n);
    const std::size_t edges = poly.size();
    if (static_cast<std::size_t>(n) < edges) {
        std::ostringstream msg;
        msg << "cannot place " << n << " elements on a polygon with " << edges << " edges";
        throw GeometryError(msg.str());
    }

    std::vector<double> len(edges);
    double perim = 0.0;
    for (std::size_t i = 0; i < edges; ++i) {
        len[i] = (poly[(i + 1) % edges] - poly[i]).norm();
        perim += len[i];
    }
    for (std::size_t i = 0; i < edges; ++i) {
        if (len[i] <= kBoundaryBand * perim) {
            std::ostringstream msg;
            msg << "edge " << i << " of the " << shape.name() << " outline has zero length";
            throw GeometryError(msg.str());
        }
    }

    // Largest-remainder allocation, at least one element per edge.
    std::vector<int> count(edges);
    std::vector<double> remainder(edges);
    int used = 0;
    for (std::size_t i = 0; i < edges; ++i) {
        const double ideal = n * len[i] / perim;
        count[i] = std::max(1, static_cast<int>(std::floor(ideal)));
        remainder[i] = ideal - count[i];
        used += count[i];
    }
    std::vector<std::size_t> order(edges);
    for (std::size_t i = 0; i < edges; ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return remainder[a] > remainder[b]; });
    for (std::size_t k = 0; used < n; k = (k + 1) % edges, ++used) ++count[order[k]];
    while (used > n) {
        const auto widest = std::max_element(count.begin(), count.end());
        --*widest;
        --used;
    }

    BoundaryMesh mesh;
    mesh.elements.reserve(n);
    for (std::size_t i = 0; i < edges; ++i) {
        const Vec2& a = poly[i];
        const Vec2& b = poly[(i + 1) % edges];
        for (int k = 0; k < count[i]; ++k) {
            BoundaryElement e;
            e.start = a + (b - a) * (static_cast<double>(k) / count[i]);
            e.end = k + 1 == count[i] ? b : a + (b - a) * (static_cast<double>(k + 1) / count[i]);
            e.midpoint = 0.5 * (e.start + e.end);
            e.length = (e.end - e.start).norm();
            e.tangent = (e.end - e.start) / e.length;
            e.normal = Vec2(e.tangent.y(), -e.tangent.x());
            mesh.elements.push_back(e);
        }
    }
    return mesh;
}

namespace {

struct GridLayout {
    int nx = 0;
    int ny = 0;
    double dx = 0.0;
    double dy = 0.0;
    Vec2 center;

    Vec2 node(int i, int j) const {
        return {center.x() + (i - 0.5 * (nx - 1)) * dx, center.y() + (j - 0.5 * (ny - 1)) * dy};
    }
};

bool admissible(const SectionShape& shape, const Vec2& p, double inset) {
    return shape.contains(p) && shape.boundary_distance(p) >= inset;
}

int count_admissible(const SectionShape& shape, const GridLayout& g, double inset) {
    int count = 0;
    for (int j = 0; j < g.ny; ++j) {
        for (int i = 0; i < g.nx; ++i) count += admissible(shape, g.node(i, j), inset) ? 1 : 0;
    }
    return count;
}

}  // namespace

CollocationSet generate_collocation(const SectionShape& shape, int m_target, double inset) {
    if (m_target < 1) throw GeometryError("collocation target must be at least 1 point");
    if (!(inset > 0.0)) throw GeometryError("collocation inset must be positive");

    const BoundingBox box = shape.bounds();
    const double width = box.hi.x() - box.lo.x();
    const double height = box.hi.y() - box.lo.y();
    const Vec2 center = 0.5 * (box.lo + box.hi);

    GridLayout best;
    int best_count = -1;
    double best_aspect = 0.0;
    const int nx_max = static_cast<int>(std::ceil(4.0 * std::sqrt(m_target * width / height))) + 8;
    for (int nx = 1; nx <= nx_max; ++nx) {
        const int ny_mid = std::max(1, static_cast<int>(std::lround(nx * height / width)));
        for (int ny = std::max(1, ny_mid - 1); ny <= ny_mid + 1; ++ny) {
            GridLayout g{nx, ny, width / nx, height / ny, center};
            const int count = count_admissible(shape, g, inset);
            if (count == 0) continue;
            const double aspect = std::abs(std::log(g.dx / g.dy));
            const int miss = std::abs(count - m_target);
            const int best_miss = std::abs(best_count - m_target);
            if (best_count < 0 || miss < best_miss || (miss == best_miss && aspect < best_aspect)) {
                best = g;
                best_count = count;
                best_aspect = aspect;
            }
        }
    }
    if (best_count <= 0) {
        std::ostringstream msg;
        msg << "inset " << inset << " leaves no room for collocation points in the " << shape.name();
        throw GeometryError(msg.str());
    }
    if (std::abs(best_count - m_target) > 0.1 * m_target) {
        std::ostringstream msg;
        msg << "closest grid gives " << best_count << " collocation points, more than 10% away from "
            << m_target << " (inset " << inset << ")";
        throw GeometryError(msg.str());
    }

    CollocationSet set;
    set.inset = inset;
    set.spacing_x = best.dx;
    set.spacing_y = best.dy;
    std::vector<int> index(static_cast<std::size_t>(best.nx) * best.ny, -1);
    for (int j = 0; j < best.ny; ++j) {
        for (int i = 0; i < best.nx; ++i) {
            const Vec2 p = best.node(i, j);
            if (admissible(shape, p, inset)) {
                index[static_cast<std::size_t>(j) * best.nx + i] = set.size();
                set.points.push_back(p);
            }
        }
    }

    // Cell-weighted quadrature. A full cell goes to its own node. A clipped
    // cell, or the cell of a dropped node, is shared among the nearest kept
    // points with the smallest weights that keep its area and centroid, so
    // linear fields are integrated exactly.
    const std::vector<Vec2> outline = shape.outline(kCurveResolution);
    const double full = best.dx * best.dy;
    const int share = std::min(6, set.size());
    set.weights.assign(set.points.size(), 0.0);
    std::vector<int> order(set.points.size());
    for (int j = 0; j < best.ny; ++j) {
        for (int i = 0; i < best.nx; ++i) {
            const Vec2 p = best.node(i, j);
            const Vec2 half(0.5 * best.dx, 0.5 * best.dy);
            const Piece piece = clip_to_box(outline, p - half, p + half);
            if (piece.area <= 0.0) continue;
            const int own = index[static_cast<std::size_t>(j) * best.nx + i];
            if (own >= 0 && piece.area >= full * (1.0 - 1e-12)) {
                set.weights[own] += piece.area;
                continue;
            }
            const Vec2 g = piece.centroid;
            for (int k = 0; k < set.size(); ++k) order[k] = k;
            std::partial_sort(order.begin(), order.begin() + share, order.end(), [&](int a, int b) {
                const double da = (set.points[a] - g).squaredNorm();
                const double db = (set.points[b] - g).squaredNorm();
                return da < db || (da == db && a < b);
            });
            Eigen::Matrix3Xd P(3, share);
            for (int k = 0; k < share; ++k) {
                const Vec2 d = set.points[order[k]] - g;
                P.col(k) << 1.0, d.x(), d.y();
            }
            const Eigen::Matrix3d PPt = P * P.transpose();
            Eigen::FullPivLU<Eigen::Matrix3d> lu(PPt);
            if (lu.rank() < 3) {
                // Collinear neighbours: fall back to the nearest point.
                set.weights[order[0]] += piece.area;
                continue;
            }
            const Eigen::VectorXd v = P.transpose() * lu.solve(Eigen::Vector3d(piece.area, 0.0, 0.0));
            for (int k = 0; k < share; ++k) set.weights[order[k]] += v[k];
        }
    }

    set.min_clearance = std::numeric_limits<double>::infinity();
    for (const Vec2& p : set.points) {
        set.min_clearance = std::min(set.min_clearance, shape.boundary_distance(p));
    }
    return set;
}

bool point_in_domain(const SectionShape& shape, const Vec2& point) { return shape.contains(point); }

}  // namespace torsolve
