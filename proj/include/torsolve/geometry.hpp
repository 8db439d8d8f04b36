#pragma once

#include <Eigen/Core>

#include <span>
#include <string>
#include <variant>
#include <vector>

namespace torsolve {

using Vec2 = Eigen::Vector2d;

/// b along x, h along y, centred on the origin.
struct Rectangle {
    double b;
    double h;
};

/// Side length b, horizontal base, centroid at the origin.
struct EquilateralTriangle {
    double b;
};

struct Circle {
    double radius;
};

/// Semi-axes a (along x) and b (along y).
struct Ellipse {
    double a;
    double b;
};

struct Polygon {
    std::vector<Vec2> vertices;
};

struct BoundingBox {
    Vec2 lo;
    Vec2 hi;
};

/**
 * A simply connected cross-section. Coordinates are taken as given: the
 * origin is the twist centre, and for graded materials y = 0 is the grading
 * mid-plane. Polygons are normalised to counterclockwise order on
 * construction; self-intersecting polygons are rejected.
 */
class SectionShape {
public:
    using Kind = std::variant<Rectangle, EquilateralTriangle, Circle, Ellipse, Polygon>;

    static SectionShape rectangle(double b, double h);
    static SectionShape equilateral_triangle(double b);
    static SectionShape circle(double radius);
    static SectionShape ellipse(double a, double b);
    static SectionShape polygon(std::vector<Vec2> vertices);

    const Kind& kind() const noexcept { return kind_; }
    std::string name() const;

    bool is_polygonal() const noexcept;
    /// Corner vertices (counterclockwise) of polygonal shapes; empty for curved ones.
    const std::vector<Vec2>& corners() const noexcept { return corners_; }

    double area() const;
    double perimeter() const;
    BoundingBox bounds() const;

    /// Strict interior test. Boundary points are not interior.
    bool contains(const Vec2& p) const;
    /// Unsigned distance from p to the boundary curve.
    double boundary_distance(const Vec2& p) const;
    /// Closed polygonal outline: the corners for polygons, an inscribed n-gon for curves.
    std::vector<Vec2> outline(int n) const;

private:
    explicit SectionShape(Kind kind);

    Kind kind_;
    std::vector<Vec2> corners_;
};

struct BoundaryElement {
    Vec2 start;
    Vec2 end;
    Vec2 midpoint;
    Vec2 tangent;
    Vec2 normal;  ///< outward unit normal
    double length;
};

/// Constant straight boundary elements, ordered counterclockwise.
struct BoundaryMesh {
    std::vector<BoundaryElement> elements;

    int size() const noexcept { return static_cast<int>(elements.size()); }
    double perimeter() const;
    /// Area from the boundary circulation 1/2 sum (x n_x + y n_y) l.
    double enclosed_area() const;
    /// Sum of l * n over the elements; zero for a closed boundary.
    Vec2 closure_defect() const;
    /// Winding-number test against the element polygon (true strictly inside).
    bool encloses(const Vec2& p) const;
    /// Distance from p to the element polygon.
    double distance(const Vec2& p) const;
};

/// Interior points on a clipped uniform grid with cell weights for direct quadrature.
struct CollocationSet {
    std::vector<Vec2> points;
    /// Cell area assigned to each point; sums to the section area.
    std::vector<double> weights;
    double inset = 0.0;
    double min_clearance = 0.0;
    double spacing_x = 0.0;
    double spacing_y = 0.0;

    int size() const noexcept { return static_cast<int>(points.size()); }
    double distance(int i, int j) const { return (points[i] - points[j]).norm(); }
    double min_pair_distance() const;
};

BoundaryMesh discretize_boundary(const SectionShape& shape, int n);

CollocationSet generate_collocation(const SectionShape& shape, int m_target, double inset);

bool point_in_domain(const SectionShape& shape, const Vec2& point);

}  // namespace torsolve
