#pragma once

#include <array>
#include <cmath>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace nplap {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
    friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
    friend Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
    friend bool operator==(Vec2 a, Vec2 b) = default;
    double dot(Vec2 o) const { return x * o.x + y * o.y; }
    double norm() const { return std::hypot(x, y); }
};

enum class ShapeKind { disk, ellipse, rectangle, stadium, annulus };

/// Analytic test geometry. Parameter meaning by kind:
///   disk: a = radius
///   ellipse: a, b = semi-axes along x and y
///   rectangle: a = width, b = height
///   stadium: a = length of the straight segment, b = cap radius
///   annulus: a = inner radius, b = outer radius
struct Shape {
    ShapeKind kind = ShapeKind::disk;
    Vec2 center{};
    double a = 1.0;
    double b = 1.0;

    static Shape disk(double radius, Vec2 center = {});
    static Shape ellipse(double semi_x, double semi_y, Vec2 center = {});
    static Shape rectangle(double width, double height, Vec2 center = {});
    static Shape stadium(double segment_length, double radius, Vec2 center = {});
    static Shape annulus(double inner_radius, double outer_radius, Vec2 center = {});

    /// Negative inside, positive outside, exact Euclidean distance to the boundary.
    double signed_distance(Vec2 x) const;
    /// Normalized gradient of the signed distance.
    Vec2 outer_normal(Vec2 x) const;
    bool contains(Vec2 x) const { return signed_distance(x) < 0.0; }
    Vec2 half_extent() const;
    double area() const;
    /// Homothety about the shape center.
    Shape scaled(double factor) const;
    std::string name() const;
};

std::string_view to_string(ShapeKind kind);
ShapeKind shape_kind_from_string(std::string_view name);

/// Where the shape center sits on the lattice.
enum class Centering {
    cell,  ///< center falls between nodes (even node count per axis)
    node,  ///< center is a lattice node (odd node count per axis)
};

/// Lattice directions: +x, -x, +y, -y, (+1,+1), (-1,-1), (+1,-1), (-1,+1).
inline constexpr std::array<std::array<int, 2>, 8> kLatticeDirections = {
    {{1, 0}, {-1, 0}, {0, 1}, {0, -1}, {1, 1}, {-1, -1}, {1, -1}, {-1, 1}}};

/// Uniform lattice with an inside mask generated by an analytic shape.
///
/// Every inside node keeps all eight neighbours on the lattice (one-node
/// margin), so stencils never index out of range. For each inside node and
/// direction the fraction of the lattice step at which the segment to the
/// neighbour leaves the shape is stored (1 if the neighbour is inside).
class GridDomain {
public:
    static GridDomain from_shape(const Shape& shape, double h, Centering centering = Centering::cell);

    int nx() const { return nx_; }
    int ny() const { return ny_; }
    double h() const { return h_; }
    Vec2 origin() const { return origin_; }
    std::size_t node_count() const { return inside_.size(); }

    int node(int i, int j) const { return j * nx_ + i; }
    int column(int node) const { return node % nx_; }
    int row(int node) const { return node / nx_; }
    Vec2 position(int node) const;
    Vec2 position(int i, int j) const { return {origin_.x + i * h_, origin_.y + j * h_}; }
    int neighbor(int node, int direction) const;

    bool inside(int node) const { return inside_[static_cast<std::size_t>(node)] != 0; }
    const std::vector<int>& inside_nodes() const { return inside_nodes_; }
    /// Position of `node` in inside_nodes(), or -1.
    int inside_index(int node) const { return inside_index_[static_cast<std::size_t>(node)]; }
    /// Inside nodes with an outside node among their eight neighbours.
    const std::vector<int>& boundary_band() const { return band_; }
    double boundary_fraction(int node, int direction) const;

    const std::optional<Shape>& shape() const { return shape_; }
    /// Number of closed boundary curves (connected components of the complement).
    int boundary_loops() const { return boundary_loops_; }

private:
    GridDomain() = default;
    void finalize();

    std::optional<Shape> shape_;
    Vec2 origin_{};
    double h_ = 0.0;
    int nx_ = 0;
    int ny_ = 0;
    std::vector<unsigned char> inside_;
    std::vector<int> inside_nodes_;
    std::vector<int> inside_index_;
    std::vector<int> band_;
    std::vector<std::array<double, 8>> fractions_;
    int boundary_loops_ = 0;
};

using DomainPtr = std::shared_ptr<const GridDomain>;

/// Builds a shared domain; throws GeometryError on an empty or 4-disconnected mask.
DomainPtr make_shape(const Shape& shape, double h, Centering centering = Centering::cell);

/// Real values on every lattice node, zero on outside nodes.
class ScalarField {
public:
    /// Empty placeholder without a domain.
    ScalarField() = default;
    explicit ScalarField(DomainPtr domain);
    /// Throws GeometryError unless sizes match, values are finite and vanish outside.
    ScalarField(DomainPtr domain, std::vector<double> values);

    template <class F>
    static ScalarField from_function(DomainPtr domain, F&& f) {
        ScalarField field(domain);
        for (int node : domain->inside_nodes()) {
            field.values_[static_cast<std::size_t>(node)] = f(domain->position(node));
        }
        return field;
    }

    const GridDomain& domain() const { return *domain_; }
    const DomainPtr& domain_ptr() const { return domain_; }
    std::span<const double> values() const { return values_; }
    double operator[](int node) const { return values_[static_cast<std::size_t>(node)]; }
    void set(int node, double value) { values_[static_cast<std::size_t>(node)] = value; }

    double sup_norm() const;
    double min_inside() const;
    double max_inside() const;
    /// Bilinear interpolation; nullopt if any corner of the cell is outside the mask.
    std::optional<double> interpolate(Vec2 x) const;

private:
    DomainPtr domain_;
    std::vector<double> values_;
};

double max_abs_difference(const ScalarField& a, const ScalarField& b);

struct GeometrySummary {
    double measure = 0.0;    ///< (#inside) h^2
    double inradius = 0.0;   ///< max distance from an inside node to the nearest outside node
    double outradius = 0.0;  ///< radius of the smallest circle enclosing the inside nodes
    Vec2 centroid{};
    Vec2 enclosing_center{};
};

GeometrySummary geometry_summary(const GridDomain& domain);

/// Exact Euclidean distance (physical units) from every lattice node to the
/// nearest node with mask[node] == 0; zero on such nodes, infinity if none exists.
std::vector<double> distance_to_complement(const GridDomain& domain, std::span<const unsigned char> mask);

/// Lattice symmetry about the domain center: optional reflection followed by a
/// rotation by quarter turns.
struct Symmetry {
    enum class Reflection { none, x_axis, y_axis, diagonal, antidiagonal };
    int quarter_turns = 0;
    Reflection reflection = Reflection::none;

    static Symmetry rotation(int quarter_turns) { return {quarter_turns, Reflection::none}; }
    static Symmetry reflect(Reflection r) { return {0, r}; }
    std::string name() const;
};

/// All eight elements of the dihedral group of the square.
std::vector<Symmetry> dihedral_group();

bool mask_invariant(const GridDomain& domain, const Symmetry& g);

/// out(x) = f(g x). Throws GeometryError if the mask is not invariant under g.
ScalarField apply_symmetry(const ScalarField& f, const Symmetry& g);

/// Domain configuration {kind, parameters, h}.
struct DomainConfig {
    Shape shape;
    double h = 0.01;
    Centering centering = Centering::cell;
};

/// Parses a JSON domain config. Throws std::invalid_argument on malformed input.
DomainConfig parse_domain_config(std::string_view json_text);
std::string domain_config_to_json(const DomainConfig& config);

/// CSV with header "x,y,value", one row per inside node, 15 significant digits.
void write_field_csv(std::ostream& out, const ScalarField& field);

}  // namespace nplap
