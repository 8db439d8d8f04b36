#include "torsolve/config.hpp"

#include "torsolve/error.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>

namespace torsolve {

namespace pt = boost::property_tree;

namespace {

std::string trim(std::string s) {
    // trailing comments are allowed after a value
    if (const auto c = s.find_first_of(";#"); c != std::string::npos) s.erase(c);
    auto not_space = [](unsigned char ch) { return !std::isspace(ch); };
    s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
    s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
    return s;
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    return s;
}

double to_number(const std::string& text, const std::string& what) {
    const std::string t = lower(trim(text));
    if (t == "inf" || t == "infinity") return std::numeric_limits<double>::infinity();
    double v = 0.0;
    const char* end = t.data() + t.size();
    const auto [ptr, ec] = std::from_chars(t.data(), end, v);
    if (t.empty() || ec != std::errc() || ptr != end) throw ConfigError(what + ": '" + text + "' is not a number");
    return v;
}

/// One INI section with key bookkeeping so leftovers can be reported.
class Section {
public:
    Section(const pt::ptree* tree, std::string name) : tree_(tree), name_(std::move(name)) {}

    bool has(const std::string& key) const {
        return tree_ && tree_->find(key) != tree_->not_found();
    }

    std::optional<std::string> text(const std::string& key) {
        used_.insert(key);
        if (!has(key)) return std::nullopt;
        return trim(tree_->get<std::string>(key));
    }

    std::optional<double> number(const std::string& key) {
        auto t = text(key);
        if (!t) return std::nullopt;
        return to_number(*t, label(key));
    }

    double required(const std::string& key) {
        auto v = number(key);
        if (!v) throw ConfigError("missing required key " + label(key));
        return *v;
    }

    double positive(const std::string& key) {
        const double v = required(key);
        if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(label(key) + " must be a positive number");
        return v;
    }

    double positive_or(const std::string& key, double fallback) {
        return has(key) ? positive(key) : (used_.insert(key), fallback);
    }

    int integer_or(const std::string& key, int fallback, int minimum) {
        auto v = number(key);
        if (!v) return fallback;
        if (*v != std::floor(*v) || *v < minimum || *v > 1e9) {
            std::ostringstream msg;
            msg << label(key) << " must be an integer >= " << minimum;
            throw ConfigError(msg.str());
        }
        return static_cast<int>(*v);
    }

    std::string label(const std::string& key) const { return "[" + name_ + "] " + key; }

    void check_unused() const {
        if (!tree_) return;
        for (const auto& [key, value] : *tree_) {
            if (!used_.count(key)) throw ConfigError("unknown key " + label(key));
        }
    }

private:
    const pt::ptree* tree_;
    std::string name_;
    std::set<std::string> used_;
};

SectionShape read_shape(Section& g) {
    const std::string kind = lower(g.text("shape").value_or(""));
    if (kind == "rectangle") return SectionShape::rectangle(g.positive("b"), g.positive("h"));
    if (kind == "triangle" || kind == "equilateral_triangle") return SectionShape::equilateral_triangle(g.positive("b"));
    if (kind == "circle") return SectionShape::circle(g.positive("radius"));
    if (kind == "ellipse") return SectionShape::ellipse(g.positive("a"), g.positive("b"));
    if (kind == "polygon") {
        const auto text = g.text("vertices");
        if (!text) throw ConfigError("missing required key " + g.label("vertices"));
        const std::vector<double> v = parse_number_list(*text, g.label("vertices"));
        if (v.size() % 2 != 0 || v.size() < 6) {
            throw ConfigError(g.label("vertices") + " needs at least three x y pairs");
        }
        std::vector<Vec2> pts;
        for (std::size_t i = 0; i < v.size(); i += 2) pts.emplace_back(v[i], v[i + 1]);
        try {
            return SectionShape::polygon(std::move(pts));
        } catch (const GeometryError& e) {
            throw ConfigError(std::string("invalid polygon: ") + e.what());
        }
    }
    if (kind.empty()) throw ConfigError("missing required key " + g.label("shape"));
    throw ConfigError(g.label("shape") + " must be rectangle, triangle, circle, ellipse or polygon (got '" + kind +
                      "')");
}

MaterialModel read_material(Section& m, const SectionShape& shape) {
    const std::string mode = lower(m.text("mode").value_or("homogeneous"));
    if (mode == "homogeneous") {
        const double E = m.positive("E");
        const double nu = m.required("nu");
        const double sy = m.positive("sigma_y");
        const auto alpha = m.number("alpha");
        const auto Eh = m.number("E_h");
        if (alpha && Eh) throw ConfigError("give either [material] alpha or E_h, not both");
        const double a = alpha ? *alpha : (Eh ? *Eh / E : 0.0);
        if (!(a >= 0.0 && a <= 1.0)) throw ConfigError("[material] alpha must lie in [0, 1]");
        try {
            return BilinearCurve::from_ratio(E, nu, sy, a);
        } catch (const ConfigError& e) {
            throw ConfigError(std::string("[material] ") + e.what());
        }
    }
    if (mode == "fgm_tto" || mode == "fgm") {
        TtoFgm f;
        f.ceramic.E = m.positive("ceramic_E");
        f.ceramic.nu = m.required("ceramic_nu");
        f.metal.E = m.positive("metal_E");
        f.metal.nu = m.required("metal_nu");
        f.metal.sigma_y = m.positive("metal_sigma_y");
        f.metal.E_h = m.required("metal_E_h");
        f.exponent = m.required("k");
        f.q = m.required("q");
        const BoundingBox box = shape.bounds();
        const double span = 2.0 * std::max(std::abs(box.lo.y()), std::abs(box.hi.y()));
        f.height = m.positive_or("height", span);
        if (f.height < span * (1.0 - 1e-12)) {
            throw ConfigError("[material] height does not cover the section (needs at least 2 max|y|)");
        }
        try {
            f.validate();
        } catch (const ConfigError& e) {
            throw ConfigError(std::string("[material] ") + e.what());
        }
        return f;
    }
    throw ConfigError("[material] mode must be homogeneous or fgm_tto (got '" + mode + "')");
}

std::pair<int, int> parse_cell(const std::string& cell) {
    const auto x = lower(cell).find('x');
    if (x == std::string::npos) throw ConfigError("[convergence] grid cells are written NxM (got '" + cell + "')");
    const double n = to_number(cell.substr(0, x), "[convergence] grid N");
    const double m = to_number(cell.substr(x + 1), "[convergence] grid M");
    if (n < 8 || m < 1 || n != std::floor(n) || m != std::floor(m)) {
        throw ConfigError("[convergence] grid cell '" + cell + "' needs integers N >= 8 and M >= 1");
    }
    return {static_cast<int>(n), static_cast<int>(m)};
}

}  // namespace

std::vector<double> parse_number_list(const std::string& text, const std::string& what) {
    std::string t = text;
    std::replace(t.begin(), t.end(), ',', ' ');
    std::istringstream in(t);
    std::vector<double> out;
    std::string token;
    while (in >> token) out.push_back(to_number(token, what));
    return out;
}

double RunConfig::reference_yield_stress() const {
    if (const auto* c = std::get_if<BilinearCurve>(&material)) return c->sigma_y;
    return std::get<TtoFgm>(material).metal.sigma_y;
}

RunConfig parse_config(std::istream& in, const std::string& source) {
    pt::ptree tree;
    try {
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError(source + ": " + e.message() + " (line " + std::to_string(e.line()) + ")");
    }
    static const std::set<std::string> known{"geometry", "material", "solver", "schedule", "output", "convergence"};
    std::map<std::string, const pt::ptree*> sections;
    for (const auto& [name, child] : tree) {
        if (!known.count(name)) throw ConfigError(source + ": unknown section [" + name + "]");
        sections[name] = &child;
    }
    auto section = [&](const std::string& name) {
        const auto it = sections.find(name);
        return Section(it == sections.end() ? nullptr : it->second, name);
    };
    if (!sections.count("geometry")) throw ConfigError(source + ": missing [geometry] section");
    if (!sections.count("material")) throw ConfigError(source + ": missing [material] section");

    RunConfig cfg;
    Section g = section("geometry");
    cfg.shape = read_shape(g);
    cfg.discretization.boundary_elements = g.integer_or("elements", 300, 8);
    cfg.discretization.collocation_target = g.integer_or("collocation", 450, 1);
    if (auto inset = g.number("inset")) {
        if (!(*inset >= 0.0)) throw ConfigError("[geometry] inset must be >= 0 (0 selects one element length)");
        cfg.discretization.inset = *inset;
    }
    g.check_unused();

    Section m = section("material");
    cfg.material = read_material(m, cfg.shape);
    m.check_unused();

    Section s = section("solver");
    cfg.discretization.shape_parameter = s.positive_or("c", 0.1);
    cfg.discretization.quadrature_order = s.integer_or("quadrature_order", 8, 1);
    cfg.discretization.interpolation.condition_cap = s.positive_or("condition_cap", 1e12);
    if (auto t = s.number("tikhonov")) {
        if (!(*t >= 0.0)) throw ConfigError("[solver] tikhonov must be >= 0");
        cfg.discretization.interpolation.tikhonov = *t;
    }
    cfg.solver.tol = s.positive_or("tol", 1e-6);
    cfg.solver.max_iter = s.integer_or("max_iter", 50, 1);
    cfg.solver.max_halvings = s.integer_or("max_halvings", 20, 0);
    cfg.solver.broyden_refresh = s.integer_or("broyden_refresh", 8, 1);
    if (auto j = s.text("jacobian")) {
        const std::string mode = lower(*j);
        if (mode == "fd") cfg.solver.jacobian = JacobianMode::finite_difference;
        else if (mode == "broyden") cfg.solver.jacobian = JacobianMode::broyden;
        else throw ConfigError("[solver] jacobian must be fd or broyden (got '" + *j + "')");
    }
    if (auto h = s.number("hardening_floor")) {
        if (!(*h >= 0.0 && *h <= 1.0)) throw ConfigError("[solver] hardening_floor must lie in [0, 1]");
        cfg.solver.hardening_floor = *h;
    }
    s.check_unused();

    Section sc = section("schedule");
    cfg.schedule.theta_max_ratio = sc.positive_or("theta_max_ratio", 3.0);
    cfg.schedule.steps = sc.integer_or("steps", 12, 2);
    if (auto r = sc.text("ratios")) cfg.schedule.ratios = parse_number_list(*r, sc.label("ratios"));
    cfg.schedule.theta_ratio = sc.positive_or("theta_ratio", 1.0);
    if (sc.has("theta")) cfg.schedule.theta = sc.positive("theta");
    cfg.schedule.continuation_step = sc.positive_or("continuation_step", 1.25);
    if (!(cfg.schedule.continuation_step > 1.0)) throw ConfigError("[schedule] continuation_step must exceed 1");
    for (std::size_t i = 0; i < cfg.schedule.ratios.size(); ++i) {
        const double r = cfg.schedule.ratios[i];
        if (!(r > 0.0) || (i > 0 && !(r > cfg.schedule.ratios[i - 1]))) {
            throw ConfigError("[schedule] ratios must be positive and strictly increasing");
        }
    }
    sc.check_unused();

    Section o = section("output");
    cfg.output.directory = o.text("directory").value_or("out");
    if (cfg.output.directory.empty()) throw ConfigError("[output] directory must not be empty");
    cfg.output.field_grid = o.integer_or("field_grid", 0, 0);
    o.check_unused();

    Section cv = section("convergence");
    if (auto grid = cv.text("grid")) {
        std::string t = *grid;
        std::replace(t.begin(), t.end(), ',', ' ');
        std::istringstream cells(t);
        std::string cell;
        while (cells >> cell) cfg.convergence.grid.push_back(parse_cell(cell));
    }
    cfg.convergence.theta_ratio = cv.positive_or("theta_ratio", 3.0);
    cv.check_unused();
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path);
    return parse_config(in, path);
}

}  // namespace torsolve
