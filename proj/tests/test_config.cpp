#include "torsolve/config.hpp"
#include "torsolve/csv.hpp"
#include "torsolve/error.hpp"

#include <gtest/gtest.h>

#include <charconv>
#include <cstring>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

using namespace torsolve;

namespace {

RunConfig parse(const std::string& text) {
    std::istringstream in(text);
    return parse_config(in, "test");
}

const char* kMinimal = R"(
[geometry]
shape = rectangle
b = 5
h = 10

[material]
E = 210600
nu = 0.3
sigma_y = 24
)";

void expect_config_error(const std::string& text, const std::string& fragment) {
    try {
        parse(text);
        FAIL() << "expected ConfigError containing '" << fragment << "'";
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find(fragment), std::string::npos) << e.what();
    }
}

}  // namespace

TEST(Config, MinimalFileTakesDefaults) {
    const RunConfig c = parse(kMinimal);
    EXPECT_EQ(c.shape.name(), "rectangle");
    const auto& curve = std::get<BilinearCurve>(c.material);
    EXPECT_EQ(curve.E, 210600);
    EXPECT_EQ(curve.E_h, 0.0);
    EXPECT_EQ(c.discretization.boundary_elements, 300);
    EXPECT_EQ(c.discretization.collocation_target, 450);
    EXPECT_EQ(c.discretization.shape_parameter, 0.1);
    EXPECT_EQ(c.solver.tol, 1e-6);
    EXPECT_EQ(c.solver.max_iter, 50);
    EXPECT_EQ(c.solver.jacobian, JacobianMode::finite_difference);
    EXPECT_EQ(c.solver.hardening_floor, 0.0);
    EXPECT_EQ(c.schedule.theta_max_ratio, 3.0);
    EXPECT_EQ(c.schedule.steps, 12);
    EXPECT_FALSE(c.schedule.theta.has_value());
    EXPECT_EQ(c.output.directory, "out");
    EXPECT_EQ(c.reference_yield_stress(), 24.0);
}

TEST(Config, FullFile) {
    const RunConfig c = parse(R"(
; comment line
[geometry]
shape = polygon
vertices = 0 0, 4 0, 4 1, 1 1, 1 3, 0 3   ; trailing comment
elements = 160
collocation = 200
inset = 0.05

[material]
mode = fgm_tto
ceramic_E = 5000
ceramic_nu = 0.25
metal_E = 3000
metal_nu = 0.25
metal_sigma_y = 5
metal_E_h = 500
k = 2
q = inf
height = 8

[solver]
c = 0.2
quadrature_order = 6
condition_cap = 1e13
tikhonov = 1e-9
tol = 1e-7
max_iter = 30
max_halvings = 10
broyden_refresh = 4
jacobian = broyden
hardening_floor = 1e-6

[schedule]
ratios = 0.5 1 2 3
theta_ratio = 2
theta = 1e-4
continuation_step = 1.5

[output]
directory = results/run1
field_grid = 500

[convergence]
grid = 100x50, 200X100
theta_ratio = 2.5
)");
    EXPECT_EQ(c.shape.corners().size(), 6u);
    const auto& f = std::get<TtoFgm>(c.material);
    EXPECT_TRUE(std::isinf(f.q));
    EXPECT_EQ(f.exponent, 2.0);
    EXPECT_EQ(f.height, 8.0);
    EXPECT_EQ(c.discretization.boundary_elements, 160);
    EXPECT_EQ(c.discretization.inset, 0.05);
    EXPECT_EQ(c.discretization.shape_parameter, 0.2);
    EXPECT_EQ(c.discretization.quadrature_order, 6);
    EXPECT_EQ(c.discretization.interpolation.tikhonov, 1e-9);
    EXPECT_EQ(c.solver.jacobian, JacobianMode::broyden);
    EXPECT_EQ(c.solver.broyden_refresh, 4);
    EXPECT_EQ(c.solver.hardening_floor, 1e-6);
    EXPECT_EQ(c.schedule.ratios, (std::vector<double>{0.5, 1, 2, 3}));
    EXPECT_EQ(*c.schedule.theta, 1e-4);
    EXPECT_EQ(c.schedule.continuation_step, 1.5);
    EXPECT_EQ(c.output.directory, "results/run1");
    EXPECT_EQ(c.output.field_grid, 500);
    ASSERT_EQ(c.convergence.grid.size(), 2u);
    EXPECT_EQ(c.convergence.grid[1], std::make_pair(200, 100));
    EXPECT_EQ(c.convergence.theta_ratio, 2.5);
    EXPECT_EQ(c.reference_yield_stress(), 5.0);
}

TEST(Config, HardeningGivenAsModulus) {
    const RunConfig c = parse(std::string(kMinimal) + "E_h = 21060\n");
    EXPECT_NEAR(std::get<BilinearCurve>(c.material).alpha(), 0.1, 1e-15);
}

TEST(Config, GradedHeightDefaultsToTheSection) {
    const RunConfig c = parse(R"(
[geometry]
shape = triangle
b = 10
[material]
mode = fgm_tto
ceramic_E = 5000
ceramic_nu = 0.25
metal_E = 3000
metal_nu = 0.25
metal_sigma_y = 5
metal_E_h = 500
k = 1
q = 0
)");
    // Apex at 2/3 of the triangle height above the centroid.
    EXPECT_NEAR(std::get<TtoFgm>(c.material).height, 2 * (10 * std::sqrt(3.0) / 2) * 2 / 3, 1e-12);
}

TEST(Config, Errors) {
    expect_config_error("[material]\nE=1\n", "[geometry]");
    expect_config_error("[geometry]\nshape=rectangle\nb=1\nh=1\n", "[material]");
    expect_config_error(std::string(kMinimal) + "[extra]\nx=1\n", "unknown section [extra]");
    expect_config_error(std::string(kMinimal) + "colour = red\n", "unknown key [material] colour");
    expect_config_error(std::string(kMinimal) + "alpha = 1.5\n", "alpha");
    expect_config_error(std::string(kMinimal) + "alpha = 0.1\nE_h = 10\n", "either");
    expect_config_error(std::string(kMinimal) + "[solver]\ntol = abc\n", "not a number");
    expect_config_error(std::string(kMinimal) + "[solver]\njacobian = exact\n", "fd or broyden");
    expect_config_error(std::string(kMinimal) + "[solver]\nmax_iter = 2.5\n", "integer");
    expect_config_error(std::string(kMinimal) + "[schedule]\nratios = 1, 0.5\n", "strictly increasing");
    expect_config_error(std::string(kMinimal) + "[schedule]\ncontinuation_step = 1\n", "continuation_step");
    expect_config_error(std::string(kMinimal) + "[convergence]\ngrid = 300-98\n", "NxM");
    expect_config_error("[geometry]\nshape=hexagon\n[material]\nE=1\nnu=0\nsigma_y=1\n", "must be rectangle");
    expect_config_error("[geometry]\nshape=rectangle\nb=-5\nh=1\n[material]\nE=1\nnu=0\nsigma_y=1\n", "positive");
    expect_config_error("[geometry]\nshape=polygon\nvertices=0 0, 1 1, 1 0, 0 1\n[material]\nE=1\nnu=0\nsigma_y=1\n",
                        "self-intersecting");
    expect_config_error("[geometry]\nshape=rectangle\nb=1\nh=1\n[material]\nE=1\nnu=0.6\nsigma_y=1\n", "Poisson");
    expect_config_error(R"(
[geometry]
shape = rectangle
b = 5
h = 10
[material]
mode = fgm_tto
ceramic_E = 5000
ceramic_nu = 0.25
metal_E = 3000
metal_nu = 0.25
metal_sigma_y = 5
metal_E_h = 500
k = 1
q = -2
)",
                        "q");
}

TEST(Config, ShippedConfigsLoad) {
    const std::filesystem::path dir = std::filesystem::path(TORSOLVE_SOURCE_DIR) / "configs";
    int count = 0;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (entry.path().extension() != ".ini") continue;
        EXPECT_NO_THROW(load_config(entry.path().string())) << entry.path();
        ++count;
    }
    EXPECT_GE(count, 5);
    EXPECT_THROW(load_config((dir / "missing.ini").string()), ConfigError);
}

TEST(NumberList, SeparatorsAndErrors) {
    EXPECT_EQ(parse_number_list("1, 2 3,4", "x"), (std::vector<double>{1, 2, 3, 4}));
    EXPECT_EQ(parse_number_list("  ", "x"), std::vector<double>{});
    EXPECT_THROW(parse_number_list("1, two", "x"), ConfigError);
}

TEST(FormatNumber, ShortestRoundTrip) {
    std::mt19937_64 rng(42);
    std::uniform_int_distribution<std::uint64_t> bits;
    for (int i = 0; i < 20000; ++i) {
        double v;
        const std::uint64_t b = bits(rng);
        std::memcpy(&v, &b, sizeof v);
        if (!std::isfinite(v)) continue;
        const std::string s = format_number(v);
        double back = 0.0;
        const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), back);
        ASSERT_EQ(ec, std::errc());
        ASSERT_EQ(back, v) << s;
    }
    EXPECT_EQ(format_number(0.1), "0.1");
    EXPECT_EQ(format_number(3.0), "3");
    EXPECT_EQ(format_number(std::nan("")), "nan");
    EXPECT_EQ(format_number(-INFINITY), "-inf");
}

TEST(CsvWriter, HeaderRowsAndLineEndings) {
    const auto path = std::filesystem::temp_directory_path() / "torsolve_csv_test.csv";
    {
        CsvWriter w(path.string(), {"a", "b"});
        w.row({1.5, -2.0});
        w.row(std::vector<double>{0.1, 1e-300});
        EXPECT_THROW(w.row({1.0}), Error);
        w.close();
    }
    std::ifstream in(path, std::ios::binary);
    const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    EXPECT_EQ(text, "a,b\n1.5,-2\n0.1,1e-300\n");
    std::filesystem::remove(path);
    EXPECT_THROW(CsvWriter("/nonexistent-dir/x.csv", {"a"}), Error);
}
