#include <doctest.h>

#include "ricci/errors.hpp"
#include "ricci/geometry.hpp"
#include "ricci/numerics.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

using namespace ricci;
using namespace ricci::geometry;

namespace {

constexpr double kPi = std::numbers::pi;

WarpedMetric round_metric(int n) { return make_profile({ProfileFamily::round, 0.0, 1}, n); }
WarpedMetric perturbed_metric(double eps, int k, int n) {
    return make_profile({ProfileFamily::perturbed, eps, k}, n);
}

// Independent quadrature oracle: plain Simpson of the analytic perturbed
// integrand at 16x the resolution. Shares nothing with the library path.
double area_oracle(double eps, int k, int n) {
    const int m = 16 * (n - 1) + 1;
    double sum = 0.0;
    const double ds = 1.0 / (m - 1);
    for (int i = 0; i < m; ++i) {
        const double s = static_cast<double>(i) / (m - 1);
        const double base = std::sin(kPi * std::min(s, 1.0 - s));
        const double h = base * (1.0 + eps * std::pow(base, 2 * k));
        const double w = (i == 0 || i == m - 1) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
        sum += w * kPi * h;
    }
    return 2.0 * kPi * sum * ds / 3.0;
}

// Unit round sphere written in a deliberately distorted coordinate:
// r(s) = pi (s + amp sin(2 pi s)), h = sin(r(s)).
WarpedMetric distorted_round(int n, double amp) {
    WarpedMetric m;
    m.grid = RadialGrid::make(n);
    m.phi.resize(n);
    m.h.resize(n);
    for (int i = 0; i < n; ++i) {
        const double s = m.grid.s[i];
        m.phi[i] = kPi * (1.0 + amp * 2.0 * kPi * std::cos(2.0 * kPi * s));
        m.h[i] = std::sin(kPi * (s + amp * std::sin(2.0 * kPi * s)));
    }
    m.h[0] = 0.0;
    m.h[n - 1] = 0.0;
    m.validate();
    return m;
}

} // namespace

TEST_CASE("make_profile: round and perturbed values, rejection paths") {
    auto r = round_metric(101);
    CHECK(r.h[50] == doctest::Approx(1.0).epsilon(1e-15));
    for (double p : r.phi) CHECK(p == kPi);

    auto p = perturbed_metric(0.3, 1, 101);
    CHECK(p.h[50] == doctest::Approx(1.3).epsilon(1e-15));

    CHECK_THROWS_AS((void)make_profile({ProfileFamily::perturbed, -0.95, 1}, 101),
                    std::invalid_argument);
    CHECK_THROWS_AS((void)make_profile({ProfileFamily::round, 0.0, 1}, 7),
                    std::invalid_argument);
    CHECK_THROWS_AS((void)make_profile({ProfileFamily::round, 0.0, 1}, 100),
                    std::invalid_argument);
    CHECK_THROWS_AS((void)make_profile({ProfileFamily::perturbed, 0.2, 0}, 101),
                    std::invalid_argument);
}

TEST_CASE("arclength: totals for constant phi") {
    CHECK(total_length(round_metric(101)) == doctest::Approx(kPi).epsilon(1e-12));
    CHECK(total_length(perturbed_metric(0.3, 1, 101)) == doctest::Approx(kPi).epsilon(1e-12));

    auto m = round_metric(101);
    for (auto& v : m.phi) v = 2.0;
    CHECK(total_length(m) == doctest::Approx(2.0).epsilon(1e-14));

    auto r = arclength(round_metric(101));
    for (std::size_t i = 0; i + 1 < r.size(); ++i) CHECK(r[i + 1] > r[i]);
    CHECK(r[0] == 0.0);
}

TEST_CASE("curvature: round sphere, perturbed equator oracle, pole limits") {
    auto K = curvature(round_metric(1001));
    double sup = 0;
    for (double k : K.K) sup = std::max(sup, std::abs(k - 1.0));
    CHECK(sup < 1e-6);
    CHECK(K.K[0] == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(K.pole_regularized[0]);

    // equator value of the eps = 0.3 family: symbolic oracle 19/13
    auto Kp = curvature(perturbed_metric(0.3, 1, 1001));
    CHECK(Kp.K[500] == doctest::Approx(19.0 / 13.0).epsilon(1e-9));
    // pole value of the same family: symbolic oracle 1 - 6 eps
    CHECK(Kp.K[0] == doctest::Approx(-0.8).epsilon(1e-6));

    auto bad = round_metric(101);
    bad.h[50] = -bad.h[50];
    CHECK_THROWS_AS((void)curvature(bad), std::invalid_argument); // validate() rejects first
}

TEST_CASE("curvature: pole regularization failure is signaled") {
    // An admissible-looking profile whose h_r vanishes at the poles:
    // h = sin^2(pi s) closes quadratically, so the pole limit has no slope.
    const int n = 101;
    WarpedMetric m;
    m.grid = RadialGrid::make(n);
    m.phi.assign(n, kPi);
    m.h.resize(n);
    for (int i = 0; i < n; ++i) m.h[i] = std::pow(std::sin(kPi * m.grid.s[i]), 2);
    m.h[0] = m.h[n - 1] = 0.0;
    CHECK_THROWS_AS((void)curvature(m), PoleRegularizationError);
}

TEST_CASE("area: round value, scaling, quadrature oracle") {
    CHECK(area(round_metric(1001)) == doctest::Approx(4.0 * kPi).epsilon(1e-10));

    auto m = perturbed_metric(0.2, 1, 251);
    const double a0 = area(m);
    CHECK(std::abs(a0 - area_oracle(0.2, 1, 251)) < 1e-8);
    // closed form for this family: 4*pi*(3 + 2*eps)/3
    CHECK(a0 == doctest::Approx(4.0 * kPi * 3.4 / 3.0).epsilon(1e-9));

    const double lam = 1.7;
    CHECK(area(m.scaled(lam)) == doctest::Approx(lam * lam * a0).epsilon(1e-13));
}

TEST_CASE("gauss_bonnet: admissible profiles and a deliberately broken slope") {
    CHECK(std::abs(gauss_bonnet(round_metric(1001))) < 1e-6);
    CHECK(std::abs(gauss_bonnet(perturbed_metric(0.3, 1, 1001))) < 1e-5);
    CHECK(std::abs(gauss_bonnet(perturbed_metric(-0.3, 1, 1001))) < 1e-5);

    // h = sin(pi s)(1 + 0.2 s^2): h_r(0) = 1 but h_r(1) = -1.2, so the
    // boundary form gives Int K dA = 2 pi (1 + 1.2) and a defect of 0.4 pi.
    const int n = 1001;
    WarpedMetric m;
    m.grid = RadialGrid::make(n);
    m.phi.assign(n, kPi);
    m.h.resize(n);
    for (int i = 0; i < n; ++i) {
        const double s = m.grid.s[i];
        m.h[i] = num::sin_pi(s) * (1.0 + 0.2 * s * s);
    }
    m.h[0] = m.h[n - 1] = 0.0;
    const double defect = gauss_bonnet(m);
    CHECK(defect == doctest::Approx(2.0 * kPi * 0.2).epsilon(0.05));
}

TEST_CASE("gauss_bonnet: empirical convergence order across 251/501/1001") {
    double d[3];
    const int ns[3] = {251, 501, 1001};
    for (int i = 0; i < 3; ++i) d[i] = std::abs(gauss_bonnet(perturbed_metric(0.2, 1, ns[i])));
    const double order = std::log2(d[0] / d[2]) / 2.0;
    CHECK(order == doctest::Approx(4.0).epsilon(0.125)); // within 0.5 of nominal
}

TEST_CASE("boundary_defects: round fixture, interior rescale, perturbed family") {
    CHECK(boundary_defects(round_metric(1001)).max_abs() < 1e-8);

    auto m = round_metric(1001);
    for (int i = 1; i < m.n() - 1; ++i) m.h[i] *= 1.1;
    const auto d = boundary_defects(m);
    CHECK(d.h_at_0 == 0.0);
    CHECK(d.h_at_1 == 0.0);
    CHECK(d.slope_defect_0 == doctest::Approx(0.1).epsilon(1e-6));
    CHECK(d.slope_defect_1 == doctest::Approx(-0.1).epsilon(1e-6));

    std::mt19937 rng(777);
    std::uniform_real_distribution<double> ueps(-0.6, 0.6);
    std::uniform_int_distribution<int> uk(1, 4);
    for (int trial = 0; trial < 5; ++trial) {
        const auto p = perturbed_metric(ueps(rng), uk(rng), 1001);
        CHECK(boundary_defects(p).max_abs() < 1e-8);
    }
}

TEST_CASE("regrid: idempotence, area preservation, diagnostics covariance") {
    SUBCASE("identity on an arclength-gauge profile") {
        auto m = round_metric(1001);
        auto m2 = regrid(m, 1001);
        double sup = 0;
        for (int i = 0; i < m.n(); ++i)
            sup = std::max({sup, std::abs(m2.h[i] - m.h[i]), std::abs(m2.phi[i] - kPi)});
        CHECK(sup < 1e-10);
    }
    SUBCASE("area preserved under refinement") {
        auto m = perturbed_metric(0.3, 1, 101);
        auto m2 = regrid(m, 201);
        CHECK(area(m2) == doctest::Approx(area(m)).epsilon(1e-7));
        CHECK(area(m2) == doctest::Approx(area_oracle(0.3, 1, 101)).epsilon(1e-7));
    }
    SUBCASE("double regrid equals single regrid") {
        auto m = perturbed_metric(0.3, 1, 101);
        auto once = regrid(m, 151);
        auto twice = regrid(once, 151);
        double sup = 0;
        for (int i = 0; i < 151; ++i)
            sup = std::max({sup, std::abs(once.h[i] - twice.h[i]),
                            std::abs(once.phi[i] - twice.phi[i])});
        CHECK(sup < 1e-10);
    }
    SUBCASE("gauge covariance of diagnostics on a distorted round sphere") {
        auto m = distorted_round(1001, 0.05);
        auto m2 = regrid(m, 1001);
        const auto Ka = curvature(m);
        const auto Kb = curvature(m2);
        CHECK(std::abs(Kb.max() - Ka.max()) / Ka.max() < 1e-6);
        CHECK(std::abs(Kb.min() - Ka.min()) / Ka.min() < 1e-6);
        CHECK(std::abs(area(m2) - area(m)) / area(m) < 1e-6);
        CHECK(std::abs(gauss_bonnet(m2) - gauss_bonnet(m)) < 4.0 * kPi * 1e-6);
        // pointwise transfer error stays well below the diagnostic scale
        double sup = 0;
        for (double k : Kb.K) sup = std::max(sup, std::abs(k - 1.0));
        CHECK(sup < 5e-6);
    }
}

TEST_CASE("scaling property: curvature and area scale as 1/lambda^2 and lambda^2") {
    std::mt19937 rng(4242);
    std::uniform_real_distribution<double> ul(0.3, 3.0), ueps(-0.5, 0.5);
    std::uniform_int_distribution<int> uk(1, 3);
    for (int trial = 0; trial < 5; ++trial) {
        const auto m = perturbed_metric(ueps(rng), uk(rng), 251);
        const auto K = curvature(m);
        for (double lam : {0.5, 2.0}) {
            const auto Ks = curvature(m.scaled(lam));
            for (int i = 0; i < m.n(); ++i) {
                const double expect = K.K[i] / (lam * lam);
                CHECK(std::abs(Ks.K[i] - expect) <= 1e-10 * std::max(1.0, std::abs(expect)));
            }
        }
        // irrational scale factors round the inputs, so the pole stencils
        // see O(eps)-perturbed data amplified by their condition number
        const double lam = ul(rng);
        const auto ms = m.scaled(lam);
        const auto Ks = curvature(ms);
        for (int i = 0; i < m.n(); ++i) {
            const double expect = K.K[i] / (lam * lam);
            CHECK(std::abs(Ks.K[i] - expect) <= 1e-8 * std::max(1.0, std::abs(expect)));
        }
        CHECK(area(ms) == doctest::Approx(lam * lam * area(m)).epsilon(1e-12));
    }
}

TEST_CASE("profile CSV: round trip and malformed input") {
    auto m = perturbed_metric(0.25, 2, 101);
    std::ostringstream os;
    write_profile_csv(m, os);
    std::istringstream is(os.str());
    auto m2 = read_profile_csv(is);
    CHECK(m2.n() == m.n());
    for (int i = 0; i < m.n(); ++i) {
        CHECK(m2.h[i] == m.h[i]);   // 17 significant digits round-trip exactly
        CHECK(m2.phi[i] == m.phi[i]);
    }

    std::istringstream bad_header("a,b,c\n0,1,0\n");
    CHECK_THROWS_AS((void)read_profile_csv(bad_header), std::ios_base::failure);
    std::istringstream bad_row("s,phi,h\n0,3.14,zero\n");
    CHECK_THROWS_AS((void)read_profile_csv(bad_row), std::ios_base::failure);
}

TEST_CASE("validate rejects structural violations") {
    auto m = round_metric(101);
    m.h[0] = 1e-4;
    CHECK_THROWS_AS(m.validate(), std::invalid_argument);
    m = round_metric(101);
    m.phi[3] = 0.0;
    CHECK_THROWS_AS(m.validate(), std::invalid_argument);
    m = round_metric(101);
    m.h[50] = 0.0;
    CHECK_THROWS_AS(m.validate(), std::invalid_argument);
}
