#include "ricci/geometry.hpp"
#include "ricci/errors.hpp"
#include "ricci/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>

namespace ricci::geometry {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kMinInteriorH = 1e-3;   // admissibility floor for generated profiles
constexpr double kPoleSlopeFloor = 1e-3; // |h_r(pole)| below this: regularization fails
} // namespace

RadialGrid RadialGrid::make(int n) {
    if (n < 9) throw std::invalid_argument("RadialGrid: need n >= 9");
    if (n % 2 == 0) throw std::invalid_argument("RadialGrid: need odd n (composite Simpson)");
    RadialGrid g;
    g.n = n;
    g.ds = 1.0 / (n - 1);
    g.s.resize(n);
    for (int i = 0; i < n; ++i) g.s[i] = static_cast<double>(i) / (n - 1);
    g.s[n - 1] = 1.0;
    return g;
}

void WarpedMetric::validate() const {
    const int n = grid.n;
    if (n < 9 || static_cast<int>(phi.size()) != n || static_cast<int>(h.size()) != n)
        throw std::invalid_argument("WarpedMetric: inconsistent sizes");
    if (h[0] != 0.0 || h[n - 1] != 0.0)
        throw std::invalid_argument("WarpedMetric: h must vanish at the poles");
    for (int i = 0; i < n; ++i) {
        if (!(phi[i] > 0.0) || !std::isfinite(phi[i]))
            throw std::invalid_argument("WarpedMetric: phi must be positive and finite");
        if (!std::isfinite(h[i])) throw std::invalid_argument("WarpedMetric: non-finite h");
        if (i > 0 && i < n - 1 && !(h[i] > 0.0))
            throw std::invalid_argument("WarpedMetric: interior h must be positive");
    }
}

WarpedMetric WarpedMetric::scaled(double lambda) const {
    if (!(lambda > 0.0)) throw std::invalid_argument("scaled: lambda must be positive");
    WarpedMetric out = *this;
    for (auto& v : out.phi) v *= lambda;
    for (auto& v : out.h) v *= lambda;
    return out;
}

double CurvatureField::min() const { return *std::min_element(K.begin(), K.end()); }
double CurvatureField::max() const { return *std::max_element(K.begin(), K.end()); }

double BoundaryDefects::max_abs() const {
    return std::max(std::max(std::abs(h_at_0), std::abs(h_at_1)),
                    std::max(std::abs(slope_defect_0), std::abs(slope_defect_1)));
}

WarpedMetric make_profile(const ProfileParams& params, int n) {
    WarpedMetric m;
    m.grid = RadialGrid::make(n);
    m.phi.assign(n, kPi);
    m.h.resize(n);
    if (params.family == ProfileFamily::perturbed) {
        if (!(std::abs(params.eps) < 0.9))
            throw std::invalid_argument("make_profile: |eps| must be < 0.9");
        if (params.k < 1) throw std::invalid_argument("make_profile: k must be >= 1");
    }
    for (int i = 0; i < n; ++i) {
        const double base = num::sin_pi(m.grid.s[i]);
        double v = base;
        if (params.family == ProfileFamily::perturbed)
            v = base * (1.0 + params.eps * std::pow(base, 2 * params.k));
        m.h[i] = v;
    }
    m.h[0] = 0.0;
    m.h[n - 1] = 0.0;
    double hmin = std::numeric_limits<double>::infinity();
    for (int i = 1; i < n - 1; ++i) hmin = std::min(hmin, m.h[i]);
    if (!(hmin > kMinInteriorH))
        throw std::invalid_argument("make_profile: interior h dips below the 1e-3 floor");
    m.validate();
    return m;
}

std::vector<double> arclength(const WarpedMetric& m) {
    m.validate();
    auto r = num::cumulative_integral(m.phi, m.grid.ds);
    for (int i = 0; i + 1 < m.n(); ++i)
        if (!(r[i + 1] > r[i])) throw NonMonotoneError();
    return r;
}

double total_length(const WarpedMetric& m) { return arclength(m).back(); }

namespace detail {

namespace {

// Pole value of K = -h_rrr / h_r expressed in the fixed gauge; all inputs
// are unit-spacing derivatives at the pole node.
double pole_curvature(double phi, double hs, double hss, double hsss,
                      double ps, double pss, double ds) {
    const double hr = hs / (phi * ds);
    if (std::abs(hr) < kPoleSlopeFloor)
        throw PoleRegularizationError("curvature: |h_r| at a pole below 1e-3");
    const double d1h = hs / ds, d2h = hss / (ds * ds), d3h = hsss / (ds * ds * ds);
    const double d1p = ps / ds, d2p = pss / (ds * ds);
    const double hrrr = (phi * d3h - d1h * d2p) / std::pow(phi, 4)
                        - 3.0 * (phi * d2h - d1h * d1p) * d1p / std::pow(phi, 5);
    return -hrrr / hr;
}

} // namespace

void curvature_core(const num::DerivOps& ops,
                    const std::vector<double>& phi, const std::vector<double>& h,
                    double ds, CurvatureWorkspace& ws, std::vector<double>& K) {
    const int n = ops.n();
    ws.hs.resize(n);
    ws.hss.resize(n);
    ws.ps.resize(n);
    K.resize(n);
    ops.deriv(h, 1, ws.hs);
    ops.deriv(h, 2, ws.hss);
    ops.deriv(phi, 1, ws.ps);
    for (int i = 1; i < n - 1; ++i) {
        if (!(h[i] > 0.0))
            throw NumericalError("curvature: non-positive interior h");
        const double p = phi[i];
        const double hrr_num = p * (ws.hss[i] / (ds * ds)) - (ws.hs[i] / ds) * (ws.ps[i] / ds);
        K[i] = -hrr_num / (p * p * p * h[i]);
    }
    for (const int i : {0, n - 1}) {
        const double hsss = ops.deriv_at(h, 3, i);
        const double pss = ops.deriv_at(phi, 2, i);
        K[i] = pole_curvature(phi[i], ws.hs[i], ws.hss[i], hsss, ws.ps[i], pss, ds);
    }
}

} // namespace detail

CurvatureField curvature(const WarpedMetric& m) {
    m.validate();
    auto ops = num::DerivOps::get(m.n());
    CurvatureField out;
    detail::CurvatureWorkspace ws;
    detail::curvature_core(*ops, m.phi, m.h, m.grid.ds, ws, out.K);
    return out;
}

double area(const WarpedMetric& m) {
    m.validate();
    std::vector<double> f(m.n());
    for (int i = 0; i < m.n(); ++i) f[i] = m.phi[i] * m.h[i];
    return 2.0 * kPi * num::simpson(f, m.grid.ds);
}

double gauss_bonnet(const WarpedMetric& m) {
    const auto K = curvature(m);
    std::vector<double> f(m.n());
    for (int i = 0; i < m.n(); ++i) f[i] = K.K[i] * 2.0 * kPi * m.phi[i] * m.h[i];
    return num::simpson(f, m.grid.ds) - 4.0 * kPi;
}

BoundaryDefects boundary_defects(const WarpedMetric& m) {
    const int n = m.n();
    const double ds = m.grid.ds;
    auto ops = num::DerivOps::get(n);
    BoundaryDefects d;
    d.h_at_0 = m.h[0];
    d.h_at_1 = m.h[n - 1];
    d.slope_defect_0 = ops->deriv_at(m.h, 1, 0) / (m.phi[0] * ds) - 1.0;
    d.slope_defect_1 = ops->deriv_at(m.h, 1, n - 1) / (m.phi[n - 1] * ds) + 1.0;
    return d;
}

WarpedMetric regrid(const WarpedMetric& m, int n_new) {
    const auto r = arclength(m);
    const double A = r.back();

    WarpedMetric out;
    out.grid = RadialGrid::make(n_new);
    out.phi.assign(n_new, A);
    std::vector<double> rq(n_new);
    for (int i = 0; i < n_new; ++i) rq[i] = A * out.grid.s[i];
    rq[n_new - 1] = A; // exact endpoint
    out.h = num::hermite_resample(r, m.h, rq);
    out.h[0] = 0.0;
    out.h[n_new - 1] = 0.0;
    for (int i = 1; i < n_new - 1; ++i) {
        if (out.h[i] <= 0.0) {
            // Resampling a valid metric should never undershoot materially.
            if (out.h[i] < -1e-12 * A)
                throw NumericalError("regrid: resampled h went negative");
            out.h[i] = std::nextafter(0.0, 1.0);
        }
    }
    out.validate();
    return out;
}

void write_profile_csv(const WarpedMetric& m, std::ostream& os) {
    os << "s,phi,h\n";
    for (int i = 0; i < m.n(); ++i)
        os << num::format_g17(m.grid.s[i]) << ',' << num::format_g17(m.phi[i]) << ','
           << num::format_g17(m.h[i]) << '\n';
}

void write_profile_csv(const WarpedMetric& m, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw std::ios_base::failure("cannot open for writing: " + path);
    write_profile_csv(m, os);
    os.flush();
    if (!os) throw std::ios_base::failure("write failed: " + path);
}

WarpedMetric read_profile_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw std::ios_base::failure("profile CSV: empty stream");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "s,phi,h") throw std::ios_base::failure("profile CSV: expected header 's,phi,h'");
    std::vector<double> s, phi, h;
    while (std::getline(is, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::istringstream row(line);
        double v[3];
        char comma;
        if (!(row >> v[0] >> comma >> v[1] >> comma >> v[2]))
            throw std::ios_base::failure("profile CSV: malformed row: " + line);
        s.push_back(v[0]);
        phi.push_back(v[1]);
        h.push_back(v[2]);
    }
    const int n = static_cast<int>(s.size());
    WarpedMetric m;
    m.grid = RadialGrid::make(n);
    for (int i = 0; i < n; ++i)
        if (std::abs(s[i] - m.grid.s[i]) > 1e-12)
            throw std::ios_base::failure("profile CSV: s column is not the uniform [0,1] grid");
    m.phi = std::move(phi);
    m.h = std::move(h);
    m.validate();
    return m;
}

WarpedMetric read_profile_csv(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::ios_base::failure("cannot open: " + path);
    return read_profile_csv(is);
}

} // namespace ricci::geometry
