#include "ricci/soliton.hpp"
#include "ricci/errors.hpp"
#include "ricci/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace ricci::soliton {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kBlowupLimit = 1e8;
constexpr double kZeroTolR = 1e-12;

struct Hermite {
    // cubic on [r0, r0+L] from endpoint values and slopes
    double r0, L, ha, pa, hb, pb;
    double value(double t) const { // t in [0,1]
        const double t2 = t * t, t3 = t2 * t;
        return (2 * t3 - 3 * t2 + 1) * ha + (t3 - 2 * t2 + t) * L * pa +
               (-2 * t3 + 3 * t2) * hb + (t3 - t2) * L * pb;
    }
    double slope(double t) const {
        const double t2 = t * t;
        return ((6 * t2 - 6 * t) * ha + (3 * t2 - 4 * t + 1) * L * pa +
                (-6 * t2 + 6 * t) * hb + (3 * t2 - 2 * t) * L * pb) / L;
    }
};

inline double ode_f(double h, double hp, double a) { return -h * (1.0 + a * hp); }

void rk4_step(double& h, double& hp, double a, double step) {
    const double k1h = hp, k1p = ode_f(h, hp, a);
    const double k2h = hp + 0.5 * step * k1p, k2p = ode_f(h + 0.5 * step * k1h, hp + 0.5 * step * k1p, a);
    const double k3h = hp + 0.5 * step * k2p, k3p = ode_f(h + 0.5 * step * k2h, hp + 0.5 * step * k2p, a);
    const double k4h = hp + step * k3p, k4p = ode_f(h + step * k3h, hp + step * k3p, a);
    h += step / 6.0 * (k1h + 2 * k2h + 2 * k3h + k4h);
    hp += step / 6.0 * (k1p + 2 * k2p + 2 * k3p + k4p);
}

} // namespace

double default_r_max() { return 4.0 * kPi; }

ShootResult shoot(double a, double step, double r_max) {
    if (!(step > 0.0)) throw std::invalid_argument("shoot: step must be > 0");
    if (r_max < 0.0) r_max = default_r_max();
    if (!(r_max > 0.0)) throw std::invalid_argument("shoot: r_max must be > 0");

    ShootResult out;
    out.a = a;
    out.step = step;
    const long nmax = static_cast<long>(std::ceil(r_max / step));
    out.profile.reserve(static_cast<std::size_t>(std::min(nmax + 2, 200000L)));
    double h = 0.0, hp = 1.0;
    out.profile.push_back({0.0, h, hp});

    for (long i = 1; i <= nmax; ++i) {
        const double hprev = h, hpprev = hp;
        rk4_step(h, hp, a, step);
        const double r = static_cast<double>(i) * step;
        if (!std::isfinite(h) || !std::isfinite(hp) || std::abs(h) > kBlowupLimit ||
            std::abs(hp) > kBlowupLimit)
            throw BlowupError("shoot: trajectory left the finite range", (i - 1) * step);
        if (i > 1 && h <= 0.0) {
            // Zero crossing inside [(i-1)*step, i*step]: bisect the dense
            // cubic, then polish with Newton.
            const Hermite seg{(i - 1) * step, step, hprev, hpprev, h, hp};
            double lo = 0.0, hi = 1.0;
            for (int it = 0; it < 80 && (hi - lo) * step > 0.25 * kZeroTolR; ++it) {
                const double mid = 0.5 * (lo + hi);
                (seg.value(mid) > 0.0 ? lo : hi) = mid;
            }
            double tz = 0.5 * (lo + hi);
            for (int it = 0; it < 3; ++it) {
                const double sl = seg.slope(tz);
                if (sl == 0.0) break;
                tz -= seg.value(tz) / (sl * step);
                tz = std::clamp(tz, 0.0, 1.0);
            }
            out.hit_zero = true;
            out.A = seg.r0 + tz * step;
            out.h_prime_at_A = seg.slope(tz);
            out.closure_defect = std::abs(out.h_prime_at_A + 1.0);
            out.profile.push_back({out.A, seg.value(tz), out.h_prime_at_A});
            return out;
        }
        out.profile.push_back({r, h, hp});
    }
    return out; // hit_zero == false; A and slope left unset
}

SolveResult solve_closure(double a_lo, double a_hi, double tol, double step, double r_max) {
    if (!(a_lo < a_hi)) throw std::invalid_argument("solve_closure: requires a_lo < a_hi");
    if (!(tol > 0.0)) throw std::invalid_argument("solve_closure: requires tol > 0");

    auto defect = [&](double a) {
        const ShootResult r = shoot(a, step, r_max);
        if (!r.hit_zero)
            throw NumericalError("solve_closure: probe at a = " + std::to_string(a) +
                                 " did not return to zero before r_max");
        return r.closure_defect;
    };
    const auto min = num::golden_minimize(defect, a_lo, a_hi, tol);
    SolveResult out;
    out.a_star = min.x;
    out.result = shoot(min.x, step, r_max);
    out.evals = min.evals + 1;
    return out;
}

namespace {

// Int_0^A h (h')^2 dr over a closed trajectory: composite Simpson on the
// uniform nodes (3/8 prefix when the count is even), then 3-point Gauss on
// the final partial interval using the endpoint-slope cubic.
double correction_integral(const ShootResult& res) {
    const auto& p = res.profile;
    const int m = static_cast<int>(p.size()) - 1; // p[m] is the polished zero
    if (m < 5) throw NumericalError("identity: trajectory too short");
    auto g = [&](int i) { return p[i].h * p[i].hp * p[i].hp; };

    num::CompensatedSum I;
    int i0 = 0;
    int nfull = m - 1; // uniform intervals [0, (m-1)*step]
    const double step = res.step;
    if (nfull % 2 == 1) {
        I.add(3.0 * step / 8.0 * (g(0) + 3.0 * g(1) + 3.0 * g(2) + g(3)));
        i0 = 3;
        nfull -= 3;
    }
    if (nfull > 0) {
        num::CompensatedSum s;
        s.add(g(i0));
        s.add(g(i0 + nfull));
        for (int i = 1; i < nfull; ++i) s.add((i % 2 == 1 ? 4.0 : 2.0) * g(i0 + i));
        I.add(s.value() * step / 3.0);
    }

    const double L = p[m].r - p[m - 1].r;
    if (L > 0.0) {
        const Hermite seg{p[m - 1].r, L, p[m - 1].h, p[m - 1].hp, p[m].h, p[m].hp};
        constexpr double x1 = 0.1127016653792583, x2 = 0.5, x3 = 0.8872983346207417;
        constexpr double w1 = 5.0 / 18.0, w2 = 8.0 / 18.0, w3 = w1;
        for (auto [x, w] : {std::pair{x1, w1}, {x2, w2}, {x3, w3}}) {
            const double hv = seg.value(x), sv = seg.slope(x);
            I.add(w * L * hv * sv * sv);
        }
    }
    return I.value();
}

} // namespace

IdentityReport identity_report(const ShootResult& result) {
    if (!result.hit_zero)
        throw std::invalid_argument("identity_report: trajectory did not close");
    IdentityReport rep;
    rep.a = result.a;
    const auto& p = result.profile;
    rep.lhs = -(result.h_prime_at_A * result.h_prime_at_A - p.front().hp * p.front().hp) / 2.0;
    rep.rhs_boundary = (p.back().h * p.back().h - p.front().h * p.front().h) / 2.0;
    rep.I = correction_integral(result);
    rep.residual = rep.lhs - (rep.rhs_boundary + rep.a * rep.I);
    return rep;
}

double defect_from_identity(double a, double I) {
    if (a >= 0.0) return 1.0 - std::sqrt(std::max(0.0, 1.0 - 2.0 * a * I));
    return std::sqrt(1.0 + 2.0 * std::abs(a) * I) - 1.0;
}

PotentialProfile potential_from_a(const geometry::WarpedMetric& m, double a) {
    m.validate();
    const int n = m.n();
    PotentialProfile out;
    out.f_r.resize(n);
    for (int i = 0; i < n; ++i) out.f_r[i] = a * m.h[i];
    // f(s) = Int_0^s f_r * phi ds'
    std::vector<double> integrand(n);
    for (int i = 0; i < n; ++i) integrand[i] = out.f_r[i] * m.phi[i];
    out.f = num::cumulative_integral(integrand, m.grid.ds);
    return out;
}

SolitonResiduals soliton_residuals(const geometry::WarpedMetric& m,
                                   const PotentialProfile& f, double c) {
    m.validate();
    const int n = m.n();
    if (static_cast<int>(f.f_r.size()) != n || static_cast<int>(f.f.size()) != n)
        throw std::invalid_argument("soliton_residuals: potential not on the metric's grid");
    if (!(c > 0.0)) throw std::invalid_argument("soliton_residuals: c must be > 0");

    const auto K = geometry::curvature(m);
    auto ops = num::DerivOps::get(n);
    const double ds = m.grid.ds;

    // f_rr = (f_r)_s / phi in the fixed gauge
    std::vector<double> frs(n), hs(n);
    ops->deriv(f.f_r, 1, frs);
    ops->deriv(m.h, 1, hs);

    SolitonResiduals out;
    out.res_rr.resize(n);
    out.res_tt.resize(n);
    double fr_scale = 1.0;
    for (double v : f.f_r) fr_scale = std::max(fr_scale, std::abs(v));
    for (int i = 0; i < n; ++i) {
        const double f_rr = frs[i] / (ds * m.phi[i]);
        out.res_rr[i] = K.K[i] - c - f_rr;
        if (i == 0 || i == n - 1) {
            if (std::abs(f.f_r[i]) > 1e-8 * fr_scale)
                throw PoleRegularizationError(
                    "soliton_residuals: f_r does not vanish at a pole");
            out.res_tt[i] = K.K[i] - c - f_rr; // h_r f_r / h -> f_rr at the pole
        } else {
            const double h_r = hs[i] / (ds * m.phi[i]);
            out.res_tt[i] = K.K[i] - c - h_r * f.f_r[i] / m.h[i];
        }
    }
    return out;
}

double einstein_defect(const geometry::WarpedMetric& m) {
    const auto K = geometry::curvature(m);
    std::vector<double> f(m.n()), w(m.n());
    for (int i = 0; i < m.n(); ++i) {
        w[i] = m.phi[i] * m.h[i];
        f[i] = K.K[i] * w[i];
    }
    const double kbar = num::simpson(f, m.grid.ds) / num::simpson(w, m.grid.ds);
    double sup = 0.0;
    for (int i = 0; i < m.n(); ++i) sup = std::max(sup, std::abs(K.K[i] - kbar));
    return sup;
}

geometry::WarpedMetric to_metric(const ShootResult& result, int n) {
    if (!result.hit_zero) throw std::invalid_argument("to_metric: trajectory did not close");
    const auto& p = result.profile;
    geometry::WarpedMetric m;
    m.grid = geometry::RadialGrid::make(n);
    m.phi.assign(n, result.A);

    std::vector<double> r(p.size()), h(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
        r[i] = p[i].r;
        h[i] = p[i].h;
    }
    if (r.size() >= 2 && !(r[r.size() - 1] > r[r.size() - 2])) {
        r.erase(r.end() - 2);
        h.erase(h.end() - 2);
    }
    std::vector<double> rq(n);
    for (int i = 0; i < n; ++i) rq[i] = result.A * m.grid.s[i];
    rq[n - 1] = result.A;
    m.h = num::hermite_resample(r, h, rq);
    m.h[0] = 0.0;
    m.h[n - 1] = 0.0;
    m.validate();
    return m;
}

} // namespace ricci::soliton
