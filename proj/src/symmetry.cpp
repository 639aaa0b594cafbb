#include "ricci/symmetry.hpp"
#include "ricci/errors.hpp"
#include "ricci/numerics.hpp"

#include <algorithm>
#include <cmath>

namespace ricci::symmetry {

namespace {

constexpr double kWindowFrac = 1e-3; // sup windows exclude nodes with h <= frac * max h

double max_h(const geometry::WarpedMetric& m) {
    return *std::max_element(m.h.begin(), m.h.end());
}

} // namespace

double killing_residual(const geometry::WarpedMetric& m, const AngularField& field) {
    m.validate();
    const int n = m.n();
    if (static_cast<int>(field.psi.size()) != n)
        throw std::invalid_argument("killing_residual: field not on the metric's grid");
    auto ops = num::DerivOps::get(n);
    std::vector<double> psis(n);
    ops->deriv(field.psi, 1, psis);
    const double floor = kWindowFrac * max_h(m);
    double sup = 0.0;
    for (int i = 1; i < n - 1; ++i) {
        if (m.h[i] <= floor) continue;
        const double psi_r = psis[i] / (m.grid.ds * m.phi[i]);
        sup = std::max(sup, std::abs(m.h[i] * m.h[i] * psi_r));
    }
    return sup;
}

double killing_residual_of_potential(const geometry::WarpedMetric& m,
                                     const soliton::PotentialProfile& f) {
    m.validate();
    const int n = m.n();
    if (static_cast<int>(f.f_r.size()) != n)
        throw std::invalid_argument("killing_residual_of_potential: size mismatch");
    double fr_scale = 1.0;
    for (double v : f.f_r) fr_scale = std::max(fr_scale, std::abs(v));
    if (std::abs(f.f_r[0]) > 1e-8 * fr_scale || std::abs(f.f_r[n - 1]) > 1e-8 * fr_scale)
        throw PoleRegularizationError(
            "killing_residual_of_potential: f_r does not vanish at a pole");

    auto ops = num::DerivOps::get(n);
    std::vector<double> frs(n), hs(n);
    ops->deriv(f.f_r, 1, frs);
    ops->deriv(m.h, 1, hs);

    AngularField field;
    field.psi.resize(n);
    for (int i = 0; i < n; ++i) {
        if (i == 0 || i == n - 1) {
            // psi = f_r / h -> f_rr / h_r at a closed pole
            const double h_r = hs[i] / (m.grid.ds * m.phi[i]);
            if (std::abs(h_r) < 1e-3)
                throw PoleRegularizationError(
                    "killing_residual_of_potential: |h_r| at a pole below 1e-3");
            const double f_rr = frs[i] / (m.grid.ds * m.phi[i]);
            field.psi[i] = f_rr / h_r;
        } else {
            field.psi[i] = f.f_r[i] / m.h[i];
        }
    }
    return killing_residual(m, field);
}

double conformal_residual(const geometry::WarpedMetric& m,
                          const soliton::PotentialProfile& f) {
    m.validate();
    const int n = m.n();
    if (static_cast<int>(f.f_r.size()) != n)
        throw std::invalid_argument("conformal_residual: size mismatch");
    auto ops = num::DerivOps::get(n);
    std::vector<double> frs(n), hs(n);
    ops->deriv(f.f_r, 1, frs);
    ops->deriv(m.h, 1, hs);

    double fr_scale = 1.0;
    for (double v : f.f_r) fr_scale = std::max(fr_scale, std::abs(v));
    const double floor = kWindowFrac * max_h(m);

    double sup = 0.0;
    for (int i = 0; i < n; ++i) {
        const double f_rr = frs[i] / (m.grid.ds * m.phi[i]);
        if (i == 0 || i == n - 1) {
            // Both sides tend to f_rr when f_r closes at the pole; the
            // residual there is 0 by regularization. A potential that does
            // not close contributes through the interior window instead.
            continue;
        }
        if (m.h[i] <= floor) continue;
        const double h_r = hs[i] / (m.grid.ds * m.phi[i]);
        sup = std::max(sup, std::abs(f_rr - h_r * f.f_r[i] / m.h[i]));
    }
    return sup;
}

FitResult extract_a(const geometry::WarpedMetric& m, const soliton::PotentialProfile& f) {
    m.validate();
    const int n = m.n();
    if (static_cast<int>(f.f_r.size()) != n)
        throw std::invalid_argument("extract_a: size mismatch");
    num::CompensatedSum num_sum, den_sum;
    for (int i = 1; i < n - 1; ++i) {
        num_sum.add(f.f_r[i] * m.h[i]);
        den_sum.add(m.h[i] * m.h[i]);
    }
    const double den = den_sum.value();
    if (den < 1e-12)
        throw NumericalError("extract_a: degenerate fit (sum h^2 below floor)");
    FitResult out;
    out.a_fit = num_sum.value() / den;
    for (int i = 1; i < n - 1; ++i)
        out.fit_residual = std::max(out.fit_residual, std::abs(f.f_r[i] - out.a_fit * m.h[i]));
    return out;
}

} // namespace ricci::symmetry
