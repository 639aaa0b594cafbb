#include "ricci/numerics.hpp"
#include "ricci/errors.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cassert>
#include <cstdio>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace ricci::num {

double compensated_dot(std::span<const double> w, std::span<const double> f) {
    assert(w.size() <= f.size());
    CompensatedSum s;
    for (std::size_t i = 0; i < w.size(); ++i) s.add(w[i] * f[i]);
    return s.value();
}

std::vector<double> fd_weights(double z, std::span<const double> x, int m) {
    // Fornberg, "Generation of finite difference formulas on arbitrarily
    // spaced grids", Math. Comp. 51 (1988).
    const int n = static_cast<int>(x.size());
    if (n < m + 1) throw std::invalid_argument("fd_weights: too few nodes");
    std::vector<double> c(static_cast<std::size_t>(n) * (m + 1), 0.0);
    auto C = [&](int i, int k) -> double& { return c[static_cast<std::size_t>(i) * (m + 1) + k]; };
    double c1 = 1.0;
    double c4 = x[0] - z;
    C(0, 0) = 1.0;
    for (int i = 1; i < n; ++i) {
        const int mn = std::min(i, m);
        double c2 = 1.0;
        const double c5 = c4;
        c4 = x[i] - z;
        for (int j = 0; j < i; ++j) {
            const double c3 = x[i] - x[j];
            c2 *= c3;
            if (j == i - 1) {
                for (int k = mn; k >= 1; --k)
                    C(i, k) = c1 * (k * C(i - 1, k - 1) - c5 * C(i - 1, k)) / c2;
                C(i, 0) = -c1 * c5 * C(i - 1, 0) / c2;
            }
            for (int k = mn; k >= 1; --k)
                C(j, k) = (c4 * C(j, k) - k * C(j, k - 1)) / c3;
            C(j, 0) = c4 * C(j, 0) / c3;
        }
        c1 = c2;
    }
    std::vector<double> w(n);
    for (int i = 0; i < n; ++i) w[i] = C(i, m);
    return w;
}

namespace testing {
namespace {
std::atomic<bool> g_fault{false};
}
void inject_stencil_fault(bool on) { g_fault.store(on); }
bool stencil_fault_active() { return g_fault.load(); }
} // namespace testing

DerivOps::DerivOps(int n) : n_(n) {
    if (n < 9) throw std::invalid_argument("DerivOps: need at least 9 nodes");
    const bool fault = testing::stencil_fault_active();
    for (int d = 1; d <= 3; ++d) {
        // centered width in the interior, one-sided width at the edges
        const int wc = (d % 2 == 0) ? d + 3 : d + 4;
        const int wo = d + 4;
        const int half = (wc - 1) / 2;
        auto& st = st_[d - 1];
        st.resize(n);
        for (int i = 0; i < n; ++i) {
            int lo, width;
            if (i - half >= 0 && i + half < n) {
                lo = i - half;
                width = wc;
            } else if (i < half) {
                lo = 0;
                width = wo;
            } else {
                lo = n - wo;
                width = wo;
            }
            std::vector<double> nodes(width);
            for (int j = 0; j < width; ++j) nodes[j] = static_cast<double>(lo + j);
            st[i].lo = lo;
            st[i].w = fd_weights(static_cast<double>(i), nodes, d);
            if (fault && d == 2 && i == n / 2) st[i].w[0] *= 1.0 + 1e-3;
        }
    }
}

double DerivOps::deriv_at(std::span<const double> f, int d, int i) const {
    const auto& s = st_[d - 1][i];
    return compensated_dot(s.w, f.subspan(s.lo, s.w.size()));
}

void DerivOps::deriv(std::span<const double> f, int d, std::span<double> out) const {
    for (int i = 0; i < n_; ++i) out[i] = deriv_at(f, d, i);
}

std::shared_ptr<const DerivOps> DerivOps::get(int n) {
    static std::mutex mu;
    static std::map<std::pair<int, bool>, std::shared_ptr<const DerivOps>> cache;
    const auto key = std::make_pair(n, testing::stencil_fault_active());
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    auto ops = std::make_shared<const DerivOps>(n);
    cache.emplace(key, ops);
    return ops;
}

double simpson(std::span<const double> f, double dx) {
    const int n = static_cast<int>(f.size());
    if (n < 3 || n % 2 == 0) throw std::invalid_argument("simpson: node count must be odd and >= 3");
    CompensatedSum s;
    s.add(f[0]);
    s.add(f[n - 1]);
    for (int i = 1; i < n - 1; ++i) s.add((i % 2 == 1 ? 4.0 : 2.0) * f[i]);
    return s.value() * dx / 3.0;
}

namespace {

// Weights integrating the degree-5 interpolant of f(lo..lo+5) over one unit
// interval [a, a+1] (offsets relative to lo). Solved from the moment system.
std::array<double, 6> interval_weights6(double a) {
    // Vandermonde solve, 6x6, long double for headroom.
    long double V[6][7];
    for (int r = 0; r < 6; ++r) {
        long double m = (std::pow(static_cast<long double>(a + 1), r + 1) -
                         std::pow(static_cast<long double>(a), r + 1)) /
                        (r + 1);
        for (int c = 0; c < 6; ++c) V[r][c] = std::pow(static_cast<long double>(c), r);
        V[0][0] = 1.0L; // 0^0
        V[r][6] = m;
    }
    for (int col = 0; col < 6; ++col) {
        int piv = col;
        for (int r = col + 1; r < 6; ++r)
            if (std::abs(V[r][col]) > std::abs(V[piv][col])) piv = r;
        for (int c = 0; c <= 6; ++c) std::swap(V[col][c], V[piv][c]);
        for (int r = 0; r < 6; ++r) {
            if (r == col) continue;
            long double fac = V[r][col] / V[col][col];
            for (int c = col; c <= 6; ++c) V[r][c] -= fac * V[col][c];
        }
    }
    std::array<double, 6> w{};
    for (int c = 0; c < 6; ++c) w[c] = static_cast<double>(V[c][6] / V[c][c]);
    return w;
}

} // namespace

std::vector<double> cumulative_integral(std::span<const double> f, double dx) {
    const int n = static_cast<int>(f.size());
    if (n < 6) throw std::invalid_argument("cumulative_integral: need at least 6 nodes");
    // Distinct weight rows depend only on the interval's offset in its window.
    static const std::array<std::array<double, 6>, 5> rows = [] {
        std::array<std::array<double, 6>, 5> r{};
        for (int a = 0; a < 5; ++a) r[a] = interval_weights6(static_cast<double>(a));
        return r;
    }();
    std::vector<double> r(n, 0.0);
    CompensatedSum acc;
    for (int i = 0; i + 1 < n; ++i) {
        const int lo = std::clamp(i - 2, 0, n - 6);
        const auto& w = rows[i - lo];
        CompensatedSum seg;
        for (int j = 0; j < 6; ++j) seg.add(w[j] * f[lo + j]);
        acc.add(seg.value() * dx);
        r[i + 1] = acc.value();
    }
    return r;
}

std::vector<double> hermite_resample(std::span<const double> x,
                                     std::span<const double> y,
                                     std::span<const double> xq,
                                     int nderiv) {
    const int n = static_cast<int>(x.size());
    if (n < 9) throw std::invalid_argument("hermite_resample: need at least 9 nodes");
    if (y.size() != x.size()) throw std::invalid_argument("hermite_resample: size mismatch");
    if (nderiv < 1 || nderiv > 3) throw std::invalid_argument("hermite_resample: nderiv in 1..3");
    for (int i = 0; i + 1 < n; ++i)
        if (!(x[i + 1] > x[i])) throw NonMonotoneError();

    // Nodal derivative estimates from local windows of the actual abscissae.
    std::vector<std::vector<double>> der(nderiv, std::vector<double>(n));
    for (int d = 1; d <= nderiv; ++d) {
        const int width = d + 5;
        for (int i = 0; i < n; ++i) {
            const int lo = std::clamp(i - width / 2, 0, n - width);
            auto w = fd_weights(x[i], x.subspan(lo, width), d);
            der[d - 1][i] = compensated_dot(w, y.subspan(lo, width));
        }
    }

    const int nd = nderiv + 1;        // data items per endpoint
    const int m = 2 * nd;             // polynomial degree + 1
    static constexpr double kFact[4] = {1.0, 1.0, 2.0, 6.0};
    std::vector<double> out(xq.size());
    std::vector<double> z(m), dd(static_cast<std::size_t>(m) * m);
    auto DD = [&](int i, int c) -> double& { return dd[static_cast<std::size_t>(i) * m + c]; };

    int seg = 0;
    for (std::size_t q = 0; q < xq.size(); ++q) {
        const double t = xq[q];
        while (seg < n - 2 && x[seg + 1] < t) ++seg;
        while (seg > 0 && x[seg] > t) --seg;
        // Two-point Hermite via divided differences with repeated nodes.
        for (int i = 0; i < m; ++i) {
            const int node = (i < nd) ? seg : seg + 1;
            z[i] = x[node];
            DD(i, 0) = y[node];
        }
        for (int c = 1; c < m; ++c) {
            for (int i = 0; i + c < m; ++i) {
                if (z[i + c] == z[i]) {
                    const int node = (i < nd) ? seg : seg + 1;
                    DD(i, c) = der[c - 1][node] / kFact[c];
                } else {
                    DD(i, c) = (DD(i + 1, c - 1) - DD(i, c - 1)) / (z[i + c] - z[i]);
                }
            }
        }
        double p = DD(0, m - 1);
        for (int c = m - 2; c >= 0; --c) p = p * (t - z[c]) + DD(0, c);
        out[q] = p;
    }
    return out;
}

MinimizeResult golden_minimize(const std::function<double(double)>& f,
                               double lo, double hi, double xtol) {
    if (!(lo < hi)) throw std::invalid_argument("golden_minimize: requires lo < hi");
    if (!(xtol > 0)) throw std::invalid_argument("golden_minimize: requires xtol > 0");
    constexpr double invphi = 0.6180339887498949;
    double x1 = hi - invphi * (hi - lo);
    double x2 = lo + invphi * (hi - lo);
    double f1 = f(x1), f2 = f(x2);
    int evals = 2;
    double bx = (f1 <= f2) ? x1 : x2;
    double bf = std::min(f1, f2);
    while (hi - lo > xtol) {
        if (f1 <= f2) {
            hi = x2; x2 = x1; f2 = f1;
            x1 = hi - invphi * (hi - lo);
            f1 = f(x1); ++evals;
        } else {
            lo = x1; x1 = x2; f1 = f2;
            x2 = lo + invphi * (hi - lo);
            f2 = f(x2); ++evals;
        }
        if (f1 < bf) { bf = f1; bx = x1; }
        if (f2 < bf) { bf = f2; bx = x2; }
    }
    const double xm = 0.5 * (lo + hi);
    const double fm = f(xm); ++evals;
    if (fm < bf) { bf = fm; bx = xm; }
    return {bx, bf, evals};
}

std::string format_g17(double x) {
    if (x == 0.0) x = 0.0; // normalize -0
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

double sin_pi(double t) {
    const double u = std::min(t, 1.0 - t);
    return std::sin(std::numbers::pi * u);
}

} // namespace ricci::num
