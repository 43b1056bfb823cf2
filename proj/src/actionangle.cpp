#include "melkit/actionangle.hpp"
#include "melkit/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Dense>
#include <Eigen/SVD>

namespace melkit::actionangle {

namespace {

/// Enumerate multi-indices of a product grid {0..n-1}^dim.
std::vector<int> unflatten(std::size_t flat, int dim, int n) {
    std::vector<int> idx(dim);
    for (int d = dim - 1; d >= 0; --d) {
        idx[d] = static_cast<int>(flat % n);
        flat /= n;
    }
    return idx;
}

std::size_t ipow(int base, int exp) {
    std::size_t r = 1;
    for (int i = 0; i < exp; ++i) r *= base;
    return r;
}

/// Best rational approximation p/q to x with q <= qmax, by continued
/// fractions.  Returns false when even the best convergent misses by more
/// than tol.
bool rational_approx(double x, int qmax, double tol, long& p_out, long& q_out) {
    long p0 = 1, q0 = 0;           // p_{-1}/q_{-1}
    long p1 = std::lround(std::floor(x)), q1 = 1;
    double frac = x - std::floor(x);
    for (int it = 0; it < 64; ++it) {
        if (std::abs(x - static_cast<double>(p1) / q1) <= tol) break;
        if (frac < 1e-15) break;
        const double inv = 1.0 / frac;
        const long a = static_cast<long>(std::floor(inv));
        frac = inv - std::floor(inv);
        const long p2 = a * p1 + p0, q2 = a * q1 + q0;
        if (q2 > qmax) break;
        p0 = p1;
        q0 = q1;
        p1 = p2;
        q1 = q2;
    }
    if (q1 > qmax || std::abs(x - static_cast<double>(p1) / q1) > tol) return false;
    const long g = std::gcd(std::abs(p1), q1);
    p_out = p1 / (g == 0 ? 1 : g);
    q_out = q1 / (g == 0 ? 1 : g);
    return true;
}

} // namespace

std::size_t FourierSpectrum::index_of(std::span<const int> r) const {
    std::size_t flat = 0;
    for (int d = 0; d < m; ++d) {
        if (std::abs(r[d]) > R) throw DomainError("FourierSpectrum: index outside truncation");
        flat = flat * (2 * R + 1) + static_cast<std::size_t>(r[d] + R);
    }
    return flat;
}

std::complex<double> FourierSpectrum::coeff(std::span<const int> r, int component) const {
    return table[index_of(r) * ell + component];
}

double FourierSpectrum::magnitude(std::span<const int> r) const {
    double mag = 0.0;
    const std::size_t base = index_of(r) * ell;
    for (int c = 0; c < ell; ++c) mag = std::max(mag, std::abs(table[base + c]));
    return mag;
}

std::vector<std::vector<int>> FourierSpectrum::all_indices() const {
    const std::size_t n = ipow(2 * R + 1, m);
    std::vector<std::vector<int>> out(n);
    for (std::size_t f = 0; f < n; ++f) {
        auto idx = unflatten(f, m, 2 * R + 1);
        for (int& v : idx) v -= R;
        out[f] = std::move(idx);
    }
    return out;
}

FourierSpectrum fourier_coeffs(const ActionAngleSystem& sys, const std::vector<double>& I, int R,
                               Exec exec) {
    if (R < 1) throw DomainError("fourier_coeffs: R must be >= 1");
    if (static_cast<int>(I.size()) != sys.ell)
        throw DomainError("fourier_coeffs: action dimension mismatch");

    FourierSpectrum spec;
    spec.m = sys.m;
    spec.ell = sys.ell;
    spec.R = R;
    const int N = 4 * R;
    const std::size_t ngrid = ipow(N, sys.m);
    const std::size_t ncoef = ipow(2 * R + 1, sys.m);
    spec.table.assign(ncoef * sys.ell, {0.0, 0.0});

    // Sample h on the angle grid once.
    std::vector<double> samples(ngrid * sys.ell);
    parallel_for(exec, static_cast<std::ptrdiff_t>(ngrid), [&](std::ptrdiff_t g) {
        const auto gi = unflatten(static_cast<std::size_t>(g), sys.m, N);
        std::vector<double> theta(sys.m);
        for (int d = 0; d < sys.m; ++d) theta[d] = 2.0 * M_PI * gi[d] / N;
        const std::vector<double> hv = sys.h(I, theta);
        for (int c = 0; c < sys.ell; ++c) samples[static_cast<std::size_t>(g) * sys.ell + c] = hv[c];
    });

    parallel_for(exec, static_cast<std::ptrdiff_t>(ncoef), [&](std::ptrdiff_t f) {
        auto r = unflatten(static_cast<std::size_t>(f), sys.m, 2 * R + 1);
        for (int& v : r) v -= R;
        std::vector<std::complex<double>> acc(sys.ell, {0.0, 0.0});
        for (std::size_t g = 0; g < ngrid; ++g) {
            const auto gi = unflatten(g, sys.m, N);
            double dot = 0.0;
            for (int d = 0; d < sys.m; ++d) dot += r[d] * (2.0 * M_PI * gi[d] / N);
            const std::complex<double> ph = std::polar(1.0, -dot);
            for (int c = 0; c < sys.ell; ++c) acc[c] += samples[g * sys.ell + c] * ph;
        }
        for (int c = 0; c < sys.ell; ++c)
            spec.table[static_cast<std::size_t>(f) * sys.ell + c] =
                acc[c] / static_cast<double>(ngrid);
    });
    return spec;
}

ResonanceLattice resonance_lattice(std::span<const double> omega, int R, int denom_bound) {
    if (omega.empty()) throw DomainError("resonance_lattice: empty frequency vector");
    double wnorm = 0.0;
    for (double w : omega) wnorm = std::max(wnorm, std::abs(w));
    if (!(wnorm > 0.0)) throw DomainError("resonance_lattice: omega must be nonzero");

    ResonanceLattice lat;
    lat.omega.assign(omega.begin(), omega.end());
    lat.R = R;
    const int m = static_cast<int>(omega.size());

    const std::size_t total = ipow(2 * R + 1, m);
    for (std::size_t f = 0; f < total; ++f) {
        auto r = unflatten(f, m, 2 * R + 1);
        for (int& v : r) v -= R;
        double dot = 0.0;
        for (int d = 0; d < m; ++d) dot += r[d] * omega[d];
        if (std::abs(dot) < 1e-10 * wnorm) lat.members.push_back(std::move(r));
    }
    // Small |r| first; deterministic order for downstream subset searches.
    std::sort(lat.members.begin(), lat.members.end(),
              [](const std::vector<int>& a, const std::vector<int>& b) {
                  int na = 0, nb = 0;
                  for (int v : a) na += std::abs(v);
                  for (int v : b) nb += std::abs(v);
                  if (na != nb) return na < nb;
                  return a < b;
              });

    // Largest omega0 with omega/omega0 in Z^m: detect rational ratios to the
    // largest-magnitude component, then strip the common integer factor.
    int ref = 0;
    for (int d = 0; d < m; ++d)
        if (std::abs(omega[d]) > std::abs(omega[ref])) ref = d;
    std::vector<long> p(m), q(m);
    bool rational = true;
    for (int d = 0; d < m && rational; ++d) {
        rational = rational_approx(omega[d] / omega[ref], denom_bound, 1e-10, p[d], q[d]);
    }
    if (rational) {
        long L = 1;
        for (int d = 0; d < m; ++d) L = std::lcm(L, q[d]);
        std::vector<long> z(m);
        long g = 0;
        for (int d = 0; d < m; ++d) {
            z[d] = p[d] * (L / q[d]);
            g = std::gcd(g, std::abs(z[d]));
        }
        if (g > 0) {
            std::vector<int> ratio(m);
            for (int d = 0; d < m; ++d) ratio[d] = static_cast<int>(z[d] / g);
            double w0 = omega[ref] * static_cast<double>(g) / static_cast<double>(L);
            if (w0 < 0) {
                w0 = -w0;
                for (int& v : ratio) v = -v;
            }
            lat.omega0 = w0;
            lat.omega_ratio = std::move(ratio);
        }
    }
    return lat;
}

std::size_t IntegralCurve::npoints() const { return ipow(per_axis, q); }

std::vector<double> IntegralCurve::tau_of(std::size_t flat) const {
    const auto gi = unflatten(flat, q, per_axis);
    std::vector<double> tau(q);
    for (int d = 0; d < q; ++d) tau[d] = 2.0 * M_PI * gi[d] / per_axis;
    return tau;
}

std::span<const double> IntegralCurve::value_at(std::size_t flat) const {
    return {values.data() + flat * ell, static_cast<std::size_t>(ell)};
}

IntegralCurve resonant_integral_fourier(const FourierSpectrum& spec,
                                        const ResonanceLattice& lattice, int tau_grid_size) {
    if (!lattice.omega0)
        throw DomainError("resonant_integral_fourier: torus is not resonant (no omega0)");
    if (spec.m != static_cast<int>(lattice.omega.size()))
        throw DomainError("resonant_integral_fourier: dimension mismatch");
    if (tau_grid_size < 16) throw DomainError("tau grid must have >= 16 points per axis");

    IntegralCurve curve;
    curve.q = spec.m;
    curve.ell = spec.ell;
    curve.per_axis = tau_grid_size;
    curve.period = 2.0 * M_PI / *lattice.omega0;
    const std::size_t npts = curve.npoints();
    curve.values.assign(npts * spec.ell, 0.0);

    for (std::size_t pt = 0; pt < npts; ++pt) {
        const auto tau = curve.tau_of(pt);
        for (int c = 0; c < spec.ell; ++c) {
            std::complex<double> acc{0.0, 0.0};
            for (const auto& r : lattice.members) {
                double dot = 0.0;
                for (int d = 0; d < spec.m; ++d) dot += r[d] * tau[d];
                acc += spec.coeff(r, c) * std::polar(1.0, dot);
            }
            acc *= curve.period;
            if (std::abs(acc.imag()) > 1e-10 * std::max(1.0, std::abs(acc.real())))
                throw ComputationError("resonant_integral_fourier: imaginary residue too large; "
                                       "spectrum is not Hermitian");
            curve.values[pt * spec.ell + c] = acc.real();
        }
    }
    return curve;
}

IntegralCurve resonant_integral_quadrature(const ActionAngleSystem& sys,
                                           const std::vector<double>& I, int tau_grid_size,
                                           Exec exec) {
    const std::vector<double> omega = sys.omega(I);
    // Denominators are capped so that continued fractions cannot mistake an
    // irrational ratio for a resonance: convergents with q <= 4096 sit at
    // least ~3e-8 away from a generic irrational, far above the 1e-10 gate.
    const ResonanceLattice lat = resonance_lattice(omega, 1, 4096);
    if (!lat.omega0)
        throw DomainError("resonant_integral_quadrature: omega(I) is not on resonance");
    IntegralCurve curve;
    curve.q = sys.m;
    curve.ell = sys.ell;
    curve.per_axis = tau_grid_size;
    curve.period = 2.0 * M_PI / *lat.omega0;
    const std::size_t npts = curve.npoints();
    curve.values.assign(npts * sys.ell, 0.0);

    const int N = 4096; // trig-polynomial integrands; far beyond alias-free
    parallel_for(exec, static_cast<std::ptrdiff_t>(npts), [&](std::ptrdiff_t pt) {
        const auto tau = curve.tau_of(static_cast<std::size_t>(pt));
        std::vector<double> acc(sys.ell, 0.0);
        std::vector<double> theta(sys.m);
        for (int j = 0; j < N; ++j) {
            const double t = curve.period * j / N;
            for (int d = 0; d < sys.m; ++d) theta[d] = omega[d] * t + tau[d];
            const std::vector<double> hv = sys.h(I, theta);
            for (int c = 0; c < sys.ell; ++c) acc[c] += hv[c];
        }
        for (int c = 0; c < sys.ell; ++c)
            curve.values[static_cast<std::size_t>(pt) * sys.ell + c] =
                acc[c] * curve.period / N;
    });
    return curve;
}

Tristate check_poincare_point(const FourierSpectrum& spec, const ResonanceLattice& lattice,
                              int s) {
    const int need = spec.ell - s;
    if (need < 1) throw DomainError("check_poincare_point: need ell - s >= 1");
    // Candidates restricted to the spectrum's truncation box (coefficients
    // outside it are unknown, so they cannot act as witnesses); the lattice
    // order already prefers small |r|.
    std::vector<std::vector<int>> members;
    for (const auto& r : lattice.members) {
        bool inside = true;
        for (int v : r)
            if (std::abs(v) > spec.R) inside = false;
        if (inside) members.push_back(r);
    }
    const int nm = static_cast<int>(members.size());
    if (nm < need) return Tristate::no;

    constexpr long kSubsetCap = 1000;
    long tried = 0;

    // Enumerate combinations in lexicographic order over the sorted members.
    std::vector<int> pick(need);
    std::iota(pick.begin(), pick.end(), 0);
    auto advance = [&]() {
        int i = need - 1;
        while (i >= 0 && pick[i] == nm - need + i) --i;
        if (i < 0) return false;
        ++pick[i];
        for (int j = i + 1; j < need; ++j) pick[j] = pick[j - 1] + 1;
        return true;
    };

    do {
        if (++tried > kSubsetCap) return Tristate::inconclusive;
        // Nonzero members of the subset must be linearly independent integer
        // vectors; the zero vector is admitted as an extra candidate.
        Eigen::MatrixXd rmat(spec.m, need);
        int nz = 0;
        for (int j = 0; j < need; ++j) {
            const auto& r = members[pick[j]];
            const bool zero = std::all_of(r.begin(), r.end(), [](int v) { return v == 0; });
            if (!zero) {
                for (int d = 0; d < spec.m; ++d) rmat(d, nz) = r[d];
                ++nz;
            }
        }
        bool ok = true;
        if (nz > 0) {
            const Eigen::JacobiSVD<Eigen::MatrixXd> svd(rmat.leftCols(nz));
            const double smax = svd.singularValues()(0);
            int rank = 0;
            for (int i = 0; i < svd.singularValues().size(); ++i)
                if (svd.singularValues()(i) > 1e-10 * std::max(1.0, smax)) ++rank;
            ok = rank == nz;
        }
        if (ok) {
            Eigen::MatrixXcd cmat(spec.ell, need);
            for (int j = 0; j < need; ++j)
                for (int c = 0; c < spec.ell; ++c)
                    cmat(c, j) = spec.coeff(members[pick[j]], c);
            const Eigen::JacobiSVD<Eigen::MatrixXcd> svd(cmat);
            const double smax = svd.singularValues()(0);
            int rank = 0;
            for (int i = 0; i < svd.singularValues().size(); ++i)
                if (svd.singularValues()(i) > 1e-10 * std::max(1.0, smax)) ++rank;
            if (rank == need) return Tristate::yes;
        }
    } while (advance());
    return Tristate::no;
}

namespace {

/// Resonance detection along the 1-D line I(t) = base + t * dir, t in [0, 1].
void scan_line(const ActionAngleSystem& sys, const std::vector<double>& base,
               const std::vector<double>& dir, int denom_bound, int lattice_R,
               std::vector<ResonantAction>& out) {
    constexpr int G = 512;
    auto point = [&](double t) {
        std::vector<double> I(base.size());
        for (std::size_t d = 0; d < I.size(); ++d) I[d] = base[d] + t * dir[d];
        return I;
    };
    auto omega_at = [&](double t) { return sys.omega(point(t)); };

    const int m = sys.m;
    if (m == 1) {
        // Every point with omega != 0 carries the trivial resonance.
        for (int g = 0; g < G; g += 8) {
            const double t = (g + 0.5) / G;
            const auto I = point(t);
            const auto w = sys.omega(I);
            if (std::abs(w[0]) < 1e-12) continue;
            ResonantAction ra;
            ra.I = I;
            ra.lattice = resonance_lattice(w, lattice_R, denom_bound);
            ra.denominator = 1;
            out.push_back(std::move(ra));
        }
        return;
    }
    if (m != 2) {
        // Multi-ratio roots are only detectable here when the ratios are
        // constant along the line; check that case and bail out otherwise.
        const auto w0 = omega_at(0.123), w1 = omega_at(0.877);
        bool constant = true;
        for (int d = 0; d < m; ++d) {
            const double r0 = w0[d] / w0[m - 1], r1 = w1[d] / w1[m - 1];
            if (std::abs(r0 - r1) > 1e-12) constant = false;
        }
        if (!constant) return;
        const auto lat = resonance_lattice(w0, lattice_R, denom_bound);
        if (!lat.omega0) return;
        for (int g = 0; g < G; g += 8) {
            const double t = (g + 0.5) / G;
            ResonantAction ra;
            ra.I = point(t);
            ra.lattice = resonance_lattice(sys.omega(ra.I), lattice_R, denom_bound);
            ra.denominator = 1;
            out.push_back(std::move(ra));
        }
        return;
    }

    // m == 2: solve omega_1/omega_2 = p/q for every admissible rational.
    auto ratio = [&](double t) {
        const auto w = omega_at(t);
        return w[0] / w[1];
    };
    std::vector<double> rg(G + 1);
    for (int g = 0; g <= G; ++g) rg[g] = ratio(static_cast<double>(g) / G);
    const double rmin = *std::min_element(rg.begin(), rg.end());
    const double rmax = *std::max_element(rg.begin(), rg.end());

    for (int qd = 1; qd <= denom_bound; ++qd) {
        for (int pn = -denom_bound * 4; pn <= denom_bound * 4; ++pn) {
            if (std::gcd(std::abs(pn), qd) != 1) continue;
            const double target = static_cast<double>(pn) / qd;
            if (target < rmin - 1e-9 || target > rmax + 1e-9) continue;
            for (int g = 0; g < G; ++g) {
                const double f0 = rg[g] - target, f1 = rg[g + 1] - target;
                double troot;
                if (std::abs(f0) < 1e-10 && std::abs(f1) < 1e-10) {
                    // ratio constant at the rational value: whole segment resonant
                    troot = (g + 0.5) / G;
                } else if (f0 == 0.0) {
                    troot = static_cast<double>(g) / G;
                } else if (f0 * f1 < 0.0) {
                    double lo = static_cast<double>(g) / G, hi = static_cast<double>(g + 1) / G;
                    double flo = f0;
                    for (int it = 0; it < 100; ++it) {
                        const double mid = 0.5 * (lo + hi);
                        const double fm = ratio(mid) - target;
                        if (flo * fm <= 0.0)
                            hi = mid;
                        else {
                            lo = mid;
                            flo = fm;
                        }
                    }
                    troot = 0.5 * (lo + hi);
                } else {
                    continue;
                }
                ResonantAction ra;
                ra.I = point(troot);
                ra.lattice = resonance_lattice(sys.omega(ra.I), lattice_R, denom_bound);
                if (!ra.lattice.omega0) continue; // ratio detection failed at the root
                ra.denominator = qd;
                out.push_back(std::move(ra));
            }
        }
    }
}

} // namespace

std::vector<ResonantAction> detect_resonant_actions(
    const ActionAngleSystem& sys, const std::vector<std::pair<double, double>>& box,
    int denom_bound, int max_points) {
    if (static_cast<int>(box.size()) != sys.ell)
        throw DomainError("detect_resonant_actions: box dimension mismatch");
    if (denom_bound < 1 || max_points < 1)
        throw DomainError("detect_resonant_actions: bounds must be positive");

    std::vector<ResonantAction> found;
    const int lattice_R = std::max(4, std::min(denom_bound, 16));

    std::vector<double> base(sys.ell), dir(sys.ell, 0.0);
    for (int d = 0; d < sys.ell; ++d) base[d] = box[d].first;
    // One scan per axis with extent.
    for (int axis = 0; axis < sys.ell; ++axis) {
        if (!(box[axis].second > box[axis].first)) continue;
        std::fill(dir.begin(), dir.end(), 0.0);
        dir[axis] = box[axis].second - box[axis].first;
        scan_line(sys, base, dir, denom_bound, lattice_R, found);
    }

    std::stable_sort(found.begin(), found.end(),
                     [](const ResonantAction& a, const ResonantAction& b) {
                         return a.denominator < b.denominator;
                     });
    // Drop near-duplicate actions.
    std::vector<ResonantAction> out;
    for (auto& ra : found) {
        bool dup = false;
        for (const auto& kept : out) {
            double d = 0.0;
            for (int i = 0; i < sys.ell; ++i) d += std::abs(ra.I[i] - kept.I[i]);
            if (d < 1e-8) dup = true;
        }
        if (!dup) out.push_back(std::move(ra));
        if (static_cast<int>(out.size()) >= max_points) break;
    }
    return out;
}

int jacobian_rank_omega(const ActionAngleSystem& sys, const std::vector<double>& I) {
    const int m = sys.m, ell = sys.ell;
    Eigen::MatrixXd J(m, ell);
    for (int j = 0; j < ell; ++j) {
        const double h = 1e-6 * (1.0 + std::abs(I[j]));
        std::vector<double> Ip = I, Im = I;
        Ip[j] += h;
        Im[j] -= h;
        const auto wp = sys.omega(Ip), wm = sys.omega(Im);
        for (int i = 0; i < m; ++i) J(i, j) = (wp[i] - wm[i]) / (2.0 * h);
    }
    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(J);
    const double smax = svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
    if (!(smax > 0.0)) return 0;
    int rank = 0;
    for (int i = 0; i < svd.singularValues().size(); ++i)
        if (svd.singularValues()(i) > 1e-8 * smax) ++rank;
    return rank;
}

} // namespace melkit::actionangle
