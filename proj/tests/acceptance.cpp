// Acceptance suite: one line per criterion, nonzero exit if any fail.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "melkit/actionangle.hpp"
#include "melkit/criteria.hpp"
#include "melkit/melnikov.hpp"
#include "melkit/ode.hpp"
#include "melkit/specfun.hpp"
#include "melkit/systems.hpp"

using namespace melkit;
using namespace melkit::melnikov;
using specfun::EllipticModulus;
using systems::FamilyKind;
namespace chrono = std::chrono;

namespace {

int g_failures = 0;
long g_seed = 20240601;
double g_total_s = 0.0;

struct Criterion {
    const char* label;
    chrono::steady_clock::time_point t0 = chrono::steady_clock::now();
    bool ok = true;
    std::string detail;

    explicit Criterion(const char* l) : label(l) {}
    void require(bool cond, const std::string& what) {
        if (!cond && ok) {
            ok = false;
            detail = what;
        }
    }
    ~Criterion() {
        const double s =
            chrono::duration<double>(chrono::steady_clock::now() - t0).count();
        g_total_s += s;
        std::printf("[%s] %-18s (%6.2f s)%s%s\n", ok ? "PASS" : "FAIL", label, s,
                    ok ? "" : "  -- ", detail.c_str());
        if (!ok) ++g_failures;
    }
};

std::string fmt(double x) {
    char b[40];
    std::snprintf(b, sizeof(b), "%.6g", x);
    return b;
}

void criterion_1_special_functions() {
    Criterion c("1 special functions");
    c.require(specfun::ellip_K(EllipticModulus::from_k(0.0)) == M_PI / 2.0, "K(0) != pi/2");
    c.require(specfun::ellip_E(EllipticModulus::from_k(0.0)) == M_PI / 2.0, "E(0) != pi/2");

    std::mt19937 rng(static_cast<unsigned>(g_seed));
    std::uniform_real_distribution<double> td(-20.0, 20.0);
    std::uniform_real_distribution<double> kd(0.0, 1.0);
    double worst1 = 0.0, worst2 = 0.0;
    for (int i = 0; i < 10000; ++i) {
        const double t = td(rng);
        const auto k = EllipticModulus::from_k(std::min(kd(rng), 1.0 - 1e-9));
        const auto j = specfun::jacobi_sncndn(t, k);
        worst1 = std::max(worst1, std::abs(j.sn * j.sn + j.cn * j.cn - 1.0));
        worst2 = std::max(worst2, std::abs(j.dn * j.dn + k.m() * j.sn * j.sn - 1.0));
    }
    c.require(worst1 < 1e-12, "sn^2+cn^2-1 = " + fmt(worst1));
    c.require(worst2 < 1e-12, "dn^2+k^2 sn^2-1 = " + fmt(worst2));
}

void criterion_2_orbit_formulas() {
    Criterion c("2 orbit formulas");
    const auto hard = systems::make_duffing(1.0, 0.0, 0.0, 1.0);
    const auto soft = systems::make_duffing(-1.0, 0.0, 0.0, 1.0);
    struct Case {
        const systems::ForcedPlanarSystem* sys;
        FamilyKind kind;
        double klo, khi;
    };
    const Case cases[] = {
        {&hard, FamilyKind::duffing_interior_plus, 0.05, 0.95},
        {&hard, FamilyKind::duffing_interior_minus, 0.05, 0.95},
        {&hard, FamilyKind::duffing_exterior, 0.72, 0.97},
        {&soft, FamilyKind::duffing_soft, 0.05, 0.65},
        {&hard, FamilyKind::homoclinic_plus, 0.1, 0.9},
        {&hard, FamilyKind::homoclinic_minus, 0.1, 0.9},
    };
    for (const auto& cs : cases) {
        const auto fam = systems::orbit_family(*cs.sys, cs.kind);
        for (int i = 0; i < 5; ++i) {
            const double kk = cs.klo + (cs.khi - cs.klo) * i / 4.0;
            const double r =
                systems::orbit_residual(fam, *cs.sys, EllipticModulus::from_k(kk), 256);
            c.require(r < 1e-6, std::string("family ") + std::to_string(static_cast<int>(cs.kind)) +
                                    " k=" + fmt(kk) + " residual " + fmt(r));
        }
    }
}

void criterion_3_closed_form_vs_quadrature() {
    Criterion c("3 closed vs quad");
    std::mt19937 rng(static_cast<unsigned>(g_seed));
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int done = 0; done < 20; ++done) {
        const int fam_idx = static_cast<int>(unif(rng) * 3.0);
        const double delta = 0.5 * unif(rng);
        const double beta = 0.2 + unif(rng);
        const int n = 1 + 2 * static_cast<int>(unif(rng) * 2.0);
        FamilyKind kind;
        DuffingCase dc;
        double a = 1.0, kk;
        switch (fam_idx) {
        case 0:
            kind = FamilyKind::duffing_interior_plus;
            dc = DuffingCase::interior;
            kk = 0.2 + 0.7 * unif(rng);
            break;
        case 1:
            kind = FamilyKind::duffing_exterior;
            dc = DuffingCase::exterior;
            kk = 0.75 + 0.2 * unif(rng);
            break;
        default:
            kind = FamilyKind::duffing_soft;
            dc = DuffingCase::soft;
            a = -1.0;
            kk = 0.1 + 0.5 * unif(rng);
            break;
        }
        const auto k = EllipticModulus::from_k(kk);
        const Resonance res{1, n};
        const double nu = resonance_nu(kind, k, res);
        const auto sys = systems::make_duffing(a, beta, delta, nu);
        const auto fam = systems::orbit_family(sys, kind);
        const auto curve = subharmonic_melnikov(sys, fam, k, res, 64);
        double worst = 0.0;
        for (std::size_t i = 0; i < curve.phi.size(); ++i)
            worst = std::max(worst, std::abs(curve.values[i] -
                                             closed_form_duffing(dc, +1, k, res, delta, beta, nu,
                                                                 curve.phi[i])));
        c.require(worst < 1e-6, "subharmonic tuple " + std::to_string(done) + " max diff " +
                                    fmt(worst));
    }
    // homoclinic, both signs, a few parameter sets
    for (double nu : {0.5, 1.0, 2.0}) {
        for (int sign : {+1, -1}) {
            const auto sys = systems::make_duffing(1.0, 1.0, 0.35, nu);
            const auto curve = homoclinic_melnikov(sys, sign, 64, 1e-12);
            double worst = 0.0;
            for (std::size_t i = 0; i < curve.phi.size(); ++i)
                worst = std::max(worst,
                                 std::abs(curve.values[i] -
                                          closed_form_duffing(DuffingCase::homoclinic, sign, {},
                                                              {}, 0.35, 1.0, nu, curve.phi[i])));
            c.require(worst < 1e-6, "homoclinic nu=" + fmt(nu) + " max diff " + fmt(worst));
        }
    }
}

void criterion_4_vanishing_branches() {
    Criterion c("4 vanishing branch");
    auto osc_part = [](const std::vector<double>& v) {
        double mean = 0.0;
        for (double x : v) mean += x;
        mean /= static_cast<double>(v.size());
        double sup = 0.0;
        for (double x : v) sup = std::max(sup, std::abs(x - mean));
        return sup;
    };
    // interior l = 2, 3
    for (int l : {2, 3}) {
        const auto k = EllipticModulus::from_k(0.55);
        const Resonance res{l, 1};
        const double nu = resonance_nu(FamilyKind::duffing_interior_plus, k, res);
        const auto sys = systems::make_duffing(1.0, 1.0, 0.3, nu);
        const auto fam = systems::orbit_family(sys, FamilyKind::duffing_interior_plus);
        const double sup = osc_part(subharmonic_melnikov(sys, fam, k, res, 32).values);
        c.require(sup < 1e-7, "interior l=" + std::to_string(l) + " osc " + fmt(sup));
    }
    // exterior: l != 1 and n even
    {
        const auto k = EllipticModulus::from_k(0.8);
        for (Resonance res : {Resonance{2, 1}, Resonance{1, 2}}) {
            const double nu = resonance_nu(FamilyKind::duffing_exterior, k, res);
            const auto sys = systems::make_duffing(1.0, 1.0, 0.3, nu);
            const auto fam = systems::orbit_family(sys, FamilyKind::duffing_exterior);
            const double sup = osc_part(subharmonic_melnikov(sys, fam, k, res, 32).values);
            c.require(sup < 1e-7, "exterior l=" + std::to_string(res.l) +
                                      " n=" + std::to_string(res.n) + " osc " + fmt(sup));
        }
    }
    // soft: l != 1 and n even
    {
        const auto k = EllipticModulus::from_k(0.4);
        for (Resonance res : {Resonance{2, 1}, Resonance{1, 2}}) {
            const double nu = resonance_nu(FamilyKind::duffing_soft, k, res);
            const auto sys = systems::make_duffing(-1.0, 1.0, 0.3, nu);
            const auto fam = systems::orbit_family(sys, FamilyKind::duffing_soft);
            const double sup = osc_part(subharmonic_melnikov(sys, fam, k, res, 32).values);
            c.require(sup < 1e-7, "soft l=" + std::to_string(res.l) +
                                      " n=" + std::to_string(res.n) + " osc " + fmt(sup));
        }
    }
}

void criterion_5_limit() {
    Criterion c("5 homoclinic limit");
    const auto sys = systems::make_duffing(1.0, 1.0, 0.2, 1.0);
    const std::vector<int> ls = {1, 2, 3, 5, 8};
    const auto sup = melnikov_limit_check(sys, 1.0, ls, 64);
    for (std::size_t i = 1; i < sup.size(); ++i)
        if (!(sup[i] < sup[i - 1]))
            std::printf("  warning: sup-difference not monotone at entry %zu (%g -> %g)\n", i,
                        sup[i - 1], sup[i]);
    c.require(sup.back() < sup.front() / 4.0,
              "final " + fmt(sup.back()) + " vs first " + fmt(sup.front()));
}

void criterion_6_chaos_boundary() {
    Criterion c("6 chaos boundary");
    for (double nu : {0.5, 1.0, 2.0}) {
        const double thr = chaos_threshold(nu);
        auto zero_count = [&](double ratio) {
            const auto sys = systems::make_duffing(1.0, 1.0, ratio, nu);
            const auto curve = homoclinic_melnikov(sys, +1, 256, 1e-12);
            int nsimple = 0;
            for (const auto& z : simple_zero_scan(curve))
                if (z.is_simple) ++nsimple;
            return nsimple;
        };
        const int below = zero_count(thr * 0.99), above = zero_count(thr * 1.01);
        c.require(below == 2, "nu=" + fmt(nu) + ": below-count " + std::to_string(below));
        c.require(above == 0, "nu=" + fmt(nu) + ": above-count " + std::to_string(above));
    }
}

void criterion_7_persistence() {
    Criterion c("7 persistence");
    const double nu = 1.0, eps = 1e-3;
    const auto sys = systems::make_duffing(1.0, 1.0, 0.1, nu);
    const auto fam = systems::orbit_family(sys, FamilyKind::duffing_interior_plus);
    const auto k = solve_resonance(FamilyKind::duffing_interior_plus, nu, {1, 1});
    const auto curve = subharmonic_melnikov(sys, fam, k, {1, 1}, 64);
    const auto zeros = simple_zero_scan(curve);
    int nsimple = 0;
    for (const auto& z : zeros)
        if (z.is_simple) ++nsimple;
    c.require(nsimple == 2, "expected 2 simple zeros, got " + std::to_string(nsimple));

    std::vector<systems::Vec2> fixed_points;
    for (const auto& z : zeros) {
        if (!z.is_simple) continue;
        const systems::Vec2 seed = fam.orbit(k, -z.phi / nu);
        const auto r = ode::newton_shoot_periodic(sys, eps, seed, 0.0, 1, 1e-9);
        c.require(r.converged && r.residual < 1e-9,
                  "zero at phi=" + fmt(z.phi) + ": residual " + fmt(r.residual));
        if (r.converged) {
            bool dup = false;
            for (const auto& p : fixed_points)
                if (std::hypot(p[0] - r.point[0], p[1] - r.point[1]) < 1e-4) dup = true;
            if (!dup) fixed_points.push_back(r.point);
        }
    }
    c.require(static_cast<int>(fixed_points.size()) == nsimple,
              "distinct fixed points " + std::to_string(fixed_points.size()) + " != zeros " +
                  std::to_string(nsimple));
}

void criterion_8_dual_method() {
    Criterion c("8 dual-method I");
    int count = 0;
    double worst = 0.0;
    // pendulum collapse on three tori
    const auto pend = systems::make_pendulum_torque(0.7);
    for (double I : {0.5, 1.0, 2.0}) {
        const auto spec = actionangle::fourier_coeffs(pend, {I}, 2);
        const auto lat = actionangle::resonance_lattice(pend.omega({I}), 2, 64);
        const auto f = actionangle::resonant_integral_fourier(spec, lat, 16);
        const auto q = actionangle::resonant_integral_quadrature(pend, {I}, 16);
        for (std::size_t pt = 0; pt < f.npoints(); ++pt)
            worst = std::max(worst, std::abs(f.value_at(pt)[0] - q.value_at(pt)[0]));
        // the m=1 value is 2 pi hhat_0 / omega exactly
        worst = std::max(worst, std::abs(f.value_at(0)[0] - 2.0 * M_PI / I));
        ++count;
    }
    // coupled oscillators on seven resonant tori
    systems::CoupledParams p;
    p.ell = 2;
    p.delta = 0.15;
    p.Omega = {0.7, 0.4};
    p.decay_M = 0.5;
    p.decay_rate = 0.5;
    p.truncation = 10;
    p.coeffs = systems::full_coupling_table(p.decay_M, p.decay_rate, p.truncation);
    const auto sys = systems::make_coupled_oscillators(p);
    for (const auto& I : {std::vector<double>{1.0, 1.0}, {1.0, 2.0}, {2.0, 1.0}, {2.0, 3.0},
                          {3.0, 2.0}, {1.0, 3.0}, {3.0, 4.0}}) {
        const auto spec = actionangle::fourier_coeffs(sys, I, 10);
        const auto lat = actionangle::resonance_lattice(sys.omega(I), 10, 64);
        const auto f = actionangle::resonant_integral_fourier(spec, lat, 16);
        const auto q = actionangle::resonant_integral_quadrature(sys, I, 16);
        for (std::size_t pt = 0; pt < f.npoints(); ++pt)
            for (int comp = 0; comp < 2; ++comp)
                worst = std::max(worst,
                                 std::abs(f.value_at(pt)[comp] - q.value_at(pt)[comp]));
        ++count;
    }
    c.require(count == 10, "resonance count " + std::to_string(count));
    c.require(worst < 1e-8, "max fourier/quadrature discrepancy " + fmt(worst));
}

std::string read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f.good()) return "<missing file: " + path + ">";
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

void criterion_9_golden_verdicts() {
    Criterion c("9 golden verdicts");
    const std::string dir = MELKIT_GOLDEN_DIR;

    systems::CoupledParams kur;
    kur.ell = 2;
    kur.delta = 0.05;
    kur.Omega = {1.0, 1.3};
    kur.coeffs[{1, 1}] = 0.8;
    systems::CoupledParams full;
    full.ell = 2;
    full.delta = 0.05;
    full.Omega = {1.0, 1.3};
    full.decay_M = 0.5;
    full.decay_rate = 0.5;
    full.truncation = 20;
    full.coeffs = systems::full_coupling_table(full.decay_M, full.decay_rate, full.truncation);

    const std::pair<std::string, std::string> reports[] = {
        {"verdict_pendulum.json", criteria::report_to_string(criteria::report_pendulum(0.7))},
        {"verdict_coupled_i.json",
         criteria::report_to_string(criteria::report_coupled_mean(kur))},
        {"verdict_coupled_ii.json",
         criteria::report_to_string(criteria::report_coupled_accumulation(full))},
        {"verdict_duffing_a1_sub.json",
         criteria::report_to_string(criteria::report_duffing_hard_subharmonic(1.0, 0.2, 1.0))},
        {"verdict_duffing_a1_hom.json",
         criteria::report_to_string(criteria::report_duffing_hard_homoclinic(1.0, 0.2, 1.0))},
        {"verdict_duffing_am1.json",
         criteria::report_to_string(criteria::report_duffing_soft(1.0, 0.2, 1.3))},
    };
    for (const auto& [file, produced] : reports)
        c.require(produced == read_file(dir + "/" + file), file + " differs from golden");
}

} // namespace

int main(int argc, char** argv) {
    for (int i = 1; i + 1 < argc; i += 2)
        if (std::strcmp(argv[i], "--seed") == 0) g_seed = std::atol(argv[i + 1]);

    criterion_1_special_functions();
    criterion_2_orbit_formulas();
    criterion_3_closed_form_vs_quadrature();
    criterion_4_vanishing_branches();
    criterion_5_limit();
    criterion_6_chaos_boundary();
    criterion_7_persistence();
    criterion_8_dual_method();
    criterion_9_golden_verdicts();

    {
        Criterion c("10 total runtime");
        c.require(g_total_s < 300.0, "total " + fmt(g_total_s) + " s exceeds 300 s");
    }
    std::printf("%s (%d failure%s, %.1f s total)\n", g_failures ? "FAILURE" : "SUCCESS",
                g_failures, g_failures == 1 ? "" : "s", g_total_s);
    return g_failures ? 1 : 0;
}
