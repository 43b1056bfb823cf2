#include "doctest.h"

#include <cmath>
#include <complex>

#include "melkit/actionangle.hpp"
#include "melkit/errors.hpp"
#include "melkit/melnikov.hpp"
#include "melkit/systems.hpp"

using namespace melkit;
using namespace melkit::actionangle;
using systems::ActionAngleSystem;
using systems::CoupledParams;

namespace {

ActionAngleSystem zero_system() {
    ActionAngleSystem s;
    s.ell = 1;
    s.m = 1;
    s.omega = [](const std::vector<double>& I) { return I; };
    s.h = [](const std::vector<double>&, const std::vector<double>&) {
        return std::vector<double>{0.0};
    };
    s.action_box = {{0.5, 2.0}};
    return s;
}

CoupledParams kuramoto2() {
    CoupledParams p;
    p.ell = 2;
    p.delta = 0.0;
    p.Omega = {0.0, 0.0};
    p.coeffs[{1, 1}] = 1.0;
    return p;
}

} // namespace

TEST_CASE("pendulum fourier coefficients: hhat_0 = 1, hhat_{+-1} = -+ i beta/2") {
    const double beta = 0.7;
    const auto sys = systems::make_pendulum_torque(beta);
    const auto spec = fourier_coeffs(sys, {1.3}, 2);
    const std::vector<int> r0{0}, rp{1}, rm{-1}, r2{2};
    CHECK(std::abs(spec.coeff(r0, 0) - 1.0) < 1e-12);
    CHECK(std::abs(spec.coeff(rp, 0) - std::complex<double>(0.0, -beta / 2)) < 1e-12);
    CHECK(std::abs(spec.coeff(rm, 0) - std::complex<double>(0.0, +beta / 2)) < 1e-12);
    CHECK(std::abs(spec.coeff(r2, 0)) < 1e-12);
}

TEST_CASE("coupled oscillators: hhat_0 = -delta I + Omega") {
    CoupledParams p;
    p.ell = 2;
    p.delta = 0.3;
    p.Omega = {1.0, 2.0};
    p.coeffs[{1, 1}] = 0.5;
    p.coeffs[{2, 1}] = 0.25;
    const auto sys = systems::make_coupled_oscillators(p);
    const std::vector<double> I = {0.8, 1.7};
    const auto spec = fourier_coeffs(sys, I, 3);
    const std::vector<int> r0{0, 0};
    CHECK(std::abs(spec.coeff(r0, 0) - (-0.3 * 0.8 + 1.0)) < 1e-12);
    CHECK(std::abs(spec.coeff(r0, 1) - (-0.3 * 1.7 + 2.0)) < 1e-12);
}

TEST_CASE("zero perturbation: all coefficients vanish") {
    const auto spec = fourier_coeffs(zero_system(), {1.0}, 3);
    for (const auto& c : spec.table) CHECK(std::abs(c) == 0.0);
}

TEST_CASE("spectrum reality: hermitian symmetry and pointwise reconstruction") {
    CoupledParams p = kuramoto2();
    p.delta = 0.2;
    p.Omega = {0.4, 0.9};
    const auto sys = systems::make_coupled_oscillators(p);
    const std::vector<double> I = {1.1, 0.6};
    const auto spec = fourier_coeffs(sys, I, 3);

    for (const auto& r : spec.all_indices()) {
        std::vector<int> neg(r.size());
        for (std::size_t d = 0; d < r.size(); ++d) neg[d] = -r[d];
        for (int c = 0; c < spec.ell; ++c)
            CHECK(std::abs(spec.coeff(r, c) - std::conj(spec.coeff(neg, c))) < 1e-12);
    }

    // reconstruct h on a fresh grid (incommensurate with the sampling grid)
    for (int trial = 0; trial < 16; ++trial) {
        const std::vector<double> th = {0.1 + 0.37 * trial, 1.9 - 0.21 * trial};
        const auto hv = sys.h(I, th);
        for (int c = 0; c < spec.ell; ++c) {
            std::complex<double> acc{0.0, 0.0};
            for (const auto& r : spec.all_indices()) {
                double dot = 0.0;
                for (std::size_t d = 0; d < r.size(); ++d) dot += r[d] * th[d];
                acc += spec.coeff(r, c) * std::polar(1.0, dot);
            }
            CHECK(std::abs(acc.real() - hv[c]) < 1e-9);
            CHECK(std::abs(acc.imag()) < 1e-9);
        }
    }
}

TEST_CASE("resonance lattice: rational and irrational frequency vectors") {
    {
        const std::vector<double> w = {1.0, 2.0};
        const auto lat = resonance_lattice(w, 3, 16);
        // members: 0 and +-(2,-1)
        REQUIRE(lat.members.size() == 3);
        CHECK(lat.members[0] == std::vector<int>{0, 0});
        CHECK(lat.omega0.has_value());
        CHECK(*lat.omega0 == doctest::Approx(1.0));
        CHECK(*lat.omega_ratio == std::vector<int>{1, 2});
    }
    {
        const std::vector<double> w = {2.0, 4.0, 6.0};
        const auto lat = resonance_lattice(w, 3, 16);
        CHECK(*lat.omega0 == doctest::Approx(2.0));
        CHECK(*lat.omega_ratio == std::vector<int>{1, 2, 3});
    }
    {
        const std::vector<double> w = {1.0, std::sqrt(2.0)};
        const auto lat = resonance_lattice(w, 10, 64);
        CHECK(lat.members.size() == 1); // only 0
        CHECK(!lat.omega0.has_value());
    }
    // members closed under negation
    {
        const auto lat = resonance_lattice(std::vector<double>{3.0, -2.0}, 6, 16);
        for (const auto& r : lat.members) {
            std::vector<int> neg(r.size());
            for (std::size_t d = 0; d < r.size(); ++d) neg[d] = -r[d];
            CHECK(std::find(lat.members.begin(), lat.members.end(), neg) != lat.members.end());
        }
    }
}

TEST_CASE("m=1 collapse: constant curve 2 pi hhat_0 / omega") {
    const auto sys = systems::make_pendulum_torque(0.7);
    const std::vector<double> I = {2.0};
    const auto spec = fourier_coeffs(sys, I, 2);
    const auto lat = resonance_lattice(sys.omega(I), 2, 16);
    const auto curve = resonant_integral_fourier(spec, lat, 16);
    CHECK(curve.period == doctest::Approx(M_PI)); // 2 pi / 2
    for (std::size_t pt = 0; pt < curve.npoints(); ++pt)
        CHECK(curve.value_at(pt)[0] == doctest::Approx(M_PI).epsilon(1e-10)); // 2 pi * 1 / 2

    const auto quad = resonant_integral_quadrature(sys, I, 16);
    for (std::size_t pt = 0; pt < curve.npoints(); ++pt)
        CHECK(std::abs(curve.value_at(pt)[0] - quad.value_at(pt)[0]) < 1e-10);
}

TEST_CASE("only hhat_0 nonzero: constant curve T hhat_0") {
    CoupledParams p;
    p.ell = 2;
    p.delta = 0.1;
    p.Omega = {1.0, 0.5};
    const auto sys = systems::make_coupled_oscillators(p); // no coupling terms
    const std::vector<double> I = {1.0, 1.0};
    const auto spec = fourier_coeffs(sys, I, 2);
    const auto lat = resonance_lattice(sys.omega(I), 2, 16);
    const auto curve = resonant_integral_fourier(spec, lat, 16);
    for (std::size_t pt = 0; pt < curve.npoints(); ++pt) {
        CHECK(curve.value_at(pt)[0] == doctest::Approx(curve.period * 0.9).epsilon(1e-10));
        CHECK(curve.value_at(pt)[1] == doctest::Approx(curve.period * 0.4).epsilon(1e-10));
    }
}

TEST_CASE("kuramoto on the diagonal torus: the r = (1,-1) harmonic survives") {
    const auto sys = systems::make_coupled_oscillators(kuramoto2());
    const std::vector<double> I = {1.0, 1.0};
    const auto spec = fourier_coeffs(sys, I, 2);
    const auto lat = resonance_lattice(sys.omega(I), 2, 16);
    const auto fcurve = resonant_integral_fourier(spec, lat, 16);
    const auto qcurve = resonant_integral_quadrature(sys, I, 16);
    REQUIRE(fcurve.npoints() == qcurve.npoints());

    // expected: component j = 2 pi sin(tau_j - tau_other)
    for (std::size_t pt = 0; pt < fcurve.npoints(); ++pt) {
        const auto tau = fcurve.tau_of(pt);
        CHECK(fcurve.value_at(pt)[0] ==
              doctest::Approx(2.0 * M_PI * std::sin(tau[0] - tau[1])).epsilon(1e-9));
        CHECK(fcurve.value_at(pt)[1] ==
              doctest::Approx(2.0 * M_PI * std::sin(tau[1] - tau[0])).epsilon(1e-9));
        for (int c = 0; c < 2; ++c)
            CHECK(std::abs(fcurve.value_at(pt)[c] - qcurve.value_at(pt)[c]) < 1e-8);
    }
}

TEST_CASE("dual-method identity on assorted resonant tori") {
    CoupledParams p;
    p.ell = 2;
    p.delta = 0.15;
    p.Omega = {0.7, 0.4};
    p.decay_M = 0.5;
    p.decay_rate = 0.5;
    p.truncation = 10;
    p.coeffs = systems::full_coupling_table(p.decay_M, p.decay_rate, p.truncation);
    const auto sys = systems::make_coupled_oscillators(p);
    for (const auto& I : {std::vector<double>{1.0, 2.0}, {2.0, 3.0}, {1.0, 1.0}, {3.0, 1.0}}) {
        const auto spec = fourier_coeffs(sys, I, 10);
        const auto lat = resonance_lattice(sys.omega(I), 10, 16);
        const auto f = resonant_integral_fourier(spec, lat, 16);
        const auto q = resonant_integral_quadrature(sys, I, 16);
        for (std::size_t pt = 0; pt < f.npoints(); ++pt)
            for (int c = 0; c < 2; ++c)
                CHECK(std::abs(f.value_at(pt)[c] - q.value_at(pt)[c]) < 1e-8);
    }
}

TEST_CASE("torus-flow invariance of the quadrature curve") {
    const auto sys = systems::make_coupled_oscillators(kuramoto2());
    const std::vector<double> I = {1.0, 1.0};
    const auto q = resonant_integral_quadrature(sys, I, 16);
    const auto omega = sys.omega(I);
    // I(tau + omega s) = I(tau): sample s so tau + omega s lands on grid nodes
    const double step = 2.0 * M_PI / 16.0;
    const double s = 3.0 * step; // omega = (1,1): shift = 3 nodes on both axes
    for (std::size_t pt = 0; pt < q.npoints(); ++pt) {
        const auto tau = q.tau_of(pt);
        std::vector<double> shifted(2);
        for (int d = 0; d < 2; ++d)
            shifted[d] = std::fmod(tau[d] + omega[d] * s, 2.0 * M_PI);
        const std::size_t i0 = std::llround(shifted[0] / step) % 16;
        const std::size_t i1 = std::llround(shifted[1] / step) % 16;
        const std::size_t flat = i0 * 16 + i1;
        for (int c = 0; c < 2; ++c)
            CHECK(std::abs(q.value_at(pt)[c] - q.value_at(flat)[c]) < 1e-8);
    }
}

TEST_CASE("quadrature on a non-resonant torus is rejected") {
    ActionAngleSystem s = zero_system();
    s.ell = 2;
    s.m = 2;
    s.omega = [](const std::vector<double>&) { return std::vector<double>{1.0, std::sqrt(2.0)}; };
    s.h = [](const std::vector<double>&, const std::vector<double>&) {
        return std::vector<double>{0.0, 0.0};
    };
    CHECK_THROWS_AS(resonant_integral_quadrature(s, {1.0, 1.0}, 16), DomainError);

    // the fourier route rejects a lattice without omega0 as well
    const auto spec = fourier_coeffs(s, {1.0, 1.0}, 2);
    const auto lat = resonance_lattice(s.omega({1.0, 1.0}), 8, 64);
    CHECK(!lat.omega0.has_value());
    CHECK_THROWS_AS(resonant_integral_fourier(spec, lat, 16), DomainError);
}

TEST_CASE("poincare subset search reports inconclusive past the cap") {
    // Zero spectrum over a large lattice: every pair fails, and there are
    // more than 1000 pairs to try.
    ActionAngleSystem s = zero_system();
    s.ell = 2;
    s.m = 2;
    s.omega = [](const std::vector<double>&) { return std::vector<double>{1.0, -1.0}; };
    s.h = [](const std::vector<double>&, const std::vector<double>&) {
        return std::vector<double>{0.0, 0.0};
    };
    const auto spec = fourier_coeffs(s, {1.0, 1.0}, 26);
    const auto lat = resonance_lattice(s.omega({1.0, 1.0}), 26, 64); // 53 members
    REQUIRE(lat.members.size() > 46);                                // C(47,2) > 1000
    CHECK(check_poincare_point(spec, lat, 0) == Tristate::inconclusive);
}

TEST_CASE("poincare point check") {
    // pendulum: lattice {0}, hhat_0 = 1 -> ell - s = 1 witness exists
    const auto pend = systems::make_pendulum_torque(0.7);
    const auto pspec = fourier_coeffs(pend, {1.0}, 2);
    const auto plat = resonance_lattice(pend.omega({1.0}), 2, 16);
    CHECK(check_poincare_point(pspec, plat, 0) == Tristate::yes);

    // zero spectrum -> no
    const auto zspec = fourier_coeffs(zero_system(), {1.0}, 2);
    CHECK(check_poincare_point(zspec, plat, 0) == Tristate::no);

    // lattice {0} but two independent vectors required -> no
    ActionAngleSystem two = zero_system();
    two.ell = 2;
    two.m = 2;
    two.omega = [](const std::vector<double>&) { return std::vector<double>{1.0, std::sqrt(2.0)}; };
    two.h = [](const std::vector<double>&, const std::vector<double>& th) {
        return std::vector<double>{1.0 + std::cos(th[0]), 2.0};
    };
    const auto tspec = fourier_coeffs(two, {1.0, 1.0}, 2);
    const auto tlat = resonance_lattice(two.omega({1.0, 1.0}), 10, 64);
    REQUIRE(tlat.members.size() == 1);
    CHECK(check_poincare_point(tspec, tlat, 0) == Tristate::no);

    // kuramoto diagonal: lattice {(j,-j)}, coefficients at 0 and (1,-1)
    // independent -> yes for s = 0
    CoupledParams p = kuramoto2();
    p.delta = 0.1;
    p.Omega = {0.3, 0.3};
    const auto ksys = systems::make_coupled_oscillators(p);
    const auto kspec = fourier_coeffs(ksys, {1.0, 1.0}, 2);
    const auto klat = resonance_lattice(ksys.omega({1.0, 1.0}), 2, 16);
    CHECK(check_poincare_point(kspec, klat, 0) == Tristate::yes);
}

TEST_CASE("detect resonant actions: proportional frequencies are resonant everywhere") {
    ActionAngleSystem s = zero_system();
    s.m = 2;
    s.omega = [](const std::vector<double>& I) { return std::vector<double>{I[0], 2.0 * I[0]}; };
    const auto found = detect_resonant_actions(s, {{0.5, 2.0}}, 8, 16);
    CHECK(found.size() == 16); // capped at max_points
    for (const auto& ra : found) CHECK(ra.lattice.omega0.has_value());
}

TEST_CASE("detect resonant actions: irrational offset gives an empty list") {
    ActionAngleSystem s = zero_system();
    s.m = 2;
    s.omega = [](const std::vector<double>& I) {
        return std::vector<double>{1.0, std::sqrt(2.0) + I[0]};
    };
    // box avoiding rational ratios with denominators <= 6:
    // sqrt2 + I in (1.4342, 1.4442) contains no p/q with q <= 6
    const auto found = detect_resonant_actions(s, {{0.02, 0.03}}, 6, 16);
    CHECK(found.empty());
}

TEST_CASE("detect resonant actions agrees with the duffing resonance solver") {
    const auto sys = systems::make_duffing(1.0, 1.0, 0.1, 1.0);
    const auto aa =
        systems::make_duffing_action_angle(sys, systems::FamilyKind::duffing_interior_plus);
    // omega = (2pi/T(k), 1); resonance l T = 2 pi n <-> ratio = n... ratio l/n? listed k-roots
    const auto found = detect_resonant_actions(aa, {{0.3, 0.999}}, 4, 64);
    REQUIRE(!found.empty());
    for (const auto& ra : found) {
        REQUIRE(ra.lattice.omega_ratio.has_value());
        const auto& z = *ra.lattice.omega_ratio;
        // omega = (2pi/T, nu) = omega0 (z1, z2) and l T = 2 pi n / nu give
        // 2pi/T = (l/n) nu, so (l, n) = (z1, z2)
        const auto k =
            melnikov::solve_resonance(systems::FamilyKind::duffing_interior_plus, 1.0,
                                      {z[0], z[1]});
        CHECK(ra.I[0] == doctest::Approx(k.k()).epsilon(1e-6));
    }
}

TEST_CASE("jacobian rank of the frequency map") {
    const auto pend = systems::make_pendulum_torque(0.0);
    CHECK(jacobian_rank_omega(pend, {1.0}) == 1);

    const auto coup = systems::make_coupled_oscillators(kuramoto2());
    CHECK(jacobian_rank_omega(coup, {1.0, 1.3}) == 2);

    ActionAngleSystem c = zero_system();
    c.omega = [](const std::vector<double>&) { return std::vector<double>{1.0}; };
    CHECK(jacobian_rank_omega(c, {1.0}) == 0);
}

TEST_CASE("serial and OpenMP action-angle kernels agree bitwise") {
    CoupledParams p = kuramoto2();
    p.delta = 0.1;
    p.Omega = {0.5, 0.25};
    const auto sys = systems::make_coupled_oscillators(p);
    const auto a = fourier_coeffs(sys, {1.0, 1.0}, 4, Exec::serial);
    const auto b = fourier_coeffs(sys, {1.0, 1.0}, 4, Exec::omp);
    REQUIRE(a.table.size() == b.table.size());
    for (std::size_t i = 0; i < a.table.size(); ++i) CHECK(a.table[i] == b.table[i]);

    const auto qa = resonant_integral_quadrature(sys, {1.0, 1.0}, 16, Exec::serial);
    const auto qb = resonant_integral_quadrature(sys, {1.0, 1.0}, 16, Exec::omp);
    for (std::size_t i = 0; i < qa.values.size(); ++i) CHECK(qa.values[i] == qb.values[i]);
}
