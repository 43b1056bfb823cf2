// Timing comparison between the serial reference kernels and the OpenMP ones,
// verifying bitwise-identical outputs along the way.
#include <chrono>
#include <cstdio>
#include <cstring>

#include "melkit/actionangle.hpp"
#include "melkit/melnikov.hpp"
#include "melkit/parallel.hpp"
#include "melkit/systems.hpp"

using namespace melkit;
namespace chrono = std::chrono;

namespace {

template <typename Fn>
double time_ms(Fn&& fn) {
    const auto t0 = chrono::steady_clock::now();
    fn();
    const auto t1 = chrono::steady_clock::now();
    return chrono::duration<double, std::milli>(t1 - t0).count();
}

bool bitwise_equal(const std::vector<double>& a, const std::vector<double>& b) {
    return a.size() == b.size() &&
           std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

} // namespace

int main() {
    std::printf("threads available: %d\n\n", max_threads());

    {
        const auto sys = systems::make_duffing(1.0, 1.0, 0.3, 1.0);
        const auto fam = systems::orbit_family(sys, systems::FamilyKind::duffing_interior_plus);
        const auto k = melnikov::solve_resonance(fam.kind, 1.0, {1, 1});
        melnikov::MelnikovCurve cs, cp;
        const double ts =
            time_ms([&] { cs = melnikov::subharmonic_melnikov(sys, fam, k, {1, 1}, 512, Exec::serial); });
        const double tp =
            time_ms([&] { cp = melnikov::subharmonic_melnikov(sys, fam, k, {1, 1}, 512, Exec::omp); });
        std::printf("subharmonic curve (512 phi):  serial %8.1f ms   omp %8.1f ms   speedup %.2fx   identical=%s\n",
                    ts, tp, ts / tp, bitwise_equal(cs.values, cp.values) ? "yes" : "NO");
    }
    {
        const auto sys = systems::make_duffing(1.0, 1.0, 0.3, 1.0);
        melnikov::MelnikovCurve cs, cp;
        const double ts =
            time_ms([&] { cs = melnikov::homoclinic_melnikov(sys, +1, 512, 1e-12, Exec::serial); });
        const double tp =
            time_ms([&] { cp = melnikov::homoclinic_melnikov(sys, +1, 512, 1e-12, Exec::omp); });
        std::printf("homoclinic curve (512 phi):   serial %8.1f ms   omp %8.1f ms   speedup %.2fx   identical=%s\n",
                    ts, tp, ts / tp, bitwise_equal(cs.values, cp.values) ? "yes" : "NO");
    }
    {
        systems::CoupledParams p;
        p.ell = 2;
        p.delta = 0.05;
        p.Omega = {1.0, 1.3};
        p.decay_M = 0.5;
        p.decay_rate = 0.5;
        p.truncation = 12;
        p.coeffs = systems::full_coupling_table(p.decay_M, p.decay_rate, p.truncation);
        const auto sys = systems::make_coupled_oscillators(p);
        actionangle::FourierSpectrum ss, sp;
        const double ts = time_ms([&] { ss = actionangle::fourier_coeffs(sys, {1.0, 1.0}, 11, Exec::serial); });
        const double tp = time_ms([&] { sp = actionangle::fourier_coeffs(sys, {1.0, 1.0}, 11, Exec::omp); });
        bool same = ss.table.size() == sp.table.size() &&
                    std::memcmp(ss.table.data(), sp.table.data(),
                                ss.table.size() * sizeof(ss.table[0])) == 0;
        std::printf("fourier coefficients (R=11):  serial %8.1f ms   omp %8.1f ms   speedup %.2fx   identical=%s\n",
                    ts, tp, ts / tp, same ? "yes" : "NO");

        actionangle::IntegralCurve qs, qp;
        const double tq0 = time_ms([&] { qs = actionangle::resonant_integral_quadrature(sys, {1.0, 1.0}, 16, Exec::serial); });
        const double tq1 = time_ms([&] { qp = actionangle::resonant_integral_quadrature(sys, {1.0, 1.0}, 16, Exec::omp); });
        std::printf("resonant integral (16^2 tau): serial %8.1f ms   omp %8.1f ms   speedup %.2fx   identical=%s\n",
                    tq0, tq1, tq0 / tq1, bitwise_equal(qs.values, qp.values) ? "yes" : "NO");
    }
    return 0;
}
