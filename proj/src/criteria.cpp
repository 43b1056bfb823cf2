#include "melkit/criteria.hpp"
#include "melkit/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace melkit::criteria {

using actionangle::fourier_coeffs;
using actionangle::jacobian_rank_omega;
using melnikov::MelnikovCurve;
using melnikov::Resonance;
using specfun::EllipticModulus;
using systems::ActionAngleSystem;
using systems::FamilyKind;
using systems::ForcedPlanarSystem;
using systems::OrbitFamily;

std::string to_string(Theorem t) {
    switch (t) {
    case Theorem::thm2_4_no_first_integrals: return "thm2_4_no_first_integrals";
    case Theorem::thm2_6_nonintegrable: return "thm2_6_nonintegrable";
    case Theorem::thm4_1: return "thm4_1";
    case Theorem::thm4_2: return "thm4_2";
    case Theorem::thm4_3: return "thm4_3";
    case Theorem::thm5_1: return "thm5_1";
    case Theorem::thm5_2: return "thm5_2";
    case Theorem::thm5_3: return "thm5_3";
    case Theorem::thm5_4: return "thm5_4";
    }
    return "?";
}

std::string to_string(HypothesisStatus s) {
    switch (s) {
    case HypothesisStatus::pass: return "pass";
    case HypothesisStatus::fail: return "fail";
    case HypothesisStatus::inconclusive: return "inconclusive";
    }
    return "?";
}

std::string to_string(Conclusion c) {
    switch (c) {
    case Conclusion::no_n_minus_q_first_integrals: return "no_n_minus_q_first_integrals";
    case Conclusion::not_real_analytically_integrable: return "not_real_analytically_integrable";
    case Conclusion::no_conclusion: return "no_conclusion";
    }
    return "?";
}

std::pair<bool, double> test_identically_zero(std::span<const double> values, double rel_tol,
                                              double param_scale) {
    if (!(rel_tol > 0.0)) throw DomainError("test_identically_zero: rel_tol must be positive");
    double mx = 0.0;
    for (double v : values) mx = std::max(mx, std::abs(v));
    return {mx < rel_tol * std::max(1.0, param_scale), mx};
}

std::pair<bool, double> test_constant(std::span<const double> values, double rel_tol,
                                      double param_scale) {
    if (!(rel_tol > 0.0)) throw DomainError("test_constant: rel_tol must be positive");
    if (values.empty()) return {true, 0.0};
    const auto [mn, mx] = std::minmax_element(values.begin(), values.end());
    const double spread = *mx - *mn;
    return {spread < rel_tol * std::max(1.0, param_scale), spread};
}

std::string format_evidence(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", x);
    return buf;
}

namespace {

std::string format_list(std::span<const double> xs) {
    std::string s = "[";
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i) s += ", ";
        s += format_evidence(xs[i]);
    }
    return s + "]";
}

Hypothesis hyp(std::string name, bool pass, std::string evidence) {
    return {std::move(name), pass ? HypothesisStatus::pass : HypothesisStatus::fail,
            std::move(evidence)};
}

bool all_pass(const std::vector<Hypothesis>& hs) {
    return std::all_of(hs.begin(), hs.end(),
                       [](const Hypothesis& h) { return h.status == HypothesisStatus::pass; });
}

constexpr const char* kKeySetCaveat =
    "conclusion subject to the key-set hypothesis: the accumulating resonance sample is a "
    "numerical surrogate for density of the resonant set";

constexpr const char* kInconclusiveNote =
    "a failing or inconclusive hypothesis proves nothing: no integrability claim is implied";

/// Successive spacings strictly decrease along the sequence.
bool spacings_decrease(std::span<const double> xs) {
    if (xs.size() < 3) return false;
    double prev = std::abs(xs[1] - xs[0]);
    for (std::size_t i = 2; i < xs.size(); ++i) {
        const double d = std::abs(xs[i] - xs[i - 1]);
        if (!(d < prev)) return false;
        prev = d;
    }
    return true;
}

} // namespace

nlohmann::ordered_json verdict_to_json(const Verdict& v) {
    nlohmann::ordered_json j;
    j["theorem"] = to_string(v.theorem);
    j["hypotheses"] = nlohmann::ordered_json::array();
    for (const auto& h : v.hypotheses) {
        j["hypotheses"].push_back(nlohmann::ordered_json{
            {"name", h.name}, {"status", to_string(h.status)}, {"evidence", h.evidence}});
    }
    j["conclusion"] = to_string(v.conclusion);
    j["scope_note"] = v.scope_note;
    if (!v.caveat.empty()) j["caveat"] = v.caveat;
    return j;
}

nlohmann::ordered_json report_to_json(const Report& r) {
    nlohmann::ordered_json j;
    j["schema"] = "melkit-verdict-v1";
    j["system"] = r.system;
    j["parameters"] = r.parameters;
    j["verdicts"] = nlohmann::ordered_json::array();
    for (const auto& v : r.verdicts) j["verdicts"].push_back(verdict_to_json(v));
    j["notes"] = r.notes;
    return j;
}

std::string report_to_string(const Report& r) { return report_to_json(r).dump(2) + "\n"; }

Report report_pendulum(double beta) {
    const ActionAngleSystem sys = systems::make_pendulum_torque(beta);
    Report rep;
    rep.system = "pendulum_torque";
    rep.parameters = {{"beta", beta}};

    const std::vector<double> samples = {0.5, 1.0, 2.0};
    double min_omega = 1e300, min_h0 = 1e300;
    for (double I : samples) {
        min_omega = std::min(min_omega, std::abs(sys.omega({I})[0]));
        const auto spec = fourier_coeffs(sys, {I}, 2);
        const std::vector<int> r0{0};
        min_h0 = std::min(min_h0, std::abs(spec.coeff(r0, 0)));
    }

    Verdict v;
    v.theorem = Theorem::thm4_2;
    v.hypotheses.push_back(hyp("omega_nonzero_at_some_action", min_omega > 1e-12,
                               "min |omega(I)| over I in " + format_list(samples) + " = " +
                                   format_evidence(min_omega)));
    v.hypotheses.push_back(hyp("mean_coefficient_nonzero", min_h0 > 1e-9,
                               "min |hhat_0(I)| over the samples = " + format_evidence(min_h0)));
    v.conclusion = all_pass(v.hypotheses) ? Conclusion::no_n_minus_q_first_integrals
                                          : Conclusion::no_conclusion;
    v.scope_note = "no ell = 1 real-analytic first integral depending analytically on the "
                   "perturbation parameter exists in a neighborhood of {I0} x T^1 for the "
                   "sampled actions I0";
    rep.verdicts.push_back(std::move(v));
    if (rep.verdicts.back().conclusion == Conclusion::no_conclusion)
        rep.notes.push_back(kInconclusiveNote);
    return rep;
}

namespace {

struct CoupledChain {
    std::vector<double> ratios;     // detected I2/I1 values, accumulating toward 1
    std::vector<double> coeff_mags; // witness coefficient magnitude per point
    bool nonzero_r = false;         // witnesses taken at nonzero lattice members
};

/// Resonant actions I = (1, (q+1)/q) from a line scan, with the magnitude of
/// a witness Fourier coefficient at each: hhat_0 when mean_witness, else the
/// smallest nonzero lattice member.
CoupledChain coupled_chain(const ActionAngleSystem& sys, int qmax, bool mean_witness, int R) {
    CoupledChain chain;
    chain.nonzero_r = !mean_witness;
    const std::vector<std::pair<double, double>> box = {{1.0, 1.0}, {1.05, 2.02}};
    const auto found = actionangle::detect_resonant_actions(sys, box, qmax + 1, 400);
    for (int q = 1; q <= qmax; ++q) {
        const double target = (q + 1.0) / q;
        const actionangle::ResonantAction* best = nullptr;
        for (const auto& ra : found)
            if (std::abs(ra.I[1] - target) < 1e-6) best = &ra;
        if (!best) continue;
        const auto spec = fourier_coeffs(sys, best->I, R);
        double mag = 0.0;
        if (mean_witness) {
            const std::vector<int> r0{0, 0};
            mag = spec.magnitude(r0);
        } else {
            for (const auto& r : best->lattice.members) {
                if (std::all_of(r.begin(), r.end(), [](int v) { return v == 0; })) continue;
                bool inside = true;
                for (int v : r)
                    if (std::abs(v) > spec.R) inside = false;
                if (!inside) continue;
                mag = std::max(mag, spec.magnitude(r));
            }
        }
        chain.ratios.push_back(best->I[1]);
        chain.coeff_mags.push_back(mag);
    }
    return chain;
}

} // namespace

Report report_coupled_mean(const systems::CoupledParams& p) {
    const ActionAngleSystem sys = systems::make_coupled_oscillators(p);
    Report rep;
    rep.system = "coupled_oscillators";
    rep.parameters = {{"ell", p.ell},
                      {"delta", p.delta},
                      {"Omega", p.Omega},
                      {"coupling_terms", static_cast<int>(p.coeffs.size())},
                      {"truncation", p.truncation}};

    const int rank = jacobian_rank_omega(sys, {1.0, 1.5});
    const CoupledChain chain = coupled_chain(sys, 9, /*mean_witness=*/true, 2);
    const double min_mag =
        chain.coeff_mags.empty()
            ? 0.0
            : *std::min_element(chain.coeff_mags.begin(), chain.coeff_mags.end());

    Verdict v;
    v.theorem = Theorem::thm4_1;
    v.hypotheses.push_back(hyp("frequency_map_nondegenerate", rank == sys.m,
                               "rank D omega(I) = " + std::to_string(rank) + " of " +
                                   std::to_string(sys.m)));
    v.hypotheses.push_back(
        hyp("accumulating_resonant_actions",
            chain.ratios.size() >= 8 && spacings_decrease(chain.ratios),
            std::to_string(chain.ratios.size()) +
                " resonant actions I2/I1 = (q+1)/q with decreasing spacing toward 1: " +
                format_list(chain.ratios)));
    v.hypotheses.push_back(hyp("resonant_coefficient_nonzero", min_mag > 1e-9,
                               "min over the chain of |hhat_0(I)| = " + format_evidence(min_mag) +
                                   " (r = 0 admitted as lattice witness)"));
    v.conclusion = all_pass(v.hypotheses) ? Conclusion::no_n_minus_q_first_integrals
                                          : Conclusion::no_conclusion;
    v.scope_note = "no ell functionally independent real-analytic first integrals depending "
                   "analytically on the perturbation parameter exist near the sampled resonant "
                   "tori {I} x T^ell";
    v.caveat = kKeySetCaveat;
    rep.verdicts.push_back(std::move(v));
    if (rep.verdicts.back().conclusion == Conclusion::no_conclusion)
        rep.notes.push_back(kInconclusiveNote);
    return rep;
}

Report report_coupled_accumulation(const systems::CoupledParams& p) {
    const ActionAngleSystem sys = systems::make_coupled_oscillators(p);
    Report rep;
    rep.system = "coupled_oscillators";
    rep.parameters = {{"ell", p.ell},
                      {"delta", p.delta},
                      {"Omega", p.Omega},
                      {"coupling_terms", static_cast<int>(p.coeffs.size())},
                      {"truncation", p.truncation},
                      {"decay_M", p.decay_M},
                      {"decay_rate", p.decay_rate}};

    const int rank = jacobian_rank_omega(sys, {1.0, 1.5});
    const CoupledChain chain = coupled_chain(sys, 9, /*mean_witness=*/false, 11);
    const double min_mag =
        chain.coeff_mags.empty()
            ? 0.0
            : *std::min_element(chain.coeff_mags.begin(), chain.coeff_mags.end());

    Verdict v;
    v.theorem = Theorem::thm4_3;
    v.hypotheses.push_back(hyp("frequency_map_nondegenerate", rank == sys.m,
                               "rank D omega(I) = " + std::to_string(rank) + " of " +
                                   std::to_string(sys.m)));
    v.hypotheses.push_back(hyp("frequency_jacobian_injective", rank == sys.ell,
                               "rank D omega(I) = " + std::to_string(rank) +
                                   " = action dimension " + std::to_string(sys.ell)));
    v.hypotheses.push_back(
        hyp("accumulating_resonant_actions",
            chain.ratios.size() >= 8 && spacings_decrease(chain.ratios),
            std::to_string(chain.ratios.size()) +
                " resonant actions I2/I1 = (q+1)/q with decreasing spacing toward 1: " +
                format_list(chain.ratios)));
    v.hypotheses.push_back(
        hyp("nonzero_coefficient_at_nonzero_lattice_member", min_mag > 1e-9,
            "min over the chain of max_{r in Lambda, r != 0} |hhat_r(I)| = " +
                format_evidence(min_mag)));
    v.conclusion = all_pass(v.hypotheses) ? Conclusion::not_real_analytically_integrable
                                          : Conclusion::no_conclusion;
    v.scope_note = "not real-analytically integrable (commuting fields and first integrals "
                   "analytic in the perturbation parameter) near the sampled resonant tori "
                   "{I} x T^ell";
    v.caveat = kKeySetCaveat;
    rep.verdicts.push_back(std::move(v));
    if (rep.verdicts.back().conclusion == Conclusion::no_conclusion)
        rep.notes.push_back(kInconclusiveNote);
    return rep;
}

namespace {

struct SubharmonicChainEvidence {
    std::vector<double> kprimes;
    std::vector<double> max_abs;    // max |M| per curve
    std::vector<double> spreads;    // max - min per curve
    bool all_not_identically_zero = true;
    bool all_constant = true;
    double dperiod = 0.0; // |dT/dk| at the first chain modulus
};

SubharmonicChainEvidence subharmonic_chain(const ForcedPlanarSystem& sys, FamilyKind kind,
                                           std::span<const Resonance> chain) {
    SubharmonicChainEvidence ev;
    const OrbitFamily fam = orbit_family(sys, kind);
    const double scale = sys.beta + sys.delta;
    bool first = true;
    for (const Resonance& res : chain) {
        const EllipticModulus k = melnikov::solve_resonance(kind, sys.nu, res);
        const MelnikovCurve curve = melnikov::subharmonic_melnikov(sys, fam, k, res, 64);
        const auto [zero, mx] = test_identically_zero(curve.values, kDefaultRelTol, scale);
        const auto [constant, spread] = test_constant(curve.values, kDefaultRelTol, scale);
        ev.kprimes.push_back(k.kprime());
        ev.max_abs.push_back(mx);
        ev.spreads.push_back(spread);
        ev.all_not_identically_zero = ev.all_not_identically_zero && !zero;
        ev.all_constant = ev.all_constant && constant;
        if (first) {
            const double h = 1e-6;
            const double kk = k.k();
            const double Tp = fam.period(EllipticModulus::from_k(std::min(kk + h, 1.0 - 1e-12)));
            const double Tm = fam.period(EllipticModulus::from_k(kk - h));
            ev.dperiod = std::abs(Tp - Tm) / (2.0 * h);
            first = false;
        }
    }
    return ev;
}

} // namespace

Report report_duffing_hard_subharmonic(double beta, double delta, double nu) {
    const ForcedPlanarSystem sys = systems::make_duffing(1.0, beta, delta, nu);
    Report rep;
    rep.system = "duffing";
    rep.parameters = {{"a", 1}, {"beta", beta}, {"delta", delta}, {"nu", nu}};

    std::vector<Resonance> chain;
    for (int n : {1, 2, 3, 4, 5, 6, 7, 8}) chain.push_back({1, n});
    const auto ev =
        subharmonic_chain(sys, FamilyKind::duffing_interior_plus, chain);

    Verdict v;
    v.theorem = Theorem::thm5_1;
    v.hypotheses.push_back(hyp("period_derivative_nonzero", ev.dperiod > 1e-8,
                               "|dT/dk| at the first resonance = " + format_evidence(ev.dperiod)));
    v.hypotheses.push_back(
        hyp("accumulating_resonances",
            ev.kprimes.size() >= 8 && spacings_decrease(ev.kprimes),
            std::to_string(ev.kprimes.size()) +
                " interior resonances (l = 1, n = 1..8); k' decreasing toward the separatrix: " +
                format_list(ev.kprimes)));
    v.hypotheses.push_back(hyp("melnikov_not_identically_zero", ev.all_not_identically_zero,
                               "max |M| per resonance = " + format_list(ev.max_abs)));
    v.conclusion = all_pass(v.hypotheses) ? Conclusion::no_n_minus_q_first_integrals
                                          : Conclusion::no_conclusion;
    v.scope_note = "no real-analytic first integral depending analytically on the perturbation "
                   "parameter exists near the cylinders {x^k(t)} x S^1 of the sampled resonant "
                   "moduli (interior family, both signs by symmetry)";
    v.caveat = kKeySetCaveat;
    rep.verdicts.push_back(std::move(v));
    if (rep.verdicts.back().conclusion == Conclusion::no_conclusion)
        rep.notes.push_back(kInconclusiveNote);
    return rep;
}

Report report_duffing_hard_homoclinic(double beta, double delta, double nu) {
    const ForcedPlanarSystem sys = systems::make_duffing(1.0, beta, delta, nu);
    Report rep;
    rep.system = "duffing";
    rep.parameters = {{"a", 1}, {"beta", beta}, {"delta", delta}, {"nu", nu}};
    const double scale = beta + delta;

    const MelnikovCurve mp = melnikov::homoclinic_melnikov(sys, +1, 64, 1e-12);
    const MelnikovCurve mm = melnikov::homoclinic_melnikov(sys, -1, 64, 1e-12);
    const auto [zp, mxp] = test_identically_zero(mp.values, kDefaultRelTol, scale);
    const auto [zm, mxm] = test_identically_zero(mm.values, kDefaultRelTol, scale);
    const auto [cp, spp] = test_constant(mp.values, kDefaultRelTol, scale);
    const auto [cm, spm] = test_constant(mm.values, kDefaultRelTol, scale);

    Verdict v3;
    v3.theorem = Theorem::thm5_3;
    v3.hypotheses.push_back(hyp("homoclinic_melnikov_not_identically_zero", !zp && !zm,
                                "max |M_+| = " + format_evidence(mxp) +
                                    ", max |M_-| = " + format_evidence(mxm)));
    v3.conclusion = all_pass(v3.hypotheses) ? Conclusion::no_n_minus_q_first_integrals
                                            : Conclusion::no_conclusion;
    v3.scope_note = "no real-analytic first integral depending analytically on the perturbation "
                    "parameter exists in U x S^1 for regions U bounded by the homoclinic loops";
    rep.verdicts.push_back(std::move(v3));

    Verdict v4;
    v4.theorem = Theorem::thm5_4;
    v4.hypotheses.push_back(hyp("homoclinic_melnikov_not_constant", !cp && !cm,
                                "max-min of M_+ = " + format_evidence(spp) +
                                    ", of M_- = " + format_evidence(spm)));
    v4.conclusion = all_pass(v4.hypotheses) ? Conclusion::not_real_analytically_integrable
                                            : Conclusion::no_conclusion;
    v4.scope_note = "not real-analytically integrable (commuting fields and first integrals "
                    "analytic in the perturbation parameter) in U x S^1 for regions U bounded "
                    "by the homoclinic loops";
    rep.verdicts.push_back(std::move(v4));

    for (const auto& v : rep.verdicts)
        if (v.conclusion == Conclusion::no_conclusion) {
            rep.notes.push_back(kInconclusiveNote);
            break;
        }
    return rep;
}

Report report_duffing_soft(double beta, double delta, double nu) {
    const ForcedPlanarSystem sys = systems::make_duffing(-1.0, beta, delta, nu);
    Report rep;
    rep.system = "duffing";
    rep.parameters = {{"a", -1}, {"beta", beta}, {"delta", delta}, {"nu", nu}};

    std::vector<Resonance> chain;
    for (int l : {2, 3, 4, 5, 6, 7, 8, 9}) chain.push_back({l, 1});
    const auto ev = subharmonic_chain(sys, FamilyKind::duffing_soft, chain);

    // The isolated l = 1 resonance (when nu admits it) is the only
    // non-constant curve in the family.
    bool have_l1 = true;
    double l1_spread = 0.0;
    try {
        const EllipticModulus k1 = melnikov::solve_resonance(FamilyKind::duffing_soft, nu, {1, 1});
        const OrbitFamily fam = orbit_family(sys, FamilyKind::duffing_soft);
        const MelnikovCurve c1 = melnikov::subharmonic_melnikov(sys, fam, k1, {1, 1}, 64);
        l1_spread = test_constant(c1.values, kDefaultRelTol, beta + delta).second;
    } catch (const NoResonanceError&) {
        have_l1 = false;
    }

    Verdict v1;
    v1.theorem = Theorem::thm5_1;
    v1.hypotheses.push_back(hyp("period_derivative_nonzero", ev.dperiod > 1e-8,
                               "|dT/dk| at the first resonance = " + format_evidence(ev.dperiod)));
    v1.hypotheses.push_back(
        hyp("accumulating_resonances",
            ev.kprimes.size() >= 8 && spacings_decrease(ev.kprimes),
            std::to_string(ev.kprimes.size()) +
                " resonances (l = 2..9, n = 1); k' decreasing toward k = 1/sqrt(2): " +
                format_list(ev.kprimes)));
    v1.hypotheses.push_back(hyp("melnikov_not_identically_zero", ev.all_not_identically_zero,
                                "max |M| per resonance = " + format_list(ev.max_abs)));
    v1.conclusion = all_pass(v1.hypotheses) ? Conclusion::no_n_minus_q_first_integrals
                                            : Conclusion::no_conclusion;
    v1.scope_note = "no real-analytic first integral depending analytically on the perturbation "
                    "parameter exists near the cylinders {x^k(t)} x S^1 of the sampled resonant "
                    "moduli";
    v1.caveat = kKeySetCaveat;
    rep.verdicts.push_back(std::move(v1));

    Verdict v2;
    v2.theorem = Theorem::thm5_2;
    v2.hypotheses.push_back(
        hyp("accumulating_resonances",
            ev.kprimes.size() >= 8 && spacings_decrease(ev.kprimes),
            std::to_string(ev.kprimes.size()) + " resonances as above"));
    v2.hypotheses.push_back(
        hyp("melnikov_not_constant_on_accumulating_set", !ev.all_constant,
            "max-min per l >= 2 resonance = " + format_list(ev.spreads) +
                (have_l1 ? "; the isolated l = 1 curve alone has max-min = " +
                               format_evidence(l1_spread)
                         : "")));
    v2.conclusion = all_pass(v2.hypotheses) ? Conclusion::not_real_analytically_integrable
                                            : Conclusion::no_conclusion;
    v2.scope_note = "not applicable: every l != 1 subharmonic function is constant, and the "
                    "single l = 1 resonance does not form an accumulating family";
    v2.caveat = kKeySetCaveat;
    rep.verdicts.push_back(std::move(v2));

    rep.notes.push_back("the non-constancy route fails here, so real-analytic integrability "
                        "remains undecided for this case");
    rep.notes.push_back(kInconclusiveNote);
    return rep;
}

} // namespace melkit::criteria
