#ifndef MELKIT_CRITERIA_HPP
#define MELKIT_CRITERIA_HPP

#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "melkit/actionangle.hpp"
#include "melkit/melnikov.hpp"
#include "melkit/systems.hpp"

namespace melkit::criteria {

enum class Theorem {
    thm2_4_no_first_integrals,
    thm2_6_nonintegrable,
    thm4_1,
    thm4_2,
    thm4_3,
    thm5_1,
    thm5_2,
    thm5_3,
    thm5_4,
};

enum class HypothesisStatus { pass, fail, inconclusive };

struct Hypothesis {
    std::string name;
    HypothesisStatus status = HypothesisStatus::inconclusive;
    std::string evidence; // numeric summary, formatted deterministically
};

enum class Conclusion {
    no_n_minus_q_first_integrals,
    not_real_analytically_integrable,
    no_conclusion,
};

/// One theorem application: which hypotheses were checked, with what numeric
/// evidence, and what follows.  The conclusion may only be positive when all
/// hypotheses pass.
struct Verdict {
    Theorem theorem;
    std::vector<Hypothesis> hypotheses;
    Conclusion conclusion = Conclusion::no_conclusion;
    std::string scope_note;
    std::string caveat; // e.g. the key-set surrogate disclaimer; may be empty
};

std::string to_string(Theorem t);
std::string to_string(HypothesisStatus s);
std::string to_string(Conclusion c);

/// true iff max|values| < rel_tol * scale with scale = max(1, param_scale);
/// second element is the max absolute value found.
std::pair<bool, double> test_identically_zero(std::span<const double> values, double rel_tol,
                                              double param_scale);

/// true iff (max - min) < rel_tol * scale; second element is max - min.
std::pair<bool, double> test_constant(std::span<const double> values, double rel_tol,
                                      double param_scale);

constexpr double kDefaultRelTol = 1e-7;

/// Deterministic fixed-format number for evidence strings (12 significant
/// digits, no locale dependence).
std::string format_evidence(double x);

nlohmann::ordered_json verdict_to_json(const Verdict& v);

/// A full verdict report: system description plus the verdict list,
/// serialized byte-stably (sorted keys kept in insertion order, LF endings).
struct Report {
    std::string system;
    nlohmann::ordered_json parameters;
    std::vector<Verdict> verdicts;
    std::vector<std::string> notes;
};

nlohmann::ordered_json report_to_json(const Report& r);
std::string report_to_string(const Report& r); // dump(2) + trailing newline

// --- catalog report builders -------------------------------------------------

Report report_pendulum(double beta);

/// part (i): nonzero mean coefficient blocks ell first integrals.
Report report_coupled_mean(const systems::CoupledParams& p);

/// part (ii): accumulating coupling ratios give nonintegrability.
Report report_coupled_accumulation(const systems::CoupledParams& p);

/// Subharmonic evidence for the hard-spring Duffing oscillator (a = +1).
Report report_duffing_hard_subharmonic(double beta, double delta, double nu);

/// Homoclinic evidence for a = +1.
Report report_duffing_hard_homoclinic(double beta, double delta, double nu);

/// Soft-spring Duffing (a = -1): first-integral verdict plus the record that
/// the non-constancy route is not applicable (curves constant for l != 1).
Report report_duffing_soft(double beta, double delta, double nu);

} // namespace melkit::criteria

#endif
