#include "melkit/cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "melkit/actionangle.hpp"
#include "melkit/criteria.hpp"
#include "melkit/errors.hpp"
#include "melkit/io.hpp"
#include "melkit/melnikov.hpp"
#include "melkit/ode.hpp"
#include "melkit/specfun.hpp"
#include "melkit/systems.hpp"

namespace melkit::cli {

namespace fs = std::filesystem;
using io::Format;
using io::Table;
using melnikov::DuffingCase;
using melnikov::MelnikovCurve;
using melnikov::Resonance;
using specfun::EllipticModulus;
using systems::FamilyKind;
using systems::ForcedPlanarSystem;

namespace {

struct Common {
    std::string out = ".";
    std::string format = "csv";
    long seed = 20240601;
    double tol = 1e-9;
};

void add_common(CLI::App* cmd, Common& c) {
    cmd->add_option("--out", c.out, "output directory")->capture_default_str();
    cmd->add_option("--format", c.format, "csv|json")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
    cmd->add_option("--seed", c.seed, "seed for randomized sweeps")->capture_default_str();
    cmd->add_option("--tol", c.tol, "tolerance knob where applicable")->capture_default_str();
}

Format fmt_of(const Common& c) { return c.format == "json" ? Format::json : Format::csv; }

fs::path out_path(const Common& c, const std::string& stem) {
    fs::create_directories(c.out);
    return fs::path(c.out) / (stem + (c.format == "json" ? ".json" : ".csv"));
}

FamilyKind family_of(const std::string& name, double a) {
    if (name == "interior" || name == "interior_plus") return FamilyKind::duffing_interior_plus;
    if (name == "interior_minus") return FamilyKind::duffing_interior_minus;
    if (name == "exterior") return FamilyKind::duffing_exterior;
    if (name == "soft") return FamilyKind::duffing_soft;
    if (name == "auto") // the natural family of the case
        return a > 0 ? FamilyKind::duffing_interior_plus : FamilyKind::duffing_soft;
    throw DomainError("unknown family: " + name);
}

DuffingCase case_of(FamilyKind kind) {
    switch (kind) {
    case FamilyKind::duffing_interior_plus:
    case FamilyKind::duffing_interior_minus: return DuffingCase::interior;
    case FamilyKind::duffing_exterior: return DuffingCase::exterior;
    case FamilyKind::duffing_soft: return DuffingCase::soft;
    default: return DuffingCase::homoclinic;
    }
}

std::vector<std::pair<std::string, std::string>> base_meta(const std::string& command,
                                                           const Common& c) {
    return {{"tool", "melkit"},
            {"command", command},
            {"format", c.format},
            {"seed", std::to_string(c.seed)},
            {"tol", io::format_full(c.tol)}};
}

// ---- sub ------------------------------------------------------------------

struct SubArgs {
    Common common;
    std::string system = "duffing";
    double a = 1.0, beta = 1.0, delta = 0.0;
    double nu = 0.0, nu_from_k = 0.0;
    int l = 1, n = 1, phi_grid = 64;
    std::string family = "auto";
    int sign = +1;
};

int cmd_sub(const SubArgs& args) {
    if (args.system != "duffing")
        throw DomainError("sub: only the duffing catalog entry has orbit families");
    FamilyKind kind = family_of(args.family, args.a);
    if (kind == FamilyKind::duffing_interior_plus && args.sign < 0)
        kind = FamilyKind::duffing_interior_minus;
    const Resonance res{args.l, args.n};
    double nu = args.nu;
    if (args.nu_from_k > 0.0)
        nu = melnikov::resonance_nu(kind, EllipticModulus::from_k(args.nu_from_k), res);
    if (!(nu > 0.0)) throw DomainError("sub: provide --nu or --nu-from-k");

    const ForcedPlanarSystem sys = systems::make_duffing(args.a, args.beta, args.delta, nu);
    const systems::OrbitFamily fam = systems::orbit_family(sys, kind);
    const EllipticModulus k = melnikov::solve_resonance(kind, nu, res);
    const MelnikovCurve q = melnikov::subharmonic_melnikov(sys, fam, k, res, args.phi_grid);

    Table t;
    t.meta = base_meta("sub", args.common);
    t.meta.emplace_back("a", io::format_full(args.a));
    t.meta.emplace_back("family", args.family);
    t.meta.emplace_back("l", std::to_string(args.l));
    t.meta.emplace_back("n", std::to_string(args.n));
    t.meta.emplace_back("nu", io::format_full(nu));
    t.meta.emplace_back("beta", io::format_full(args.beta));
    t.meta.emplace_back("delta", io::format_full(args.delta));
    t.meta.emplace_back("k", io::format_full(k.k()));
    t.meta.emplace_back("kprime", io::format_full(k.kprime()));
    t.meta.emplace_back("phi_grid", std::to_string(args.phi_grid));
    t.meta.emplace_back("quadrature_nodes", std::to_string(q.quadrature_nodes));
    t.columns = {"phi", "M_quadrature", "M_closed_form", "abs_diff"};
    const int sgn = kind == FamilyKind::duffing_interior_minus ? -1 : +1;
    double worst = 0.0;
    for (std::size_t i = 0; i < q.phi.size(); ++i) {
        const double cf = melnikov::closed_form_duffing(case_of(kind), sgn, k, res, args.delta,
                                                        args.beta, nu, q.phi[i]);
        const double d = std::abs(q.values[i] - cf);
        worst = std::max(worst, d);
        t.rows.push_back({q.phi[i], q.values[i], cf, d});
    }
    t.meta.emplace_back("max_abs_diff", io::format_full(worst));
    io::emit_table(t, out_path(args.common, "sub"), fmt_of(args.common));
    return 0;
}

// ---- hom ------------------------------------------------------------------

struct HomArgs {
    Common common;
    double beta = 1.0, delta = 0.0, nu = 1.0, tail_tol = 1e-12;
    int phi_grid = 64, sign = +1;
};

int cmd_hom(const HomArgs& args) {
    const ForcedPlanarSystem sys = systems::make_duffing(1.0, args.beta, args.delta, args.nu);
    const MelnikovCurve q =
        melnikov::homoclinic_melnikov(sys, args.sign, args.phi_grid, args.tail_tol);

    Table t;
    t.meta = base_meta("hom", args.common);
    t.meta.emplace_back("sign", std::to_string(args.sign));
    t.meta.emplace_back("nu", io::format_full(args.nu));
    t.meta.emplace_back("beta", io::format_full(args.beta));
    t.meta.emplace_back("delta", io::format_full(args.delta));
    t.meta.emplace_back("tail_tol", io::format_full(args.tail_tol));
    t.meta.emplace_back("phi_grid", std::to_string(args.phi_grid));
    t.meta.emplace_back("quadrature_nodes", std::to_string(q.quadrature_nodes));
    t.columns = {"phi", "M_quadrature", "M_closed_form", "abs_diff"};
    double worst = 0.0;
    for (std::size_t i = 0; i < q.phi.size(); ++i) {
        const double cf = melnikov::closed_form_duffing(DuffingCase::homoclinic, args.sign, {},
                                                        {}, args.delta, args.beta, args.nu,
                                                        q.phi[i]);
        const double d = std::abs(q.values[i] - cf);
        worst = std::max(worst, d);
        t.rows.push_back({q.phi[i], q.values[i], cf, d});
    }
    t.meta.emplace_back("max_abs_diff", io::format_full(worst));
    io::emit_table(t, out_path(args.common, "hom"), fmt_of(args.common));
    return 0;
}

// ---- resonances -------------------------------------------------------------

struct ResArgs {
    Common common;
    std::string system = "duffing";
    double a = 1.0, nu = 1.0, beta = 0.0;
    std::string family = "auto";
    int l_max = 3, n_max = 8, denom_bound = 8, max_points = 64;
};

int cmd_resonances(const ResArgs& args) {
    Table t;
    t.meta = base_meta("resonances", args.common);
    t.meta.emplace_back("system", args.system);

    if (args.system == "duffing") {
        const FamilyKind kind = family_of(args.family, args.a);
        t.meta.emplace_back("a", io::format_full(args.a));
        t.meta.emplace_back("family", args.family);
        t.meta.emplace_back("nu", io::format_full(args.nu));
        t.columns = {"l", "n", "k", "kprime", "period", "nu_check"};
        for (int l = 1; l <= args.l_max; ++l)
            for (int n = 1; n <= args.n_max; ++n) {
                if (std::gcd(l, n) != 1) continue;
                try {
                    const EllipticModulus k = melnikov::solve_resonance(kind, args.nu, {l, n});
                    const systems::OrbitFamily fam{kind, {0, 1}, 0};
                    const double T = fam.period(k);
                    t.rows.push_back({static_cast<double>(l), static_cast<double>(n), k.k(),
                                      k.kprime(), T, 2.0 * M_PI * n / (l * T)});
                } catch (const NoResonanceError&) {
                    // outside the attainable band; skip
                }
            }
    } else {
        systems::ActionAngleSystem sys;
        std::vector<std::pair<double, double>> box;
        if (args.system == "pendulum") {
            sys = systems::make_pendulum_torque(args.beta);
            box = {{0.5, 2.5}};
        } else if (args.system == "coupled") {
            systems::CoupledParams p;
            p.ell = 2;
            p.Omega = {1.0, 1.0};
            p.coeffs[{1, 1}] = 0.5;
            sys = systems::make_coupled_oscillators(p);
            box = {{1.0, 1.0}, {1.05, 2.02}};
        } else {
            throw DomainError("resonances: unknown system " + args.system);
        }
        t.columns = {"denominator", "omega0"};
        for (int d = 0; d < sys.ell; ++d) t.columns.push_back("I" + std::to_string(d + 1));
        const auto found =
            actionangle::detect_resonant_actions(sys, box, args.denom_bound, args.max_points);
        for (const auto& ra : found) {
            std::vector<double> row = {static_cast<double>(ra.denominator),
                                       ra.lattice.omega0.value_or(0.0)};
            for (double v : ra.I) row.push_back(v);
            t.rows.push_back(std::move(row));
        }
    }
    io::emit_table(t, out_path(args.common, "resonances"), fmt_of(args.common));
    return 0;
}

// ---- limit ------------------------------------------------------------------

struct LimitArgs {
    Common common;
    double beta = 1.0, delta = 0.2, nu = 1.0;
    std::vector<int> l_list = {1, 2, 3, 5, 8};
    int phi_grid = 64;
};

int cmd_limit(const LimitArgs& args) {
    const ForcedPlanarSystem sys = systems::make_duffing(1.0, args.beta, args.delta, args.nu);
    const auto sup = melnikov::melnikov_limit_check(sys, args.nu, args.l_list, args.phi_grid);

    Table t;
    t.meta = base_meta("limit", args.common);
    t.meta.emplace_back("nu", io::format_full(args.nu));
    t.meta.emplace_back("beta", io::format_full(args.beta));
    t.meta.emplace_back("delta", io::format_full(args.delta));
    t.columns = {"l", "sup_diff"};
    for (std::size_t i = 0; i < sup.size(); ++i)
        t.rows.push_back({static_cast<double>(args.l_list[i]), sup[i]});
    t.meta.emplace_back("final_over_first",
                        io::format_full(sup.empty() ? 0.0 : sup.back() / sup.front()));
    io::emit_table(t, out_path(args.common, "limit"), fmt_of(args.common));
    return 0;
}

// ---- persist ----------------------------------------------------------------

struct PersistArgs {
    Common common;
    double beta = 1.0, delta = 0.1, nu = 1.0, eps = 1e-3;
    int phi_grid = 64;
};

int cmd_persist(const PersistArgs& args) {
    const ForcedPlanarSystem sys = systems::make_duffing(1.0, args.beta, args.delta, args.nu);
    const FamilyKind kind = FamilyKind::duffing_interior_plus;
    const systems::OrbitFamily fam = systems::orbit_family(sys, kind);
    const Resonance res{1, 1};
    const EllipticModulus k = melnikov::solve_resonance(kind, args.nu, res);
    const MelnikovCurve curve = melnikov::subharmonic_melnikov(sys, fam, k, res, args.phi_grid);
    const auto zeros = melnikov::simple_zero_scan(curve);

    Table t;
    t.meta = base_meta("persist", args.common);
    t.meta.emplace_back("nu", io::format_full(args.nu));
    t.meta.emplace_back("beta", io::format_full(args.beta));
    t.meta.emplace_back("delta", io::format_full(args.delta));
    t.meta.emplace_back("eps", io::format_full(args.eps));
    t.meta.emplace_back("k", io::format_full(k.k()));
    t.columns = {"zero_phi", "is_simple", "converged", "residual", "iterations", "x1", "x2"};

    std::vector<systems::Vec2> fixed_points;
    for (const auto& z : zeros) {
        if (!z.is_simple) continue;
        // Seed with the orbit point that sits at forcing phase 0 when the
        // persisting orbit passes phase z.phi.
        const systems::Vec2 seed = fam.orbit(k, -z.phi / args.nu);
        const auto r = ode::newton_shoot_periodic(sys, args.eps, seed, 0.0, res.n,
                                                  args.common.tol);
        t.rows.push_back({z.phi, 1.0, r.converged ? 1.0 : 0.0, r.residual,
                          static_cast<double>(r.iterations), r.point[0], r.point[1]});
        if (r.converged) {
            bool dup = false;
            for (const auto& p : fixed_points)
                if (std::hypot(p[0] - r.point[0], p[1] - r.point[1]) < 1e-4) dup = true;
            if (!dup) fixed_points.push_back(r.point);
        }
    }
    t.meta.emplace_back("simple_zero_count",
                        std::to_string(std::count_if(zeros.begin(), zeros.end(),
                                                     [](const auto& z) { return z.is_simple; })));
    t.meta.emplace_back("distinct_fixed_points", std::to_string(fixed_points.size()));
    io::emit_table(t, out_path(args.common, "persist"), fmt_of(args.common));
    return 0;
}

// ---- scan -------------------------------------------------------------------

struct ScanArgs {
    Common common;
    std::vector<double> nu_list = {0.5, 1.0, 2.0};
    double margin = 0.01;
    int phi_grid = 256;
};

int cmd_scan(const ScanArgs& args) {
    Table t;
    t.meta = base_meta("scan", args.common);
    t.meta.emplace_back("margin", io::format_full(args.margin));
    t.columns = {"nu", "threshold", "zeros_below", "zeros_above"};
    for (double nu : args.nu_list) {
        const double thr = melnikov::chaos_threshold(nu);
        auto count = [&](double factor) {
            const ForcedPlanarSystem sys = systems::make_duffing(1.0, 1.0, thr * factor, nu);
            const MelnikovCurve c = melnikov::homoclinic_melnikov(sys, +1, args.phi_grid, 1e-12);
            const auto zeros = melnikov::simple_zero_scan(c);
            return static_cast<double>(
                std::count_if(zeros.begin(), zeros.end(), [](const auto& z) { return z.is_simple; }));
        };
        t.rows.push_back({nu, thr, count(1.0 - args.margin), count(1.0 + args.margin)});
    }
    io::emit_table(t, out_path(args.common, "scan"), fmt_of(args.common));
    return 0;
}

// ---- verdict ----------------------------------------------------------------

struct VerdictArgs {
    Common common;
    std::string system = "pendulum";
    std::string part = "i";    // coupled: i | ii
    std::string mode = "sub";  // duffing a=1: sub | hom
    double a = 1.0, beta = 0.7, delta = 0.2, nu = 1.0;
};

int cmd_verdict(const VerdictArgs& args) {
    criteria::Report rep;
    std::string tag;
    if (args.system == "pendulum") {
        rep = criteria::report_pendulum(args.beta);
        tag = "pendulum";
    } else if (args.system == "coupled") {
        systems::CoupledParams p;
        p.ell = 2;
        p.delta = 0.05;
        p.Omega = {1.0, 1.3};
        if (args.part == "i") {
            p.coeffs[{1, 1}] = 0.8; // second-order Kuramoto coupling
            p.decay_M = 1.0;
            p.decay_rate = 0.0;
            rep = criteria::report_coupled_mean(p);
            tag = "coupled_i";
        } else {
            p.decay_M = 0.5;
            p.decay_rate = 0.5;
            p.truncation = 20;
            p.coeffs = systems::full_coupling_table(p.decay_M, p.decay_rate, p.truncation);
            rep = criteria::report_coupled_accumulation(p);
            tag = "coupled_ii";
        }
    } else if (args.system == "duffing") {
        if (args.a > 0) {
            if (args.mode == "hom") {
                rep = criteria::report_duffing_hard_homoclinic(1.0, 0.2, 1.0);
                tag = "duffing_a1_hom";
            } else {
                rep = criteria::report_duffing_hard_subharmonic(1.0, 0.2, 1.0);
                tag = "duffing_a1_sub";
            }
        } else {
            rep = criteria::report_duffing_soft(1.0, 0.2, 1.3);
            tag = "duffing_am1";
        }
    } else {
        throw DomainError("verdict: unknown system " + args.system);
    }
    fs::create_directories(args.common.out);
    const fs::path path = fs::path(args.common.out) / ("verdict_" + tag + ".json");
    io::write_text_file(path, criteria::report_to_string(rep));
    std::cout << path.string() << "\n";
    return 0;
}

} // namespace

int run_cli(int argc, const char* const* argv) {
    CLI::App app{"Melnikov-function and resonance-obstruction toolkit"};
    app.require_subcommand(1);
    app.fallthrough(true); // lets --config appear after the subcommand name
    app.set_config("--config", "",
                   "key=value config file with one [section] per subcommand; flags override");

    SubArgs sub;
    auto* csub = app.add_subcommand("sub", "subharmonic Melnikov curve, quadrature vs closed form");
    add_common(csub, sub.common);
    csub->add_option("--system", sub.system, "system name (duffing)")->capture_default_str();
    csub->add_option("--a", sub.a, "spring sign, +1 or -1")->capture_default_str();
    csub->add_option("--family", sub.family, "interior|interior_minus|exterior|soft|auto")
        ->capture_default_str();
    csub->add_option("--l", sub.l, "orbit-period multiple")->capture_default_str();
    csub->add_option("--n", sub.n, "forcing-period multiple")->capture_default_str();
    csub->add_option("--nu", sub.nu, "forcing frequency");
    csub->add_option("--nu-from-k", sub.nu_from_k, "choose nu so that k is resonant for (l,n)");
    csub->add_option("--beta", sub.beta, "forcing amplitude")->capture_default_str();
    csub->add_option("--delta", sub.delta, "damping")->capture_default_str();
    csub->add_option("--phi-grid", sub.phi_grid, "phi grid size")->capture_default_str();
    csub->add_option("--sign", sub.sign, "family branch for interior: +1|-1")
        ->capture_default_str();

    HomArgs hom;
    auto* chom = app.add_subcommand("hom", "homoclinic Melnikov curve, quadrature vs closed form");
    add_common(chom, hom.common);
    chom->add_option("--sign", hom.sign, "+1|-1 homoclinic branch")->capture_default_str();
    chom->add_option("--nu", hom.nu, "forcing frequency")->capture_default_str();
    chom->add_option("--beta", hom.beta, "forcing amplitude")->capture_default_str();
    chom->add_option("--delta", hom.delta, "damping")->capture_default_str();
    chom->add_option("--tail-tol", hom.tail_tol, "discarded-tail bound")->capture_default_str();
    chom->add_option("--phi-grid", hom.phi_grid, "phi grid size")->capture_default_str();

    ResArgs res;
    auto* cres = app.add_subcommand("resonances", "resonant moduli / resonant actions");
    add_common(cres, res.common);
    cres->add_option("--system", res.system, "duffing|pendulum|coupled")->capture_default_str();
    cres->add_option("--a", res.a, "spring sign")->capture_default_str();
    cres->add_option("--family", res.family, "orbit family")->capture_default_str();
    cres->add_option("--nu", res.nu, "forcing frequency")->capture_default_str();
    cres->add_option("--beta", res.beta, "pendulum torque modulation")->capture_default_str();
    cres->add_option("--l-max", res.l_max, "max orbit multiple")->capture_default_str();
    cres->add_option("--n-max", res.n_max, "max forcing multiple")->capture_default_str();
    cres->add_option("--denom-bound", res.denom_bound, "rational-detection bound")
        ->capture_default_str();
    cres->add_option("--max-points", res.max_points, "cap on reported actions")
        ->capture_default_str();

    LimitArgs lim;
    auto* clim = app.add_subcommand("limit", "long-period subharmonic vs homoclinic curves");
    add_common(clim, lim.common);
    clim->add_option("--nu", lim.nu, "forcing frequency")->capture_default_str();
    clim->add_option("--beta", lim.beta, "forcing amplitude")->capture_default_str();
    clim->add_option("--delta", lim.delta, "damping")->capture_default_str();
    clim->add_option("--l", lim.l_list, "comma list of forcing-period multiples")
        ->delimiter(',')
        ->capture_default_str();
    clim->add_option("--phi-grid", lim.phi_grid, "phi grid size")->capture_default_str();

    PersistArgs per;
    auto* cper = app.add_subcommand("persist", "Newton shooting from subharmonic Melnikov zeros");
    add_common(cper, per.common);
    cper->add_option("--nu", per.nu, "forcing frequency")->capture_default_str();
    cper->add_option("--beta", per.beta, "forcing amplitude")->capture_default_str();
    cper->add_option("--delta", per.delta, "damping")->capture_default_str();
    cper->add_option("--eps", per.eps, "perturbation size")->capture_default_str();
    cper->add_option("--phi-grid", per.phi_grid, "phi grid size")->capture_default_str();

    ScanArgs scn;
    auto* cscn = app.add_subcommand("scan", "simple-zero counts across the chaos threshold");
    add_common(cscn, scn.common);
    cscn->add_option("--nu-list", scn.nu_list, "comma list of frequencies")
        ->delimiter(',')
        ->capture_default_str();
    cscn->add_option("--margin", scn.margin, "relative offset around the threshold")
        ->capture_default_str();
    cscn->add_option("--phi-grid", scn.phi_grid, "phi grid size")->capture_default_str();

    VerdictArgs ver;
    auto* cver = app.add_subcommand("verdict", "theorem-level verdict report (JSON)");
    add_common(cver, ver.common);
    cver->add_option("--system", ver.system, "pendulum|coupled|duffing")->capture_default_str();
    cver->add_option("--part", ver.part, "coupled: i|ii")->capture_default_str();
    cver->add_option("--mode", ver.mode, "duffing a=1: sub|hom")->capture_default_str();
    cver->add_option("--a", ver.a, "spring sign")->capture_default_str();
    cver->add_option("--beta", ver.beta, "pendulum torque modulation")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) { // --help
            app.exit(e);
            return 0;
        }
        std::cerr << "usage error: " << e.what() << "\n";
        return 64;
    }

    try {
        if (csub->parsed()) return cmd_sub(sub);
        if (chom->parsed()) return cmd_hom(hom);
        if (cres->parsed()) return cmd_resonances(res);
        if (clim->parsed()) return cmd_limit(lim);
        if (cper->parsed()) return cmd_persist(per);
        if (cscn->parsed()) return cmd_scan(scn);
        if (cver->parsed()) return cmd_verdict(ver);
        return 64;
    } catch (const DomainError& e) {
        std::cerr << "domain error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 1;
    }
}

} // namespace melkit::cli
