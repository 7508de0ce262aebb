// Command-line front end: formula evaluation, Monte Carlo experiments,
// moment integrations, and the invariant suite. Every run writes a manifest
// JSON next to its outputs.
//
// Exit codes: 0 = all checks pass, 2 = statistical failure, 3 = domain or
// usage error.

#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>

#include <CLI11.hpp>

#include "sle83/sle83.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace sle83;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitStatFail = 2;
constexpr int kExitUsage = 3;

// Points arrive as "a+bi" strings (no parentheses, shell friendly).
Complex parse_complex(const std::string& raw) {
    std::string s;
    for (char ch : raw)
        if (!std::isspace(static_cast<unsigned char>(ch))) s.push_back(ch);
    if (s.empty()) throw std::invalid_argument("empty complex literal");
    double re = 0.0, im = 0.0;
    if (s.back() == 'i' || s.back() == 'I') {
        s.pop_back();
        // split at the last top-level +/- (not an exponent sign, not leading)
        std::size_t split = std::string::npos;
        for (std::size_t i = s.size(); i-- > 1;) {
            if ((s[i] == '+' || s[i] == '-') && s[i - 1] != 'e' && s[i - 1] != 'E') {
                split = i;
                break;
            }
        }
        std::string im_str;
        if (split == std::string::npos) {
            im_str = s;
        } else {
            re = std::stod(s.substr(0, split));
            im_str = s.substr(split);
        }
        if (im_str.empty() || im_str == "+")
            im = 1.0;
        else if (im_str == "-")
            im = -1.0;
        else
            im = std::stod(im_str);
    } else {
        re = std::stod(s);
    }
    return {re, im};
}

HalfPlanePoint parse_point(const std::string& raw) {
    const Complex z = parse_complex(raw);
    return HalfPlanePoint(z);
}

// "min:max:n" -> n equally spaced values
std::vector<double> parse_axis(const std::string& spec) {
    const auto c1 = spec.find(':');
    const auto c2 = spec.find(':', c1 + 1);
    if (c1 == std::string::npos || c2 == std::string::npos)
        throw std::invalid_argument("grid axis must be min:max:n");
    const double lo = std::stod(spec.substr(0, c1));
    const double hi = std::stod(spec.substr(c1 + 1, c2 - c1 - 1));
    const int n = std::stoi(spec.substr(c2 + 1));
    if (n < 1) throw std::invalid_argument("grid axis needs n >= 1");
    std::vector<double> vals;
    for (int i = 0; i < n; ++i)
        vals.push_back(n == 1 ? lo : lo + (hi - lo) * i / static_cast<double>(n - 1));
    return vals;
}

std::string timestamp_utc() {
    char buf[32];
    const std::time_t now = std::time(nullptr);
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    return buf;
}

struct Manifest {
    json doc;

    Manifest(const std::string& subcommand, int argc, char** argv) {
        doc["subcommand"] = subcommand;
        doc["code_version"] = kCodeVersion;
        doc["timestamp"] = timestamp_utc();
        json args = json::array();
        for (int i = 0; i < argc; ++i) args.push_back(argv[i]);
        doc["argv"] = args;
        doc["outputs"] = json::array();
    }

    void add_output(const fs::path& p) { doc["outputs"].push_back(p.string()); }

    void write(const fs::path& dir, const std::string& stem) {
        const fs::path p = dir / (stem + ".manifest.json");
        std::ofstream out(p);
        out << doc.dump(2) << '\n';
    }
};

fs::path output_dir(const std::string& flag_value) {
    if (!flag_value.empty()) return flag_value;
    if (const char* env = std::getenv("SLE83_OUTDIR")) return env;
    return ".";
}

void print_value(double v) {
    std::cout << std::setprecision(15) << v << '\n';
}

// ---- eval ------------------------------------------------------------------

struct EvalArgs {
    std::string z, w, grid;
    double R = 1.0, eps = 0.0, delta = 0.0, r = 0.0, sigma_arg = -1.0, tol = 1e-12;
    double a = 0.0, b = 0.0, c = 0.0, x = 0.0, t = 0.0, h = 1e-5;
};

int run_eval(const std::string& formula, const EvalArgs& a, const std::string& out_flag,
             Manifest& manifest) {
    const auto need_z = [&] { return parse_point(a.z); };
    const auto need_w = [&] { return parse_point(a.w); };

    const std::map<std::string, std::function<double()>> registry = {
        {"gamma", [&] { return gamma_fn(a.x); }},
        {"hyp2f1", [&] { return hyp2f1(a.a, a.b, a.c, a.x, a.tol); }},
        {"G", [&] { return hypergeometric_G(a.sigma_arg); }},
        {"g_ode_residual", [&] { return g_ode_residual(a.t, a.h); }},
        {"sigma", [&] { return sigma(need_z(), need_w()); }},
        {"left_passage_one", [&] { return left_passage_one(need_z()); }},
        {"left_passage_two", [&] { return left_passage_two(need_z(), need_w()); }},
        {"separation_probability", [&] { return separation_probability(need_z(), need_w()); }},
        {"green_limit", [&] { return green_limit(need_z()); }},
        {"bubble_one_point_coeff", [&] { return bubble_one_point_coeff(need_z()); }},
        {"bubble_two_point_coeff", [&] { return bubble_two_point_coeff(need_z(), need_w()); }},
        {"bubble_in_disk_one_coeff", [&] { return bubble_in_disk_one_coeff(need_z(), a.R); }},
        {"bubble_in_disk_two_coeff",
         [&] { return bubble_in_disk_two_coeff(need_z(), need_w(), a.R); }},
        {"bubble_escape_expansion",
         [&] { return bubble_escape_expansion(a.R, a.delta, a.eps); }},
        {"bulk_containment", [&] { return bulk_containment(need_z(), need_w()); }},
        {"radius_cdf", [&] { return radius_cdf(a.r, need_z()); }},
        {"bulk_containment_in_disk",
         [&] { return bulk_containment_in_disk(need_z(), need_w(), a.R); }},
        {"touch_radius_one_point", [&] { return touch_radius_one_point(need_z()); }},
        {"area_integrand", [&] { return area_integrand(need_z(), need_w()); }},
        {"two_path_one_point", [&] { return two_path_one_point(need_z()); }},
        {"two_path_two_point", [&] { return two_path_two_point(need_z(), need_w()); }},
        {"two_path_in_not_in", [&] { return two_path_in_not_in(need_z(), need_w()); }},
    };

    const auto it = registry.find(formula);
    if (it == registry.end()) {
        std::cerr << "unknown formula '" << formula << "'; known:";
        for (const auto& [k, _] : registry) std::cerr << ' ' << k;
        std::cerr << '\n';
        return kExitUsage;
    }

    if (a.grid.empty()) {
        print_value(it->second());
        return kExitOk;
    }

    // grid sweep of --z: "re_min:re_max:n,im_min:im_max:n", CSV to stdout/file
    const auto comma = a.grid.find(',');
    if (comma == std::string::npos) throw std::invalid_argument("grid must have two axes");
    const auto re_axis = parse_axis(a.grid.substr(0, comma));
    const auto im_axis = parse_axis(a.grid.substr(comma + 1));
    const fs::path dir = output_dir(out_flag);
    fs::create_directories(dir);
    const fs::path csv_path = dir / ("eval_" + formula + "_grid.csv");
    std::ofstream csv(csv_path);
    csv << "re,im,value\n" << std::setprecision(15);
    const auto sweep_value = [&](Complex zz) -> double {
        const HalfPlanePoint p{zz};
        if (formula == "left_passage_one") return left_passage_one(p);
        if (formula == "two_path_one_point") return two_path_one_point(p);
        if (formula == "green_limit") return green_limit(p);
        if (formula == "touch_radius_one_point") return touch_radius_one_point(p);
        if (formula == "bubble_one_point_coeff") return bubble_one_point_coeff(p);
        if (formula == "left_passage_two") return left_passage_two(p, need_w());
        if (formula == "two_path_two_point") return two_path_two_point(p, need_w());
        if (formula == "bulk_containment") return bulk_containment(p, need_w());
        if (formula == "area_integrand") return area_integrand(p, need_w());
        throw std::invalid_argument("grid mode not supported for " + formula);
    };
    for (double im : im_axis)
        for (double re : re_axis) {
            double v = std::numeric_limits<double>::quiet_NaN();
            try {
                v = sweep_value(Complex{re, im});
            } catch (const std::domain_error&) {
                // outside the formula's domain; emit NaN
            }
            csv << re << ',' << im << ',' << v << '\n';
        }
    manifest.add_output(csv_path);
    std::cout << "wrote " << csv_path.string() << '\n';
    return kExitOk;
}

// ---- mc --------------------------------------------------------------------

int run_mc(const std::string& experiment, const std::vector<std::string>& z_flags,
           const std::vector<std::string>& w_flags, std::uint64_t n, SimConfig cfg,
           const std::string& times_csv, unsigned threads, const std::string& out_flag,
           Manifest& manifest) {
    const fs::path dir = output_dir(out_flag);
    fs::create_directories(dir);

    std::vector<ExperimentRecord> records;
    if (experiment == "one-point") {
        std::vector<HalfPlanePoint> pts;
        for (const auto& s : z_flags) pts.push_back(parse_point(s));
        if (pts.empty()) throw std::invalid_argument("mc one-point needs at least one --z");
        records = run_one_point(pts, n, cfg, threads);
    } else if (experiment == "two-point") {
        if (z_flags.size() != w_flags.size() || z_flags.empty())
            throw std::invalid_argument("mc two-point needs matching --z/--w lists");
        std::vector<std::pair<HalfPlanePoint, HalfPlanePoint>> pairs;
        for (std::size_t i = 0; i < z_flags.size(); ++i)
            pairs.emplace_back(parse_point(z_flags[i]), parse_point(w_flags[i]));
        records = run_two_point(pairs, n, cfg, threads);
    } else if (experiment == "martingale") {
        if (z_flags.size() != 1 || w_flags.size() != 1)
            throw std::invalid_argument("mc martingale needs one --z and one --w");
        std::vector<double> times;
        std::stringstream ss(times_csv);
        std::string tok;
        while (std::getline(ss, tok, ',')) times.push_back(std::stod(tok));
        if (times.empty()) throw std::invalid_argument("mc martingale needs --times");
        records = run_martingale_test(parse_point(z_flags[0]), parse_point(w_flags[0]), times,
                                      n, cfg, threads);
    } else {
        throw std::invalid_argument("unknown mc experiment '" + experiment + "'");
    }

    const fs::path rec_path = dir / ("mc_" + experiment + "_records.jsonl");
    const fs::path csv_path = dir / ("mc_" + experiment + "_summary.csv");
    persist_records(records, rec_path.string());
    std::ofstream(csv_path) << csv_summary(records);
    manifest.add_output(rec_path);
    manifest.add_output(csv_path);

    std::cout << csv_summary(records);
    if (records.size() > 10)
        std::cout << "# note: " << records.size()
                  << " comparisons at 3 SE each; expect occasional marginal excursions "
                     "(Bonferroni)\n";
    bool ok = true;
    for (const auto& r : records)
        if (std::abs(r.z_score) > 3.0) ok = false;
    std::cout << (ok ? "PASS" : "FAIL") << ": all estimates within 3 SE brackets\n";
    return ok ? kExitOk : kExitStatFail;
}

// ---- integrate -------------------------------------------------------------

int run_integrate(const std::string& moment, double tol, std::uint64_t budget,
                  std::uint64_t seed, const std::string& out_flag, Manifest& manifest) {
    const fs::path dir = output_dir(out_flag);
    fs::create_directories(dir);
    const fs::path csv_path = dir / ("integrate_" + moment + ".csv");
    std::ofstream csv(csv_path);
    csv << "method,value,error,n_evaluations,budget,seed\n" << std::setprecision(15);

    std::cout << std::setprecision(10);
    if (moment == "first") {
        const auto r = integrate_first_moment(tol);
        csv << r.method << ',' << r.value << ',' << r.error_estimate << ','
            << r.n_evaluations << ',' << 0 << ',' << seed << '\n';
        std::cout << "first moment = " << r.value << "  (error estimate " << r.error_estimate
                  << ", evaluations " << r.n_evaluations << ")\n"
                  << "target pi/10  = " << M_PI / 10.0 << "  (difference "
                  << r.value - M_PI / 10.0 << ")\n";
        manifest.add_output(csv_path);
        return std::abs(r.value - M_PI / 10.0) < 1e-3 ? kExitOk : kExitStatFail;
    }
    if (moment == "second") {
        SecondMomentReport rep;
        if (budget >= 1000000) {
            rep = integrate_second_moment(budget, seed);
        } else {
            // small-budget path: MC only, wide error bars, still a valid run
            rep.mc = integrate_second_moment_mc(std::max<std::uint64_t>(budget, 100), seed);
            rep.deterministic = integrate_second_moment_det();
            rep.discrepancy = std::abs(rep.mc.value - rep.deterministic.value);
            rep.methods_agree = rep.discrepancy <= rep.mc.error_estimate +
                                                       rep.deterministic.error_estimate;
        }
        for (const auto* r : {&rep.mc, &rep.deterministic})
            csv << r->method << ',' << r->value << ',' << r->error_estimate << ','
                << r->n_evaluations << ',' << budget << ',' << seed << '\n';
        manifest.add_output(csv_path);
        const double ratio = rep.value() / ((M_PI / 10.0) * (M_PI / 10.0));
        std::cout << "second moment (stratified-mc)  = " << rep.mc.value << " +- "
                  << rep.mc.error_estimate << '\n'
                  << "second moment (deterministic)  = " << rep.deterministic.value
                  << "  (refinement difference " << rep.deterministic.error_estimate << ")\n"
                  << "method discrepancy             = " << rep.discrepancy
                  << (rep.methods_agree ? "  (methods agree)" : "  (METHODS DISAGREE)") << '\n'
                  << "target pi/30                   = " << M_PI / 30.0 << "  (value/"
                  << "target = " << rep.value() / (M_PI / 30.0) << ")\n"
                  << "ratio to (pi/10)^2             = " << ratio
                  << "  vs Airy prediction 10/(3 pi) = " << 10.0 / (3.0 * M_PI) << '\n';
        return rep.methods_agree ? kExitOk : kExitStatFail;
    }
    throw std::invalid_argument("moment must be 'first' or 'second'");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"closed-form SLE(8/3) probabilities, Loewner Monte Carlo, and bubble "
                 "area moments"};
    app.require_subcommand(1);
    std::string out_flag;
    unsigned threads = std::max(1u, std::thread::hardware_concurrency());
    app.add_option("--out", out_flag, "output directory (default $SLE83_OUTDIR or .)");
    app.add_option("--threads", threads, "worker threads for MC experiments");

    // eval
    auto* eval = app.add_subcommand("eval", "evaluate a closed-form formula");
    std::string formula;
    EvalArgs ea;
    eval->add_option("formula", formula, "formula name")->required();
    eval->add_option("--z", ea.z, "point z as a+bi");
    eval->add_option("--w", ea.w, "point w as a+bi");
    eval->add_option("--R", ea.R, "disk radius");
    eval->add_option("--eps", ea.eps, "epsilon");
    eval->add_option("--delta", ea.delta, "delta");
    eval->add_option("--r", ea.r, "radius argument");
    eval->add_option("--sigma", ea.sigma_arg, "sigma in [0,1]");
    eval->add_option("--a", ea.a, "2F1 parameter a");
    eval->add_option("--b", ea.b, "2F1 parameter b");
    eval->add_option("--c", ea.c, "2F1 parameter c");
    eval->add_option("--x", ea.x, "argument (2F1 / gamma)");
    eval->add_option("--t", ea.t, "ODE residual location");
    eval->add_option("--step", ea.h, "ODE residual finite-difference step");
    eval->add_option("--tol", ea.tol, "series tolerance");
    eval->add_option("--grid", ea.grid, "sweep --z over re_min:re_max:n,im_min:im_max:n");

    // mc
    auto* mc = app.add_subcommand("mc", "Monte Carlo experiment vs the exact formulas");
    std::string experiment, times_csv = "0.01,0.1,1";
    std::vector<std::string> z_flags, w_flags;
    std::uint64_t n_samples = 100000;
    SimConfig cfg;
    mc->add_option("experiment", experiment, "one-point | two-point | martingale")->required();
    mc->add_option("--z", z_flags, "point(s) z as a+bi");
    mc->add_option("--w", w_flags, "point(s) w as a+bi");
    mc->add_option("--n", n_samples, "number of driver samples");
    mc->add_option("--seed", cfg.seed, "RNG seed");
    mc->add_option("--dt", cfg.dt, "base capacity step");
    mc->add_option("--dt-growth", cfg.dt_growth, "geometric step growth rate");
    mc->add_option("--t-max", cfg.t_max, "capacity horizon");
    mc->add_option("--escape", cfg.y_escape, "stop modulus");
    mc->add_option("--ratio", cfg.ratio_threshold, "decision ratio threshold");
    mc->add_option("--times", times_csv, "martingale sample times, comma separated");

    // integrate
    auto* integ = app.add_subcommand("integrate", "area-moment integrals");
    std::string moment;
    double tol = 1e-3;
    std::uint64_t budget = 1000000, iseed = 1;
    integ->add_option("moment", moment, "first | second")->required();
    integ->add_option("--tol", tol, "deterministic tolerance (first moment)");
    integ->add_option("--budget", budget, "MC evaluation budget (second moment)");
    integ->add_option("--seed", iseed, "MC seed");

    // verify
    auto* verify = app.add_subcommand("verify", "run the invariant suite");
    bool quick = false;
    verify->add_flag("--quick", quick, "sub-second subset");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*eval) {
            Manifest m("eval", argc, argv);
            const int rc = run_eval(formula, ea, out_flag, m);
            if (!ea.grid.empty()) m.write(output_dir(out_flag), "eval_" + formula);
            return rc;
        }
        if (*mc) {
            Manifest m("mc", argc, argv);
            m.doc["cfg"] = to_json(cfg);
            m.doc["n"] = n_samples;
            const int rc = run_mc(experiment, z_flags, w_flags, n_samples, cfg, times_csv,
                                  threads, out_flag, m);
            m.write(output_dir(out_flag), "mc_" + experiment);
            return rc;
        }
        if (*integ) {
            Manifest m("integrate", argc, argv);
            m.doc["budget"] = budget;
            m.doc["seed"] = iseed;
            m.doc["tol"] = tol;
            const int rc = run_integrate(moment, tol, budget, iseed, out_flag, m);
            m.write(output_dir(out_flag), "integrate_" + moment);
            return rc;
        }
        if (*verify) {
            const auto results = run_verification(quick);
            bool ok = true;
            for (const auto& r : results) {
                std::cout << (r.pass ? "PASS " : "FAIL ") << r.name;
                if (!r.detail.empty()) std::cout << "  [" << r.detail << "]";
                std::cout << '\n';
                ok = ok && r.pass;
            }
            std::cout << (ok ? "all checks passed\n" : "some checks FAILED\n");
            return ok ? kExitOk : kExitStatFail;
        }
    } catch (const std::domain_error& e) {
        std::cerr << "domain error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitStatFail;
    }
    return kExitUsage;
}
