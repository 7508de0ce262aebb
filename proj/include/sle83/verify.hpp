// Invariant suite shared by the `verify` CLI subcommand and the test
// binaries: every module-level property that can be checked in seconds.
#pragma once

#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "sle83/mc.hpp"
#include "sle83/quadrature.hpp"

namespace sle83 {

struct CheckResult {
    std::string name;
    bool pass = false;
    std::string detail;
};

namespace detail {

class CheckRunner {
  public:
    explicit CheckRunner(bool quick) : quick_(quick) {}

    bool quick() const { return quick_; }

    void check(const std::string& name, const std::function<bool(std::string&)>& body) {
        CheckResult r;
        r.name = name;
        try {
            r.pass = body(r.detail);
        } catch (const std::exception& e) {
            r.pass = false;
            r.detail = std::string("exception: ") + e.what();
        }
        results_.push_back(std::move(r));
    }

    std::vector<CheckResult> take() { return std::move(results_); }

  private:
    bool quick_;
    std::vector<CheckResult> results_;
};

inline std::mt19937_64 verify_rng() { return std::mt19937_64(0x5e83babb1eULL); }

inline HalfPlanePoint random_point(std::mt19937_64& rng, double span = 3.0) {
    std::uniform_real_distribution<double> ur(-span, span);
    std::uniform_real_distribution<double> ui(1e-3, span);
    return {ur(rng), ui(rng)};
}

}  // namespace detail

inline void add_special_fn_checks(detail::CheckRunner& run) {
    run.check("special_fn.hyp2f1_ab_symmetry", [](std::string& msg) {
        const double cases[][4] = {{0.7, 1.9, 2.3, 0.4}, {1.0, 4.0 / 3.0, 5.0 / 3.0, 0.8},
                                   {0.3, 0.6, 1.1, -0.3}, {2.0, 0.5, 3.7, 0.95}};
        double worst = 0.0;
        for (const auto& c : cases)
            worst = std::max(worst, std::abs(hyp2f1(c[0], c[1], c[2], c[3]) -
                                             hyp2f1(c[1], c[0], c[2], c[3])));
        msg = "max |F(a,b)-F(b,a)| = " + std::to_string(worst);
        return worst < 1e-11;
    });
    run.check("special_fn.G_decreasing_in_unit_range", [](std::string& msg) {
        double prev = hypergeometric_G(0.0);
        for (int i = 1; i <= 1000; ++i) {
            const double g = hypergeometric_G(i / 1000.0);
            if (!(g < prev) || g < 0.0 || g > 1.0) {
                msg = "violated at sigma = " + std::to_string(i / 1000.0);
                return false;
            }
            prev = g;
        }
        return true;
    });
    run.check("special_fn.kummer_connection_identity", [](std::string& msg) {
        const double k = gamma_fn(2.0 / 3.0) * gamma_fn(5.0 / 3.0) / gamma_fn(4.0 / 3.0);
        double worst = 0.0;
        for (double t : {0.1, 0.3, 0.5, 0.7, 0.9}) {
            const double lhs = hyp2f1(1.0 / 3.0, 2.0 / 3.0, 5.0 / 3.0, t);
            const double rhs = -std::pow(1.0 - t, 2.0 / 3.0) *
                                   hyp2f1(4.0 / 3.0, 1.0, 5.0 / 3.0, 1.0 - t) +
                               k * std::pow(t, -2.0 / 3.0);
            worst = std::max(worst, std::abs(lhs - rhs));
        }
        msg = "max residual = " + std::to_string(worst);
        return worst < 1e-9;
    });
    run.check("special_fn.g_ode_residual_grid", [&](std::string& msg) {
        // G has a t^{1/3} endpoint singularity, so the central-difference
        // error grows like h^2 t^{-8/3}; scale h with t to keep it uniform.
        double worst = 0.0;
        for (int i = 1; i <= 999; ++i) {
            const double t = i / 1000.0;
            worst = std::max(worst, std::abs(g_ode_residual(t, 1e-5 * t)));
        }
        std::ostringstream os;
        os << "max |residual| = " << worst;
        msg = os.str();
        return worst < 1e-8;
    });
    run.check("special_fn.g_ode_residual_h2_convergence", [](std::string& msg) {
        const double r1 = std::abs(g_ode_residual(0.37, 1e-3));
        const double r2 = std::abs(g_ode_residual(0.37, 5e-4));
        msg = "ratio r(h)/r(h/2) = " + std::to_string(r1 / r2);
        return r1 / r2 > 3.0 && r1 / r2 < 5.0;  // O(h^2) halving gives ~4
    });
}

inline void add_exact_formula_checks(detail::CheckRunner& run) {
    run.check("exact_formulas.probability_range_random", [&](std::string& msg) {
        auto rng = detail::verify_rng();
        const int n = run.quick() ? 10000 : 100000;
        for (int i = 0; i < n; ++i) {
            const auto z = detail::random_point(rng);
            const auto w = detail::random_point(rng);
            // each throws beyond 1e-12 excursions
            left_passage_one(z);
            left_passage_two(z, w);
            separation_probability(z, w);
            bulk_containment(z, w);
            two_path_two_point(z, w);
            two_path_in_not_in(z, w);
        }
        msg = std::to_string(n) + " random configurations";
        return true;
    });
    run.check("exact_formulas.joint_below_marginals", [&](std::string& msg) {
        auto rng = detail::verify_rng();
        for (int i = 0; i < 2000; ++i) {
            const auto z = detail::random_point(rng);
            const auto w = detail::random_point(rng);
            const double joint = left_passage_two(z, w);
            if (joint > std::min(left_passage_one(z), left_passage_one(w)) + 1e-12) {
                msg = "joint exceeds a marginal";
                return false;
            }
        }
        return true;
    });
    run.check("exact_formulas.sigma_mobius_invariance", [&](std::string& msg) {
        auto rng = detail::verify_rng();
        double worst = 0.0;
        for (int i = 0; i < 200; ++i) {
            const auto z = detail::random_point(rng);
            const auto w = detail::random_point(rng);
            for (double eps : {0.01, 0.1, 1.0})
                worst = std::max(worst,
                                 std::abs(sigma(mobius_f_eps(z, eps), mobius_f_eps(w, eps)) -
                                          sigma(z, w)));
        }
        msg = "max deviation = " + std::to_string(worst);
        return worst < 1e-12;
    });
    run.check("exact_formulas.boundary_factorization", [](std::string& msg) {
        const HalfPlanePoint z{0.4, 1.3};
        double worst = 0.0;
        for (double v : {1e-3, 1e-5, 1e-7}) {
            const HalfPlanePoint w{-0.8, v};
            worst = std::max(worst, std::abs(left_passage_two(z, w) -
                                             left_passage_one(z) * left_passage_one(w)));
        }
        msg = "max gap at v = 1e-7: " + std::to_string(worst);
        return worst < 1e-4;
    });
    run.check("exact_formulas.scale_invariance", [&](std::string& msg) {
        auto rng = detail::verify_rng();
        double worst = 0.0;
        for (int i = 0; i < 500; ++i) {
            const auto z = detail::random_point(rng);
            const auto w = detail::random_point(rng);
            for (double lam : {0.37, 17.3}) {
                const HalfPlanePoint zl{lam * z.x, lam * z.y}, wl{lam * w.x, lam * w.y};
                worst = std::max(
                    {worst, std::abs(left_passage_one(z) - left_passage_one(zl)),
                     std::abs(left_passage_two(z, w) - left_passage_two(zl, wl)),
                     std::abs(two_path_one_point(z) - two_path_one_point(zl)),
                     std::abs(two_path_two_point(z, w) - two_path_two_point(zl, wl))});
            }
        }
        msg = "max deviation = " + std::to_string(worst);
        return worst < 1e-12;
    });
    run.check("exact_formulas.area_integrand_symmetry", [&](std::string& msg) {
        auto rng = detail::verify_rng();
        double worst = 0.0;
        int done = 0;
        while (done < 1000) {
            const Complex z = detail::HalfDiskSampler::draw(rng);
            const Complex w = detail::HalfDiskSampler::draw(rng);
            if (z.imag() <= 0.0 || w.imag() <= 0.0 || std::abs(z - w) < 1e-9) continue;
            const HalfPlanePoint pz{z}, pw{w};
            worst = std::max(worst, std::abs(area_integrand(pz, pw) - area_integrand(pw, pz)));
            ++done;
        }
        msg = "max |f(z,w)-f(w,z)| = " + std::to_string(worst);
        return worst < 1e-10;
    });
    run.check("exact_formulas.radius_distribution", [](std::string& msg) {
        // density 4(1 - |z|^2/r^2) |z|^2/r^3 integrates to 1; CDF nondecreasing
        for (double m : {0.5, 1.0, 2.0}) {
            const HalfPlanePoint z{0.6 * m, 0.8 * m};
            const auto g = detail::gauss_legendre_01(64);
            double mass = 0.0, expect = 0.0;
            for (int i = 0; i < 64; ++i) {
                // substitute u = |z|/r on (0,1]
                const double u = g.nodes[i];
                mass += g.weights[i] * 4.0 * u * (1.0 - u * u);
                expect += g.weights[i] * 4.0 * (1.0 - u * u) * m;
            }
            if (std::abs(mass - 1.0) > 1e-8 || std::abs(expect - 8.0 / 3.0 * m) > 1e-6) {
                msg = "mass/expectation off at |z| = " + std::to_string(m);
                return false;
            }
            double prev = -1.0;
            for (double r = 0.1 * m; r < 6.0 * m; r += 0.05 * m) {
                const double c = radius_cdf(r, z);
                if (c < prev) {
                    msg = "CDF decreasing at r = " + std::to_string(r);
                    return false;
                }
                prev = c;
            }
        }
        return true;
    });
    run.check("exact_formulas.green_limit_convergence", [](std::string& msg) {
        const HalfPlanePoint z{0.0, 1.0};
        const double target = green_limit(z);
        double last_rel = 1.0;
        for (double eps : {1e-2, 1e-3, 1e-4, 1e-5}) {
            for (int k = 0; k < 2; ++k) {
                const Complex eta = k == 0 ? Complex(1.0, 0.0) : Complex(0.0, 1.0);
                const HalfPlanePoint a{z.c() - eps * eta}, b{z.c() + eps * eta};
                const double ratio =
                    separation_probability(a, b) / std::pow(eps, 2.0 / 3.0);
                last_rel = std::abs(ratio - target) / target;
                if (eps <= 1e-5 && last_rel > 0.005) {
                    msg = "relative error " + std::to_string(last_rel) + " at eps = 1e-5";
                    return false;
                }
            }
        }
        msg = "relative error at eps = 1e-5: " + std::to_string(last_rel);
        return true;
    });
    run.check("exact_formulas.bubble_coeff_limits", [](std::string& msg) {
        const HalfPlanePoint z{1.0, 1.0}, w{-0.2, 0.5};
        // left_passage frequencies of the mapped point recover the eps^2 coefficient
        const double eps = 1e-4;
        const double one = left_passage_one(mobius_f_eps(z, eps)) / (eps * eps);
        const double two =
            left_passage_two(mobius_f_eps(z, eps), mobius_f_eps(w, eps)) / (eps * eps);
        const double e1 = std::abs(one - bubble_one_point_coeff(z)) / bubble_one_point_coeff(z);
        const double e2 = std::abs(two - bubble_two_point_coeff(z, w)) / bubble_two_point_coeff(z, w);
        // R -> infinity limits of the in-disk coefficients
        const double big = 1e6;
        const double e3 = std::abs(bubble_in_disk_one_coeff(z, big) - bubble_one_point_coeff(z)) /
                          bubble_one_point_coeff(z);
        const double e4 =
            std::abs(bubble_in_disk_two_coeff(HalfPlanePoint{0.3, 0.4}, w, big) -
                     bubble_two_point_coeff(HalfPlanePoint{0.3, 0.4}, w)) /
            bubble_two_point_coeff(HalfPlanePoint{0.3, 0.4}, w);
        msg = "relative errors " + std::to_string(e1) + " " + std::to_string(e2) + " " +
              std::to_string(e3) + " " + std::to_string(e4);
        return e1 < 1e-3 && e2 < 1e-3 && e3 < 1e-10 && e4 < 1e-10;
    });
    run.check("exact_formulas.bulk_containment_decay", [](std::string& msg) {
        // p_w(r e^{i pi/2}) ~ const / r^2 along the imaginary axis: the
        // G factor contributes 1/r and the boundary factor another 1/r.
        const HalfPlanePoint w{0.3, 0.7};
        const double p1 = bulk_containment(HalfPlanePoint{0.0, 100.0}, w) * 1e4;
        const double p2 = bulk_containment(HalfPlanePoint{0.0, 1000.0}, w) * 1e6;
        msg = "r^2*p at r = 100, 1000: " + std::to_string(p1) + ", " + std::to_string(p2);
        return std::abs(p1 - p2) / p2 < 0.02;
    });
    run.check("exact_formulas.two_path_collapse_and_monotone", [](std::string& msg) {
        // The collapse gap scales like (|delta| / 2y)^{2/3}, so pick a point
        // high enough that the gap at |delta| = 1e-4 falls below 1e-3.
        const HalfPlanePoint z{0.0, 3.0};
        const HalfPlanePoint znear{1e-4, 3.0};
        const double gap = std::abs(two_path_two_point(z, znear) - two_path_one_point(z));
        if (gap > 1e-3) {
            msg = "collapse gap " + std::to_string(gap);
            return false;
        }
        double prev = two_path_in_not_in(z, HalfPlanePoint{0.6, 1.2});
        for (double shift : {1.0, 2.0, 4.0, 8.0, 16.0}) {
            const double cur = two_path_in_not_in(z, HalfPlanePoint{0.6 + shift, 1.2});
            if (cur < prev) {
                msg = "not monotone as w recedes";
                return false;
            }
            prev = cur;
        }
        return true;
    });
}

inline void add_sim_checks(detail::CheckRunner& run) {
    run.check("sle_sim.driver_moments_and_determinism", [&](std::string& msg) {
        SimConfig cfg;
        cfg.seed = 4242;
        cfg.t_max = 1.0;
        cfg.dt = 1e-3;
        const std::uint64_t n_paths = run.quick() ? 200 : 2000;
        double sum = 0.0, sum2 = 0.0, expected_var = 0.0;
        std::uint64_t n = 0;
        for (std::uint64_t s = 0; s < n_paths; ++s) {
            const DriverPath d = sample_driver(cfg, s);
            for (std::size_t k = 0; k < d.n_steps(); ++k) {
                sum += d.increments[k];
                sum2 += d.increments[k] * d.increments[k];
                expected_var += cfg.kappa * d.dts[k];
                ++n;
            }
        }
        const double mean_se = std::sqrt(expected_var / n) / std::sqrt(static_cast<double>(n));
        if (std::abs(sum / n) > 3.0 * mean_se) {
            msg = "increment mean outside 3 SE";
            return false;
        }
        if (std::abs(sum2 / expected_var - 1.0) > 0.05) {
            msg = "increment variance off by >5%";
            return false;
        }
        const DriverPath a = sample_driver(cfg, 7), b = sample_driver(cfg, 7);
        if (a.increments != b.increments) {
            msg = "same (seed, stream) produced different paths";
            return false;
        }
        return true;
    });
    run.check("sle_sim.slit_semigroup_and_y_decrease", [](std::string& msg) {
        FlowState s{0.3, 1.0, 0.0, false};
        const FlowState one = flow_step(s, 0.0, 0.01);
        const FlowState two = flow_step(flow_step(s, 0.0, 0.005), 0.0, 0.005);
        if (std::abs(one.x - two.x) > 1e-12 || std::abs(one.y - two.y) > 1e-12) {
            msg = "capacity additivity violated";
            return false;
        }
        SimConfig cfg;
        cfg.t_max = 2.0;
        cfg.seed = 99;
        const DriverPath d = sample_driver(cfg, 3);
        FlowState cur{0.2, 0.8, 0.0, false};
        for (std::size_t k = 0; k < d.n_steps(); ++k) {
            const FlowState nxt = flow_step(cur, d.increments[k], d.dts[k]);
            if (nxt.y >= cur.y) {
                msg = "Im z_t failed to decrease";
                return false;
            }
            cur = nxt;
        }
        return true;
    });
    run.check("sle_sim.undecided_fraction_shrinks_with_horizon", [&](std::string& msg) {
        const std::vector<HalfPlanePoint> pts{{0.0, 1.0}};
        const std::uint64_t n = run.quick() ? 300 : 1500;
        std::vector<double> fracs;
        for (double horizon : {1.0, 10.0, 100.0}) {
            SimConfig cfg;
            cfg.seed = 11;
            cfg.t_max = horizon;
            cfg.dt = 1e-3;
            std::uint64_t undecided = 0;
            for (std::uint64_t s = 0; s < n; ++s) {
                const auto out = classify_passage(pts, sample_driver(cfg, s), cfg);
                if (out[0] == PassageOutcome::Undecided) ++undecided;
            }
            fracs.push_back(static_cast<double>(undecided) / static_cast<double>(n));
        }
        std::ostringstream os;
        os << "undecided fractions: " << fracs[0] << " " << fracs[1] << " " << fracs[2];
        msg = os.str();
        return fracs[0] >= fracs[1] && fracs[1] >= fracs[2];
    });
    run.check("sle_sim.real_ordering_preserved_near_axis", [&](std::string& msg) {
        SimConfig cfg;
        cfg.seed = 5;
        cfg.t_max = 0.5;
        const std::uint64_t n = run.quick() ? 100 : 1000;
        for (std::uint64_t s = 0; s < n; ++s) {
            const DriverPath d = sample_driver(cfg, s);
            FlowState a{-0.4, 0.01, 0.0, false}, b{0.4, 0.01, 0.0, false};
            for (std::size_t k = 0; k < d.n_steps(); ++k) {
                if (a.blown_up || b.blown_up) break;
                a = flow_step(a, d.increments[k], d.dts[k]);
                b = flow_step(b, d.increments[k], d.dts[k]);
                if (a.x > b.x + 1e-9) {
                    msg = "x-ordering flipped at t = " + std::to_string(a.t);
                    return false;
                }
            }
        }
        return true;
    });
}

inline void add_mc_checks(detail::CheckRunner& run) {
    run.check("mc_harness.outcome_counts_sum", [&](std::string& msg) {
        SimConfig cfg;
        cfg.seed = 2024;
        const std::uint64_t n = 10000;
        const auto recs = run_two_point({{HalfPlanePoint{-0.5, 1.0}, HalfPlanePoint{0.5, 1.0}}},
                                        n, cfg);
        const auto& r = recs.front();
        const std::uint64_t total = r.counter("LL") + r.counter("LR") + r.counter("RL") +
                                    r.counter("RR") + r.counter("undecided");
        msg = "total = " + std::to_string(total);
        return total == n;
    });
    run.check("mc_harness.shard_merge_associativity", [](std::string& msg) {
        // the same seed schedule split into shards must reproduce the pooled counts
        SimConfig cfg;
        cfg.seed = 31337;
        const std::vector<HalfPlanePoint> pts{{0.0, 1.0}};
        std::uint64_t left_pooled = 0, left_sharded = 0;
        auto cfg_scaled = detail::scaled_config(cfg, pts);
        for (std::uint64_t s = 0; s < 600; ++s) {
            const auto out = classify_passage(pts, sample_driver(cfg_scaled, s), cfg_scaled);
            if (out[0] == PassageOutcome::Left) ++left_pooled;
        }
        for (std::uint64_t shard = 0; shard < 3; ++shard)
            for (std::uint64_t j = 0; j < 200; ++j) {
                const std::uint64_t s = shard * 200 + j;
                const auto out =
                    classify_passage(pts, sample_driver(cfg_scaled, s), cfg_scaled);
                if (out[0] == PassageOutcome::Left) ++left_sharded;
            }
        msg = "pooled = " + std::to_string(left_pooled) +
              ", sharded = " + std::to_string(left_sharded);
        return left_pooled == left_sharded;
    });
}

inline void add_quadrature_checks(detail::CheckRunner& run) {
    run.check("quadrature.integrand_diagnostics_clean", [&](std::string& msg) {
        const auto d = integrand_diagnostics(run.quick() ? 20000 : 200000, 7);
        std::ostringstream os;
        os << "probed " << d.n_probed << ", max f = " << d.max_value;
        msg = os.str();
        return d.n_nan == 0 && d.n_negative == 0 && d.n_above_one == 0 && d.max_value < 1.0;
    });
    run.check("quadrature.first_moment_matches_pi_over_10", [](std::string& msg) {
        const auto r = integrate_first_moment(1e-6);
        msg = "value = " + std::to_string(r.value);
        return std::abs(r.value - M_PI / 10.0) < 1e-3;
    });
    run.check("quadrature.moment_inequalities_and_unbiasedness", [&](std::string& msg) {
        const std::uint64_t budget = run.quick() ? 40000 : 400000;
        const auto imp = integrate_second_moment_mc(budget, 2, 0.3);
        const auto uni = integrate_second_moment_mc(budget, 3, 0.0);
        const double ea = M_PI / 10.0;
        std::ostringstream os;
        os << "importance = " << imp.value << " +- " << imp.error_estimate
           << ", uniform = " << uni.value << " +- " << uni.error_estimate;
        msg = os.str();
        if (std::abs(imp.value - uni.value) > imp.error_estimate + uni.error_estimate)
            return false;  // 3 SE each
        return imp.value <= ea * (M_PI / 2.0) && imp.value >= ea * ea - imp.error_estimate;
    });
}

/// The full invariant suite. `quick` trims the sample counts to the
/// sub-second subset.
inline std::vector<CheckResult> run_verification(bool quick) {
    detail::CheckRunner run(quick);
    add_special_fn_checks(run);
    add_exact_formula_checks(run);
    add_sim_checks(run);
    add_mc_checks(run);
    add_quadrature_checks(run);
    return run.take();
}

}  // namespace sle83
