#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "vlab/modulus.hpp"
#include "vlab/quadrature.hpp"

using namespace vlab;

namespace {

// closed-form big_m for the three profile families (antiderivatives of
// 1/(u Theta(u)) after u = ln(1/s)), used as independent oracles
double closed_form_constant(double r, double A, double c0) {
    const double lc0 = std::log(c0);
    const double flat = 1.0 - 1.0 / (lc0 * A);
    if (r >= 1.0 / c0) return (mu_star(ThetaProfile::constant(A, c0)) - r) / mu_star(ThetaProfile::constant(A, c0));
    return (std::log(std::log(1.0 / r)) - std::log(lc0)) / A + flat;
}

double closed_form_powerlog(double r, double a, double c0) {
    const double lc0 = std::log(c0);
    const double L = std::log(1.0 / r);
    const double flat = 1.0 - 1.0 / (lc0 * std::pow(std::log(lc0), a));
    double sing;
    if (a == 1.0)
        sing = std::log(std::log(L)) - std::log(std::log(lc0));
    else
        sing = (std::pow(std::log(L), 1.0 - a) - std::pow(std::log(lc0), 1.0 - a)) / (1.0 - a);
    return sing + flat;
}

double closed_form_linear(double r, double c0) {
    const double lc0 = std::log(c0);
    return 1.0 / lc0 - 1.0 / std::log(1.0 / r) + 1.0 - 1.0 / (lc0 * lc0);
}

} // namespace

TEST_CASE("quadrature sanity") {
    CHECK(integrate([](double x) { return x * x * x; }, 0.0, 1.0, 1e-12) == doctest::Approx(0.25).epsilon(1e-10));
    CHECK(integrate_rel([](double x) { return std::exp(x); }, 0.0, 2.0, 1e-10) ==
          doctest::Approx(std::exp(2.0) - 1.0).epsilon(1e-9));
}

TEST_CASE("mu: capped log-modulus") {
    const auto th = ThetaProfile::constant();

    CHECK(mu(0.1, th) == doctest::Approx(6.90775527898214e-3).epsilon(1e-12));
    CHECK(mu(1e-4, th) == doctest::Approx(9.21034037197618e-4).epsilon(1e-12));
    CHECK(mu(0.0, th) == 0.0);

    // branch continuity at the knee
    const double knee = 1.0 / th.c0;
    CHECK(mu(knee * (1 - 1e-12), th) == doctest::Approx(mu(knee * (1 + 1e-12), th)).epsilon(1e-9));

    // nondecreasing
    double prev = 0.0;
    for (double lr = -16.0; lr <= 0.0; lr += 0.05) {
        const double v = mu(std::pow(10.0, lr), th);
        CHECK(v >= prev * (1.0 - 1e-15));
        prev = v;
    }

    CHECK_THROWS(mu(-1.0, th));
}

TEST_CASE("big_m: quadrature vs closed forms") {
    SUBCASE("constant profile, 50 log-spaced points, absolute 1e-6") {
        const auto th = ThetaProfile::constant();
        const double top = std::log10(mu_star(th)) - 0.01;
        for (int k = 0; k < 50; ++k) {
            const double r = std::pow(10.0, -15.0 + (top + 15.0) * k / 49.0);
            CHECK(std::abs(big_m(r, th) - closed_form_constant(r, 1.0, 1000.0)) <= 1e-6);
        }
        CHECK(big_m(1e-4, th) == doctest::Approx(1.1429172451507).epsilon(1e-9));
    }
    SUBCASE("powerlog 0.5") {
        const auto th = ThetaProfile::powerlog(0.5);
        CHECK(big_m(1e-5, th) == doctest::Approx(1.241796203245916).epsilon(1e-8));
        for (double r : {1e-12, 1e-8, 1e-4})
            CHECK(big_m(r, th) == doctest::Approx(closed_form_powerlog(r, 0.5, 1000.0)).epsilon(1e-8));
        // capped branch is the exact linear ramp
        const double ms = mu_star(th);
        CHECK(big_m(5e-3, th) == doctest::Approx((ms - 5e-3) / ms).epsilon(1e-10));
    }
    SUBCASE("powerlog 1") {
        const auto th = ThetaProfile::powerlog(1.0);
        CHECK(big_m(1e-7, th) == doctest::Approx(1.288635846596150).epsilon(1e-8));
    }
    SUBCASE("linear (non-Osgood)") {
        const auto th = ThetaProfile::linear();
        CHECK_FALSE(th.osgood());
        CHECK(big_m(1e-6, th) == doctest::Approx(1.051425558427029).epsilon(1e-8));
    }
}

TEST_CASE("big_m: domain and monotonicity") {
    const auto th = ThetaProfile::constant();
    const double ms = mu_star(th);

    CHECK(big_m(ms, th) == doctest::Approx(0.0).epsilon(1e-12)); // empty interval
    CHECK_THROWS(big_m(0.0, th));
    CHECK_THROWS(big_m(ms * 1.1, th));

    double prev = -1.0;
    for (double lr = std::log(ms); lr >= std::log(1e-14); lr -= 0.5) {
        const double v = big_m(std::exp(lr), th);
        CHECK(v > prev);
        prev = v;
    }
}

TEST_CASE("osgood divergence vs non-Osgood convergence as r -> 0") {
    const auto cons = ThetaProfile::constant();
    const auto plog = ThetaProfile::powerlog(0.5);
    const auto lin = ThetaProfile::linear();

    // Osgood-admissible profiles: unbounded growth (k = 4..14)
    double prev_c = 0.0, prev_p = 0.0;
    for (int k = 4; k <= 14; ++k) {
        const double r = std::pow(10.0, -k);
        const double vc = big_m(r, cons), vp = big_m(r, plog);
        CHECK(vc > prev_c);
        CHECK(vp > prev_p);
        prev_c = vc;
        prev_p = vp;
    }
    CHECK(big_m(1e-14, cons) - big_m(1e-4, cons) > 1.0); // keeps growing steadily

    // linear profile: Cauchy tail 1/ln(1/r1) - 1/ln(1/r2), bounded by the limit
    const double limit = 1.0 / std::log(1000.0) + 1.0 - 1.0 / (std::log(1000.0) * std::log(1000.0));
    CHECK(big_m(1e-14, lin) - big_m(1e-10, lin) ==
          doctest::Approx(1.0 / std::log(1e10) - 1.0 / std::log(1e14)).epsilon(1e-7));
    CHECK(big_m(1e-14, lin) < limit);
    CHECK(limit == doctest::Approx(1.123807972077571).epsilon(1e-10));
}

TEST_CASE("modulus kit: table fidelity and round trips") {
    const ModulusKit kit(ThetaProfile::constant());

    SUBCASE("table vs direct quadrature") {
        for (double lr = -15.5; lr <= std::log10(kit.mu_star()) - 0.01; lr += 0.37) {
            const double r = std::pow(10.0, lr);
            CHECK(kit.big_m(r) == doctest::Approx(big_m(r, kit.theta())).epsilon(1e-7));
        }
    }
    SUBCASE("inverse round trip, relative 1e-6 over the table range") {
        for (int k = 0; k < 50; ++k) {
            const double r = std::pow(10.0, -15.8 + (std::log10(kit.mu_star()) + 15.7) * k / 49.0);
            const double rt = kit.inverse(kit.big_m(r));
            CHECK(std::abs(rt / r - 1.0) <= 1e-6);
        }
    }
    SUBCASE("nu is increasing, equals 1 at mu_star, frozen value at 1e-4") {
        CHECK(kit.nu(kit.mu_star()) == doctest::Approx(1.0).epsilon(1e-10));
        CHECK(kit.nu(1e-4) == doctest::Approx(0.318887390884425).epsilon(1e-7));
        CHECK(nu(1e-4, kit.theta()) == doctest::Approx(0.318887390884425).epsilon(1e-8));
        double prev = 0.0;
        for (double lr = -14.0; lr <= std::log10(kit.mu_star()); lr += 0.25) {
            const double v = kit.nu(std::pow(10.0, lr));
            CHECK(v > prev);
            prev = v;
        }
        CHECK(kit.nu(0.0) == 0.0);
    }
    SUBCASE("extended branch: linear continuation past mu_star") {
        const double ms = kit.mu_star();
        CHECK(kit.big_m_extended(2.0 * ms) == doctest::Approx(-1.0).epsilon(1e-12));
        CHECK(kit.nu(2.0 * ms) > 1.0);
        CHECK(kit.big_m_extended(ms) == doctest::Approx(0.0).epsilon(1e-12));
    }
}

TEST_CASE("osgood envelope") {
    const ModulusKit kit(ThetaProfile::constant());

    SUBCASE("no forcing keeps the envelope at c") {
        for (double c : {1e-10, 1e-6, 1e-4})
            for (double t : {0.0, 1.0, 7.0})
                CHECK(kit.osgood_envelope(c, 0.0, t) == doctest::Approx(c).epsilon(1e-6));
    }
    SUBCASE("c = 0 pins the envelope to zero") {
        CHECK(kit.osgood_envelope(0.0, 3.0, 10.0) == 0.0);
    }
    SUBCASE("double-log law on the singular branch") {
        // ln ln (1/rho(t)) = ln ln (1/c) - gamma t while both ends stay below the knee
        const double c = 1e-8, gbar = 0.5, t = 1.0;
        const double rho = kit.osgood_envelope(c, gbar, t);
        CHECK(rho == doctest::Approx(1.405253650963619e-5).epsilon(1e-5));
        CHECK(std::log(std::log(1.0 / rho)) ==
              doctest::Approx(std::log(std::log(1.0 / c)) - gbar * t).epsilon(1e-7));
    }
    SUBCASE("exhausted budget returns the table maximum") {
        CHECK(kit.osgood_envelope(1e-4, 10.0, 1.0) == kit.mu_star());
    }
}

TEST_CASE("negative control: linear profile degenerates in finite time") {
    const ModulusKit lin(ThetaProfile::linear());
    const ModulusKit cons(ThetaProfile::constant());

    // with Theta(p) = p the total modulus budget is finite (~1.124), so the
    // envelope hits the table maximum in finite time uniformly in c ...
    CHECK(lin.osgood_envelope(1e-12, 1.0, 1.2) == lin.mu_star());
    CHECK(lin.osgood_envelope(1e-15, 1.0, 1.2) == lin.mu_star());

    // ... while the Osgood profile still confines the same data far below the cap
    const double rho_c = cons.osgood_envelope(1e-12, 1.0, 1.2);
    CHECK(rho_c < 1e-3);
    CHECK(rho_c < cons.mu_star());
}

TEST_CASE("theta validation") {
    CHECK_THROWS(ThetaProfile::constant(1.0, 2.0));   // log(c0)*A <= 1
    CHECK_THROWS(ThetaProfile::powerlog(0.5, 2.5));   // log(c0) <= 1
    CHECK_THROWS(ThetaProfile::constant(-1.0));
    CHECK_NOTHROW(ThetaProfile::constant(1.0, 20.0)); // stability-lab profile
    const ModulusKit kit20(ThetaProfile::constant(1.0, 20.0));
    CHECK(kit20.mu_star() == doctest::Approx(0.14978661367770).epsilon(1e-10));
    CHECK(kit20.big_m(1e-4) == doctest::Approx(1.789329905307564).epsilon(1e-7));
}
