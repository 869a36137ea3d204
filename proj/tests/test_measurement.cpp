#include <cmath>

#include "doctest.h"
#include "oracle.hpp"
#include "torus/measurement.hpp"
#include "torus/util.hpp"

using namespace torus;

namespace {

SymbolTable cos_table(int bandwidth) {
    SymbolTable t(1, bandwidth);
    t.set_pair(freq(1), cplx(0.5, 0.0));
    return t;
}

using Status = AdmissibilityVerdict::Status;

}  // namespace

TEST_CASE("measure: spatial, Fourier and profile variants") {
    CHECK(measure(Functional::spatial(Knot{0, 0, 0}, 1), cos_table(4)) == doctest::Approx(1.0));
    CHECK(measure(Functional::spatial(Knot{pi / 3, 0, 0}, 1), cos_table(4)) ==
          doctest::Approx(std::cos(pi / 3)).epsilon(1e-13));

    SymbolTable constant(1, 4);
    constant.set_pair(freq(0), cplx(3.25, 0.0));
    CHECK(measure(Functional::fourier(freq(0), true), constant) == doctest::Approx(3.25));

    SymbolTable sine(1, 4);
    sine.set_pair(freq(1), cplx(0.0, -0.5));
    CHECK(measure(Functional::fourier(freq(1), false), sine) == doctest::Approx(-0.5));
}

TEST_CASE("measure: smooth box profile matches a dense quadrature oracle") {
    // Indicator-like box on [1, 2] with raised edges, sampled on 512 nodes.
    auto box = [](double x) {
        return 0.25 * (1.0 + std::tanh((x - 1.0) / 0.1)) * (1.0 + std::tanh((2.0 - x) / 0.1));
    };
    GridFunction grid;
    grid.dim = 1;
    grid.samples_per_axis = 512;
    grid.values.resize(512);
    for (int j = 0; j < 512; ++j) grid.values[static_cast<std::size_t>(j)] = box(two_pi * j / 512.0);
    const Functional nu = Functional::profile(analyze(grid, 255));

    SymbolTable sine(1, 8);
    sine.set_pair(freq(1), cplx(0.0, -0.5));
    const double expected = oracle::quadrature_pairing(box, [](double x) { return std::sin(x); }, 65536);
    CHECK(measure(nu, sine) == doctest::Approx(expected).epsilon(1e-6));
}

TEST_CASE("measure: profile bandwidth below the table bandwidth is rejected") {
    SymbolTable narrow(1, 4);
    narrow.set_pair(freq(0), cplx(1.0, 0.0));
    const Functional nu = Functional::profile(narrow);
    SymbolTable wide(1, 8);
    CHECK_THROWS_AS(measure(nu, wide), std::invalid_argument);
}

TEST_CASE("functional invariants") {
    CHECK_THROWS_AS(Functional::fourier(freq(0), false), std::invalid_argument);
    SymbolTable raw(1, 2);
    raw.set(freq(1), cplx(1.0, 0.0));
    CHECK_THROWS_AS(Functional::profile(raw), std::invalid_argument);
}

TEST_CASE("measure is linear in the table") {
    oracle::Lcg rng(31);
    const SymbolTable f = make_hermitian_table(1, 8, [&](const FreqIndex&) {
        return cplx(rng.uniform(), rng.uniform());
    });
    const SymbolTable g = make_hermitian_table(1, 8, [&](const FreqIndex&) {
        return cplx(rng.uniform(), rng.uniform());
    });
    const SymbolTable mix = scaled_sum(1.3, f, -0.7, g);
    for (const Functional& nu :
         {Functional::spatial(Knot{2.0, 0, 0}, 1), Functional::fourier(freq(3), true)}) {
        CHECK(measure(nu, mix) ==
              doctest::Approx(1.3 * measure(nu, f) - 0.7 * measure(nu, g)).epsilon(1e-12));
    }
}

TEST_CASE("measurement_column: closed forms") {
    const Operator sob = Operator::sobolev(2.0, 2.0);
    const int K = 64;
    double peak = 0.0;
    for (int k = -K; k <= K; ++k) peak += 1.0 / (4.0 + static_cast<double>(k) * k);
    const Knot x0{1.7, 0, 0};
    CHECK(measurement_column(Functional::spatial(x0, 1), sob, x0, K) ==
          doctest::Approx(peak).epsilon(1e-12));

    const Knot t{0.9, 0, 0};
    const cplx expected = sob.pseudo_symbol(freq(3)) * std::polar(1.0, -3.0 * 0.9);
    CHECK(measurement_column(Functional::fourier(freq(3), true), sob, t, K) ==
          doctest::Approx(expected.real()).epsilon(1e-12));

    // A Fourier functional at a null frequency sees nothing of the kernel.
    const Operator d2 = Operator::derivative_power(2);
    CHECK(measurement_column(Functional::fourier(freq(0), true), d2, t, K) == 0.0);
}

TEST_CASE("measurement_column: admissibility gate") {
    const Knot t{0.0, 0, 0};
    const Functional nu = Functional::spatial(Knot{1.0, 0, 0}, 1);
    CHECK_THROWS_AS(measurement_column(nu, Operator::derivative_power(1), t, 32),
                    std::runtime_error);

    // d/2 < gamma <= d for the bivariate Laplacian: allowed with a warning.
    const Operator lap = Operator::fractional_laplacian(1.5, 2);
    bool warn = false;
    measurement_column(Functional::spatial(Knot{1.0, 1.0, 0}, 2), lap, Knot{0, 0, 0}, 8, &warn);
    CHECK(warn);
}

TEST_CASE("sampling admissibility: family facts") {
    CHECK(sampling_admissible(Operator::fractional_derivative(1.5)).status == Status::yes);
    CHECK(sampling_admissible(Operator::fractional_derivative(1.5)).basis ==
          AdmissibilityVerdict::Basis::family_override);
    CHECK(sampling_admissible(Operator::fractional_derivative(1.0)).status == Status::no);
    CHECK(sampling_admissible(Operator::derivative_power(1)).status == Status::no);
    CHECK(sampling_admissible(Operator::derivative_power(2)).status == Status::yes);
    CHECK(sampling_admissible(Operator::exponential_shift(3.0, 1.0)).status == Status::no);
    CHECK(sampling_admissible(Operator::fractional_laplacian(1.0, 2)).status == Status::no);
    CHECK(sampling_admissible(Operator::fractional_laplacian(2.5, 2)).status == Status::yes);
    CHECK(sampling_admissible(Operator::fractional_laplacian(1.5, 2)).status ==
          Status::indeterminate);
    CHECK(sampling_admissible(Operator::radial_green(RadialProfile::matern(1.5), 0.3, 64)).status ==
          Status::yes);
    CHECK(sampling_admissible(Operator::radial_green(RadialProfile::compact_bump(), 1.0, 64, 2.5))
              .status == Status::yes);

    const Operator sep_ok = Operator::separable(
        {Operator::exponential_shift(1.0, 1.5), Operator::exponential_shift(1.0, 1.5)});
    CHECK(sampling_admissible(sep_ok).status == Status::yes);
    const Operator sep_bad = Operator::separable(
        {Operator::exponential_shift(1.0, 1.5), Operator::exponential_shift(1.0, 0.8)});
    CHECK(sampling_admissible(sep_bad).status == Status::no);
}

TEST_CASE("sampling admissibility: generic partial-sum tests") {
    // D^2 + k0^2 Id has an l1-summable pseudoinverse sequence.
    const AdmissibilityVerdict hp = sampling_admissible(Operator::harmonic_pair(freq(2)));
    CHECK(hp.status == Status::yes);
    CHECK(hp.basis == AdmissibilityVerdict::Basis::ell1_criterion);

    // The modulated derivative sits between the l1 and l2 criteria.
    const AdmissibilityVerdict md = sampling_admissible(Operator::modulated_derivative(2));
    CHECK(md.status == Status::indeterminate);
}

TEST_CASE("L2 admissibility: catalog facts") {
    CHECK(l2_admissible(Operator::fractional_derivative(0.6)).status == Status::yes);
    CHECK(l2_admissible(Operator::fractional_derivative(0.4)).status == Status::no);
    CHECK(l2_admissible(Operator::fractional_derivative(0.5)).status == Status::no);
    CHECK(l2_admissible(Operator::fractional_laplacian(1.0, 2)).status == Status::no);
    CHECK(l2_admissible(Operator::fractional_laplacian(1.5, 2)).status == Status::yes);
    CHECK(l2_admissible(Operator::radial_green(RadialProfile::compact_bump(), 1.0, 64, 2.5)).status ==
          Status::yes);
    CHECK(l2_admissible(Operator::modulated_derivative(3)).status == Status::yes);
}

TEST_CASE("property: sampling-admissible implies L2-admissible across the catalog") {
    const std::vector<Operator> ops = {
        Operator::derivative_power(1),
        Operator::derivative_power(2),
        Operator::exponential_shift(1.0, 0.4),
        Operator::exponential_shift(1.0, 1.5),
        Operator::modulated_derivative(2),
        Operator::harmonic_pair(freq(2)),
        Operator::fractional_derivative(0.4),
        Operator::fractional_derivative(0.75),
        Operator::fractional_derivative(1.5),
        Operator::fractional_laplacian(0.4),
        Operator::fractional_laplacian(1.5),
        Operator::sobolev(2.0, 2.0),
        Operator::fractional_laplacian(1.0, 2),
        Operator::fractional_laplacian(1.5, 2),
        Operator::fractional_laplacian(2.5, 2),
        Operator::sobolev(1.0, 3.0, 3),
        Operator::radial_green(RadialProfile::matern(1.5), 1.0, 64),
        Operator::separable({Operator::exponential_shift(1.0, 1.5),
                             Operator::exponential_shift(1.0, 1.5)}),
    };
    for (const Operator& op : ops) {
        INFO(op.description());
        if (sampling_admissible(op).status == Status::yes)
            CHECK(l2_admissible(op).status == Status::yes);
    }
}

TEST_CASE("nullspace_injectivity") {
    const Operator d3 = Operator::derivative_power(3);
    CHECK(nullspace_injectivity({Functional::fourier(freq(0), true)}, d3));
    CHECK(nullspace_injectivity(
        {Functional::fourier(freq(1), true), Functional::spatial(Knot{0.5, 0, 0}, 1)}, d3));
    CHECK_FALSE(nullspace_injectivity(
        {Functional::fourier(freq(1), true), Functional::fourier(freq(2), true)}, d3));
    CHECK(nullspace_injectivity({}, Operator::sobolev(2, 2)));

    // cos/sin pair needs two independent measurements.
    const Operator hp = Operator::harmonic_pair(freq(1));
    CHECK_FALSE(nullspace_injectivity({Functional::spatial(Knot{0.3, 0, 0}, 1)}, hp));
    CHECK(nullspace_injectivity(
        {Functional::spatial(Knot{0.3, 0, 0}, 1), Functional::spatial(Knot{1.9, 0, 0}, 1)}, hp));
}

TEST_CASE("two evaluation paths: spatial sample against the synthesized grid") {
    const Operator sob = Operator::sobolev(2.0, 2.0);
    const SymbolTable t = green_table(sob, 64);
    const GridFunction g = synthesize(t, 256, Smoothing::none);
    for (std::size_t j = 0; j < g.values.size(); j += 37) {
        const Functional nu = Functional::spatial(Knot{g.coordinate(j, 0), 0, 0}, 1);
        CHECK(std::fabs(measure(nu, t) - g.values[j]) < 1e-10);
    }
}

TEST_CASE("functional grammar") {
    const Functional sp = parse_functional("spatial:x=0.5", 1, 8);
    CHECK(sp.kind() == Functional::Kind::spatial);
    CHECK(sp.x0()[0] == doctest::Approx(0.5));

    const Functional fo = parse_functional("fourier:k=1,part=im", 1, 8);
    CHECK(fo.kind() == Functional::Kind::fourier);
    CHECK_FALSE(fo.real_part());

    const Functional f2 = parse_functional("fourier:k=1,-2,part=re", 2, 8);
    CHECK(f2.k() == freq(1, -2));

    CHECK_THROWS_AS(parse_functional("fourier:k=0,part=im", 1, 8), std::invalid_argument);
    CHECK_THROWS_AS(parse_functional("spatial:x=1,q=2", 1, 8), std::invalid_argument);
    CHECK_THROWS_AS(parse_functional("nosuch:x=1", 1, 8), std::invalid_argument);
    CHECK_THROWS_AS(parse_functional("spatial:x=1,y=2", 1, 8), std::invalid_argument);
    CHECK_THROWS_AS(parse_functional("profile:file=/nonexistent/file", 1, 8), InputError);
}

TEST_CASE("tabulated radial operator goes through the generic sampling test") {
    std::vector<double> samples(2049);
    const RadialProfile exact = RadialProfile::compact_bump();
    for (std::size_t j = 0; j < samples.size(); ++j)
        samples[j] = exact(static_cast<double>(j) / 2048.0);
    const Operator op = Operator::radial_green(RadialProfile::tabulated(samples, 1.0), 1.0, 64);
    const AdmissibilityVerdict v = sampling_admissible(op);
    CHECK(v.status == AdmissibilityVerdict::Status::yes);
    CHECK(v.basis == AdmissibilityVerdict::Basis::ell1_criterion);
}
