#include <doctest.h>

#include <cmath>
#include <numbers>

#include "helpers.hpp"
#include "sgslab/circuit.hpp"
#include "sgslab/hamiltonians.hpp"
#include "sgslab/spectra.hpp"

using namespace sgs;
using std::numbers::pi;

namespace {

double unitary_distance_up_to_phase(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
    const cplx ov = (b.adjoint() * a).trace();
    const cplx ph = std::abs(ov) > 0 ? ov / std::abs(ov) : cplx(1, 0);
    return (a - ph * b).cwiseAbs().maxCoeff();
}

double spectral_norm(const Eigen::MatrixXcd& m) {
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
    return svd.singularValues()[0];
}

Eigen::VectorXcd plus_state(int n) { return Eigen::VectorXcd::Constant(1 << n, std::pow(2.0, -0.5 * n)); }

}  // namespace

TEST_SUITE("circuit") {
    TEST_CASE("gate matrices are unitary") {
        std::mt19937_64 g(1);
        std::uniform_real_distribution<double> u(-pi, pi);
        for (int k = 0; k < 20; ++k) {
            for (const auto& gate : {Gate::gpi2(0, u(g)), Gate::rz(0, u(g)), Gate::ms(0, 1, u(g), u(g), u(g)),
                                     Gate::h(0), Gate::x(0), Gate::cnot(0, 1)}) {
                auto m = gate_matrix(gate);
                CHECK((m.adjoint() * m - Eigen::MatrixXcd::Identity(m.rows(), m.rows())).cwiseAbs().maxCoeff() <
                      1e-12);
            }
        }
    }

    TEST_CASE("MS(0,0,theta) is exp(-i theta/2 XX)") {
        std::mt19937_64 g(2);
        std::uniform_real_distribution<double> u(-2 * pi, 2 * pi);
        QubitHamiltonian xx;
        xx.add(parse_word("XX"), 1.0);
        for (int k = 0; k < 20; ++k) {
            const double th = u(g);
            CHECK((gate_matrix(Gate::ms(0, 1, 0, 0, th)) - exact_unitary(xx, th / 2)).cwiseAbs().maxCoeff() < 1e-12);
        }
    }

    TEST_CASE("apply_gate examples") {
        StateVector s(2);
        apply_gate(s, Gate::ms(0, 1, 0, 0, pi / 2));
        const double r = 1 / std::sqrt(2.0);
        CHECK(std::abs(s.amp[0] - cplx(r, 0)) < 1e-12);
        CHECK(std::abs(s.amp[3] - cplx(0, -r)) < 1e-12);
        CHECK(std::abs(s.amp[1]) < 1e-12);

        StateVector z(1);
        apply_gate(z, Gate::rz(0, 0.77));
        CHECK(std::abs(z.amp[0]) == doctest::Approx(1.0));
        CHECK(std::abs(z.amp[1]) < 1e-15);

        StateVector q(1);
        apply_gate(q, Gate::gpi2(0, 0.0));
        CHECK(std::abs(q.amp[0] - cplx(r, 0)) < 1e-12);
        CHECK(std::abs(q.amp[1] - cplx(0, -r)) < 1e-12);

        CHECK_THROWS_AS(apply_gate(q, Gate::h(1)), Error);
        Circuit c(2);
        CHECK_THROWS_AS(c.add(Gate::cnot(0, 0)), Error);
        CHECK_THROWS_AS(c.add(Gate::h(2)), Error);
    }

    TEST_CASE("native compilations of convenience gates") {
        for (const auto& gate : {Gate::h(0), Gate::x(1), Gate::cnot(0, 1), Gate::cnot(1, 0)}) {
            Circuit c(2);
            c.add(gate);
            Circuit n = c.native();
            for (const auto& gg : n.gates) CHECK(gg.is_native());
            CHECK(unitary_distance_up_to_phase(circuit_unitary(n), circuit_unitary(c)) < 1e-12);
        }
    }

    TEST_CASE("Pauli rotations compile to native gates") {
        std::mt19937_64 g(3);
        std::uniform_real_distribution<double> u(-2, 2);
        for (int k = 0; k < 60; ++k) {
            const int n = 1 + static_cast<int>(g() % 4);
            const Word w = testutil::random_word(g, n);
            const double a = u(g);
            Circuit c(n);
            c.add(Gate::pauli_rotation(w, a));
            QubitHamiltonian p;
            p.add(w, 1.0);
            // exact, including the phase
            CHECK((circuit_unitary(c) - exact_unitary(p, a)).cwiseAbs().maxCoeff() < 1e-12);
            Circuit nat = c.native();
            for (const auto& gg : nat.gates) CHECK(gg.is_native());
            CHECK(unitary_distance_up_to_phase(circuit_unitary(nat), exact_unitary(p, a)) < 1e-12);
        }
    }

    TEST_CASE("Ising step has two entangling layers; 40 steps give depth 80") {
        auto h = build_ising(IsingSpec::chain(4, 1.0, 2.5));
        auto step = trotter_step(h, 0.1);
        CHECK(step.two_qubit_count() == 4);
        CHECK(step.two_qubit_depth() == 2);
        auto c = time_evolution_circuit(h, 4.0, 40);
        CHECK(c.trotter_steps == 40);
        CHECK(c.two_qubit_count() == 160);
        CHECK(c.two_qubit_depth() == 80);
    }

    TEST_CASE("trotter order: interaction terms before field terms") {
        auto h = build_ising(IsingSpec::chain(3, 1.0, 1.0));
        auto ord = trotter_order(h);
        REQUIRE(ord.size() == 6);
        for (int k = 0; k < 3; ++k) CHECK(!PauliString(ord[k].first).is_diagonal());
        for (int k = 3; k < 6; ++k) CHECK(PauliString(ord[k].first).is_diagonal());
    }

    TEST_CASE("single commuting term is exact") {
        QubitHamiltonian h;
        h.add(parse_word("ZZ"), 0.7);
        auto c = trotter_step(h, 0.3);
        CHECK((circuit_unitary(c) - exact_unitary(h, 0.3)).cwiseAbs().maxCoeff() < 1e-12);
        std::mt19937_64 g(8);
        QubitHamiltonian d;
        d.add(parse_word("ZIZ"), 0.3);
        d.add(parse_word("IZZ"), -1.1);
        d.add(parse_word("ZII"), 0.4);
        d.add(parse_word("III"), 0.9);
        for (int steps : {1, 3, 7})
            CHECK((circuit_unitary(time_evolution_circuit(d, 1.3, steps)) - exact_unitary(d, 1.3))
                      .cwiseAbs()
                      .maxCoeff() < 1e-10);
    }

    TEST_CASE("t = 0 gives the identity") {
        auto h = build_ising(IsingSpec::chain(3, 1.0, 1.0));
        auto u = circuit_unitary(time_evolution_circuit(h, 0.0, 5));
        CHECK((u - Eigen::MatrixXcd::Identity(8, 8)).cwiseAbs().maxCoeff() < 1e-12);
        auto s = exact_evolve(StateVector(3), h, 0.0);
        CHECK((s.amp - StateVector(3).amp).norm() < 1e-14);
    }

    TEST_CASE("one-step error is second order in dt") {
        auto h = build_ising(IsingSpec::chain(4, 1.0, 2.0));
        std::vector<double> dts{0.2, 0.1, 0.05}, err;
        for (double dt : dts) err.push_back(spectral_norm(circuit_unitary(trotter_step(h, dt)) - exact_unitary(h, dt)));
        for (std::size_t k = 1; k < dts.size(); ++k) {
            const double slope = std::log(err[k - 1] / err[k]) / std::log(dts[k - 1] / dts[k]);
            CHECK(slope == doctest::Approx(2.0).epsilon(0.1));
        }
    }

    TEST_CASE("global error falls as 1/n_steps on random Hamiltonians") {
        std::mt19937_64 g(12);
        for (int trial = 0; trial < 5; ++trial) {
            auto h = testutil::random_hamiltonian(g, 3, 8);
            std::vector<int> ns{40, 80, 160};
            std::vector<double> err;
            for (int n : ns)
                err.push_back(spectral_norm(circuit_unitary(time_evolution_circuit(h, 1.0, n)) - exact_unitary(h, 1.0)));
            if (err[0] < 1e-10) continue;  // all terms happened to commute
            const double slope = std::log(err[0] / err[2]) / std::log(4.0);
            CHECK(slope == doctest::Approx(1.0).epsilon(0.1));
        }
    }

    TEST_CASE("Trotterized evolution tracks the exact one") {
        auto h = build_ising(IsingSpec::chain(4, 1.0, 2.5));
        StateVector s(4, plus_state(4));
        StateVector t = s;
        simulate(time_evolution_circuit(h, 1.0, 25), t);
        auto e = exact_evolve(s, h, 1.0);
        CHECK(std::norm(e.amp.dot(t.amp)) >= 0.99);
        CHECK(t.norm() == doctest::Approx(1.0).epsilon(1e-9));
    }

    TEST_CASE("energy is conserved by exact evolution") {
        auto h = build_ising(IsingSpec::chain(3, 1.0, 1.3));
        StateVector s(3, plus_state(3));
        auto d = to_dense(h);
        const double e0 = (s.amp.adjoint() * d * s.amp)(0, 0).real();
        for (double t : {0.3, 1.0, 4.5}) {
            auto e = exact_evolve(s, h, t);
            CHECK((e.amp.adjoint() * d * e.amp)(0, 0).real() == doctest::Approx(e0).epsilon(1e-10));
        }
    }

    TEST_CASE("norm preserved through 40 noiseless steps in native mode") {
        auto h = build_ising(IsingSpec::chain(4, 1.0, 2.0));
        StateVector s(4, plus_state(4));
        simulate(time_evolution_circuit(h, 4.0, 40).native(), s);
        CHECK(s.norm() == doctest::Approx(1.0).epsilon(1e-9));
    }

    TEST_CASE("adiabatic schedule") {
        auto h = build_ising(IsingSpec::chain(3, 1.0, 1.5));
        auto a = circuit_unitary(adiabatic_circuit(h, h, 2.0, 7));
        auto b = circuit_unitary(time_evolution_circuit(h, 2.0, 7));
        CHECK((a - b).cwiseAbs().maxCoeff() < 1e-12);

        auto spec = IsingSpec::chain(3, 1.0, 1.5);
        auto h0 = ising_auxiliary(spec);
        auto i05 = interpolate(h0, h, 0.5);
        CHECK(i05.coefficient(parse_word("ZII")) == doctest::Approx(-0.375));
        CHECK(i05.coefficient(parse_word("XXI")) == doctest::Approx(-0.5));

        // fine-step reference for the time-ordered product
        const double tau = 3.0;
        const int fine = 1000;
        Eigen::MatrixXcd ref = Eigen::MatrixXcd::Identity(8, 8);
        for (int m = 1; m <= fine; ++m)
            ref = exact_unitary(interpolate(h0, h, (m - 0.5) / fine), tau / fine) * ref;
        double prev = 1e9;
        for (int n : {5, 10, 20, 40}) {
            const double err = spectral_norm(circuit_unitary(adiabatic_circuit(h0, h, tau, n)) - ref);
            CHECK(err < prev * 1.05);
            prev = err;
        }
    }

    TEST_CASE("basis change reproduces the observable") {
        std::mt19937_64 g(5);
        for (int k = 0; k < 30; ++k) {
            const int n = 1 + static_cast<int>(g() % 4);
            PauliString o(testutil::random_word(g, n), (g() & 1) ? 1.0 : -1.0);
            auto c = basis_change_circuit(o);
            auto u = circuit_unitary(c);
            Word zs(n, 0);
            for (int q : o.support()) zs[q] = 3;
            auto zd = to_dense(PauliString(zs, o.coeff));
            CHECK((u.adjoint() * zd * u - to_dense(o)).cwiseAbs().maxCoeff() < 1e-12);
        }
        CHECK(basis_change_circuit(PauliString::parse("ZZ")).gates.empty());
        auto x = basis_change_circuit(PauliString::parse("X"));
        REQUIRE(x.gates.size() == 1);
        CHECK(x.gates[0].kind == GateKind::H);
        CHECK_THROWS_AS(basis_change_circuit(PauliString::parse("i X")), Error);
        CHECK_THROWS_AS(basis_change_circuit(PauliString::parse("0.5 X")), Error);
    }

    TEST_CASE("sampler basics") {
        auto s0 = sample_expectation(StateVector(1), PauliString::parse("Z"), 100, 1);
        CHECK(s0.mean == 1.0);
        CHECK(s0.std_error == 0.0);
        StateVector plus(1, plus_state(1));
        auto sp = sample_expectation(plus, PauliString::parse("Z"), 8192, 2);
        CHECK(std::abs(sp.mean) < 5 * std::sqrt(1.0 / 8192));
        auto again = sample_expectation(plus, PauliString::parse("Z"), 8192, 2);
        CHECK(again.plus == sp.plus);
        CHECK(sp.std_error == doctest::Approx(std::sqrt((1 - sp.mean * sp.mean) / 8192)));
    }

    TEST_CASE("sampler variance matches (1 - <O>^2)/shots") {
        for (double target : {0.0, 0.5, 0.9}) {
            // cos(2a) = target on Ry-like state
            const double a = 0.5 * std::acos(target);
            StateVector s(1, Eigen::Vector2cd(std::cos(a), std::sin(a)));
            const int shots = 200, reps = 1000;
            double m1 = 0, m2 = 0;
            for (int r = 0; r < reps; ++r) {
                auto e = sample_expectation(s, PauliString::parse("Z"), shots, 1000 + r);
                m1 += e.mean;
                m2 += e.mean * e.mean;
            }
            m1 /= reps;
            const double var = m2 / reps - m1 * m1;
            const double want = (1 - target * target) / shots;
            CHECK(m1 == doctest::Approx(target).epsilon(0.02).scale(1.0));
            CHECK(var == doctest::Approx(want).epsilon(0.2));
        }
    }

    TEST_CASE("P(+1) equals the eigenprojector weight") {
        std::mt19937_64 g(77);
        std::normal_distribution<double> nd;
        Eigen::VectorXcd v(8);
        for (auto& a : v) a = cplx(nd(g), nd(g));
        v.normalize();
        PauliString o(parse_word("XYZ"));
        Eigen::MatrixXcd proj = 0.5 * (Eigen::MatrixXcd::Identity(8, 8) + to_dense(o));
        const double p = (v.adjoint() * proj * v)(0, 0).real();
        auto e = sample_expectation(StateVector(3, v), o, 200000, 4);
        CHECK(e.plus / 200000.0 == doctest::Approx(p).epsilon(0.01).scale(1.0));
    }

    TEST_CASE("dump is stable") {
        auto h = build_ising(IsingSpec::chain(3, 1.0, 1.0));
        auto c = time_evolution_circuit(h, 1.0, 2).native();
        CHECK(c.dump() == time_evolution_circuit(h, 1.0, 2).native().dump());
        CHECK(c.dump().find("MS ") != std::string::npos);
    }
}
