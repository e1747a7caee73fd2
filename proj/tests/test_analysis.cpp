#include <doctest.h>

#include <numbers>

#include "oracles.hpp"
#include "twa/analysis.hpp"
#include "twa/report.hpp"

using namespace twa;

namespace {

FockOperator diag(std::initializer_list<double> d) {
  Matrix m = Matrix::Zero(static_cast<int>(d.size()), static_cast<int>(d.size()));
  int k = 0;
  for (double v : d) m(k, k) = v, ++k;
  return FockOperator(m);
}

void check_invariants(const FockOperator& r, const Spectrum& s) {
  CHECK(s.residual <= 1e-9 * std::max(1.0, r.frobenius_norm()));
  CHECK(s.orthonormality_defect <= 1e-9);
  const auto rules = sum_rules(s);
  CHECK(std::abs(rules.s1 - r.trace().real()) <= 1e-10);
  CHECK(std::abs(rules.s2 - (r * r).trace().real()) <= 1e-10);
}

}  // namespace

TEST_SUITE("analysis") {
  TEST_CASE("spectra") {
    const auto s = hermitian_eigen(diag({3, 1, 2}));
    CHECK(s.eigenvalues == std::vector<double>{3, 2, 1});

    const auto pure = coherent_state(Complex(0.4, 0.2), 12).projector();
    const auto sp = hermitian_eigen(pure);
    CHECK(sp.eigenvalues.front() == doctest::Approx(1.0));
    for (std::size_t k = 1; k < sp.eigenvalues.size(); ++k) CHECK(std::abs(sp.eigenvalues[k]) < 1e-14);
    check_invariants(pure, sp);

    const FockOperator r(oracle::hermitian_sample(18, 18, 5));
    const auto sr = hermitian_eigen(r);
    double sum = 0.0;
    for (double l : sr.eigenvalues) sum += l;
    CHECK(std::abs(sum - r.trace().real()) <= 1e-10);
    check_invariants(r, sr);

    CHECK_THROWS_AS(hermitian_eigen(FockOperator::unit(3, 0, 1)), Error);

    const auto all = hermitian_eigen_all({pure, r});
    CHECK(all[1].eigenvalues == sr.eigenvalues);
  }

  TEST_CASE("sum rules and negativity") {
    const auto pure = hermitian_eigen(state_prep(LowExcitedKind{0.3}, 6).projector());
    const auto rp = sum_rules(pure);
    CHECK(rp.s1 == doctest::Approx(1.0));
    CHECK(rp.s2 == doctest::Approx(1.0));
    CHECK(std::abs(rp.defect) < 1e-12);
    const auto np = negativity(pure);
    CHECK(std::abs(np.lambda_min) < 1e-14);
    CHECK(np.negative_sum > -1e-14);

    const auto mixed = sum_rules(hermitian_eigen(diag({0.5, 0.5})));
    CHECK(mixed.s1 == doctest::Approx(1.0));
    CHECK(mixed.s2 == doctest::Approx(0.5));
    CHECK(mixed.defect == doctest::Approx(0.5));

    const auto spec = kerr_generator(12);
    const auto psi = state_prep(LowExcitedKind{0.3}, 12);
    const auto r = evolve_R(spec, psi.projector(), std::vector<double>{0.02}).states[0];
    const auto sr = hermitian_eigen(r);
    check_invariants(r, sr);
    const auto rules = sum_rules(sr);
    CHECK(std::abs(rules.s1 - 1.0) <= 1e-6);
    CHECK(std::abs(rules.s2 - 1.0) <= 1e-4);
    CHECK(negativity(sr).lambda_min < 0.0);
  }

  TEST_CASE("short-time negative eigenvalues") {
    const double t = 1e-3;
    const double a = 0.3;
    const auto kerr = hermitian_eigen(short_time_R(kerr_generator(12), state_prep(LowExcitedKind{a}, 12).projector(), t));
    // pair +-sqrt(2)|a| t / (1 + |a|^2)^{3/2} to first order
    const double rate = std::numbers::sqrt2 * a / std::pow(1 + a * a, 1.5);
    CHECK(negativity(kerr).lambda_min / t == doctest::Approx(-rate).epsilon(0.01));
    CHECK(kerr.eigenvalues[1] / t == doctest::Approx(rate).epsilon(0.01));

    const auto shg = hermitian_eigen(short_time_R(shg_generator(12), FockOperator::unit(12, 0, 0), t));
    CHECK(negativity(shg).lambda_min / t == doctest::Approx(-1.0 / (2.0 * std::numbers::sqrt2)).epsilon(0.01));
  }

  TEST_CASE("trial states") {
    const auto psi = state_prep(LowExcitedKind{Complex(0.3, 0.1)}, 8);
    const auto phi = trial_state(TrialFamily::TwoLevel, psi, Complex(0.5, -0.2));
    CHECK(phi.norm() == doctest::Approx(1.0));
    CHECK(std::abs(psi.inner(phi)) < 1e-14);
    // a* |0> - |1> + beta |2> up to normalization
    CHECK(std::abs(phi[0] / phi[1] + std::conj(Complex(0.3, 0.1))) < 1e-14);

    const auto coh = coherent_state(1.0, 20);
    CHECK(std::abs(family_center(TrialFamily::CoherentOrthogonalized, coh) - Complex(1.0)) < 1e-8);
    CHECK(trial_state(TrialFamily::CoherentOrthogonalized, coh, 1.0).dim() == 0);
    const auto c2 = trial_state(TrialFamily::CoherentOrthogonalized, coh, Complex(1.5, 0.5));
    CHECK(std::abs(coh.inner(c2)) < 1e-12);
  }

  TEST_CASE("min-max soundness") {
    const int d = 12;
    const auto psi = state_prep(LowExcitedKind{0.3}, d);
    const auto coh = coherent_state(0.8, d);
    std::vector<FockOperator> ops{FockOperator(oracle::hermitian_sample(d, d, 1)),
                                  FockOperator(oracle::hermitian_sample(d, 6, 2)),
                                  evolve_R(kerr_generator(d), psi.projector(), std::vector<double>{0.05}).states[0]};
    for (const auto& r : ops) {
      const double lmin = hermitian_eigen(r).eigenvalues.back();
      for (auto fam : {TrialFamily::TwoLevel, TrialFamily::CoherentOrthogonalized})
        for (const auto& p : {psi, coh}) {
          CHECK(minmax_bound(r, p, fam) >= lmin - 1e-10);
          for (Complex b : {Complex(0.1), Complex(-1.0, 0.7), Complex(2.0, 2.0)}) {
            const auto phi = trial_state(fam, p, b);
            if (phi.dim() == 0) continue;
            CHECK(phi.amplitudes().dot(r.matrix() * phi.amplitudes()).real() >= lmin - 1e-10);
          }
        }
    }
    CHECK_THROWS_AS(minmax_bound(ops[0], psi, TrialFamily::TwoLevel, {0, 2.0, true}), Error);
  }

  TEST_CASE("min-max short-time rates") {
    const int d = 12;
    const auto coh = coherent_state(1.0, d);
    CHECK(std::abs(minmax_short_time(harmonic_generator(d), coh.projector(), coh, TrialFamily::CoherentOrthogonalized)) <
          1e-10);
    const auto psi = state_prep(LowExcitedKind{0.3}, d);
    CHECK(std::abs(minmax_short_time(harmonic_generator(d), psi.projector(), psi, TrialFamily::TwoLevel)) < 1e-10);

    const auto spec = kerr_generator(d);
    const double rate = minmax_short_time(spec, psi.projector(), psi, TrialFamily::TwoLevel);
    CHECK(rate == doctest::Approx(-std::numbers::sqrt2 * 0.3 / std::pow(1.09, 1.5)).epsilon(1e-3));

    std::vector<double> ts;
    for (int k = 1; k <= 5; ++k) ts.push_back(1e-3 * k);
    const auto ev = evolve_R(spec, psi.projector(), ts);
    std::vector<std::pair<double, double>> series;
    for (std::size_t i = 0; i < ts.size(); ++i) series.push_back({ts[i], minmax_bound(ev.states[i], psi, TrialFamily::TwoLevel)});
    CHECK(rate_fit(series).slope == doctest::Approx(rate).epsilon(0.05));
  }

  TEST_CASE("coherent min-max bound against the large-amplitude estimate") {
    const auto rep = erratum_report(8, true);
    const auto* f = rep.find("kerr-coherent-minmax");
    REQUIRE(f != nullptr);
    CHECK(f->measured < 0.0);
    CHECK(f->measured >= f->corrected - 1e-6);  // bound slope is no lower than the first-order rate
    MESSAGE("bound slope " << f->measured << ", printed estimate " << f->printed << ", ratio "
                           << f->measured / f->printed);
  }

  TEST_CASE("exact evolution") {
    const int d = 10;
    const auto h = symmetrized_hamiltonian({2, 2, 1.0}, d);
    const auto psi = coherent_state(Complex(0.6, 0.3), d + 10).amplitudes().head(d);
    const StateVector psi0 = StateVector(psi).normalized();
    const double t = 0.37;
    const auto out = exact_evolve(psi0, h, t);
    for (int n = 0; n < d; ++n)
      CHECK(std::abs(out[n] - psi0[n] * std::polar(1.0, -(2.0 * n * n + 2.0 * n + 1.0) * t)) < 1e-12);
    CHECK((exact_evolve(psi0, h, 0.0).amplitudes() - psi0.amplitudes()).norm() < 1e-13);
    for (double s : {0.1, 1.0, 10.0}) CHECK(std::abs(exact_evolve(psi0, h, s).norm() - 1.0) < 1e-12);
  }

  TEST_CASE("fidelity and self-correlation") {
    const int d = 16;
    const auto psi = coherent_state(1.0, d);
    CHECK(fidelity(psi.projector(), psi) == doctest::Approx(1.0));
    CHECK(self_correlation(psi.projector(), psi) == doctest::Approx(1.0));
    const auto fock = state_prep(FockKind{3}, d);
    for (double t : {0.1, 0.5}) {
      const auto r = evolve_R(kerr_generator(d), fock.projector(), std::vector<double>{t}).states[0];
      CHECK(self_correlation(r, fock) == doctest::Approx(1.0).epsilon(1e-12));
    }
    Matrix nh = Matrix::Zero(2, 2);
    nh(0, 1) = kI;
    CHECK_THROWS_AS(fidelity(FockOperator(nh), StateVector(Vector::Ones(2) / std::sqrt(2.0))), Error);
  }

  TEST_CASE("rate fits") {
    std::vector<std::pair<double, double>> line;
    for (int k = 1; k <= 5; ++k) line.push_back({0.002 * k, -0.3536 * 0.002 * k});
    const auto f = rate_fit(line);
    CHECK(f.slope == doctest::Approx(-0.3536).epsilon(1e-12));
    CHECK(f.residual <= 1e-12);
    CHECK(f.samples == 5);
    CHECK(f.window.first == doctest::Approx(0.002));
    CHECK(f.window.second == doctest::Approx(0.01));

    std::vector<std::pair<double, double>> quad;
    for (int k = 1; k <= 6; ++k) quad.push_back({0.001 * k, 3.375 * 1e-6 * k * k});
    CHECK(rate_fit(quad, FitModel::Quadratic).slope == doctest::Approx(3.375).epsilon(1e-12));
    CHECK(rate_fit(quad, FitModel::PowerLaw).slope == doctest::Approx(2.0).epsilon(1e-10));

    line.pop_back();
    CHECK_THROWS_AS(rate_fit(line), Error);
  }

  TEST_CASE("shg vacuum rate from the evolved operator") {
    const auto r = measure_negativity_rate(shg_generator(12), state_prep(FockKind{0}, 12), 0.002, 0.02);
    CHECK(r.lambda_min.slope == doctest::Approx(-1.0 / (2.0 * std::numbers::sqrt2)).epsilon(0.02));
  }

  TEST_CASE("idempotency defect") {
    const auto psi = coherent_state(1.0, 20);
    CHECK(idempotency_defect(psi.projector()) < 1e-14);
    const auto r = evolve_R(harmonic_generator(20), psi.projector(), std::vector<double>{0.3}).states[0];
    CHECK(idempotency_defect(r) <= 1e-6);
  }
}
