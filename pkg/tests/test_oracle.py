import itertools

import pytest

from dyndisc.bounds import build_error_polynomial, evaluate_bounds
from dyndisc.channels import AdditiveNoise, PureLoss, unique_set
from dyndisc.errors import ResourceLimit
from dyndisc.gaussian import ProbeEnergy, apply_gpi_pattern, gaussian_fidelity, tmsv_cm
from dyndisc.oracle import (
    brute_total_error,
    degeneracy_classes,
    validate_closed_forms,
    verify_degeneracy,
)
from dyndisc.patterns import (
    UCPF,
    ChannelPattern,
    ExplicitSpace,
    ProbeDomainDistribution,
    UniformAll,
    klnn_distribution,
)

LOSS = PureLoss(eta_b=1.0, eta_t=0.7)
ADD = AdditiveNoise(nu_b=0.02, nu_t=0.2)
ENERGY = ProbeEnergy(2.0)


class TestBruteTotalError:
    def test_singleton_space(self):
        space = ExplicitSpace((ChannelPattern((0, 1)),))
        report = brute_total_error(space, klnn_distribution(2, 1), LOSS, ENERGY, 1.0)
        assert report.value == 0.0
        assert report.pair_count == 0

    def test_cpf3_kmax_matches_closed_form(self):
        fids = unique_set(LOSS, ENERGY, "oracle")
        for m_copies in (0.5, 1.0, 3.0):
            report = brute_total_error(
                UCPF(3, 1), klnn_distribution(3, 2), LOSS, ENERGY, m_copies
            )
            want = 6.0 * (fids.f01 ** 2 * fids.f11) ** m_copies
            assert report.value == pytest.approx(want, rel=1e-9)
            assert report.pair_count == 6

    def test_three_mode_domain_uses_cvghz(self):
        s = ProbeDomainDistribution(m=3, domains=((1, 2, 3),))
        report = brute_total_error(UniformAll(3), s, LOSS, ENERGY, 1.0)
        assert report.value > 0
        assert report.pair_count == 8 * 7

    def test_domain_order_invariance(self):
        a = ProbeDomainDistribution(m=4, domains=((1, 2), (3, 4)))
        b = ProbeDomainDistribution(m=4, domains=((3, 4), (1, 2)))
        ra = brute_total_error(UniformAll(4), a, ADD, ENERGY, 1.0)
        rb = brute_total_error(UniformAll(4), b, ADD, ENERGY, 1.0)
        assert ra.value == pytest.approx(rb.value, rel=1e-12)

    def test_disjoint_equals_unmodified_computation(self):
        # a disjoint covering distribution is a pure mode rearrangement
        s = ProbeDomainDistribution(m=4, domains=((2, 3), (1, 4)))
        space = UCPF(4, 2)
        report = brute_total_error(space, s, LOSS, ENERGY, 1.0)
        from dyndisc.gaussian import direct_sum
        from dyndisc.patterns import enumerate_space

        probe = direct_sum(tmsv_cm(ENERGY), tmsv_cm(ENERGY))
        order = (2, 3, 1, 4)  # channel index per probe mode
        outs = []
        for pattern in enumerate_space(space):
            params = [LOSS.channel(pattern.bits[i - 1]) for i in order]
            outs.append(apply_gpi_pattern(probe, params))
        want = sum(
            gaussian_fidelity(x, y)
            for x, y in itertools.permutations(outs, 2)
        )
        assert report.value == pytest.approx(want, rel=1e-12)

    def test_doubling_copies_squares_fidelities(self):
        space = UCPF(3, 1)
        s = klnn_distribution(3, 2)
        single = brute_total_error(space, s, ADD, ENERGY, 1.0)
        double = brute_total_error(space, s, ADD, ENERGY, 2.0)
        # D(2M) computed directly equals sum of squared contributions
        fids = unique_set(ADD, ENERGY, "oracle")
        want = 6.0 * (fids.f01 ** 2 * fids.f11) ** 2
        assert double.value == pytest.approx(want, rel=1e-9)
        assert double.value < single.value

    def test_space_cap(self):
        with pytest.raises(ResourceLimit):
            brute_total_error(
                UniformAll(13), klnn_distribution(13, 2), LOSS, ENERGY, 1.0
            )

    def test_width_cap(self):
        with pytest.raises(ResourceLimit):
            brute_total_error(
                UniformAll(6), klnn_distribution(6, 5), LOSS, ENERGY, 1.0
            )

    @pytest.mark.parametrize("model", [LOSS, ADD])
    def test_matches_engine_on_mixed_space(self, model):
        space = UniformAll(4)
        s = klnn_distribution(4, 2)
        fids = unique_set(model, ENERGY, "oracle")
        poly = build_error_polynomial(space, s)
        engine = evaluate_bounds(poly, fids, 1.0)
        oracle = brute_total_error(space, s, model, ENERGY, 1.0)
        assert engine.upper_raw == pytest.approx(
            oracle.value / space.size, rel=1e-9
        )


class TestDegeneracy:
    @pytest.mark.parametrize("model", [LOSS, ADD])
    def test_cvghz_theorem(self, model):
        report = verify_degeneracy(4, model, ENERGY, "cvghz")
        assert report.max_class_spread <= 1e-10
        assert report.pair_count == 16 * 15

    @pytest.mark.parametrize("model", [LOSS, ADD])
    def test_kmax_tmsv_theorem(self, model):
        report = verify_degeneracy(3, model, ENERGY, "kmax_tmsv")
        assert report.max_class_spread <= 1e-10

    def test_no_zero_distance_classes(self):
        classes = degeneracy_classes(3, LOSS, ENERGY, "cvghz")
        assert all(d >= 1 for (_, _, d) in classes)

    def test_ordered_class_symmetry(self):
        classes = degeneracy_classes(3, LOSS, ENERGY, "kmax_tmsv")
        for (u, v, d), vals in classes.items():
            mirror = classes[(v, u, d)]
            assert max(vals) - min(mirror) <= 1e-10

    def test_class_count_matches_unique_fidelity_set(self):
        # distinct unordered (u, v, d) classes = valid triples with d > 0
        m = 4
        classes = degeneracy_classes(m, LOSS, ENERGY, "cvghz")
        got = {(min(u, v), max(u, v), d) for (u, v, d) in classes}
        want = set()
        for u in range(m + 1):
            for v in range(u, m + 1):
                d_max = min(u + v, 2 * m - (u + v))
                for d in range(v - u, d_max + 1, 2):
                    if d > 0:
                        want.add((u, v, d))
        assert got == want

    def test_protocol_cap(self):
        with pytest.raises(ResourceLimit):
            verify_degeneracy(6, LOSS, ENERGY, "cvghz")
        with pytest.raises(ResourceLimit):
            verify_degeneracy(5, LOSS, ENERGY, "kmax_tmsv")


class TestClosedFormValidation:
    def test_loss_grid_tight(self):
        grid = [
            (PureLoss(eta_b=eb, eta_t=et), ProbeEnergy(ns))
            for eb in (0.9, 1.0)
            for et in (0.1, 0.5, 0.9)
            for ns in (0.1, 1.0, 10.0)
        ]
        (report,) = validate_closed_forms(grid)
        assert report.model_kind == "PureLoss"
        assert report.max_over_labels() <= 1e-8
        assert all(n == 0 for n in report.invalid_points.values())

    def test_equal_parameter_points_exact(self):
        grid = [(PureLoss(eta_b=0.7, eta_t=0.7), ProbeEnergy(2.0))]
        (report,) = validate_closed_forms(grid)
        assert report.max_over_labels() <= 1e-12

    def test_additive_report_produced(self):
        grid = [
            (AdditiveNoise(nu_b=nb, nu_t=nt), ProbeEnergy(ns))
            for nb in (0.02, 0.1)
            for nt in (0.2, 0.5)
            for ns in (1.0, 5.0)
        ]
        (report,) = validate_closed_forms(grid)
        assert report.model_kind == "AdditiveNoise"
        # additive F01/F12 closed forms are faithful; F11/F02 deviate or go invalid
        assert report.max_deviation["01"] <= 1e-10
        assert report.max_deviation["12"] <= 1e-10
        assert (
            report.max_deviation["11"] > 1e-6
            or report.invalid_points["11"] > 0
        )
        assert report.max_deviation["02"] > 1e-6


class TestWiderOracleMatches:
    def test_engine_matches_oracle_length8(self):
        # pattern length 8, |U| = 8, modified width 16
        space = UCPF(8, 1)
        s = klnn_distribution(8, 2)
        fids = unique_set(ADD, ENERGY, "oracle")
        poly = build_error_polynomial(space, s)
        engine = evaluate_bounds(poly, fids, 1.5)
        oracle = brute_total_error(space, s, ADD, ENERGY, 1.5)
        assert engine.upper_raw == pytest.approx(oracle.value / space.size, rel=1e-9)

    def test_bcpf_matches_oracle(self):
        # 10-pattern bounded space under the all-pairs protocol
        from dyndisc.bounds import bcpf_bounds
        from dyndisc.patterns import BCPF

        m = 4
        space = BCPF(m, frozenset({1, 2}))
        s = klnn_distribution(m, m - 1)
        for model in (LOSS, ADD):
            fids = unique_set(model, ENERGY, "oracle")
            closed = bcpf_bounds(m, {1, 2}, 1.0, fids)
            oracle = brute_total_error(space, s, model, ENERGY, 1.0)
            assert closed.upper_raw == pytest.approx(
                oracle.value / space.size, rel=1e-9
            )

    @pytest.mark.parametrize(
        "bits_b,d", [((1, 1, 0, 0), 1), ((0, 1, 1, 0), 3)]
    )
    def test_unique_fidelity_kmax_matches_explicit_cms(self, bits_b, d):
        # u=1, v=2 at m=4 (valid d is odd): compare with modified-output fidelities
        from dyndisc.bounds import unique_fidelity_kmax
        from dyndisc.gaussian import apply_gpi_pattern, direct_sum, tmsv_cm
        from dyndisc.patterns import ChannelPattern, dynamic_to_fixed

        m = 4
        s = klnn_distribution(m, m - 1)
        probe = direct_sum(*(tmsv_cm(ENERGY) for _ in s.domains))
        outs = []
        for bits in ((1, 0, 0, 0), bits_b):
            mod = dynamic_to_fixed(ChannelPattern(bits), s).bits
            outs.append(apply_gpi_pattern(probe, [LOSS.channel(b) for b in mod]))
        direct = gaussian_fidelity(outs[0], outs[1])
        fids = unique_set(LOSS, ENERGY, "oracle")
        for m_copies in (1.0, 2.5):
            assert unique_fidelity_kmax(m, 1, 2, d, fids, m_copies) == pytest.approx(
                direct ** m_copies, rel=1e-10
            )


class TestGeneralDistributions:
    def test_duplicate_domains_engine_vs_oracle(self):
        # a channel pair may be probed twice per round
        s = ProbeDomainDistribution(
            m=4, domains=((1, 2), (1, 2), (2, 3), (3, 4), (1, 4))
        )
        space = UniformAll(4)
        for model in (LOSS, ADD):
            fids = unique_set(model, ENERGY, "oracle")
            poly = build_error_polynomial(space, s)
            engine = evaluate_bounds(poly, fids, 1.0)
            oracle = brute_total_error(space, s, model, ENERGY, 1.0)
            assert engine.upper_raw == pytest.approx(
                oracle.value / space.size, rel=1e-9
            )

    def test_explicit_space_engine_vs_oracle(self):
        pats = tuple(
            ChannelPattern(bits)
            for bits in ((0, 0, 1, 0, 1), (1, 1, 0, 0, 0), (0, 1, 0, 1, 1),
                         (1, 0, 0, 0, 1), (0, 0, 0, 0, 0))
        )
        space = ExplicitSpace(pats)
        s = klnn_distribution(5, 2)
        fids = unique_set(LOSS, ENERGY, "oracle")
        engine = evaluate_bounds(build_error_polynomial(space, s), fids, 2.0)
        oracle = brute_total_error(space, s, LOSS, ENERGY, 2.0)
        assert engine.upper_raw == pytest.approx(oracle.value / space.size, rel=1e-9)

    def test_subfidelity_pattern_swap_symmetry(self):
        # swapping the two hypothesis sub-patterns leaves the oracle unchanged
        from dyndisc.channels import SUB_PATTERNS
        from dyndisc.gaussian import apply_gpi_pattern, tmsv_cm

        probe = tmsv_cm(ENERGY)
        for model in (LOSS, ADD):
            for pat_a, pat_b in SUB_PATTERNS.values():
                out_a = apply_gpi_pattern(probe, [model.channel(b) for b in pat_a])
                out_b = apply_gpi_pattern(probe, [model.channel(b) for b in pat_b])
                assert gaussian_fidelity(out_a, out_b) == pytest.approx(
                    gaussian_fidelity(out_b, out_a), abs=1e-12
                )


class TestOddChannelDynamic:
    """Odd channel counts admit no disjoint TMSV pairing; dynamic probing does."""

    def test_cpf5_k2_engine_vs_oracle(self):
        space = UCPF(5, 1)
        s = klnn_distribution(5, 2)
        for model in (LOSS, ADD):
            fids = unique_set(model, ENERGY, "oracle")
            engine = evaluate_bounds(build_error_polynomial(space, s), fids, 1.0)
            oracle = brute_total_error(space, s, model, ENERGY, 1.0)
            assert engine.upper_raw == pytest.approx(
                oracle.value / space.size, rel=1e-9
            )

    def test_uniform5_k2_engine_vs_oracle(self):
        space = UniformAll(5)
        s = klnn_distribution(5, 2)
        fids = unique_set(LOSS, ENERGY, "oracle")
        engine = evaluate_bounds(build_error_polynomial(space, s), fids, 2.0)
        oracle = brute_total_error(space, s, LOSS, ENERGY, 2.0)
        assert engine.upper_raw == pytest.approx(oracle.value / space.size, rel=1e-9)

    def test_cpf5_k4_closed_form_vs_oracle(self):
        # all-pairs protocol on an odd channel count
        fids = unique_set(LOSS, ENERGY, "oracle")
        from dyndisc.bounds import klnn_cpf_bound

        oracle = brute_total_error(
            UCPF(5, 1), klnn_distribution(5, 4), LOSS, ENERGY, 1.5
        )
        closed = klnn_cpf_bound(5, 4, 1.5, fids)
        assert closed.upper_raw == pytest.approx(oracle.value / 5, rel=1e-9)


def test_oracle_report_json_serializable():
    import json

    report = brute_total_error(
        UCPF(3, 1), klnn_distribution(3, 2), LOSS, ENERGY, 1.0
    )
    payload = json.dumps(report.as_dict())
    assert "pair_count" in payload
