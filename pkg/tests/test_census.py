import random

import pytest

from nrec.census import (
    bifurcation_sweep,
    classic_check,
    composition_suite,
    full_census,
    pass1_fired_bits,
    perwindow_census,
    sampled_census,
    seeded_window,
    transient_witnesses,
    verify_attainment,
    verify_composition_law,
    verify_period_support,
)
from nrec.chains import attractor_chain_profile
from nrec.construct import (
    admissible_periods,
    build_coef1,
    build_z,
    canonical_initial,
    derive_params,
    interleave,
)
from nrec.core import NeuronEquation, StateWindow, detect_cycle
from nrec.errors import InvalidShapeParam, MemoryGuard, MTooSmall


@pytest.fixture(scope="module")
def m3():
    params = derive_params(3, 6)
    return params, build_coef1(params)


def test_full_census_m3(m3):
    params, eq = m3
    census = full_census(eq)
    assert sum(census.chi.values()) == 1 << 18
    assert set(census.chi) <= {1, 7}
    assert census.chi == perwindow_census(eq).chi


def test_census_witnesses_converge_to_reported_period(m3):
    _, eq = m3
    census = full_census(eq)
    for p, w in census.witnesses.items():
        assert detect_cycle(eq, StateWindow(18, w)).period == p


def test_partition_independence(m3):
    _, eq = m3
    reference = pass1_fired_bits(eq, 1)[0].tobytes()
    for parts in (2, 4, 8):
        assert pass1_fired_bits(eq, parts)[0].tobytes() == reference


def test_census_matches_oracle_on_random_small_equations():
    rng = random.Random(42)
    for _ in range(20):
        k = rng.randint(4, 12)
        coeffs = tuple(rng.randint(-10, 10) for _ in range(k))
        eq = NeuronEquation(k, coeffs, rng.randint(-20, 20))
        a = full_census(eq)
        b = perwindow_census(eq)
        assert a.chi == b.chi
        assert sum(a.chi.values()) == 1 << k


def test_memory_guard():
    eq = NeuronEquation(34, (1,) * 34, 0)
    with pytest.raises(MemoryGuard):
        full_census(eq)


def test_checkpoint_resume_byte_identical(m3, tmp_path):
    _, eq = m3
    plain = full_census(eq)

    path1 = tmp_path / "full.ckpt"
    c1 = full_census(eq, checkpoint_path=str(path1))
    assert c1.chi == plain.chi

    # interrupt after 10 chunks, then resume
    path2 = tmp_path / "resume.ckpt"
    calls = []

    class Stop(Exception):
        pass

    import nrec.census as census_mod

    orig = census_mod._Checkpoint.save_chunk

    def failing(self, c, bits, done, f):
        orig(self, c, bits, done, f)
        calls.append(c)
        if len(calls) == 10:
            raise Stop()

    census_mod._Checkpoint.save_chunk = failing
    try:
        with pytest.raises(Stop):
            full_census(eq, checkpoint_path=str(path2))
    finally:
        census_mod._Checkpoint.save_chunk = orig

    c2 = full_census(eq, checkpoint_path=str(path2))
    assert c2.chi == plain.chi and c2.witnesses == plain.witnesses
    assert path1.read_bytes() == path2.read_bytes()
    # a finished checkpoint can be reloaded directly
    c3 = full_census(eq, checkpoint_path=str(path2))
    assert c3.chi == plain.chi


def test_checkpoint_mismatch(m3, tmp_path):
    from nrec.errors import CheckpointMismatch

    params, eq = m3
    path = tmp_path / "c.ckpt"
    full_census(eq, checkpoint_path=str(path))
    other = build_coef1(derive_params(4, 8))
    with pytest.raises(CheckpointMismatch):
        full_census(other, checkpoint_path=str(path))


def test_sampled_census_determinism_and_containment():
    params = derive_params(5, 12)
    eq = interleave(build_coef1(params), 2)
    a = sampled_census(eq, 200, seed=1)
    b = sampled_census(eq, 200, seed=1)
    assert a.chi == b.chi and a.witnesses == b.witnesses
    assert set(a.chi) <= admissible_periods(params, params.primes)


def test_sampled_census_zero_window():
    eq = build_coef1(derive_params(3, 6))
    # seeded window is deterministic; the n=1 contract is about aggregation
    c = sampled_census(eq, 1, seed=7)
    assert sum(c.chi.values()) == 1
    assert sum(c.transients.values()) == 1


def test_seeded_window_platform_stable():
    w = seeded_window(30, 0, 0)
    assert w == seeded_window(30, 0, 0)
    assert w != seeded_window(30, 0, 1)
    assert seeded_window(144, "x", 5).length == 144


def test_verify_period_support(m3):
    params, eq = m3
    census = full_census(eq)
    assert verify_period_support(census, {1, 7})["pass"]
    bad = verify_period_support(census, {1})
    assert not bad["pass"]
    [violator] = bad["violators"]
    assert violator["period"] == 7
    assert detect_cycle(eq, StateWindow(18, violator["witness"])).period == 7


def test_verify_attainment_m5():
    params = derive_params(5, 12)
    report = verify_attainment(params)
    assert report["pass"]
    assert report["attained"] == [1, 22, 26, 286]


def test_transient_witnesses(m3):
    params, eq = m3
    for w, depth in transient_witnesses(eq, canonical_initial(params, 0), 3, 6):
        cs = detect_cycle(eq, w)
        assert cs.period == 7 and cs.transient == depth


def test_composition_law_cycles():
    params = derive_params(5, 12)
    eq = build_coef1(params)
    r = verify_composition_law(
        eq, [canonical_initial(params, 0), canonical_initial(params, 1)]
    )
    assert r["pass"] and r["measured"] == (0, 286)


def test_composition_law_fixed_points():
    params = derive_params(5, 12)
    eq = build_coef1(params)
    r = verify_composition_law(eq, [StateWindow(30, 0), StateWindow(30, 0)])
    assert r["pass"] and r["measured"][1] == 1


def test_composition_law_nonzero_transients():
    params = derive_params(5, 12)
    eq = build_coef1(params)
    witness, depth = transient_witnesses(eq, canonical_initial(params, 0), 3, 1)[0]
    r = verify_composition_law(eq, [witness, canonical_initial(params, 1)])
    assert r["pass"]
    assert r["measured"] == (2 * depth, 286)


def test_composition_suite():
    params = derive_params(5, 12)
    report = composition_suite(params, 50, seed="unit")
    assert report["pass"]
    assert report["nonzero_transient_cases"] > 0


@pytest.mark.parametrize(
    "kind,kwargs,k",
    [
        ("palindromic", {}, 8),
        ("j_palindromic", {"j": 2}, 9),
        ("geometric_neg", {"b": "1/2"}, 10),
        ("geometric_pos", {"b": "1/2"}, 10),
        ("geometric_pos", {"b": "3/8"}, 9),
    ],
)
def test_classic_checks(kind, kwargs, k):
    report = classic_check(kind, k, 100, seed=3, **kwargs)
    assert report["pass"], report["failures"][:3]


def test_classic_check_bad_params():
    with pytest.raises(InvalidShapeParam):
        classic_check("geometric_pos", 8, 10, 0, b="2/3")
    with pytest.raises(InvalidShapeParam):
        classic_check("geometric_neg", 8, 10, 0, b="5/8")  # 5/8 > 1/2
    with pytest.raises(InvalidShapeParam):
        classic_check("j_palindromic", 8, 10, 0, j=9)
    with pytest.raises(InvalidShapeParam):
        classic_check("nonsense", 8, 10, 0)


def test_bifurcation_sweep_guard():
    with pytest.raises(MTooSmall):
        bifurcation_sweep(derive_params(5, 12), 10, "x")


def test_bifurcation_sweep_small():
    params = derive_params(8, 16)
    sweep = bifurcation_sweep(params, 25, "unit")
    assert sweep.ok
    assert [r["predicted"] for r in sweep.rows] == [
        [1, 57, 69, 1311], [1, 69], [1]
    ]
    assert sweep.rows[-1]["observed"] == [1]


def test_single_chain_property_from_census(m3):
    params, eq = m3
    census = full_census(eq)
    for p, w in census.witnesses.items():
        cs = detect_cycle(eq, StateWindow(18, w))
        prof = attractor_chain_profile(list(cs.attractor_bits), params)
        assert not prof["violation"]
        if p > 1:
            assert len(prof["primes_with_chain"]) == 1
