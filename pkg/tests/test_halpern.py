import numpy as np
import pytest

from frcheck import halpern as h
from frcheck.logic.formula import Atom, Box, Implies, Not
from frcheck.logic.kripke import FrameProperty, check_frame_property
from frcheck.logic.sampling import random_formula

P = Atom("p")
W3 = ("w0", "w1", "w2")


def structure(weights, p_worlds=("w0", "w1")):
    return h.ProbabilityStructure(W3, {"p": set(p_worlds)}, {"x": dict(zip(W3, weights))})


@pytest.mark.parametrize(
    "weights, p_worlds, expected",
    [
        ((1 / 3, 1 / 3, 1 / 3), W3, True),
        ((1.0, 0.0, 0.0), ("w1",), False),
        ((0.5, 0.5, 0.0), ("w0", "w1"), True),
    ],
)
def test_certain_examples_agree(weights, p_worlds, expected):
    s = structure(weights, p_worlds)
    assert h.certain(s, "x", P) is expected
    assert h.certain_prime(s, "x", P) is expected


def test_zero_weight_counter_world_is_ignored():
    s = structure((0.5, 0.5, 0.0))
    assert h.certain_prime(s, "x", P) and h.holds(s, "w2", Box("x", P), h.DAGGER_PRIME)


def test_full_support_reduces_to_validity():
    s = structure((0.2, 0.3, 0.5))
    assert not h.certain(s, "x", P)
    assert h.certain(s, "x", Implies(P, P))


def test_generalized_needs_world():
    rng = np.random.default_rng(0)
    s = h.random_structure(rng, generalized=True)
    with pytest.raises(ValueError):
        h.certain(s, "x", P)


def test_weights_must_sum_to_one():
    with pytest.raises(h.StructureError):
        structure((0.3, 0.3, 0.3))
    with pytest.raises(h.StructureError):
        structure((1.2, -0.2, 0.0))


def _corpus(seed, count, generalized):
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        s = h.random_structure(rng, generalized=generalized)
        probes = [random_formula(rng, ("p", "q"), ("x", "y"), 3) for _ in range(20)]
        out.append((s, probes))
    return out


@pytest.mark.parametrize("generalized", [False, True])
def test_measure_and_support_semantics_agree(generalized):
    for s, probes in _corpus(7, 150, generalized):
        for f in probes:
            assert h.extension(s, f, h.DAGGER) == h.extension(s, f, h.DAGGER_PRIME)


def test_false_beliefs_examples():
    full = structure((0.2, 0.3, 0.5))
    assert h.false_beliefs(full, "x", [P, Not(P)]).worlds == frozenset()
    point = structure((1.0, 0.0, 0.0), ("w0",))
    fb = h.false_beliefs(point, "x", [P])
    assert fb.worlds == frozenset({"w1", "w2"}) and fb.measure == 0.0
    assert h.false_beliefs(point, "x", []).worlds == frozenset()


def test_false_beliefs_have_measure_zero():
    for s, probes in _corpus(8, 150, False):
        for a in s.agents:
            assert h.false_beliefs(s, a, probes).measure <= h.EPS


def test_false_belief_bound_needs_a_single_distribution():
    # with per-world distributions, p_x^w says nothing about worlds whose own
    # distribution differs, so the bound is only claimed for one p_x per agent
    worst = max(
        h.false_beliefs(s, a, probes, w).measure
        for s, probes in _corpus(8, 100, True)
        for a in s.agents
        for w in s.worlds
    )
    assert worst > h.EPS


def test_induced_kripke_examples():
    ident = h.GeneralizedProbabilityStructure(W3, {}, {"x": {w: {v: float(v == w) for v in W3} for w in W3}})
    m = h.induced_kripke(ident)
    assert m.frame.relation("x") == {(w, w) for w in W3}
    total = structure((0.2, 0.3, 0.5))
    assert h.induced_kripke(total).frame.relation("x") == {(u, v) for u in W3 for v in W3}


def test_induced_kripke_serial_and_kd45_shape():
    rng = np.random.default_rng(9)
    for k in range(60):
        s = h.random_structure(rng, generalized=bool(k % 2))
        m = h.induced_kripke(s)
        assert check_frame_property(m, FrameProperty.SERIAL)
        if not k % 2:
            assert check_frame_property(m, FrameProperty.TRANSITIVE)
            assert check_frame_property(m, FrameProperty.EUCLIDEAN)


def _samples(seed, count, full_support):
    rng = np.random.default_rng(seed)
    return [h.random_structure(rng, full_support=full_support) for _ in range(count)]


def _probes(seed):
    rng = np.random.default_rng(seed)
    return [random_formula(rng, ("p", "q"), ("x", "y"), 2) for _ in range(6)]


def test_kd45_sound_on_all_structures():
    report = h.soundness_probe("KD45", _samples(10, 100, False), _probes(10))
    assert report.sound and report.instances > 0


def test_s5_sound_on_full_support_structures():
    assert h.soundness_probe("S5", _samples(11, 100, True), _probes(11)).sound


def test_t_fails_with_a_zero_weight_counter_world():
    s, inst = h.t_counterexample()
    assert not h.holds(s, "w0", inst)
    report = h.soundness_probe("S5", [s], [P])
    assert not report.sound
    assert any(f.instance == "[x]p -> p" and f.worlds == ("w0",) for f in report.failures)


def test_soundness_probe_rejects_bad_input():
    with pytest.raises(ValueError):
        h.soundness_probe("KD45", [], [])
    with pytest.raises(ValueError):
        h.soundness_probe("S4", [], [P])
