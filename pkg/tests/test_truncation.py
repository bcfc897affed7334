import random

import pytest

from symdyn.envelope import analyze_diagram
from symdyn.errors import ArgumentError
from symdyn.randgen import random_diagram
from symdyn.scenarios import SCENARIO_NAMES, scenario_data
from symdyn.truncation import build_space, compare_with_exact, truncated_analyze
from fractions import Fraction


def _h0_for(name):
    return Fraction(3, 2) if name in ("example2", "example3") else None


@pytest.mark.parametrize("name", SCENARIO_NAMES)
@pytest.mark.parametrize("T", [10, 20, 40])
def test_truncation_matches_exact_on_scenarios(name, T):
    data = scenario_data(name, _h0_for(name))
    exact = analyze_diagram(data.diagram, data.hseq, data.perseq)
    mismatches = compare_with_exact(data.diagram, data.hseq, data.perseq, T, exact)
    assert mismatches == []


def test_truncation_matches_exact_on_random_diagrams():
    rng = random.Random(77)
    checked = 0
    for _ in range(12):
        D, hseq, perseq = random_diagram(rng)
        exact = analyze_diagram(D, hseq, perseq)
        mismatches = compare_with_exact(D, hseq, perseq, 20, exact)
        assert mismatches == []
        checked += 1
    assert checked == 12


def test_truncation_space_shape():
    data = scenario_data("example1")
    space = build_space(data.diagram, 10, data.hseq, data.perseq)
    ids = {nid for nid, _ in space.points}
    assert ids == {n.node_id for n in data.diagram.nodes}
    # inner parameters run far beyond the outer truncation
    deep_caps = space.truncations["mu_bottom"]
    assert deep_caps[0] == 10 and deep_caps[1] > 2 * 10


def test_truncation_rejects_tiny_T():
    data = scenario_data("example1")
    with pytest.raises(ArgumentError):
        truncated_analyze(data.diagram, data.hseq, data.perseq, 2)
