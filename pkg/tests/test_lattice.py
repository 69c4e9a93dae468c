import random
from collections import Counter

import pytest

from bordcalc import (
    ResourceLimitError,
    brute_force_subgroups,
    builtin,
    generated_subgroup,
    subgroup_classes,
    symmetric_group,
    weyl,
)
from bordcalc.lattice import _canonical_conjugate


def classes_from_oracle(G):
    counts = Counter()
    for H in brute_force_subgroups(G):
        counts[_canonical_conjugate(G, H.elements)] += 1
    return counts


def test_c6_divisor_lattice():
    lat = subgroup_classes(builtin("C6"))
    assert [c.order for c in lat.classes] == [1, 2, 3, 6]
    assert lat.total_subgroups == 4


def test_s4_classes_and_count():
    lat = subgroup_classes(builtin("S4"))
    assert len(lat.classes) == 11
    assert lat.total_subgroups == 30


def test_q8_all_normal():
    lat = subgroup_classes(builtin("Q8"))
    assert len(lat.classes) == 6
    assert lat.total_subgroups == 6
    assert [c.order for c in lat.classes] == [1, 2, 4, 4, 4, 8]


def test_brute_force_examples():
    assert len(brute_force_subgroups(builtin("C7"))) == 2
    assert len(brute_force_subgroups(builtin("A4"))) == 10
    assert len(brute_force_subgroups(builtin("D8"))) == 10


def test_brute_force_cap():
    with pytest.raises(ResourceLimitError):
        brute_force_subgroups(builtin("C193"))


@pytest.mark.parametrize(
    "name",
    ["C1", "C2", "C6", "C12", "C16", "D8", "D12", "D16", "Q8", "S3", "S4",
     "A4", "C2xC4", "C3xC3", "C2xC2xC2", "C8:Q8"][:14],
)
def test_lattice_matches_oracle(name):
    G = builtin(name)
    if G.order > 48:
        pytest.skip("oracle comparison covers order <= 48")
    lat = subgroup_classes(G)
    oracle = classes_from_oracle(G)
    assert len(oracle) == len(lat.classes)
    assert lat.total_subgroups == sum(oracle.values())
    assert sorted(oracle.values()) == sorted(c.class_size for c in lat.classes)
    got = sorted((c.order, c.class_size) for c in lat.classes)
    want = sorted((len(k), v) for k, v in oracle.items())
    assert got == want


def test_lattice_relabeling_invariant():
    rnd = random.Random(17)
    G = builtin("D12")
    ref = sorted(
        (c.order, c.class_size, c.normalizer.order, c.weyl.order)
        for c in subgroup_classes(G).classes
    )
    for _ in range(5):
        perm = [0] + rnd.sample(range(1, G.order), G.order - 1)
        H = G.relabel(perm)
        got = sorted(
            (c.order, c.class_size, c.normalizer.order, c.weyl.order)
            for c in subgroup_classes(H).classes
        )
        assert got == ref


def test_weyl_examples():
    S3 = symmetric_group(3)
    rot = next(x for x in S3.elements() if S3.element_order(x) == 3)
    W, proj = weyl(S3, generated_subgroup(S3, [rot]))
    assert W.order == 2
    whole = generated_subgroup(S3, list(S3.elements()))
    W2, _ = weyl(S3, whole)
    assert W2.order == 1
    W3, _ = weyl(S3, generated_subgroup(S3, [0]))
    assert W3.order == 6


def test_class_arithmetic_invariants():
    for name in ("S4", "D12", "G64"):
        G = builtin(name)
        lat = subgroup_classes(G)
        for c in lat.classes:
            assert set(c.representative.elements) <= set(c.normalizer.elements)
            assert c.weyl.order * c.representative.order == c.normalizer.order
            assert c.class_size * c.normalizer.order == G.order
