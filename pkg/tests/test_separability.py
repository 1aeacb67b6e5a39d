import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from triwerner.oracles import gallery, ppt_min_eigenvalue, random_product_triples, triple_r_coords
from triwerner.permutation_algebra import ALL_PERMS
from triwerner.separability import (
    CATEGORIES,
    InclusionChainError,
    RegionLabel,
    biseparable_branch,
    biseparable_margin,
    biseparable_projection_test,
    biseparable_projection_witness,
    classify,
    classify_many,
    is_biseparable,
    is_ppt,
    is_triseparable,
    ppt_slacks,
    region_map_figure1,
    region_map_figure2,
    to_first_partition,
    triseparable_margin,
)
from triwerner.werner_states import WernerPoint, is_valid_state, relabel_partition, relabel_point, sample_valid_points

A = WernerPoint(1 / 6, 1 / 6, 0, 0, 0)
B = WernerPoint(1, 0, 0, 0, 0)
E = WernerPoint(0, 0, -1, 0, 0)
G = WernerPoint(1 / 5, 0, 0, 0, 0)
NOT_PPT = WernerPoint(0, 0, 1, 0, 0)


def test_triseparable_examples():
    assert is_triseparable(B)
    assert not is_triseparable(G)
    assert is_triseparable(WernerPoint(0.27, 0.1, 0, 0, 0))
    assert is_triseparable(A)


def test_biseparable_examples():
    assert is_biseparable(E, 1)
    assert biseparable_branch(E, 1) == "a"
    for part in (1, 2, 3):
        assert is_biseparable(G, part)
    assert biseparable_branch(G, 1) == "b"
    assert not is_biseparable(NOT_PPT, 1)
    assert biseparable_branch(NOT_PPT, 1) is None


def test_ppt_examples():
    np.testing.assert_allclose(ppt_slacks(E), (2, 0))
    assert is_ppt(E)
    np.testing.assert_allclose(ppt_slacks(B), (0, 4))
    assert is_ppt(B)
    assert ppt_slacks(NOT_PPT)[1] == -2
    assert not is_ppt(NOT_PPT)


def test_classify_examples():
    label = classify(A, 3)
    assert label.valid and label.triseparable
    assert all(label.biseparable.values()) and all(label.ppt.values())
    label = classify(NOT_PPT, 2)
    assert label.valid and not label.triseparable
    assert not label.biseparable[1] and not label.ppt[1]
    label = classify(WernerPoint(0.4, 0.4, 0.3, 0, 0), 3)
    assert not label.valid and not label.triseparable
    assert not any(label.biseparable.values()) and not any(label.ppt.values())
    assert label.category() == "invalid"


def test_categories():
    assert classify(B).category() == "triseparable"
    assert classify(G).category() == "biseparable"
    assert classify(NOT_PPT, 2).category() == "werner-entangled"
    assert set(CATEGORIES) == {"invalid", "werner-entangled", "ppt-only", "biseparable", "triseparable"}


def test_chain_violation_raises():
    bad = RegionLabel(True, True, {1: False, 2: True, 3: True}, {1: True, 2: True, 3: True})
    with pytest.raises(InclusionChainError):
        bad.check_chain()


def test_gallery_membership():
    g = gallery()
    for name in "ABCD":
        assert is_triseparable(g[name].point), name
    for name in "EFG":
        assert not is_triseparable(g[name].point), name
    for name, entry in g.items():
        assert is_biseparable(entry.point, 1), name


@pytest.mark.parametrize("name", list("BDEFG"))
def test_gallery_ppt_boundary(name):
    p = gallery()[name].point
    s1, s2 = ppt_slacks(p)
    quad = s1 * s2 / 3 - p.r2**2 - p.r3**2
    assert min(abs(s1), abs(s2), abs(quad)) <= 1e-12
    d = max(gallery()[name].min_dim, 2)
    assert ppt_min_eigenvalue(p, d, 1) == pytest.approx(0, abs=1e-8)


def test_product_states_satisfy_corrected_criterion():
    pts = triple_r_coords(random_product_triples(5000, 3, seed=0))
    assert all(is_triseparable(x) for x in pts)


def test_printed_cubic_rejects_product_states():
    # with the bracket [1 - 3r+] the cubic fails on many twirled product states,
    # which are triseparable by construction
    pts = triple_r_coords(random_product_triples(3000, 3, seed=0))
    rp, rm, r1, r2, r3 = pts.T
    lhs = (3 * r3**2 + (1 - 3 * rp) ** 2) * (1 - 6 * rm)
    rhs = (r1 + rp - rm) * ((r1 - 2 * rp + 2 * rm) ** 2 - 3 * r2**2)
    assert np.sum(lhs > rhs + 1e-10) > 100
    # on the r- = 0 slice both brackets coincide and the products pass
    pts2 = triple_r_coords(random_product_triples(3000, 2, seed=0))
    rp, rm, r1, r2, r3 = pts2.T
    lhs = (3 * r3**2 + (1 - 3 * rp) ** 2) * (1 - 6 * rm)
    rhs = (r1 + rp - rm) * ((r1 - 2 * rp + 2 * rm) ** 2 - 3 * r2**2)
    assert np.all(lhs <= rhs + 1e-10)


def test_outside_triangle_is_not_triseparable():
    # the cubic alone would admit this point; it sits beyond the vertex of the triangle
    assert not is_triseparable(WernerPoint(0.27, 0.1, 0.63, 0, 0))


@pytest.mark.parametrize("d", [3, 4])
def test_inclusion_chain(d):
    f = classify_many(sample_valid_points(20000, d, seed=d), d)
    for k in (1, 2, 3):
        assert not np.any(f["trisep"] & ~f[f"bisep{k}"])
        assert not np.any(f[f"bisep{k}"] & ~f[f"ppt{k}"])
        assert not np.any(f[f"ppt{k}"] & ~f["valid"])


def test_classify_many_matches_scalar():
    pts = sample_valid_points(300, 3, seed=9)
    f = classify_many(pts, 3)
    for i, x in enumerate(pts):
        label = classify(WernerPoint.from_array(x), 3)
        assert label.triseparable == f["trisep"][i]
        for k in (1, 2, 3):
            assert label.biseparable[k] == f[f"bisep{k}"][i]
            assert label.ppt[k] == f[f"ppt{k}"][i]


@given(st.integers(0, 2**31))
@settings(max_examples=200, deadline=None)
def test_relabeling_covariance(seed):
    x = sample_valid_points(1, 3, seed=seed)[0]
    p = WernerPoint.from_array(x)
    for s in ALL_PERMS:
        q = relabel_point(p, s)
        for k in (1, 2, 3):
            k2 = relabel_partition(k, s)
            assert biseparable_margin(p, k) == pytest.approx(biseparable_margin(q, k2), abs=1e-12)
        # T is permutation invariant; individual slack terms are not, so compare the predicate
        if abs(triseparable_margin(p)) > 1e-8:
            assert is_triseparable(p) == is_triseparable(q)


def test_partition_reduction_fixes_invariant_part():
    x = np.array([0.3, 0.1, 0.2, -0.1, 0.05])
    for k in (1, 2, 3):
        y = to_first_partition(x, k)
        assert y[:2].tolist() == x[:2].tolist()
        assert np.linalg.norm(y[2:]) == pytest.approx(np.linalg.norm(x[2:]))


def test_projection_examples():
    assert biseparable_projection_test(1 / 5, 0)
    assert biseparable_projection_witness(1 / 5, 0) == G
    assert biseparable_projection_test(0, 0)
    assert biseparable_projection_witness(0, 0).r1 == pytest.approx(-1, abs=1e-9)
    assert biseparable_projection_test(1, 0)
    assert biseparable_projection_witness(1, 0) == B
    w = biseparable_projection_witness(0, 1 / 3)
    assert w.r1 == pytest.approx(-2 / 3, abs=1e-9)
    assert not biseparable_projection_test(0, 0.5)


def test_projection_against_grid_search():
    # brute force over a 31^3 grid of the Bloch ball, the search the exact method replaces
    g = np.linspace(-1, 1, 31)
    r1, r2, r3 = (a.ravel() for a in np.meshgrid(g, g, g, indexing="ij"))
    unit = np.column_stack([r1, r2, r3])
    unit = unit[np.linalg.norm(unit, axis=1) <= 1]
    n = 12
    for i in range(n + 1):
        for j in range(n + 1 - i):
            rp, rm = i / n, j / n
            r0 = 1 - rp - rm
            pts = np.column_stack([np.full(len(unit), rp), np.full(len(unit), rm), r0 * unit])
            found = bool(np.any(biseparable_margin(pts, 1) >= -1e-10))
            exact = biseparable_projection_witness(rp, rm)
            if found:
                assert exact is not None, (rp, rm)
            if exact is not None:
                assert is_valid_state(exact, 3)
                assert is_biseparable(exact, 1)


def test_figure1_cells():
    rows = {(round(r["r_plus"], 12), round(r["r_minus"], 12)): r for r in region_map_figure1(31)}
    assert len(rows) == 31 * 32 // 2
    g = rows[(0.2, 0.0)]
    assert g["bisep_wp"] and not g["trisep"]
    assert rows[(round(1 / 6, 12), round(1 / 6, 12))]["trisep"]
    f = rows[(0.0, round(1 / 3, 12))]
    assert not f["bisep_wp"] and f["bisep_projection"]
    for r in rows.values():
        assert r["trisep"] <= r["bisep_wp"] <= r["bisep_projection"]


def test_figure2_cells():
    rows = region_map_figure2(0.27, 0.1, 21)
    assert len(rows) == 21**3
    centre = rows[len(rows) // 2]
    assert (centre["r1"], centre["r2"], centre["r3"]) == (0, 0, 0)
    assert centre["label"] == "triseparable"
    r0 = 0.63
    for r in rows:
        if r["r1"] ** 2 + r["r2"] ** 2 + r["r3"] ** 2 > r0**2 + 1e-12:
            assert r["label"] == "invalid"
    edge = classify(WernerPoint(0.27, 0.1, 0.63, 0, 0), 3)
    assert edge.valid and not edge.triseparable


def test_triseparable_set_is_permutation_invariant():
    pts = np.vstack([sample_valid_points(20000, 3, seed=1), triple_r_coords(random_product_triples(5000, 3, seed=2))])
    inside = triseparable_margin(pts) >= -1e-10
    for s in ALL_PERMS:
        moved = np.array([relabel_point(WernerPoint.from_array(x), s).as_array() for x in pts[::10]])
        assert np.array_equal(triseparable_margin(moved) >= -1e-10, inside[::10])
