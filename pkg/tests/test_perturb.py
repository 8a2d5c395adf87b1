"""Tests for the identity-perturbation sweep."""

import json
import math

import numpy as np
import pytest

from qraclab.errors import (
    BudgetExceededError,
    RankDeficientError,
    ValidationError,
)
from qraclab.mub import check_unbiased
from qraclab.oiscan import scan
from qraclab.perturb import (
    SweepReport,
    SweepSpec,
    default_grid,
    perturb_set,
    sweep,
    sweep_to_csv,
    sweep_to_json,
)
from qraclab.qrac import max_success_probability


def limit_value(d):
    # Exact delta -> infinity value for a three-basis subset of identical
    # computational-like bases: (d^2 + 3d - 1)/(3 d^2).
    return (d * d + 3 * d - 1) / (3 * d * d)


# -- grid and spec validation ---------------------------------------------------


def test_default_grid_shape():
    g = default_grid()
    assert len(g) == 101
    assert g[0] == 0.0
    assert g[-1] == 2.0
    assert g[1] == 0.02
    assert all(b > a for a, b in zip(g, g[1:]))


def test_spec_validation():
    with pytest.raises(ValidationError):
        SweepSpec(dim=5, delta_grid=())
    with pytest.raises(ValidationError):
        SweepSpec(dim=5, delta_grid=(0.0, 0.5, 0.5))
    with pytest.raises(ValidationError):
        SweepSpec(dim=5, delta_grid=(0.5, 0.0))
    with pytest.raises(ValidationError):
        SweepSpec(dim=5, delta_grid=(0.1, 0.2))  # no zero
    with pytest.raises(ValidationError):
        SweepSpec(dim=5, delta_grid=(-0.5, 0.0))
    with pytest.raises(ValidationError):
        SweepSpec(dim=5, n=0)


def test_sweep_validation(mubs):
    ms = mubs(5)
    with pytest.raises(ValidationError):
        sweep(SweepSpec(dim=3, delta_grid=(0.0, 0.5)), ms)
    bad = [((0, 0, 1),), ((0, 1, 99),), ((0, 1),)]
    for subsets in bad:
        with pytest.raises(ValidationError):
            sweep(SweepSpec(dim=5, delta_grid=(0.0, 0.5), subsets=subsets), ms)


def test_sweep_budget(mubs):
    ms = mubs(17)
    grid = tuple(k * 0.001 for k in range(600))
    with pytest.raises(BudgetExceededError):
        sweep(SweepSpec(dim=17, delta_grid=grid), ms)


# -- the perturbation itself -------------------------------------------------------


def test_perturb_rejects_negative_delta(mubs):
    with pytest.raises(ValidationError):
        perturb_set(mubs(3), -0.1)


def test_perturb_zero_is_identity_up_to_phase(mubs):
    ms = mubs(5)
    out = perturb_set(ms, 0.0)
    assert len(out) == len(ms.bases)
    for orig, new in zip(ms.bases, out):
        assert new.label.startswith("so(")
        assert orig.label in new.label
        assert np.max(np.abs(np.abs(new.matrix) - np.abs(orig.matrix))) < 1e-12
        for j in range(5):
            ov = abs(np.vdot(new.matrix[:, j], orig.matrix[:, j]))
            assert ov == pytest.approx(1.0, abs=1e-12)


def test_perturb_output_unitary_not_unbiased(mubs):
    ms = mubs(5)
    out = perturb_set(ms, 0.3)
    worst = 0.0
    for i in range(len(out)):
        m = out[i].matrix
        assert np.max(np.abs(m.conj().T @ m - np.eye(5))) < 1e-12
        for j in range(i + 1, len(out)):
            worst = max(worst, check_unbiased(out[i], out[j]))
    assert worst > 1e-3  # unbiasedness is genuinely broken at delta = 0.3
    assert worst < 1.0


def test_perturb_singular_at_delta_one(mubs):
    # U + I is singular when -1 is an eigenvalue of U, which happens for
    # at least one basis in these families.
    for d in [2, 5]:
        with pytest.raises(RankDeficientError):
            perturb_set(mubs(d), 1.0)


# -- sweep behaviour ------------------------------------------------------------------


def test_sweep_dim2_default(mubs):
    ms = mubs(2)
    rep = sweep(SweepSpec(dim=2), ms)
    assert isinstance(rep, SweepReport)
    assert rep.skipped_deltas == (1.0,)
    assert len(rep.delta_grid) == 100
    assert 1.0 not in rep.delta_grid
    assert len(rep.curves) == 1
    assert len(rep.curves[0].values) == 100
    # The unperturbed triple is optimal for qubits: nothing surpasses it.
    assert not rep.surpass
    assert rep.best_delta == 0.0
    assert rep.best_value == pytest.approx(rep.p_plus, abs=1e-12)
    assert max(rep.curves[0].values) <= rep.p_plus + 1e-9
    assert rep.best_from_minus is None
    assert 0.0 < rep.max_slope < 1.0


def test_sweep_zero_matches_scan(mubs):
    ms = mubs(5)
    sc = scan(ms)
    rep = sweep(SweepSpec(dim=5, delta_grid=(0.0, 0.3), subsets=((0, 1, 2),)),
                ms, scan_report=sc)
    assert abs(rep.curves[0].values[0] - dict(sc.entries)[(0, 1, 2)]) < 1e-9
    assert rep.p_plus == sc.p_plus
    assert rep.p_minus == sc.p_minus


def test_sweep_scan_dimension_mismatch(mubs):
    sc3 = scan(mubs(3))
    with pytest.raises(ValidationError):
        sweep(SweepSpec(dim=5, delta_grid=(0.0, 0.5)), mubs(5), scan_report=sc3)


def test_sweep_subsets_are_sorted(mubs):
    ms = mubs(3)
    rep = sweep(SweepSpec(dim=3, delta_grid=(0.0, 0.2), subsets=((2, 0, 1),)), ms)
    assert rep.curves[0].subset == (0, 1, 2)


def test_sweep_dual_route_at_perturbed_point(mubs):
    # The batched cubic route must match a full eigensolver recomputation
    # on the perturbed (biased) bases.  At delta = 0 the unperturbed
    # triplet has words at the branch-crossing boundary where the cubic's
    # arccos loses digits, hence the looser bound there (the sweep itself
    # cross-checks delta = 0 against the analytic scan within 1e-9).
    ms = mubs(5)
    rep = sweep(SweepSpec(dim=5, delta_grid=(0.0, 0.3, 1.5),
                          subsets=((1, 2, 3),)), ms)
    for delta, got in zip(rep.delta_grid, rep.curves[0].values):
        pert = perturb_set(ms, delta)
        ref = max_success_probability([pert[1], pert[2], pert[3]],
                                      method="full").value
        assert abs(got - ref) < (1e-9 if delta == 0.0 else 1e-12)


@pytest.mark.parametrize("d", [3, 5])
def test_sweep_large_delta_limit(d, mubs):
    ms = mubs(d)
    rep = sweep(SweepSpec(dim=d, delta_grid=(0.0, 1000.0)), ms)
    lim = limit_value(d)
    lower = (1 + 2 / d) / 3
    assert lim >= lower
    for curve in rep.curves:
        tail = curve.values[-1]
        assert abs(tail - lim) < 1e-3
        assert tail >= lower - 1e-12


def test_sweep_surpass_semantics(mubs):
    # Subset (3,4,6) of the d = 9 family peaks near delta = 0.14 at about
    # 2.1e-4 above the best unperturbed value, so the verdict flips with
    # the margin.
    ms = mubs(9)
    sc = scan(ms)
    spec = SweepSpec(dim=9, delta_grid=(0.0, 0.14), subsets=((3, 4, 6),))
    rep = sweep(spec, ms, scan_report=sc, margin=1e-4)
    assert rep.surpass
    assert rep.best_delta == 0.14
    assert rep.best_subset == (3, 4, 6)
    assert rep.best_value == pytest.approx(0.532661275946045, abs=1e-9)
    assert rep.best_value > rep.p_plus + 1e-4
    assert rep.best_from_minus is True
    strict = sweep(spec, ms, scan_report=sc, margin=1e-3)
    assert not strict.surpass
    assert strict.margin == 1e-3
    default = sweep(spec, ms, scan_report=sc)
    assert not default.surpass  # default margin is 1e-3


def test_sweep_best_from_plus_cluster(mubs):
    ms = mubs(5)
    sc = scan(ms)
    rep = sweep(SweepSpec(dim=5, delta_grid=(0.0, 0.1), subsets=((0, 1, 2),)),
                ms, scan_report=sc)
    assert rep.best_from_minus is False  # (0,1,2) sits in the top cluster


def test_sweep_pair_subsets(mubs):
    # n = 2 path: references are the delta = 0 values, every pair starts
    # at the two-basis closed form.
    ms = mubs(3)
    rep = sweep(SweepSpec(dim=3, delta_grid=(0.0, 0.5), n=2), ms)
    assert rep.n == 2
    assert len(rep.curves) == 6  # C(4, 2)
    assert rep.p_plus == pytest.approx((1 + 1 / math.sqrt(3)) / 2, abs=1e-10)
    assert rep.best_from_minus is None


# -- serialization ----------------------------------------------------------------------


def test_sweep_csv_round_trip(mubs):
    ms = mubs(3)
    spec = SweepSpec(dim=3, delta_grid=(0.0, 0.2, 0.4))
    rep = sweep(spec, ms)
    text = sweep_to_csv(rep)
    lines = text.splitlines()
    assert lines[0] == "mu1,mu2,mu3,delta,P"
    assert len(lines) == 1 + len(rep.curves) * len(rep.delta_grid)
    row = lines[1].split(",")
    assert (int(row[0]), int(row[1]), int(row[2])) == rep.curves[0].subset
    assert float(row[3]) == rep.delta_grid[0]
    assert float(row[4]) == rep.curves[0].values[0]
    assert sweep_to_csv(sweep(spec, ms)) == text


def test_sweep_json_document(mubs):
    ms = mubs(2)
    rep = sweep(SweepSpec(dim=2), ms)
    doc = json.loads(sweep_to_json(rep))
    assert doc["dim"] == 2
    assert doc["skipped_deltas"] == [1.0]
    assert doc["surpass"] is False
    assert doc["margin"] == 1e-3
    assert doc["best_subset"] == [0, 1, 2]
    assert doc["best_from_minus"] is None
    assert len(doc["curves"]) == 1
    assert doc["curves"][0]["best_value"] == rep.best_value
    assert doc["p_plus"] == rep.p_plus
