"""Smoke tests for the _hinffr extension module."""

import json

import numpy as np
import pytest

import _hinffr as h


def test_scalar_lmi_text_roundtrip_and_solve():
    text = "1 1\n2\n1\n1\n"
    lmi = h.StdLmi.from_text(text)
    assert lmi.dim == 1
    assert lmi.num_vars == 1
    assert lmi.to_text() == text

    rep = h.solve(lmi)
    assert rep.status == "Optimal"
    # min x s.t. x - 2 >= 0
    assert abs(float(rep.x[0]) - 2.0) <= 1e-5
    assert abs(rep.objective_primal - rep.objective_dual) <= 1e-5

    errs = h.dimacs(lmi, rep)
    assert abs(errs.err5) <= 1e-5
    assert errs.err2 == 0.0

    with pytest.raises(h.ParseError):
        h.StdLmi.from_text("1 1\n2\n1\n")  # truncated


def test_plant_json_roundtrip():
    p = h.generate_plant(7, 5, 5, 2, [-1.0, -2.0, -3.0], 3)
    q = h.Plant.from_json(p.to_json())
    for name in ("A", "B1", "B2", "C1", "D11", "D12"):
        assert np.array_equal(getattr(p, name), getattr(q, name))

    with pytest.raises(h.ParseError):
        h.Plant.from_json("{ not json")


def test_diagnosis_reports_planted_zeros():
    p = h.generate_plant(7, 5, 5, 2, [-1.0, -2.0, -3.0], 5)
    zeros = sorted(z.lam.real for z in h.invariant_zeros(p))
    assert np.allclose(zeros, [-3.0, -2.0, -1.0], atol=1e-6)

    feas = json.loads(h.feasibility_json(p))
    assert feas["stabilizable"] is True
    assert feas["primal_strongly_feasible"] is True
    assert feas["dual_strongly_feasible"] is False
    assert feas["d12_full_column_rank"] is True


def test_full_synthesis_pipeline():
    p = h.generate_plant(7, 5, 5, 2, [-1.0, -2.0, -3.0], 5)

    syn = h.assemble_synth(p)
    assert syn.lmi.dim == 24
    assert syn.lmi.num_vars == 43

    cert = h.stable_zero_certificate(p)
    assert cert.r == 3

    rr = h.reduce_full_rank(p, cert)
    assert rr.mode == "full_rank"
    assert rr.r == 3
    assert rr.reduced_lmi.lmi.dim == 18
    assert rr.reduced_lmi.lmi.num_vars == 19

    rep = h.solve(rr.reduced_lmi.lmi)
    assert rep.status == "Optimal"
    gamma, X, Y = rr.reduced_lmi.unpack(rep.x)
    assert gamma > 0.0

    ktilde = h.gain_from_solution(X, Y)
    K = h.recover_gain(rr.Rhat_gain, ktilde, rr.T)
    assert K.shape == (2, 7)

    cl = h.close_loop(p, K)
    assert h.is_hurwitz(cl.A)
    assert h.hinf_norm(cl) <= gamma * (1.0 + 1e-3)

    # The cancelled modes appear in the closed-loop spectrum.
    eigs = np.linalg.eigvals(cl.A)
    for target in (-1.0, -2.0, -3.0):
        assert min(abs(eigs - target)) <= 1e-5


def test_deficient_feedthrough_route():
    p = h.generate_plant_d12_deficient(7, 5, 5, 2, 2)
    assert h.leading_zero_columns(p.D12) == 1

    nd = h.normalize_d12(p)
    rr = h.reduce_rank_deficient(nd)
    assert rr.mode == "rank_deficient_d12"
    assert rr.r == 1

    # The reduction agrees with the differentiator route for any alpha.
    aug = h.augment_differentiator(nd.plant, 1.0)
    rr2 = h.reduce_full_rank(aug, h.stable_zero_certificate(aug))
    for name in ("A", "B1", "B2", "C1", "D11", "D12"):
        a = getattr(rr.reduced_plant, name)
        b = getattr(rr2.reduced_plant, name)
        assert np.allclose(a, b, atol=1e-8)


def test_dimension_errors_raise():
    with pytest.raises(h.DimensionMismatch):
        h.generate_plant(2, 5, 5, 2, [-1.0, -2.0, -3.0], 1)
    with pytest.raises(h.DimensionMismatch):
        h.generate_plant(7, 5, 5, 2, [1.0], 1)
