"""Smoke test for the picodim extension module.

Run after `pip install --no-build-isolation -e crates/python`:

    python3 crates/python/python/smoke_test.py
"""

import json
from fractions import Fraction
from math import comb

import picodim


def ut2(n):
    return 2 ** (n - 1) * (n - 2) + 2


def m2(n):
    return comb(2 * n + 2, n + 1) // (n + 2) - comb(n, 3) + 1 - 2 ** n


def main():
    ut = picodim.Algebra.build("ut:1,1")
    mat = picodim.Algebra.build("mat:2")
    assert ut.dim == 3 and mat.dim == 4
    assert ut.par() == (2, 1) and mat.par() == (4, 0)
    assert ut.exp() == 2 and mat.exp() == 4
    assert ut.radical_dim() == 1

    again = picodim.Algebra.from_json(mat.to_json())
    assert again.basis == mat.basis

    assert picodim.codim_sequence(ut, 6) == [ut2(n) for n in range(1, 7)]
    assert picodim.codim_sequence(mat, 4) == [m2(n) for n in range(1, 5)]
    assert picodim.codim_exact(mat, 4) == 23
    recs = json.loads(picodim.codim_records(ut, 3))
    assert all(r["verified"] for r in recs["records"])

    cap5 = picodim.Polynomial.capelli(5)
    cap4 = picodim.Polynomial.capelli(4)
    assert cap5.is_identity(mat)
    assert not cap4.is_identity(mat)
    witness = json.loads(cap4.find_nonzero_evaluation(mat))
    assert sum(Fraction(v) != 0 for v in witness["value"]) == 1

    comm = picodim.Polynomial.from_terms(["x", "y"], [(["x", "y"], "1"), (["y", "x"], "-1")])
    assert comm.is_identity(picodim.Algebra.build("F"))
    assert comm.alternate(["x", "y"]).terms() == [(["x", "y"], "2/1"), (["y", "x"], "-2/1")]

    status = json.loads(picodim.basicness_check(ut))
    assert status["status"] == "certified_basic" and status["kappa"] == [2, 1]

    assert picodim.predicted_t(1, 4, 0) == "-3/2"
    rows = picodim.regev_beckner(["1", "4"], ["0", "-1.5"], [50, 200])
    gaps = [abs(r[3] - 1) for r in rows]
    assert gaps[1] < gaps[0] < 0.05

    report = json.loads(picodim.conjecture_report(ut, 6))
    assert report["predicted_t"] == "1/1"

    acal = picodim.Algebra.build("assoc:1,1;1;1")
    assert len(picodim.path_structures(acal, 0)) == 2
    for n in range(1, 7):
        assert picodim.upper_bound_series(acal, n) == 2 ** n + n * 2 ** (n - 1) >= ut2(n)

    try:
        picodim.Algebra.build("mat:0")
    except ValueError:
        pass
    else:
        raise AssertionError("bad builder spec accepted")

    print(f"picodim {picodim.__version__}: smoke test passed")


if __name__ == "__main__":
    main()
