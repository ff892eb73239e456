"""First/second-order bifurcation machinery: linear parts, rank/pivots,
series elimination, heuristic zero finding, cyclicity accounting."""

import pytest
from gmpy2 import mpq

from lyap.bifurcation import (cyclicity_bound, find_zero, linear_parts,
                              LinearPartMatrix, rank_pivots, rationalize,
                              series_eliminate)
from lyap.certify import Indeterminate
from lyap.lyapunov import compute_lyapunov
from lyap.parsing import parse_poly, parse_ratfunc
from lyap.poly import Truncation, as_ratfunc
from lyap.system import (NormalFormSystem, PerturbationTemplate, parse_system,
                         perturb)

LAMS = ("l1", "l2", "l3", "l4")


@pytest.fixture(scope="module")
def toy():
    """Hamiltonian cubic center with a 4-parameter quadratic perturbation;
    the linear-part matrix has rank 1 with pivot l1."""
    base = parse_system("vars x y\ndx = -y\ndy = x + x^2\n")
    nf = NormalFormSystem(base.state, base.params, base.P, base.Q)
    one = parse_poly("1", ("x", "y"))
    tpl = PerturbationTemplate(
        (one, one),
        ([(2, 0, "l1"), (1, 1, "l2"), (0, 2, "l3")], [(1, 1, "l4")]))
    pert = perturb(nf, tpl)
    seq = compute_lyapunov(pert, 3, trunc=Truncation(LAMS, 2))
    return pert, seq


def test_linear_parts_exact_gradient(toy):
    pert, seq = toy
    m = linear_parts(seq, LAMS)
    assert m.lambdas == LAMS
    assert len(m.entries) == 3
    # central finite differences are exact on the degree-2 truncated
    # constants, so the gradient must match them exactly for every step size
    for eps in (mpq(1, 2), mpq(1, 3), mpq(2, 7)):
        for col, lam in enumerate(LAMS):
            plus = {n: (eps if n == lam else mpq(0)) for n in LAMS}
            minus = {n: (-eps if n == lam else mpq(0)) for n in LAMS}
            for row in range(3):
                vp = seq.constants[row].evaluate(plus)
                vm = seq.constants[row].evaluate(minus)
                grad = (vp - vm) / (2 * eps)
                assert m.entries[row][col].constant_value() == grad


def test_linear_parts_unknown_lambda(toy):
    _, seq = toy
    with pytest.raises(ValueError):
        linear_parts(seq, ("l1", "nope"))


def test_rank_pivots(toy):
    _, seq = toy
    m = linear_parts(seq, LAMS)
    info = rank_pivots(m)
    assert info["rank"] == 1
    assert info["pivot_columns"] == ["l1"]


def test_rank_invariant_under_row_combination(toy):
    _, seq = toy
    m = linear_parts(seq, LAMS)
    base_rank = rank_pivots(m)["rank"]
    c = parse_ratfunc("7/3", ("x",))
    new_rows = [list(r) for r in m.entries]
    new_rows[1] = [a + c * b for a, b in zip(new_rows[1], new_rows[0])]
    m2 = LinearPartMatrix(new_rows, m.lambdas)
    assert rank_pivots(m2)["rank"] == base_rank


def test_series_eliminate_soundness(toy):
    _, seq = toy
    red = series_eliminate(seq, LAMS)
    assert red.r == 1 and red.pivots == ("l1",)
    tr = Truncation(LAMS, red.order)
    bindings = dict(red.series)
    for j in range(1, red.r + 1):
        subbed = seq[j].substitute(
            {k: v for k, v in bindings.items()}).reduced()
        assert subbed.num.truncate(tr).is_zero()
    # the reduced constants beyond the pivots are quadratic forms here
    for rc in red.reduced:
        assert rc.kind == "quadratic"
        assert rc.value.num.truncate(Truncation(LAMS, 1)).is_zero()


def test_series_eliminate_all_zero_perturbation():
    base = parse_system("vars x y\nparams l1\ndx = -y + 0*l1\ndy = x\n")
    nf = NormalFormSystem(base.state, base.params, base.P, base.Q)
    seq = compute_lyapunov(nf, 2, trunc=Truncation(("l1",), 2))
    red = series_eliminate(seq, ("l1",))
    assert red.r == 0
    assert all(rc.kind == "undetermined" or rc.value.is_zero()
               for rc in red.reduced)


def test_find_zero_1d():
    f = parse_ratfunc("x - 1/3", ("x",))
    pt = find_zero([f], {"x": mpq(1, 2)})
    assert abs(pt["x"] - mpq(1, 3)) < mpq(1, 10**9)


def test_find_zero_2d():
    fs = [parse_ratfunc("x^2 + y^2 - 1", ("x", "y")),
          parse_ratfunc("x - y", ("x", "y"))]
    pt = find_zero(fs, {"x": mpq(7, 10), "y": mpq(7, 10)})
    assert abs(pt["x"] - pt["y"]) < mpq(1, 10**9)
    assert abs(pt["x"] ** 2 + pt["y"] ** 2 - 1) < mpq(1, 10**8)


def test_find_zero_no_convergence():
    f = parse_ratfunc("x^2 + 1", ("x",))
    with pytest.raises(Exception):
        find_zero([f], {"x": mpq(1)})


def test_rationalize():
    assert rationalize(0.5) == mpq(1, 2)
    r = rationalize(1 / 3)
    assert abs(r - mpq(1, 3)) < mpq(1, 10**12)
    assert r.denominator <= 10**15


class _FakeCert:
    pass


def test_cyclicity_accounting_rules():
    certs = [_FakeCert(), _FakeCert()]
    assert cyclicity_bound("rank-only", 18).bound == 18
    assert cyclicity_bound("first-order", 4, 1, certs).bound == 6
    assert cyclicity_bound("first-order", 10, 2, certs + [_FakeCert()]).bound \
        == 13
    assert cyclicity_bound("second-order", 8, 5, certs).bound == 13
    assert cyclicity_bound("second-order", 13, 9, certs).bound == 22


def test_cyclicity_refuses_without_certificates():
    with pytest.raises(ValueError):
        cyclicity_bound("first-order", 4, 1, [])
    with pytest.raises(ValueError):
        cyclicity_bound("first-order", 4, 1, [_FakeCert()])  # needs >= 2
    with pytest.raises(ValueError):
        cyclicity_bound("second-order", 8, 5, None)


def test_cyclicity_rejects_indeterminate():
    bad = [Indeterminate("face sign unresolved"), _FakeCert()]
    with pytest.raises(ValueError):
        cyclicity_bound("first-order", 4, 1, bad)


def test_cyclicity_unknown_method():
    with pytest.raises(ValueError):
        cyclicity_bound("third-order", 1)
