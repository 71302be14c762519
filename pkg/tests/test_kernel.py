import pytest
from hypothesis import given, settings

from applied_lambda import _pykernel, kernel
from applied_lambda.library import bundle
from applied_lambda.rewrite import redexes
from applied_lambda.syntax import canonical
from termgen import TermGen

REC = bundle("REC").system
MBR = bundle("MBR").system

try:
    from applied_lambda import _ckernel
except ImportError:  # pragma: no cover
    _ckernel = None

needs_compiled = pytest.mark.skipif(_ckernel is None, reason="compiled kernel not built")


def test_backend_reported():
    assert kernel.BACKEND in ("cython", "python")
    assert (kernel.BACKEND == "cython") == (kernel.compiled_available() and kernel.impl is not _pykernel)


@pytest.mark.parametrize("seed", range(40))
def test_python_kernel_matches_named_reduction(seed):
    t = TermGen(seed).term()
    named = [(p, canonical(r)) for p, r in redexes(REC, t)]
    assert _pykernel.reducts(canonical(t), REC.lookup) == named


@needs_compiled
@pytest.mark.parametrize("seed", range(40))
def test_backends_agree_on_reducts(seed):
    t = canonical(TermGen(seed, max_depth=4).term())
    assert _ckernel.reducts(t, REC.lookup) == _pykernel.reducts(t, REC.lookup)
    assert _ckernel.explore(t, REC.lookup, 5000) == _pykernel.explore(t, REC.lookup, 5000)


@needs_compiled
def test_backends_agree_on_mbr_demo():
    t = canonical(bundle("MBR").demo_term)
    a = _ckernel.explore(t, MBR.lookup, 100_000)
    b = _pykernel.explore(t, MBR.lookup, 100_000)
    assert a == b and a[0] == "sn"


@needs_compiled
def test_backends_agree_on_cycles_and_exhaustion():
    from applied_lambda.syntax import parse_term

    for text, budget in [(r"(\x. x x) (\x. x x)", 10), (r"(\x. x x x) (\x. x x x)", 15)]:
        t = canonical(parse_term(text))
        assert _ckernel.explore(t, REC.lookup, budget) == _pykernel.explore(t, REC.lookup, budget)


def test_shift_and_beta():
    # (\. \. 1) applied: body refers to outer binder under one lambda
    body = (4, (0, 1))
    assert _pykernel.beta(body, (1, "a")) == (4, (1, "a"))
    assert _pykernel.shift((0, 0), 2) == (0, 2)
    assert _pykernel.shift((4, (0, 0)), 2) == (4, (0, 0))
