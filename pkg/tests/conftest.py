import gmpy2 as g
import pytest

from cases import CASES
from peckseq import PeckRun, RealCtx, TargetPair, normalize


@pytest.fixture(scope="session")
def ctx():
    return RealCtx(256)


@pytest.fixture(scope="session")
def runs(ctx):
    """PeckRun per golden case, with the unit taken from the frozen
    coordinates (unit *search* is exercised separately)."""
    out = {}
    for case in CASES:
        pair = TargetPair.from_cubic(*case.cubic, beta=case.beta, d=case.d)
        el = pair.cp.element(
            g.mpq(case.lam_nums[0], case.lam_den),
            g.mpq(case.lam_nums[1], case.lam_den),
            g.mpq(case.lam_nums[2], case.lam_den),
        )
        out[case.name] = PeckRun(pair, normalize(el, ctx), ctx)
    return out
