import numpy as np
import pytest

import exact_oracle as ex
from covrep.linalg import onb_kernel, onb_range
from covrep.model import make_rep
from covrep.structure import generalized_range, is_regular


def integer_reps(count=10, seed=2024):
    """Small integer reps, half of them built as low-rank products."""
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < count:
        h, n = int(rng.integers(1, 4)), int(rng.integers(1, 3))
        if len(out) % 2:
            r = int(rng.integers(0, h + 1))
            v = rng.integers(-1, 3, size=(h, r)) @ rng.integers(-1, 2, size=(r, n * h))
        else:
            v = rng.integers(-1, 2, size=(h, n * h))
        out.append((h, n, v.astype(int)))
    # the nilpotent shift and a coisometry pin down both ends
    out[0] = (3, 1, np.array([[0, 0, 0], [1, 0, 0], [0, 1, 0]]))
    out[1] = (2, 2, np.array([[1, 0, 0, 0], [0, 1, 0, 0]]))
    return out


def exact_profile(h, n, v):
    m = ex.as_fractions(v.tolist())
    ker = ex.null_basis(m)
    rinf = ex.generalized_range(m, n)
    regular = ex.contained(ker, ex.tensor_span(n, rinf, h), n * h)
    return ex.rank(m), len(ker), len(rinf), regular


def float_profile(h, n, v):
    rep = make_rep(h, n, v.astype(float))
    rinf, _ = generalized_range(rep)
    return (onb_range(rep.v_tilde).dim, onb_kernel(rep.v_tilde).dim, rinf.dim,
            is_regular(rep).get("regular").passed)


def test_oracle_self_check():
    m = ex.as_fractions([[1, 2], [2, 4]])
    assert ex.rank(m) == 1 and len(ex.null_basis(m)) == 1
    z = ex.null_basis(m)[0]
    assert z == [-2, 1] and ex.matmul(m, [[x] for x in z]) == [[0], [0]]
    assert ex.contained([[1, 2]], [[2, 4]], 2) and not ex.contained([[1, 0]], [[2, 4]], 2)


@pytest.mark.parametrize("case", range(10))
def test_exact_matches_float(case):
    h, n, v = integer_reps()[case]
    assert float_profile(h, n, v) == exact_profile(h, n, v)
