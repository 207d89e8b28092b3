import numpy as np
import pytest

from srsgof.diagnostics import diagnostic_csv, ising_diagnose, reference_lattices
from srsgof.streams import RandomSource


def test_reference_lattices_shape_and_determinism():
    a = reference_lattices(4, 3.0, "gibbs", 50, 200, 3, RandomSource(1))
    b = reference_lattices(4, 3.0, "gibbs", 50, 200, 3, RandomSource(1))
    assert a.shape == (50, 4, 4)
    assert set(np.unique(a)) <= {-1, 1}
    np.testing.assert_array_equal(a, b)
    with pytest.raises(ValueError):
        reference_lattices(4, 3.0, "gibbs", 0, 200, 3, RandomSource(1))


def test_detects_unmixed_chains():
    # low temperature: one sweep from a random start is far from equilibrium
    rows = ising_diagnose(8, 1.5, "gibbs", [1, 400], n=200, m=9, rng=RandomSource(2), reference_factor=20)
    assert [r.steps for r in rows] == [1, 400]
    assert rows[0].p_value < 1e-6
    assert rows[1].chisq_statistic < rows[0].chisq_statistic


def test_deterministic_and_csv():
    kw = dict(k=4, T=8.0, method="mh", checkpoints=[0, 10], n=40, m=3, reference_factor=10)
    a = ising_diagnose(rng=RandomSource(5), **kw)
    b = ising_diagnose(rng=RandomSource(5), **kw)
    assert a == b
    text = diagnostic_csv(a)
    assert text.splitlines()[0] == "steps,chisq_statistic,p_value"
    assert len(text.splitlines()) == 3


@pytest.mark.parametrize(
    "kw",
    [dict(checkpoints=[]), dict(checkpoints=[-1]), dict(n=0), dict(m=0), dict(method="swendsen")],
)
def test_argument_errors(kw):
    base = dict(k=4, T=8.0, method="gibbs", checkpoints=[1], n=10, m=2, rng=RandomSource(0))
    with pytest.raises(ValueError):
        ising_diagnose(**(base | kw))
