"""Hypothesis strategies for configurations and stacks."""
import numpy as np
from hypothesis import strategies as st

from hadq.core import Configuration, Geometry


@st.composite
def positions(draw, length, min_size=0, max_size=12):
    # distinct floats in [0, length); integers / 8 give frequent near-ties
    # without exact coincidences across lines drawn separately
    raw = draw(st.lists(st.floats(0, length, exclude_max=True, allow_nan=False), min_size=min_size, max_size=max_size, unique=True))
    return sorted(raw)


@st.composite
def disjoint_lines(draw, length, sizes):
    """Lines with the given sizes and no position shared across lines."""
    total = sum(sizes)
    pts = draw(st.lists(st.floats(0, length, exclude_max=True, allow_nan=False), min_size=total, max_size=total, unique=True))
    out, i = [], 0
    for s in sizes:
        out.append(sorted(pts[i : i + s]))
        i += s
    return out


@st.composite
def increasing_sizes(draw, n_max=4, top=12):
    n = draw(st.integers(1, n_max))
    first = draw(st.integers(0, 3))
    sizes = [first]
    for _ in range(n - 1):
        sizes.append(sizes[-1] + draw(st.integers(1, 3)))
    return sizes


def random_stack(gen, n, length, max_count=40, cyclic=True):
    """Cycle stack with strictly increasing counts, or Poisson lines with
    increasing rates on an interval."""
    if cyclic:
        counts = np.sort(gen.choice(np.arange(1, max_count + 1), n, replace=False))
        return [np.sort(gen.uniform(0, length, c)) for c in counts]
    rates = np.sort(gen.uniform(0.1, 1.0, n))
    return [np.sort(gen.uniform(0, length, gen.poisson(r * length))) for r in rates]


def configs(geometry: Geometry, arrays):
    return [Configuration(geometry, a) for a in arrays]
