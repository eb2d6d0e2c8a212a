import numpy as np
import pytest

from classdiff import from_arrays


@pytest.fixture
def toy_orthogonal():
    """Two classes, two identical unit vectors each, orthogonal across classes."""
    return from_arrays(
        "toy",
        [
            ("a", np.array([[1.0, 0.0], [1.0, 0.0]])),
            ("b", np.array([[0.0, 1.0], [0.0, 1.0]])),
        ],
    )


@pytest.fixture
def toy_identical():
    """Three classes whose vectors are all the same point."""
    v = np.array([[2.0, 1.0], [2.0, 1.0]])
    return from_arrays("identical", [("a", v), ("b", v.copy()), ("c", v.copy())])


def random_dataset(rng, max_classes=10, max_instances=20, max_dim=32, min_classes=2):
    n_classes = int(rng.integers(min_classes, max_classes + 1))
    dim = int(rng.integers(2, max_dim + 1))
    blocks = []
    for c in range(n_classes):
        n = int(rng.integers(2, max_instances + 1))
        vecs = rng.normal(size=(n, dim))
        # keep vectors safely away from zero
        vecs += np.sign(vecs) * 1e-3
        blocks.append((f"cls{c:02d}", vecs))
    return from_arrays(f"rand{rng.integers(1 << 30)}", blocks)
