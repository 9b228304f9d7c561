"""Feature embedding, kernel values, and the toy datasets."""

import numpy as np
import pytest

from mbqml import states
from mbqml.kernel import (
    BLOB_CENTERS,
    CIRCLE_RADII,
    embed,
    embed_pattern,
    embedding_angles,
    embedding_states,
    gram,
    kernel,
    make_dataset,
)


def test_embedding_angles_layout():
    x = (0.8, -0.4)
    a = embedding_angles(x)
    assert set(a) == {0, 1, 2, 3, 5, 6, 7, 8}
    assert a[0] == 0.8 and a[5] == -0.4
    assert a[2] == 0.8 and a[7] == -0.4
    assert a[1] == a[3] == a[8] == 0.0
    assert abs(a[6] - np.cos(0.8) * np.cos(-0.4)) < 1e-12


def test_closed_form_matches_pattern():
    rng = np.random.default_rng(601)
    xs = rng.uniform(-2.0, 2.0, size=(8, 2))
    phis = embedding_states(xs)
    for i, x in enumerate(xs):
        psi = embed_pattern(x)
        assert states.fidelity_pure(psi.amplitudes, phis[:, i]) > 1 - 1e-10
        assert abs(np.linalg.norm(phis[:, i]) - 1.0) < 1e-10


def test_embed_and_kernel():
    rng = np.random.default_rng(602)
    x, y = rng.uniform(-2, 2, size=2), rng.uniform(-2, 2, size=2)
    phi_x, phi_y = embed(x), embed(y)
    want = abs(np.vdot(phi_x.amplitudes, phi_y.amplitudes)) ** 2
    assert abs(kernel(x, y) - want) < 1e-12
    assert abs(kernel(x, x) - 1.0) < 1e-12
    assert abs(kernel(x, y) - kernel(y, x)) < 1e-12


def test_gram_properties():
    rng = np.random.default_rng(603)
    xa = rng.uniform(-2, 2, size=(12, 2))
    xb = rng.uniform(-2, 2, size=(5, 2))
    K = gram(xa)
    assert K.shape == (12, 12)
    assert np.allclose(K, K.T, atol=1e-12)
    assert np.allclose(np.diag(K), 1.0, atol=1e-12)
    assert np.linalg.eigvalsh(K).min() > -1e-10
    cross = gram(xa, xb)
    assert cross.shape == (12, 5)
    for i in range(3):
        for j in range(3):
            assert abs(cross[i, j] - kernel(xa[i], xb[j])) < 1e-12


def test_make_dataset_validation():
    rng = np.random.default_rng(604)
    with pytest.raises(ValueError):
        make_dataset("circles", 5, rng)
    with pytest.raises(ValueError):
        make_dataset("circles", 2, rng)
    with pytest.raises(ValueError):
        make_dataset("spirals", 8, rng)


def test_make_dataset_geometry():
    pts, labels = make_dataset("blobs", 10, np.random.default_rng(605), noise=0.0)
    assert pts.shape == (10, 2) and sorted(labels) == [-1.0] * 5 + [1.0] * 5
    for p, l in zip(pts, labels):
        center = BLOB_CENTERS[0] if l == -1.0 else BLOB_CENTERS[1]
        assert np.allclose(p, center)

    pts, labels = make_dataset("circles", 12, np.random.default_rng(606), noise=0.0)
    for p, l in zip(pts, labels):
        r = CIRCLE_RADII[0] if l == -1.0 else CIRCLE_RADII[1]
        assert abs(np.linalg.norm(p) - r) < 1e-12

    pts, labels = make_dataset("moons", 14, np.random.default_rng(607))
    assert pts.shape == (14, 2) and int(np.sum(labels == 1.0)) == 7

    a = make_dataset("moons", 14, np.random.default_rng(42))
    b = make_dataset("moons", 14, np.random.default_rng(42))
    assert np.array_equal(a[0], b[0]) and np.array_equal(a[1], b[1])
