import itertools

import numpy as np
import pytest

import ed4


def owner_oracle(h, w, center, base, angles):
    cx, cy = center
    i, j = np.mgrid[0:h, 0:w]
    deg = np.degrees(np.arctan2(cy - i, j - cx)) % 360.0
    deg[cy, cx] = 0.0
    off = (deg - base) % 360.0
    owner = np.zeros((h, w), dtype=int)
    edge = np.zeros((h, w), dtype=bool)
    for k, rho in enumerate(angles):
        owner[off <= rho] = k + 1
        edge |= np.abs(off - rho) < 1e-9
    edge |= (off < 1e-9) | (360.0 - off < 1e-9)
    return owner, edge


def constant(h, w, v):
    return np.full((h, w, 3), v, dtype=np.uint8)


def test_pair_matches_angle_oracle():
    a, b = constant(40, 56, 10), constant(40, 56, 200)
    out, label = ed4.clockmix_pair(a, b, 120.0, 30.0, labels=(0, 1), center=(20, 15))
    assert label == 1
    owner, edge = owner_oracle(40, 56, (20, 15), 30.0, [120.0])
    want = np.where(owner == 1, 200, 10)
    assert np.array_equal(out[..., 0][~edge], want[~edge])


def test_three_way_fold_matches_oracle():
    vals = (17, 89, 161)
    imgs = [constant(64, 48, v) for v in vals]
    out, label = ed4.bound_clockmix(imgs, [0, 0, 0], angles=[250.0, 90.0], base=45.0)
    assert label == 0
    owner, edge = owner_oracle(64, 48, (24, 32), 45.0, [250.0, 90.0])
    want = np.take(np.array(vals), owner)
    assert np.array_equal(out[..., 0][~edge], want[~edge])


def test_sampled_recipe_is_seed_deterministic():
    rng = np.random.default_rng(0)
    imgs = [rng.integers(0, 256, (32, 32, 3), dtype=np.uint8) for _ in range(3)]
    a, _ = ed4.bound_clockmix(imgs, [0, 1, 0], seed=5)
    b, _ = ed4.bound_clockmix(imgs, [0, 1, 0], seed=5)
    assert np.array_equal(a, b)


def test_single_image_unchanged():
    img = np.random.default_rng(1).integers(0, 256, (9, 7, 3), dtype=np.uint8)
    out, label = ed4.bound_clockmix([img], [1], angles=[])
    assert np.array_equal(out, img) and label == 1


def test_hard_label_is_or():
    for n in range(1, 5):
        for labels in itertools.product((0, 1), repeat=n):
            assert ed4.mix_label_hard(list(labels)) == int(any(labels))


def test_hungarian_examples_and_oracle():
    assert ed4.bound_hungarian([[0.9, 0.1], [0.2, 0.8]]) == [0, 1]
    assert ed4.bound_hungarian([[0.1, 0.9], [0.8, 0.2]]) == [1, 0]
    rng = np.random.default_rng(2)
    for _ in range(100):
        m = rng.random((6, 6))
        best = max(sum(m[i, p[i]] for i in range(6)) for p in itertools.permutations(range(6)))
        got = ed4.bound_hungarian(m)
        assert abs(sum(m[i, got[i]] for i in range(6)) - best) < 1e-9


def test_shuffle_roundtrip():
    img = np.random.default_rng(3).integers(0, 256, (32, 32, 3), dtype=np.uint8)
    shuffled, g, mapping = ed4.random_shuffle(img, [2, 4], seed=11)
    assert g in (2, 4) and sorted(mapping) == list(range(g * g))
    inverse = [0] * len(mapping)
    for i, j in enumerate(mapping):
        inverse[j] = i
    assert np.array_equal(ed4.apply_permutation(shuffled, inverse), img)
    assert np.array_equal(ed4.apply_permutation(img, mapping), shuffled)


def test_errors_carry_category():
    with pytest.raises(ed4.Ed4Error) as e:
        ed4.bound_hungarian([[1.0, 2.0, 3.0]])
    assert e.value.category == "domain"
    with pytest.raises(ed4.Ed4Error) as e:
        ed4.clockmix_pair(constant(8, 8, 0)[:, ::2], constant(8, 4, 0), 90.0)
    assert "contiguous" in str(e.value)
    with pytest.raises(ed4.Ed4Error):
        ed4.clockmix_pair(constant(8, 8, 0), constant(8, 8, 0), 400.0)
    with pytest.raises(ed4.Ed4Error):
        ed4.clockmix_pair(np.zeros((8, 8, 3), dtype=np.float32), constant(8, 8, 0), 90.0)
