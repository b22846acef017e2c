import math

import numpy as np
import pytest

from lfdasc.characterize import characterize, colorfulness, contrast, spatial_information, temporal_information
from lfdasc.lightfield import LightField

from conftest import parallax_light_field


def gray(lum):
    return np.repeat(np.asarray(lum, float)[:, :, None], 3, axis=2)


def si_oracle(lum):
    h, w = lum.shape
    mags = []
    for i in range(1, h - 1):
        for j in range(1, w - 1):
            gx = (lum[i - 1, j + 1] + 2 * lum[i, j + 1] + lum[i + 1, j + 1]
                  - lum[i - 1, j - 1] - 2 * lum[i, j - 1] - lum[i + 1, j - 1])
            gy = (lum[i + 1, j - 1] + 2 * lum[i + 1, j] + lum[i + 1, j + 1]
                  - lum[i - 1, j - 1] - 2 * lum[i - 1, j] - lum[i - 1, j + 1])
            mags.append(math.hypot(gx, gy))
    m = sum(mags) / len(mags)
    return math.sqrt(sum((x - m) ** 2 for x in mags) / len(mags))


def test_si_constant():
    assert spatial_information(gray(np.full((6, 6), 0.3))) == 0.0


def test_si_ramp_is_zero():
    ramp = np.tile(np.linspace(0, 1, 10)[:, None], (1, 8))
    assert spatial_information(gray(ramp)) == pytest.approx(0.0, abs=1e-12)


def test_si_step_matches_oracle():
    lum = np.zeros((9, 10))
    lum[:, 5:] = 0.8
    got = spatial_information(gray(lum))
    assert got > 0
    assert got == pytest.approx(si_oracle(lum), abs=1e-9)


def test_si_random_matches_oracle():
    lum = np.random.default_rng(3).random((7, 8))
    assert spatial_information(gray(lum)) == pytest.approx(si_oracle(lum), abs=1e-9)


def test_ti():
    rng = np.random.default_rng(0)
    a = rng.random((8, 8, 3))
    assert temporal_information(a, a) == 0.0
    assert temporal_information(a, a + 0.05) == pytest.approx(0.0, abs=1e-12)
    tex = rng.random((8, 10))
    va, vb = gray(tex[:, :8]), gray(tex[:, 2:])
    diff = [tex[i, j + 2] - tex[i, j] for i in range(8) for j in range(8)]
    m = sum(diff) / len(diff)
    expected = math.sqrt(sum((d - m) ** 2 for d in diff) / len(diff))
    assert temporal_information(va, vb) == pytest.approx(expected, abs=1e-12)
    assert expected > 0
    with pytest.raises(ValueError):
        temporal_information(a, a[:4])


def test_colorfulness():
    assert colorfulness(gray(np.random.default_rng(1).random((5, 5)))) == pytest.approx(0.0, abs=1e-15)
    img = np.zeros((4, 4, 3))
    img[:, :2, 0] = 1.0
    img[:, 2:, 1] = 1.0
    # rg is +1/-1 (std 1, mean 0); yb is 0.5 everywhere (std 0, mean 0.5)
    assert colorfulness(img) == pytest.approx(1.0 + 0.3 * 0.5, abs=1e-12)
    assert colorfulness(0.5 * img) == pytest.approx(0.5 * colorfulness(img), rel=1e-12)


def test_contrast():
    assert contrast(gray(np.full((3, 3), 0.2))) == 0.0
    half = np.zeros((4, 4))
    half[:, 2:] = 1.0
    assert contrast(gray(half)) == pytest.approx(0.5, abs=1e-12)
    rng = np.random.default_rng(2)
    img = rng.random((6, 6, 3))
    shuffled = img.reshape(36, 3)[rng.permutation(36)].reshape(6, 6, 3)
    assert contrast(shuffled) == pytest.approx(contrast(img), abs=1e-12)


def test_report_counts_and_summary():
    lf = LightField.from_array(parallax_light_field(4, 3, 8, 8, seed=5))
    report = characterize(lf, "demo")
    assert len(report.si) == 12
    assert len(report.ti) == 3 * 3
    assert report.si_max == max(report.si.values())
    assert report.ti_mean == pytest.approx(np.mean(list(report.ti.values())))
    assert min(report.si.values()) >= 0 and report.cf >= 0 and report.contrast >= 0
    lines = report.to_csv().splitlines()
    assert lines[0] == "scene,feature,s,t,value"
    assert len(lines) == 1 + 12 + 9 + 6
