"""Estimator facade tests: parameter plumbing, sklearn compatibility,
and agreement with the underlying fixed-point transform."""

import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from fftpipe.estimator import FixedPointFFT
from fftpipe.fixedpoint import FixedFormat, quantize_array
from fftpipe.flowgraph import fft_fixed
from fftpipe.metrics import INPUT_SCALE


def _complex_frames(n, seed, scale=0.4):
    rng = np.random.default_rng(seed)
    return (rng.uniform(-scale, scale, (n, 128))
            + 1j * rng.uniform(-scale, scale, (n, 128)))


def test_get_set_params_roundtrip():
    est = FixedPointFFT(word_length=16, scaling="none")
    params = est.get_params()
    assert params["word_length"] == 16
    assert params["scaling"] == "none"
    est.set_params(word_length=14, output_order="natural")
    assert est.get_params()["word_length"] == 14
    assert est.get_params()["output_order"] == "natural"


def test_sklearn_clone():
    est = FixedPointFFT(word_length=10, compensate_gain=False)
    dup = clone(est)
    assert dup.get_params() == est.get_params()
    assert dup is not est


def test_requires_fit_before_transform():
    with pytest.raises(NotFittedError):
        FixedPointFFT().transform(_complex_frames(1, 0))


def test_fit_sets_state():
    est = FixedPointFFT().fit(_complex_frames(2, 1))
    assert est.n_features_in_ == 128
    assert est.fmt_ == FixedFormat(12, 11)
    assert est.plan_.twiddle_bases == (4, 8, 128, 16, 8, 4, 1)


def test_rejects_wrong_width():
    est = FixedPointFFT()
    with pytest.raises(ValueError):
        est.fit(np.zeros((2, 64), dtype=complex))
    est.fit(_complex_frames(1, 2))
    with pytest.raises(ValueError):
        est.transform(np.zeros((2, 64), dtype=complex))


def test_transform_matches_fixed_model():
    X = _complex_frames(5, 3)
    est = FixedPointFFT().fit(X)
    got = est.transform(X)

    fmt = FixedFormat(12, 11)
    re = quantize_array(X.real, fmt)
    im = quantize_array(X.imag, fmt)
    res = fft_fixed(re, im, fmt)
    gain = 2.0 ** res.stats.scaling.gain_log2
    want = (res.re + 1j * res.im) * fmt.ulp * gain
    assert np.array_equal(got, want)


def test_compensate_gain_flag():
    X = _complex_frames(2, 4)
    with_gain = FixedPointFFT(compensate_gain=True).fit(X).transform(X)
    without = FixedPointFFT(compensate_gain=False).fit(X).transform(X)
    assert np.array_equal(with_gain, without * 2.0 ** 7)


def test_fit_transform_output_order():
    X = _complex_frames(1, 5)
    nat = FixedPointFFT(output_order="natural").fit_transform(X)
    ref = np.fft.fft(X[0])
    # 12-bit arithmetic tracks the exact transform to roughly 1 percent
    # of the peak bin magnitude
    assert np.max(np.abs(nat[0] - ref)) < 0.02 * np.max(np.abs(ref))


def test_word_length_changes_precision():
    X = _complex_frames(3, 6)
    ref = np.fft.fft(X, axis=1)[:, 0]
    err10 = abs(FixedPointFFT(word_length=10, output_order="natural")
                .fit_transform(X)[:, 0] - ref).max()
    err16 = abs(FixedPointFFT(word_length=16, output_order="natural")
                .fit_transform(X)[:, 0] - ref).max()
    assert err16 < err10


def test_score_on_protocol_stimulus():
    # score() reports mean SQNR in dB; on the measurement stimulus the
    # 12-bit default sits in the mid-40s band
    rng = np.random.default_rng(7)
    signs = rng.choice((-1.0, 1.0), size=(50, 128, 2))
    X = INPUT_SCALE * (signs[..., 0] + 1j * signs[..., 1])
    est = FixedPointFFT().fit(X)
    score = est.score(X)
    assert 41.0 < score < 46.0
