"""Iterative radix-2 discrete Fourier transform.

Conventions match ``numpy.fft``: ``fft(x)[k] = sum_j x[j] exp(-2 pi i j k / n)``
and ``ifft`` carries the ``1/n``. Only power-of-two lengths are supported;
:func:`dft_naive` is the O(n^2) reference used in the tests.
"""

from functools import lru_cache

import numpy as np


def is_power_of_two(n):
    return n >= 1 and (n & (n - 1)) == 0


def next_power_of_two(n):
    return 1 << max(0, int(n - 1).bit_length())


@lru_cache(maxsize=32)
def _plan(n):
    bits = n.bit_length() - 1
    idx = np.arange(n)
    rev = np.zeros(n, dtype=np.intp)
    for b in range(bits):
        rev |= ((idx >> b) & 1) << (bits - 1 - b)
    twiddles = []
    m = 1
    while m < n:
        twiddles.append(np.exp(-1j * np.pi * np.arange(m) / m))
        m *= 2
    return rev, tuple(twiddles)


def fft(x, axis=-1):
    """Forward transform along ``axis`` (length must be a power of two)."""
    x = np.moveaxis(np.asarray(x, dtype=complex), axis, -1)
    n = x.shape[-1]
    if not is_power_of_two(n):
        raise ValueError(f"length {n} is not a power of two")
    rev, twiddles = _plan(n)
    lead = x.shape[:-1]
    y = x[..., rev]
    m = 1
    for w in twiddles:
        y = y.reshape(lead + (n // (2 * m), 2, m))
        even = y[..., 0, :]
        odd = y[..., 1, :] * w
        y = np.stack((even + odd, even - odd), axis=-2)
        m *= 2
    return np.moveaxis(y.reshape(lead + (n,)), -1, axis)


def ifft(x, axis=-1):
    x = np.asarray(x, dtype=complex)
    n = x.shape[axis]
    return np.conj(fft(np.conj(x), axis=axis)) / n


def fftn(x, axes=None):
    axes = range(np.ndim(x)) if axes is None else axes
    for ax in axes:
        x = fft(x, axis=ax)
    return x


def ifftn(x, axes=None):
    axes = range(np.ndim(x)) if axes is None else axes
    for ax in axes:
        x = ifft(x, axis=ax)
    return x


def dft_naive(x):
    """Direct O(n^2) evaluation of the DFT along the last axis."""
    x = np.asarray(x, dtype=complex)
    n = x.shape[-1]
    k = np.arange(n)
    # reduce j*k mod n first so the angles stay exact
    W = np.exp(-2j * np.pi * (np.outer(k, k) % n) / n)
    return x @ W.T


def angular_wavenumbers(n, dx):
    """Angular wavenumbers in FFT order for ``n`` samples spaced by ``dx``."""
    k = np.arange(n)
    k = np.where(k < (n + 1) // 2, k, k - n)
    return 2 * np.pi * k / (n * dx)
