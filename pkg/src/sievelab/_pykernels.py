"""Numpy fallbacks for the compiled kernels.

Same contracts as the extension module `sievelab._core`; selected by
`sievelab.kernels` when the extension is absent or disabled.
"""

from __future__ import annotations

import numpy as np


def mark_strided(mask: np.ndarray, starts: np.ndarray, steps: np.ndarray) -> None:
    """Set mask[s::t] = 1 for each (s, t) pair; pairs with s outside the mask are ignored."""
    n = mask.shape[0]
    for s, t in zip(starts.tolist(), steps.tolist()):
        if 0 <= s < n:
            mask[s::t] = 1


def pmin_scan(primes: np.ndarray, q: int, coprime: np.ndarray, first: np.ndarray) -> int:
    """First prime per residue class mod q.

    Scans ascending `primes`, recording the first hit per residue in `first`
    (preset to -1), and stops once every residue with coprime[r] != 0 is
    filled.  Returns the number of coprime residues filled.
    """
    need = int(np.count_nonzero(coprime))
    found = int(np.count_nonzero((first >= 0) & (coprime != 0)))
    pos = 0
    n = primes.shape[0]
    chunk = max(1024, 4 * need)
    while pos < n and found < need:
        part = primes[pos : pos + chunk]
        res = part % q
        vals, idx = np.unique(res, return_index=True)
        fresh = first[vals] < 0
        first[vals[fresh]] = part[idx[fresh]]
        found = int(np.count_nonzero((first >= 0) & (coprime != 0)))
        pos += chunk
    return found
