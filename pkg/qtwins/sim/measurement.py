"""Finite-shot measurement sampling through readout confusion."""

from collections.abc import Sequence

import numpy as np
from noise import ConfusionMatrix

from .circuit import CircuitError
from .engine import DensityMatrix


def sample_counts(
    rho: DensityMatrix,
    shots: int,
    confusions: Sequence[ConfusionMatrix] | None = None,
    seed: int = 0,
) -> dict[str, int]:
    """Sample measurement outcomes of every qubit.

    True bitstrings are drawn from diag(rho); each bit is then flipped
    independently according to its qubit's confusion matrix.

    Args:
        rho: State to measure
        shots: Number of shots (>= 1)
        confusions: One confusion matrix per qubit; None means perfect readout
        seed: RNG seed

    Returns:
        Bitstring (qubit 0 leftmost) -> count, sorted by bitstring; counts sum to ``shots``
    """
    if shots < 1:
        raise CircuitError(f"shots must be >= 1, got {shots}")
    m = rho.register_size
    if confusions is not None and len(confusions) != m:
        raise CircuitError(f"expected {m} confusion matrices, got {len(confusions)}")

    rng = np.random.default_rng(seed)
    outcomes = rng.choice(2**m, size=shots, p=rho.probabilities())
    shifts = np.arange(m - 1, -1, -1)
    bits = (outcomes[:, None] >> shifts) & 1

    if confusions is not None:
        for q, confusion in enumerate(confusions):
            if confusion.is_identity:
                continue
            u = rng.random(shots)
            flip_prob = np.where(bits[:, q] == 0, confusion.prob_meas1_prep0, confusion.prob_meas0_prep1)
            bits[:, q] ^= (u < flip_prob).astype(bits.dtype)

    reported = bits @ (1 << shifts)
    values, counts = np.unique(reported, return_counts=True)
    return {format(int(v), f"0{m}b"): int(c) for v, c in zip(values, counts, strict=True)}
