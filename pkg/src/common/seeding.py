"""Seed derivation: every random draw traces back to one master seed."""
import hashlib

import numpy as np

RNG_ALGORITHM = "numpy.random.Philox"


def derive_seed(seed: int, label: str) -> int:
    """Stable 64-bit sub-seed for a (master seed, purpose label) pair."""
    digest = hashlib.sha256(f"{int(seed)}:{label}".encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "little")


def stream(seed: int, label: str, index: int = 0) -> np.random.Generator:
    """Counter-based generator for trajectory/unit `index` under `label`."""
    sequence = np.random.SeedSequence([derive_seed(seed, label), int(index)])
    return np.random.Generator(np.random.Philox(sequence))
