"""Deterministic child-seed derivation for nested experiment components."""

import hashlib

_SEED_BITS = 63


def derive_seed(master_seed: int, *parts) -> int:
    """Derive a child seed from a master seed and a component path.

    The same (master_seed, parts) always yields the same child seed, and
    distinct paths yield unrelated seeds, so adding a new component (an
    approach, a node, a round) never perturbs the streams of existing ones.
    """
    key = ":".join([str(int(master_seed))] + [str(p) for p in parts])
    digest = hashlib.blake2b(key.encode("utf-8"), digest_size=8).digest()
    return int.from_bytes(digest, "little") & ((1 << _SEED_BITS) - 1)
