"""Surface-form lookup shared by the embedding and pair-list containers.

Multiword surfaces circulate in two spellings: space-joined (as chunked
from text) and underscore-joined (as keyed in word-vector files). Lookups
try the underscore form first, then the surface as given, then the
space-joined form.
"""

from __future__ import annotations

from typing import Optional


def surface_variants(surface: str) -> tuple[str, ...]:
    """Return the candidate spellings for ``surface``, most specific first."""
    candidates = (surface.replace(" ", "_"), surface, surface.replace("_", " "))
    out: list[str] = []
    for c in candidates:
        if c and c not in out:
            out.append(c)
    return tuple(out)


def resolve_surface(keys, surface: str) -> Optional[str]:
    """Return the first variant of ``surface`` present in ``keys``, if any."""
    for variant in surface_variants(surface):
        if variant in keys:
            return variant
    return None
