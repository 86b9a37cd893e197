"""Input coercion for the estimator facade, in the spirit of sklearn's ``check_array``."""
from __future__ import annotations

import numpy as np

from .errors import DimensionError, ValidationError
from .spectral import HermitianObservable, numeric_tol, spectral_decompose


def check_observables(X, group_tol=None, names=None) -> list:
    """Coerce ``X`` into a list of :class:`HermitianObservable`.

    ``X`` may be a Scenario, a sequence of observables, a sequence of square
    matrices, or a mapping of names to matrices. Raw matrices are named
    ``names[i]`` if given, else ``A0, A1, ...``.
    """
    if hasattr(X, "observables"):
        return list(X.observables)
    if isinstance(X, dict):
        names, X = list(X), list(X.values())
    items = list(X) if not isinstance(X, np.ndarray) else list(X)
    if not items:
        raise ValidationError("need at least one observable")
    if names is not None and len(names) != len(items):
        raise ValidationError(f"got {len(names)} names for {len(items)} observables")
    out = []
    for i, item in enumerate(items):
        if isinstance(item, HermitianObservable):
            out.append(item)
        else:
            name = names[i] if names is not None else f"A{i}"
            out.append(spectral_decompose(item, group_tol, name=name))
    dims = {o.dim for o in out}
    if len(dims) != 1:
        raise DimensionError(f"observables have mixed dimensions {sorted(dims)}")
    seen = set()
    for o in out:
        if o.name in seen:
            raise ValidationError(f"duplicate observable name {o.name!r}")
        seen.add(o.name)
    return out


def check_states(X, dim: int) -> np.ndarray:
    """Return ``X`` as a ``(n_states, dim)`` complex array of unit rows."""
    arr = np.asarray(X, dtype=complex)
    if arr.ndim == 1:
        raise DimensionError("expected a 2-D array of states, one per row; "
                             "reshape a single state with X.reshape(1, -1)")
    if arr.ndim != 2 or arr.shape[1] != dim:
        raise DimensionError(f"expected shape (n_states, {dim}), got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValidationError("states contain non-finite entries")
    norms = np.linalg.norm(arr, axis=1)
    bad = np.flatnonzero(np.abs(norms - 1.0) > numeric_tol())
    if bad.size:
        raise ValidationError(f"state rows {bad.tolist()} are not normalized")
    return arr
