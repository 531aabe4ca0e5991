"""Registry of memo tables so they can be flushed in one call.

Long verification runs lean on module-level memoization (word traces,
centering expansions, matrix products).  Tests that monkeypatch a formula
need a way to drop every cached value first, otherwise stale entries would
mask the patch.
"""
from __future__ import annotations

from typing import Callable, MutableMapping

_TABLES: list[MutableMapping] = []
_CLEARERS: list[Callable[[], None]] = []


def register_table(table: MutableMapping) -> MutableMapping:
    _TABLES.append(table)
    return table


def register_clearer(fn: Callable[[], None]) -> None:
    _CLEARERS.append(fn)


def clear_all() -> None:
    """Empty every registered memo table in the package."""
    for t in _TABLES:
        t.clear()
    for fn in _CLEARERS:
        fn()
