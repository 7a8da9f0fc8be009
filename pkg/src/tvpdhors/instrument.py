"""Call counters for the scheme's cost model.

Verification of a signature must cost exactly one message-hash call,
k filter-hash calls, and k*p modular reductions; key generation costs
t filter-hash calls against t one-way-function calls for the baseline.
These counters make that structure observable in tests.
"""

from __future__ import annotations

from collections import Counter

_active: list["CallCounter"] = []


class CallCounter:
    """Records hash invocations per algorithm and role, plus reductions.

    Roles disambiguate the three hash duties when two of them use the
    same algorithm (message hashing and the baseline one-way function
    both default to SHA2-256).  Usable as a context manager; nested
    counters all record.
    """

    def __init__(self):
        self.hash_calls: Counter[str] = Counter()
        self.role_calls: Counter[str] = Counter()
        self.mod_reductions = 0

    def __enter__(self) -> "CallCounter":
        _active.append(self)
        return self

    def __exit__(self, *exc) -> None:
        _active.remove(self)

    def calls(self, algo: str) -> int:
        return self.hash_calls[algo]

    def role(self, role: str) -> int:
        return self.role_calls[role]


def record_hash(algo: str, n: int = 1, role: str | None = None) -> None:
    for c in _active:
        c.hash_calls[algo] += n
        if role is not None:
            c.role_calls[role] += n


def record_mods(n: int) -> None:
    for c in _active:
        c.mod_reductions += n


def counting_active() -> bool:
    return bool(_active)
