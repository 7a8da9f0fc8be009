"""Partitioned single-hash Bloom filter.

The bit vector is split into p pairwise-coprime partitions laid out
contiguously (partition 1 occupies bits [0, n_1), partition 2 the next
n_2 bits, and so on).  Inserting or checking an element costs exactly
one hash call; the digest, read as a big-endian integer, is reduced
modulo every partition size and one bit per partition is touched.

Two routes compute the same bits: the per-element methods here use
Python integer arithmetic and are the reference; the batch methods
hand whole element lists to the native kernel when it is available.

Concurrent checks against a filter that is no longer being written are
safe; inserts need exclusive access (key generation is single-writer).
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass, field

from . import hashes, instrument
from .errors import InvalidPlan

try:
    from . import _kernel
except ImportError:  # pragma: no cover - built lazily in dev environments
    _kernel = None

# The kernel's reduction tables hold 2^(32j) mod n in 32-bit slots and
# accumulate eight 60-bit terms, which is exact only below this bound.
_KERNEL_MAX_PARTITION = 1 << 28

_KERNEL_ALGOS = {hashes.XXH3_64, hashes.XXH3_128}
if _kernel is not None and getattr(_kernel, "HAS_CITY256", 0):
    _KERNEL_ALGOS.add(hashes.CITY_256)


@dataclass(frozen=True)
class PartitionPlan:
    """Ordered partition bit-lengths n_1 ... n_p.

    Validated at construction: at least two partitions, all pairwise
    coprime.  Layout offsets and the total length are precomputed.
    """

    sizes: tuple[int, ...]
    starts: tuple[int, ...] = field(init=False, compare=False)
    total_bits: int = field(init=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "sizes", tuple(int(n) for n in self.sizes))
        self.validate()
        starts, acc = [], 0
        for n in self.sizes:
            starts.append(acc)
            acc += n
        object.__setattr__(self, "starts", tuple(starts))
        object.__setattr__(self, "total_bits", acc)

    def validate(self) -> None:
        sizes = self.sizes
        if len(sizes) < 2:
            raise InvalidPlan("a plan needs at least two partitions")
        if any(n < 2 for n in sizes):
            raise InvalidPlan("partition sizes must be at least 2 bits")
        for i in range(len(sizes)):
            for j in range(i + 1, len(sizes)):
                if math.gcd(sizes[i], sizes[j]) != 1:
                    raise InvalidPlan(
                        f"partition sizes {sizes[i]} and {sizes[j]} share a factor"
                    )

    @property
    def p(self) -> int:
        return len(self.sizes)


_parts_cache: dict[tuple[int, ...], bytes | None] = {}


def _pack_kernel_parts(plan: PartitionPlan) -> bytes | None:
    """56-byte-per-partition table consumed by the native kernel."""
    cached = _parts_cache.get(plan.sizes)
    if cached is not None or plan.sizes in _parts_cache:
        return cached
    if any(n >= _KERNEL_MAX_PARTITION for n in plan.sizes):
        _parts_cache[plan.sizes] = None
        return None
    out = []
    for n, start in zip(plan.sizes, plan.starts):
        recip = (1 << 128) // n + 1  # exact Lemire reciprocal, n < 2^63
        cpow = [pow(2, 32 * j, n) for j in range(8)]
        out.append(
            struct.pack("<II", n, start)
            + recip.to_bytes(16, "little")
            + struct.pack("<8I", *cpow)
        )
    blob = b"".join(out)
    _parts_cache[plan.sizes] = blob
    return blob


class OhbfFilter:
    """Bit vector plus plan plus the chosen non-cryptographic hash."""

    def __init__(self, plan: PartitionPlan, algo: str, bits: bytearray | None = None,
                 inserted_count: int = 0):
        # plan invariants hold by PartitionPlan construction
        if algo not in hashes.OUTPUT_BITS:
            raise InvalidPlan(f"unknown filter hash {algo!r}")
        self.plan = plan
        self.algo = algo
        nbytes = (plan.total_bits + 7) // 8
        if bits is None:
            bits = bytearray(nbytes)
        elif len(bits) != nbytes:
            raise InvalidPlan("bit vector length does not match the plan")
        self.bits = bits
        self.inserted_count = inserted_count
        self._parts_blob = _pack_kernel_parts(plan)
        self._algo_code = hashes.WIRE_IDS[algo]
        self._use_kernel = (
            _kernel is not None
            and self._parts_blob is not None
            and algo in _KERNEL_ALGOS
        )

    # -- reference single-element operations (one hash call each) --------

    def _offsets(self, element: bytes) -> list[int]:
        x = hashes.digest_to_uint(hashes.digest(self.algo, element, role="filter"))
        if instrument.counting_active():
            instrument.record_mods(self.plan.p)
        return [s + x % n for n, s in zip(self.plan.sizes, self.plan.starts)]

    def insert(self, element: bytes) -> None:
        for off in self._offsets(element):
            self.bits[off >> 3] |= 0x80 >> (off & 7)
        self.inserted_count += 1

    def check(self, element: bytes) -> bool:
        return all(
            self.bits[off >> 3] & (0x80 >> (off & 7))
            for off in self._offsets(element)
        )

    # -- batch operations (native kernel with pure fallback) -------------

    def _record_batch(self, n_items: int) -> None:
        if instrument._active:
            instrument.record_hash(self.algo, n_items, role="filter")
            instrument.record_mods(n_items * self.plan.p)

    def insert_batch(self, items, positions: tuple[int, ...] | None = None) -> None:
        """Insert many elements; `positions` appends the 1-based index.

        positions=None inserts the raw bytes; a tuple of 0-based positions
        appends encode32be(position + 1) to each element before hashing,
        the same binding used when secrets go into a public key.
        """
        if positions is None:
            labels = None
        elif (isinstance(positions, range) and positions.step == 1
              and len(positions) == len(items)):
            labels = positions.start  # kernel enumerates from the base
        else:
            labels = tuple(positions)
            if len(labels) != len(items):
                raise ValueError("positions length mismatch")
        # length pre-scan: a mid-batch kernel error must not leave the
        # filter partially mutated
        if self._use_kernel and max(map(len, items), default=0) <= _kernel.MAX_ELEMENT_LEN:
            self._record_batch(len(items))
            _kernel.ohbf_batch(self.bits, self._parts_blob, self._algo_code,
                               items, labels, 0)
            self.inserted_count += len(items)
            return
        if isinstance(labels, int):
            labels = tuple(range(labels, labels + len(items)))
        for i, el in enumerate(items):
            self.insert(el if labels is None else el + _be32(labels[i] + 1))

    def check_all(self, items, positions: tuple[int, ...] | None = None) -> bool:
        """True iff every element (with optional index binding) is present."""
        labels = None if positions is None else tuple(positions)
        if labels is not None and len(labels) != len(items):
            return False
        if self._use_kernel:
            try:
                res = _kernel.ohbf_batch(self.bits, self._parts_blob,
                                         self._algo_code, items, labels, 1)
            except ValueError:  # element too long for the kernel buffers
                pass
            else:
                self._record_batch(len(items))
                return bool(res)
        for i, el in enumerate(items):
            if not self.check(el if labels is None else el + _be32(labels[i] + 1)):
                return False
        return True

    def count_positives(self, items) -> int:
        """Number of raw elements the filter reports as present."""
        if self._use_kernel:
            try:
                res = _kernel.ohbf_batch(self.bits, self._parts_blob,
                                         self._algo_code, items, None, 2)
            except ValueError:
                pass
            else:
                self._record_batch(len(items))
                return res
        return sum(self.check(el) for el in items)

    def popcount(self, partition: int | None = None) -> int:
        """Set bits in one partition, or in the whole vector."""
        if partition is None:
            return sum(bin(b).count("1") for b in self.bits)
        start = self.plan.starts[partition]
        n = self.plan.sizes[partition]
        return sum(
            1
            for off in range(start, start + n)
            if self.bits[off >> 3] & (0x80 >> (off & 7))
        )


def _be32(v: int) -> bytes:
    return v.to_bytes(4, "big")


def ohbf_init(plan: PartitionPlan, algo: str) -> OhbfFilter:
    """Create an all-zero filter for the plan."""
    return OhbfFilter(plan, algo)


def ohbf_insert(filt: OhbfFilter, element: bytes) -> OhbfFilter:
    filt.insert(element)
    return filt


def ohbf_check(filt: OhbfFilter, element: bytes) -> bool:
    return filt.check(element)
