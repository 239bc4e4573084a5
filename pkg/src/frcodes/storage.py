"""Functional-repair storage model built on collections of subspaces.

A code with parameters (m; n, k, r, alpha, beta) keeps the data vector
x in F_q^m spread over n nodes; node i stores the inner products of x
with a basis of an alpha-dimensional subspace U_i.  Any k node spaces
must jointly span F_q^m so that x can be recovered.  When a node fails,
each of r helper nodes exposes a beta-dimensional slice W_i of its
space, and the newcomer adopts an alpha-dimensional space inside
W_1 + ... + W_r.  A space obtained this way is called (r, beta)
obtainable from the survivors.

The admissible configurations are modelled as a set A of (n-1)-member
space collections (multisets): A satisfies the repair property when for
every collection in A there is at least one obtainable newcomer space U
such that replacing any single member by U lands inside A again, and
every collection contains a spanning k-subset.  `check_repair_property`
verifies exactly that, recording one witness per collection (or, on
request, every valid newcomer).

Collections are multisets: members are kept sorted by canonical key and
duplicates are significant.  All verification routines are pure
functions of immutable inputs and safe to call concurrently;
:class:`StateSet` only caches their results.
"""

from __future__ import annotations

import hashlib
import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Iterator, Optional, Sequence

from .gf import Field
from .subspace import CapExceeded, Subspace, zero_subspace

__all__ = [
    "CodeParams",
    "RepairingCollection",
    "RepairWitness",
    "AdmissibleState",
    "StateSet",
    "CollectionCheck",
    "RepairReport",
    "ClosureError",
    "is_recovery_set",
    "recovery_dimension",
    "obtainable_spaces",
    "iter_obtainable",
    "find_repair_witness",
    "valid_newcomers",
    "check_repair_property",
    "exact_to_states",
    "reachable_closure",
    "OBTAINABLE_CAP",
]

OBTAINABLE_CAP = 10**5
CLOSURE_CAP = 500_000


@dataclass(frozen=True)
class CodeParams:
    """Parameters (m; n, k, r, alpha, beta) of a functional-repair code."""

    m: int
    n: int
    k: int
    r: int
    alpha: int
    beta: int
    q: int

    def __post_init__(self):
        checks = [
            (self.m >= 1, "m must be positive"),
            (self.n >= 2, "n must be at least 2"),
            (1 <= self.k <= self.n, "k must satisfy 1 <= k <= n"),
            (1 <= self.r <= self.n - 1, "r must satisfy 1 <= r <= n - 1"),
            (1 <= self.alpha <= self.m, "alpha must satisfy 1 <= alpha <= m"),
            (1 <= self.beta <= self.alpha, "beta must satisfy 1 <= beta <= alpha"),
            (self.q >= 2, "q must be a field order"),
        ]
        for ok, msg in checks:
            if not ok:
                raise ValueError(f"invalid parameters {self}: {msg}")

    @property
    def rate(self) -> Fraction:
        return Fraction(self.m, self.n * self.alpha)


class RepairingCollection:
    """A multiset of n-1 node spaces, identified by sorted member keys."""

    __slots__ = ("spaces", "key")

    def __init__(self, spaces: Iterable[Subspace]):
        spaces = sorted(spaces, key=lambda s: s.key)
        if not spaces:
            raise ValueError("a repairing collection needs at least one member")
        first = spaces[0]
        for s in spaces[1:]:
            if s.field != first.field or s.m != first.m:
                raise ValueError("collection members live in different spaces")
        self.spaces = tuple(spaces)
        self.key = tuple(s.key for s in self.spaces)

    @property
    def field(self) -> Field:
        return self.spaces[0].field

    @property
    def m(self) -> int:
        return self.spaces[0].m

    def replace(self, index: int, newcomer: Subspace) -> "RepairingCollection":
        """Collection with the member at the given sorted position replaced."""
        members = list(self.spaces)
        members[index] = newcomer
        return RepairingCollection(members)

    def __len__(self) -> int:
        return len(self.spaces)

    def __iter__(self) -> Iterator[Subspace]:
        return iter(self.spaces)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, RepairingCollection) and self.key == other.key

    def __hash__(self) -> int:
        return hash(self.key)

    def __repr__(self) -> str:
        dims = ",".join(str(s.dim) for s in self.spaces)
        return f"<Collection of {len(self.spaces)} spaces (dims {dims})>"


@dataclass(frozen=True)
class RepairWitness:
    """Proof that a newcomer space is (r, beta) obtainable.

    repair_indices point into the sorted member tuple of the collection;
    repair_spaces[i] is the beta-dimensional slice taken from that member.
    """

    repair_indices: tuple[int, ...]
    repair_spaces: tuple[Subspace, ...]

    def verify(self, collection: RepairingCollection, newcomer: Subspace,
               params: CodeParams) -> None:
        if len(self.repair_indices) != params.r or len(self.repair_spaces) != params.r:
            raise AssertionError("witness does not use exactly r helpers")
        total = zero_subspace(collection.field, collection.m)
        for idx, w in zip(self.repair_indices, self.repair_spaces):
            if w.dim != params.beta:
                raise AssertionError("repair space has wrong dimension")
            if not w <= collection.spaces[idx]:
                raise AssertionError("repair space is not inside its helper")
            total = total + w
        if not newcomer <= total:
            raise AssertionError("newcomer is not inside the sum of repair spaces")


@dataclass(frozen=True)
class AdmissibleState:
    """A collection together with a newcomer and its obtainability witness."""

    collection: RepairingCollection
    newcomer: Subspace
    witness: RepairWitness

    def verify(self, params: CodeParams) -> None:
        self.witness.verify(self.collection, self.newcomer, params)


# ----------------------------------------------------------------------
# recovery

def is_recovery_set(spaces: Sequence[Subspace], m: int) -> bool:
    """True when the spaces jointly span the full m-dimensional space."""
    if not spaces:
        return m == 0
    total = zero_subspace(spaces[0].field, m)
    for s in spaces:
        if s.m != m:
            raise ValueError(f"ambient mismatch: {s.m} != {m}")
        total = total + s
        if total.dim == m:
            return True
    return total.dim == m


def recovery_dimension(spaces: Sequence[Subspace], m: int) -> int:
    """Smallest number of the given spaces that suffices to span F_q^m.

    Scans subsets by increasing size and returns the first size for which
    some subset spans.  Raises when even the full list does not span.
    """
    if not is_recovery_set(list(spaces), m):
        raise ValueError("the full list of spaces does not span the ambient space")
    for size in range(1, len(spaces) + 1):
        for combo in itertools.combinations(spaces, size):
            if is_recovery_set(list(combo), m):
                return size
    raise AssertionError("unreachable")


# ----------------------------------------------------------------------
# obtainable newcomer spaces

def iter_obtainable(collection: RepairingCollection, params: CodeParams,
                    cap: int = OBTAINABLE_CAP) -> Iterator[tuple[Subspace, RepairWitness]]:
    """All (newcomer, witness) pairs obtainable by an (r, beta) repair.

    Deterministic order: repair sets by ascending index tuples, repair
    slices by canonical enumeration within each helper, candidate spaces
    by canonical enumeration within each slice sum.  The same newcomer
    may appear under several witnesses; counting is against the cap on
    examined candidates.
    """
    n1 = len(collection.spaces)
    if params.r > n1:
        raise ValueError(f"r={params.r} helpers but only {n1} members")
    field = collection.field
    examined = 0
    for indices in itertools.combinations(range(n1), params.r):
        slice_choices = [list(collection.spaces[i].subspaces(params.beta)) for i in indices]
        for ws in itertools.product(*slice_choices):
            total = zero_subspace(field, collection.m)
            for w in ws:
                total = total + w
            if total.dim < params.alpha:
                continue
            witness = RepairWitness(indices, tuple(ws))
            for cand in total.subspaces(params.alpha):
                examined += 1
                if examined > cap:
                    raise CapExceeded(
                        f"more than {cap} candidate newcomers for one collection")
                yield cand, witness


def obtainable_spaces(collection: RepairingCollection, params: CodeParams,
                      cap: int = OBTAINABLE_CAP) -> set[Subspace]:
    """The set of spaces obtainable from the collection by an (r, beta) repair."""
    return {cand for cand, _ in iter_obtainable(collection, params, cap)}


def find_repair_witness(collection: RepairingCollection, target: Subspace,
                        params: CodeParams) -> Optional[RepairWitness]:
    """First witness showing the target is obtainable, or None.

    Cheaper than full enumeration: candidate spaces are never generated,
    only the membership of the target in each slice sum is tested.
    """
    n1 = len(collection.spaces)
    field = collection.field
    for indices in itertools.combinations(range(n1), params.r):
        slice_choices = [list(collection.spaces[i].subspaces(params.beta)) for i in indices]
        for ws in itertools.product(*slice_choices):
            total = zero_subspace(field, collection.m)
            for w in ws:
                total = total + w
            if target <= total:
                return RepairWitness(indices, tuple(ws))
    return None


# ----------------------------------------------------------------------
# state sets and the repair property

@dataclass
class CollectionCheck:
    """Verification record for one collection."""

    collection: RepairingCollection
    spanning_ok: bool
    state: Optional[AdmissibleState]
    valid_newcomers: Optional[tuple[Subspace, ...]] = None
    per_index_feasible: Optional[tuple[bool, ...]] = None

    @property
    def ok(self) -> bool:
        return self.spanning_ok and self.state is not None

    @property
    def reason(self) -> str:
        if not self.spanning_ok:
            return "no spanning k-subset"
        if self.state is None:
            return "no valid newcomer"
        return "ok"


@dataclass
class RepairReport:
    """Outcome of checking the repair property over a whole state set."""

    params: CodeParams
    checks: list[CollectionCheck]
    full: bool

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)

    @property
    def failures(self) -> list[CollectionCheck]:
        return [c for c in self.checks if not c.ok]

    def render(self) -> str:
        lines = [f"collections checked: {len(self.checks)}"]
        bad = self.failures
        if bad:
            lines.append(f"failures: {len(bad)}")
            for c in bad[:20]:
                lines.append(f"  FAIL {c.reason}: {_short_key(c.collection.key)}")
        else:
            lines.append("verdict: repair property holds")
            if self.full:
                counts = sorted(len(c.valid_newcomers) for c in self.checks)
                if counts:
                    lines.append(f"valid newcomers per collection: min {counts[0]}, max {counts[-1]}")
        return "\n".join(lines)


def _short_key(key: tuple[bytes, ...]) -> str:
    return hashlib.sha256(b"".join(key)).hexdigest()[:12]


class StateSet:
    """A keyed set of repairing collections, with cached verification."""

    def __init__(self, params: CodeParams, collections: Iterable[RepairingCollection]):
        self.params = params
        self.collections: dict[tuple[bytes, ...], RepairingCollection] = {}
        for c in collections:
            if len(c.spaces) != params.n - 1:
                raise ValueError(
                    f"collection has {len(c.spaces)} members, expected n-1 = {params.n - 1}")
            if c.field.q != params.q or c.m != params.m:
                raise ValueError("collection does not match the code parameters")
            self.collections[c.key] = c
        self.report: Optional[RepairReport] = None
        self.transitions: Optional[dict[tuple[bytes, ...], tuple[Subspace, ...]]] = None
        self.witnesses: dict[tuple[bytes, ...], AdmissibleState] = {}

    def __len__(self) -> int:
        return len(self.collections)

    def __contains__(self, item) -> bool:
        key = item.key if isinstance(item, RepairingCollection) else item
        return key in self.collections

    def __iter__(self) -> Iterator[RepairingCollection]:
        for key in sorted(self.collections):
            yield self.collections[key]

    @property
    def verified(self) -> bool:
        return self.report is not None and self.report.ok

    def verify(self, all_newcomers: bool = False,
               cap: int = OBTAINABLE_CAP) -> RepairReport:
        """Run (and cache) the repair-property check over this set."""
        if self.report is None or (all_newcomers and not self.report.full):
            self.report = check_repair_property(self, all_newcomers=all_newcomers, cap=cap)
            if all_newcomers:
                self.transitions = {
                    c.collection.key: c.valid_newcomers for c in self.report.checks}
            for c in self.report.checks:
                if c.state is not None:
                    self.witnesses[c.collection.key] = c.state
        return self.report


def _has_spanning_subset(collection: RepairingCollection, params: CodeParams) -> bool:
    for combo in itertools.combinations(collection.spaces, params.k):
        if is_recovery_set(list(combo), params.m):
            return True
    return False


def _replacements_inside(states: StateSet, collection: RepairingCollection,
                         cand: Subspace) -> bool:
    for i in range(len(collection.spaces)):
        if i > 0 and collection.spaces[i].key == collection.spaces[i - 1].key:
            continue  # duplicate member, same replaced collection
        if collection.replace(i, cand) not in states:
            return False
    return True


def check_repair_property(states: StateSet, all_newcomers: bool = False,
                          cap: int = OBTAINABLE_CAP) -> RepairReport:
    """Verify the repair property of a state set.

    For every collection, searches the obtainable spaces for a newcomer
    whose every single-member replacement stays inside the set, and
    checks that some k members span.  With all_newcomers=True the full
    set of valid newcomers and the per-index feasibility pattern are
    recorded instead of stopping at the first witness.
    """
    params = states.params
    checks = []
    for key in sorted(states.collections):
        collection = states.collections[key]
        spanning = _has_spanning_subset(collection, params)
        state = None
        valid: dict[bytes, Subspace] = {}
        n1 = len(collection.spaces)
        per_index = [False] * n1
        tested: set[bytes] = set()
        for cand, witness in iter_obtainable(collection, params, cap):
            if cand.key in tested:
                continue
            tested.add(cand.key)
            if all_newcomers:
                hit_all = True
                for i in range(n1):
                    if i > 0 and collection.spaces[i].key == collection.spaces[i - 1].key:
                        continue
                    if collection.replace(i, cand) in states:
                        per_index[i] = True
                    else:
                        hit_all = False
                if hit_all:
                    valid[cand.key] = cand
                    if state is None:
                        state = AdmissibleState(collection, cand, witness)
            elif _replacements_inside(states, collection, cand):
                state = AdmissibleState(collection, cand, witness)
                break
        if state is not None:
            state.verify(params)
        check = CollectionCheck(collection, spanning, state)
        if all_newcomers:
            check.valid_newcomers = tuple(valid[k] for k in sorted(valid))
            check.per_index_feasible = tuple(per_index)
        checks.append(check)
    return RepairReport(params, checks, all_newcomers)


def valid_newcomers(states: StateSet, collection: RepairingCollection,
                    cap: int = OBTAINABLE_CAP) -> tuple[Subspace, ...]:
    """All obtainable newcomers whose replacements stay inside the set,
    sorted by canonical key."""
    if states.transitions is not None and collection.key in states.transitions:
        return states.transitions[collection.key]
    found: dict[bytes, Subspace] = {}
    for cand in obtainable_spaces(collection, states.params, cap):
        if _replacements_inside(states, collection, cand):
            found[cand.key] = cand
    return tuple(found[k] for k in sorted(found))


# ----------------------------------------------------------------------
# conversions and closures

def exact_to_states(node_spaces: Sequence[Subspace], params: CodeParams) -> StateSet:
    """State set of an exact-repair code: all collections that drop one node.

    Requires each node space to be (r, beta) obtainable from the others,
    which is exactly the exact-repair property.
    """
    if len(node_spaces) != params.n:
        raise ValueError(f"expected n = {params.n} node spaces, got {len(node_spaces)}")
    for s in node_spaces:
        if s.dim != params.alpha:
            raise ValueError(f"node space of dimension {s.dim}, expected alpha = {params.alpha}")
    collections = []
    for i in range(len(node_spaces)):
        rest = RepairingCollection([s for j, s in enumerate(node_spaces) if j != i])
        if find_repair_witness(rest, node_spaces[i], params) is None:
            raise ValueError(f"node space {i} is not obtainable from the remaining nodes")
        collections.append(rest)
    return StateSet(params, collections)


class ClosureError(RuntimeError):
    """A reachable closure could not certify one of its collections."""


def reachable_closure(seed: RepairingCollection, params: CodeParams,
                      admissible: Callable[[Sequence[Subspace]], bool],
                      cap: int = CLOSURE_CAP,
                      obtainable_cap: int = OBTAINABLE_CAP) -> StateSet:
    """A repair-closed set containing the seed, inside a predicate.

    Breadth-first: for each pending collection the first obtainable
    newcomer whose every replacement satisfies the predicate is taken as
    its certificate, and the replaced collections join the set.  Only
    that one certificate is expanded per collection, so the result can
    be much smaller than the full predicate-admissible set.  It passes
    check_repair_property by construction, but callers are expected to
    re-verify.
    """
    if not admissible(seed.spaces):
        raise ValueError("the seed collection does not satisfy the predicate")
    found: dict[tuple[bytes, ...], RepairingCollection] = {seed.key: seed}
    queue = [seed]
    qi = 0
    while qi < len(queue):
        collection = queue[qi]
        qi += 1
        certificate = None
        tested: set[bytes] = set()
        for cand, _ in iter_obtainable(collection, params, obtainable_cap):
            if cand.key in tested:
                continue
            tested.add(cand.key)
            replaced = []
            ok = True
            for i in range(len(collection.spaces)):
                if i > 0 and collection.spaces[i].key == collection.spaces[i - 1].key:
                    continue
                rc = collection.replace(i, cand)
                if rc.key not in found and not admissible(rc.spaces):
                    ok = False
                    break
                replaced.append(rc)
            if ok:
                certificate = replaced
                break
        if certificate is None:
            raise ClosureError(
                f"no certifying newcomer for collection {_short_key(collection.key)}")
        for rc in certificate:
            if rc.key not in found:
                if len(found) >= cap:
                    raise CapExceeded(f"reachable closure exceeded cap {cap}")
                found[rc.key] = rc
                queue.append(rc)
    return StateSet(params, found.values())
