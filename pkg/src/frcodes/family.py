"""A family of functional-repair codes built from good collections.

For r > s >= 0 the family has parameters (m; n, k, r, alpha, beta) =
(m; r+1, r, r, s+1, 1) with message dimension

    m = (r - s)(s + 1) + s + (s - 1) + ... + 1.

A collection of r spaces of dimension s+1 in F_q^m is called (r, s) good
when the span of any r-s+j of them has dimension
(r-s)(s+1) + s + ... + (s+1-j), for every j = 0..s.  Good collections
are the admissible repairing collections of the family.

Repair hinges on an equivalence: pick a vector w_i in each member,
avoiding the part of that member covered by the span of the others (see
`forbidden_traces`), and a candidate newcomer U inside the span of the
w_i; let C be the set of coefficient vectors c with sum_j c_j w_j in U.
Then every one-member replacement by U is again good exactly when the
w_i are independent and C is an [r, s+1, r-s] MDS code.  The avoidance
hypothesis is essential: without it there are choices whose code is MDS
while a replacement still fails (the newcomer can meet an unreplaced
member in a vector the w_i never see).  `verify_replacement_equivalence`
computes both sides of this equivalence independently and insists they
agree, `family_step` uses the forward direction to produce newcomers
that provably preserve goodness, and `construct_good` bootstraps a good
collection recursively from coordinate axes.

The parameters meet the storage cutset bound with equality, which
`cutset_bound` makes checkable.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .gf import GF, Field
from .storage import (
    CodeParams,
    RepairWitness,
    RepairingCollection,
    StateSet,
    reachable_closure,
)
from .subspace import (
    CapExceeded,
    Subspace,
    Vector,
    left_kernel,
    rank_of,
    span,
    subspaces,
    vec_add,
    vec_scale,
    zero_subspace,
)

__all__ = [
    "message_dimension",
    "family_params",
    "is_good",
    "GoodCollection",
    "RepairCode",
    "repair_code",
    "mds_check",
    "mds_generator",
    "forbidden_traces",
    "verify_replacement_equivalence",
    "construct_good",
    "StepResult",
    "family_step",
    "random_walk",
    "cutset_bound",
    "family_code",
    "family_state_space",
    "GoodCollectionSet",
    "CODEWORD_CAP",
]

CODEWORD_CAP = 1 << 16
MDS_SEARCH_CAP = 10**5


def message_dimension(r: int, s: int) -> int:
    """Ambient dimension of the family code for locality r and level s."""
    if not (isinstance(r, int) and isinstance(s, int)):
        raise ValueError(f"parameters must be integers, got {r!r}, {s!r}")
    if not r > s >= 0:
        raise ValueError(f"need r > s >= 0, got r={r}, s={s}")
    return (r - s) * (s + 1) + s * (s + 1) // 2


def family_params(r: int, s: int, q: int) -> CodeParams:
    """Full parameter set (m; n, k, r, alpha, beta) of the family member."""
    m = message_dimension(r, s)
    return CodeParams(m=m, n=r + 1, k=r, r=r, alpha=s + 1, beta=1, q=q)


def _span_dim_target(r: int, s: int, j: int) -> int:
    return (r - s) * (s + 1) + sum(s - t for t in range(j))


def is_good(spaces: Sequence[Subspace], r: int, s: int) -> bool:
    """Whether r spaces of dimension s+1 form an (r, s) good collection."""
    m = message_dimension(r, s)
    if len(spaces) != r:
        raise ValueError(f"expected {r} spaces, got {len(spaces)}")
    for u in spaces:
        if u.m != m:
            raise ValueError(f"space in ambient dimension {u.m}, expected {m}")
        if u.dim != s + 1:
            raise ValueError(f"space of dimension {u.dim}, expected {s + 1}")
        if u.field != spaces[0].field:
            raise ValueError("spaces live over different fields")
    field = spaces[0].field
    rows = [u.rows for u in spaces]
    for j in range(s + 1):
        target = _span_dim_target(r, s, j)
        for combo in itertools.combinations(range(r), r - s + j):
            stacked = [row for i in combo for row in rows[i]]
            if rank_of(field, m, stacked) != target:
                return False
    return True


@dataclass(frozen=True)
class GoodCollection:
    """An (r, s) good collection, validated on construction.

    Member order is preserved: repair choices index into it.
    """

    r: int
    s: int
    spaces: tuple[Subspace, ...]

    def __post_init__(self):
        if not is_good(self.spaces, self.r, self.s):
            raise ValueError(f"the {self.r} spaces are not ({self.r},{self.s}) good")

    @property
    def field(self) -> Field:
        return self.spaces[0].field

    @property
    def m(self) -> int:
        return self.spaces[0].m

    @property
    def params(self) -> CodeParams:
        return family_params(self.r, self.s, self.field.q)

    def to_repairing_collection(self) -> RepairingCollection:
        return RepairingCollection(self.spaces)


@dataclass(frozen=True)
class RepairCode:
    """The coefficient code C = {c : sum_j c_j w_j lands in the newcomer}."""

    field: Field
    r: int
    words: tuple[Vector, ...]
    generator: tuple[Vector, ...]
    dim: int
    min_distance: int

    def is_mds(self, kdim: int, distance: int) -> bool:
        return self.dim == kdim and self.min_distance == distance


def _min_weight(words: Iterable[Vector]) -> int:
    best = 0
    for w in words:
        weight = sum(1 for a in w if a)
        if weight and (best == 0 or weight < best):
            best = weight
    return best


def repair_code(collection: GoodCollection, w: Sequence[Sequence[int]],
                target: Subspace, cap: int = CODEWORD_CAP) -> RepairCode:
    """Compute C = {c in F^r : sum_j c_j w_j in target} exactly.

    The condition is linear in c (reduction modulo target is a linear
    map), so C is the left kernel of the reduced w matrix.
    """
    r = collection.r
    field = collection.field
    if len(w) != r:
        raise ValueError(f"expected {r} repair vectors, got {len(w)}")
    for i, v in enumerate(w):
        if tuple(v) not in collection.spaces[i]:
            raise ValueError(f"repair vector {i} is not in its member space")
    if target.field != field or target.m != collection.m:
        raise ValueError("target space does not match the collection's ambient")
    reduced = [target.reduce(v) for v in w]
    kernel = left_kernel(field, collection.m, reduced)
    if field.q ** kernel.dim > cap:
        raise CapExceeded(f"code with q^{kernel.dim} words exceeds cap {cap}")
    words = tuple(sorted(kernel.vectors()))
    return RepairCode(field, r, words, kernel.rows, kernel.dim, _min_weight(words))


def mds_check(field: Field, generator: Sequence[Sequence[int]], r: int, kdim: int,
              d_target: Optional[int] = None, cap: int = CODEWORD_CAP) -> bool:
    """Whether the generator spans an [r, kdim, r-kdim+1] MDS code.

    The minimum distance is computed exhaustively over all q^kdim
    codewords; no algebraic shortcut.
    """
    if d_target is None:
        d_target = r - kdim + 1
    rows = [tuple(row) for row in generator]
    for row in rows:
        if len(row) != r:
            raise ValueError(f"generator row of length {len(row)}, expected {r}")
    if len(rows) != kdim or rank_of(field, r, rows) != kdim:
        return False
    if field.q ** kdim > cap:
        raise CapExceeded(f"q^{kdim} codewords exceed cap {cap}")
    best = None
    for coeffs in itertools.product(range(field.q), repeat=kdim):
        if not any(coeffs):
            continue
        word = (0,) * r
        for c, row in zip(coeffs, rows):
            word = vec_add(field, word, vec_scale(field, c, row))
        weight = sum(1 for a in word if a)
        if best is None or weight < best:
            best = weight
    return best == d_target


def mds_generator(field: Field, r: int, kdim: int,
                  cap: int = MDS_SEARCH_CAP) -> tuple[Vector, ...]:
    """Canonical generator of an [r, kdim, r-kdim+1] MDS code over the field.

    Identity, repetition and single-parity codes are hardwired; otherwise
    a (possibly extended) Reed-Solomon generator is used when the field
    is large enough, and a last-resort exhaustive search covers the rest.
    Raises when no MDS code exists within the cap.
    """
    if not 1 <= kdim <= r:
        raise ValueError(f"need 1 <= kdim <= r, got kdim={kdim}, r={r}")
    q = field.q

    def power(x: int, i: int) -> int:
        if i == 0:
            return 1
        return field.pow(x, i) if x else 0

    rows: Optional[tuple[Vector, ...]] = None
    if kdim == r:
        rows = tuple(tuple(1 if j == i else 0 for j in range(r)) for i in range(r))
    elif kdim == 1:
        rows = ((1,) * r,)
    elif kdim == r - 1:
        minus = field.neg(1)
        rows = tuple(tuple(1 if j == i else (minus if j == r - 1 else 0)
                           for j in range(r)) for i in range(r - 1))
    elif q >= r:
        points = list(field.elements())[:r]
        rows = tuple(tuple(power(x, i) for x in points) for i in range(kdim))
    elif q == r - 1:
        # all q evaluation points plus the point at infinity
        points = list(field.elements())
        rows = tuple(tuple(power(x, i) for x in points) + (1 if i == kdim - 1 else 0,)
                     for i in range(kdim))
    else:
        count = 0
        for cand in subspaces(field, r, kdim):
            count += 1
            if count > cap:
                raise CapExceeded(f"MDS search visited more than {cap} candidates")
            if mds_check(field, cand.rows, r, kdim):
                rows = cand.rows
                break
        if rows is None:
            raise ValueError(f"no [{r},{kdim},{r - kdim + 1}] MDS code over GF({q})")
    if not mds_check(field, rows, r, kdim):
        raise AssertionError(f"canonical [{r},{kdim}] generator is not MDS over GF({q})")
    return rows


def forbidden_traces(collection: GoodCollection) -> tuple[Subspace, ...]:
    """For each member, its intersection with the span of the others.

    Repair vectors must avoid these traces (an s-dimensional slice of
    each member): a vector in the trace is also reachable through the
    other members, and newcomers built over it can silently keep a
    nontrivial intersection with an unreplaced member.
    """
    out = []
    for i in range(collection.r):
        others = zero_subspace(collection.field, collection.m)
        for j, u in enumerate(collection.spaces):
            if j != i:
                others = others + u
        out.append(collection.spaces[i] & others)
    return tuple(out)


def verify_replacement_equivalence(collection: GoodCollection,
                                   w: Sequence[Sequence[int]],
                                   target: Subspace) -> bool:
    """Evaluate both sides of the replacement equivalence and compare.

    Side one replaces each member by the target in turn and checks
    goodness; side two checks independence of the w and the MDS property
    of the coefficient code.  The w_i must stay off the forbidden
    traces; that hypothesis is what makes the two sides agree.  A
    disagreement is an implementation bug and raises instead of
    returning.
    """
    r, s = collection.r, collection.s
    field = collection.field
    w = tuple(tuple(v) for v in w)
    if len(w) != r:
        raise ValueError(f"expected {r} repair vectors, got {len(w)}")
    traces = forbidden_traces(collection)
    for i, v in enumerate(w):
        if v not in collection.spaces[i]:
            raise ValueError(f"repair vector {i} is not in its member space")
        if v in traces[i]:
            raise ValueError(
                f"repair vector {i} lies in the span of the other members")
    if target.dim != s + 1:
        raise ValueError(f"newcomer of dimension {target.dim}, expected {s + 1}")
    hull = span(field, collection.m, [tuple(v) for v in w])
    if not target <= hull:
        raise ValueError("newcomer is not inside the span of the repair vectors")
    replaced_good = True
    for i in range(r):
        members = list(collection.spaces)
        members[i] = target
        if not is_good(members, r, s):
            replaced_good = False
            break
    code = repair_code(collection, w, target)
    independent = rank_of(field, collection.m, [tuple(v) for v in w]) == r
    code_good = independent and code.is_mds(s + 1, r - s)
    if replaced_good != code_good:
        raise RuntimeError(
            f"replacement equivalence violated: replacements good = {replaced_good}, "
            f"independent w and MDS code = {code_good} (w = {tuple(map(tuple, w))})")
    return replaced_good


def construct_good(r: int, s: int, q: int) -> GoodCollection:
    """Build an (r, s) good collection deterministically.

    Recursion on s: the base s = 0 is the coordinate axes of F_q^r, and
    each step embeds the previous collection in r-s extra coordinates
    and adjoins one new generator per member, drawn from the columns of
    a canonical [r, r-s] MDS generator so that any r-s of them are
    independent.
    """
    m = message_dimension(r, s)
    field = GF(*_prime_power(q))
    rows_per_space: list[list[Vector]] = [[] for _ in range(r)]
    # base: 1-dimensional axes in F^r, occupying the first r coordinates
    for i in range(r):
        rows_per_space[i].append(tuple(1 if j == i else 0 for j in range(m)))
    offset = r
    for level in range(1, s + 1):
        block = r - level
        gen = mds_generator(field, r, block)
        for i in range(r):
            column = tuple(gen[t][i] for t in range(block))
            rows_per_space[i].append(
                (0,) * offset + column + (0,) * (m - offset - block))
        offset += block
    assert offset == m
    spaces = tuple(span(field, m, rows) for rows in rows_per_space)
    return GoodCollection(r, s, spaces)


def _prime_power(q: int) -> tuple[int, int]:
    if q < 2:
        raise ValueError(f"field order must be at least 2, got {q}")
    for p in range(2, q + 1):
        if q % p == 0:
            e = 0
            n = q
            while n % p == 0:
                n //= p
                e += 1
            if n != 1:
                raise ValueError(f"{q} is not a prime power")
            return p, e
    raise AssertionError("unreachable")


@dataclass(frozen=True)
class StepResult:
    """One repair move: newcomer, its witness and the r replaced collections."""

    collection: GoodCollection
    w: tuple[Vector, ...]
    generator: tuple[Vector, ...]
    newcomer: Subspace
    replacements: tuple[GoodCollection, ...]
    witness: RepairWitness
    repairing_collection: RepairingCollection


def choose_repair_vectors(collection: GoodCollection,
                          rng: Optional[random.Random] = None) -> tuple[Vector, ...]:
    """An independent, trace-avoiding choice of one vector per member.

    Deterministic without an rng (first choice in enumeration order that
    stays independent, found by backtracking); uniformly random with
    retries otherwise.  Goodness guarantees a choice exists.
    """
    field = collection.field
    m = collection.m
    r = collection.r
    traces = forbidden_traces(collection)
    options = [[v for v in u.vectors() if any(v) and v not in t]
               for u, t in zip(collection.spaces, traces)]
    if rng is not None:
        while True:
            picked = [opts[rng.randrange(len(opts))] for opts in options]
            if rank_of(field, m, picked) == r:
                return tuple(picked)
    chosen: list[Vector] = []

    def extend(i: int) -> bool:
        if i == r:
            return True
        for v in options[i]:
            chosen.append(v)
            if rank_of(field, m, chosen) == i + 1 and extend(i + 1):
                return True
            chosen.pop()
        return False

    if not extend(0):
        raise AssertionError("no independent repair vectors in a good collection")
    return tuple(chosen)


def family_step(collection: GoodCollection,
                w: Optional[Sequence[Sequence[int]]] = None,
                generator: Optional[Sequence[Sequence[int]]] = None,
                rng: Optional[random.Random] = None,
                check_equivalence: bool = False) -> StepResult:
    """Produce a newcomer preserving goodness, with all r replacements.

    The newcomer is the image of the MDS coefficient code under
    c -> sum_j c_j w_j; the replaced collections are validated on
    construction.  The witness records the one-dimensional repair space
    spanned by w_i inside member i.
    """
    r, s = collection.r, collection.s
    field = collection.field
    m = collection.m
    if w is None:
        w = choose_repair_vectors(collection, rng)
    w = tuple(tuple(v) for v in w)
    traces = forbidden_traces(collection)
    for i, v in enumerate(w):
        if v not in collection.spaces[i]:
            raise ValueError(f"repair vector {i} is not in its member space")
        if v in traces[i]:
            raise ValueError(
                f"repair vector {i} lies in the span of the other members")
    if rank_of(field, m, w) != r:
        raise ValueError("repair vectors are not independent")
    if generator is None:
        generator = mds_generator(field, r, s + 1)
    generator = tuple(tuple(row) for row in generator)
    if not mds_check(field, generator, r, s + 1):
        raise ValueError(f"generator does not span an [{r},{s + 1},{r - s}] MDS code")
    images = []
    for row in generator:
        total = (0,) * m
        for c, v in zip(row, w):
            total = vec_add(field, total, vec_scale(field, c, v))
        images.append(total)
    newcomer = span(field, m, images)
    assert newcomer.dim == s + 1
    if check_equivalence:
        if not verify_replacement_equivalence(collection, w, newcomer):
            raise AssertionError("replacements are not good despite an MDS code")
    replacements = []
    for i in range(r):
        members = list(collection.spaces)
        members[i] = newcomer
        replacements.append(GoodCollection(r, s, tuple(members)))
    repairing = collection.to_repairing_collection()
    order = {u.key: i for i, u in enumerate(repairing.spaces)}
    pairs = sorted((order[collection.spaces[i].key], i) for i in range(r))
    witness = RepairWitness(tuple(p for p, _ in pairs),
                            tuple(span(field, m, [w[i]]) for _, i in pairs))
    witness.verify(repairing, newcomer, collection.params)
    return StepResult(collection, w, generator, newcomer,
                      tuple(replacements), witness, repairing)


def random_walk(collection: GoodCollection, steps: int,
                rng: random.Random) -> list[GoodCollection]:
    """Iterate seeded repair steps; every visited collection is validated.

    Returns the trajectory including the start, length steps + 1.
    """
    trail = [collection]
    current = collection
    for _ in range(steps):
        result = family_step(current, rng=rng)
        current = result.replacements[rng.randrange(len(result.replacements))]
        trail.append(current)
    return trail


def cutset_bound(k: int, r: int, alpha: int, beta: int) -> int:
    """Storage capacity bound: sum of min(alpha, (r-i) beta) for i < k."""
    if min(k, r, alpha, beta) < 1:
        raise ValueError("all parameters must be positive")
    return sum(min(alpha, (r - i) * beta) for i in range(k))


# ----------------------------------------------------------------------
# the family as a storage code

def family_code(r: int, s: int, q: int, closure_cap: int = 100_000,
                obtainable_cap: int = 10**5) -> StateSet:
    """Materialized reachable closure of the family code from its seed.

    Every collection the closure adds is good, and every collection gets
    a certifying newcomer during the search.  Sizes grow quickly; the
    cap guards against runaway enumeration.
    """
    params = family_params(r, s, q)
    seed = construct_good(r, s, q).to_repairing_collection()

    def admissible(members: Sequence[Subspace]) -> bool:
        return is_good(list(members), r, s)

    return reachable_closure(seed, params, admissible, cap=closure_cap,
                             obtainable_cap=obtainable_cap)


class GoodCollectionSet(StateSet):
    """The family code with membership decided by the goodness predicate.

    The explicit collection dict only caches members seen so far (it
    always holds the canonical seed); membership tests cover the whole
    code.  verify() certifies the repair property for the cached
    members, testing replacements against the full predicate.
    """

    def __init__(self, r: int, s: int, q: int):
        self.r = r
        self.s = s
        seed = construct_good(r, s, q)
        super().__init__(seed.params, [seed.to_repairing_collection()])

    def __contains__(self, item) -> bool:
        if super().__contains__(item):
            return True
        if not isinstance(item, RepairingCollection):
            return False
        if item.field.q != self.params.q or item.m != self.params.m:
            return False
        try:
            good = is_good(list(item.spaces), self.r, self.s)
        except ValueError:
            return False
        if good:
            self.collections[item.key] = item
        return good


def family_state_space(r: int, s: int, q: int) -> GoodCollectionSet:
    """The family code as a lazily-enumerated state set."""
    return GoodCollectionSet(r, s, q)
