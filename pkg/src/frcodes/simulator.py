"""Operational storage semantics on top of a verified state set.

A simulated system keeps n nodes, each holding the inner products of
the stored message with its subspace's canonical basis.  Failing a node
and repairing it walks the state set: the survivors form a repairing
collection, a valid newcomer is chosen, each helper computes and serves
exactly beta symbols from its own stored data, and the newcomer's
symbols are rebuilt as combinations of the downloads alone.  Long
seeded random runs assert, after every repair, that every spanning
choice of nodes still recovers the original message and that every
repair moved exactly the promised number of symbols.
"""

from __future__ import annotations

import hashlib
import itertools
import random
from dataclasses import dataclass, field as dc_field
from typing import Optional, Sequence

from .storage import (
    CodeParams,
    RepairingCollection,
    StateSet,
    find_repair_witness,
    is_recovery_set,
    valid_newcomers,
)
from .subspace import Subspace, express, rank_of, solve, vec_dot

__all__ = [
    "Node",
    "HelperShare",
    "RepairTranscript",
    "DssState",
    "RunReport",
    "CorruptStateError",
    "RecoveryError",
    "dss_init",
    "fail",
    "repair",
    "collect",
    "run_random",
]


class CorruptStateError(RuntimeError):
    """The live nodes no longer match any admissible collection."""


class RecoveryError(RuntimeError):
    """The selected nodes do not hold enough information to recover."""


def _short(key: bytes) -> str:
    return hashlib.sha256(key).hexdigest()[:12]


@dataclass
class Node:
    """One storage node: a subspace, its basis rows, and the stored symbols."""

    id: int
    space: Subspace
    basis: tuple[tuple[int, ...], ...]
    stored: tuple[int, ...]
    alive: bool = True


@dataclass(frozen=True)
class HelperShare:
    """What one helper contributed to a repair.

    The combination rows express the repair space's basis in the
    helper's basis, so each downloaded symbol is a combination of the
    helper's stored symbols only.
    """

    helper_id: int
    repair_space: Subspace
    combination: tuple[tuple[int, ...], ...]
    downloads: tuple[int, ...]


@dataclass(frozen=True)
class RepairTranscript:
    """Full record of one repair event."""

    failed_id: int
    helper_ids: tuple[int, ...]
    shares: tuple[HelperShare, ...]
    collection_key: tuple[bytes, ...]
    newcomer: Subspace
    newcomer_basis: tuple[tuple[int, ...], ...]
    new_stored: tuple[int, ...]

    @property
    def total_download(self) -> int:
        return sum(len(share.downloads) for share in self.shares)


@dataclass(eq=False)
class DssState:
    """A running system: parameters, code, nodes, message and event log.

    strict mode keeps every internal consistency assert on and checks
    recovery from every spanning subset after each random step; fast
    mode samples one subset instead.
    """

    params: CodeParams
    code: StateSet
    nodes: list[Node]
    message: tuple[int, ...]
    seed: int
    strict: bool
    rng: random.Random
    log: list[str] = dc_field(default_factory=list)
    newcomer_cache: dict = dc_field(default_factory=dict)

    @property
    def field(self):
        return self.nodes[0].space.field

    @property
    def failed_node(self) -> Optional[Node]:
        down = [node for node in self.nodes if not node.alive]
        return down[0] if down else None


def _stored_symbols(space: Subspace, x: Sequence[int]) -> tuple[int, ...]:
    return tuple(vec_dot(space.field, x, row) for row in space.rows)


def dss_init(code: StateSet, x: Sequence[int], seed: int = 0,
             strict: bool = True) -> DssState:
    """Start a system holding x, in a deterministic initial configuration.

    The initial nodes are the members of the least collection verified
    with a newcomer witness, plus that recorded newcomer; each node
    stores the inner products of x with its canonical basis rows.  Only
    a verified code is accepted.
    """
    if not code.verified:
        raise ValueError("code must be verified before simulation")
    params = code.params
    first = code.collections[min(code.witnesses)]
    x = tuple(x)
    if len(x) != params.m:
        raise ValueError(f"message length {len(x)} does not match ambient {params.m}")
    for a in x:
        first.field._check(a)
    newcomer = code.witnesses[first.key].newcomer
    spaces = list(first.spaces) + [newcomer]
    nodes = []
    for i, space in enumerate(spaces):
        nodes.append(Node(i, space, space.rows, _stored_symbols(space, x)))
    state = DssState(params, code, nodes, x, seed, strict, random.Random(seed))
    state.log.append(
        f"init: {params.n} nodes, collection {_short(b''.join(first.key))}, "
        f"newcomer {_short(newcomer.key)}")
    return state


def fail(state: DssState, node_id: int) -> None:
    """Mark one node as failed; only one failure may be outstanding."""
    if not 0 <= node_id < len(state.nodes):
        raise ValueError(f"no node {node_id}")
    current = state.failed_node
    if current is not None:
        raise ValueError(f"node {current.id} is already failed")
    state.nodes[node_id].alive = False
    state.log.append(f"fail: node {node_id}")


def _survivor_collection(state: DssState, failed_id: int,
                         ) -> tuple[RepairingCollection, list[Node]]:
    survivors = [node for node in state.nodes if node.id != failed_id]
    assert all(node.alive for node in survivors)
    ordered = sorted(survivors, key=lambda node: (node.space.key, node.id))
    return RepairingCollection([node.space for node in ordered]), ordered


def repair(state: DssState, node_id: Optional[int] = None,
           randomize: bool = False) -> RepairTranscript:
    """Repair the failed node from the other n-1 by beta-symbol downloads.

    The survivors must form a collection of the code; the newcomer is
    the least valid newcomer, or a seeded-random one when randomize is
    set.  Helpers compute their downloads from stored symbols only, and
    the newcomer's symbols are rebuilt from the downloads alone; in
    strict mode both are checked against the message.
    """
    failed = state.failed_node
    if failed is None:
        raise ValueError("no node has failed")
    if node_id is not None and node_id != failed.id:
        raise ValueError(f"node {node_id} is not the failed node")
    params = state.params
    collection, ordered = _survivor_collection(state, failed.id)
    if collection not in state.code:
        raise CorruptStateError(
            f"survivors of node {failed.id} form no admissible collection")
    choices = state.newcomer_cache.get(collection.key)
    if choices is None:
        choices = valid_newcomers(state.code, collection)
        state.newcomer_cache[collection.key] = choices
    assert choices, "a verified code always offers a newcomer"
    newcomer = state.rng.choice(choices) if randomize else choices[0]
    witness = find_repair_witness(collection, newcomer, params)
    assert witness is not None
    field = collection.field
    shares = []
    flat_rows: list[tuple[int, ...]] = []
    flat_downloads: list[int] = []
    for position, repair_space in zip(witness.repair_indices, witness.repair_spaces):
        helper = ordered[position]
        combination = []
        downloads = []
        for w_row in repair_space.rows:
            coeffs = express(field, w_row, helper.basis)
            assert coeffs is not None
            symbol = vec_dot(field, coeffs, helper.stored)
            if state.strict:
                assert symbol == vec_dot(field, state.message, w_row)
            combination.append(coeffs)
            downloads.append(symbol)
            flat_rows.append(w_row)
            flat_downloads.append(symbol)
        shares.append(HelperShare(helper.id, repair_space,
                                  tuple(combination), tuple(downloads)))
    new_stored = []
    for basis_row in newcomer.rows:
        coeffs = express(field, basis_row, flat_rows)
        assert coeffs is not None
        symbol = vec_dot(field, coeffs, flat_downloads)
        if state.strict:
            assert symbol == vec_dot(field, state.message, basis_row)
        new_stored.append(symbol)
    failed.space = newcomer
    failed.basis = newcomer.rows
    failed.stored = tuple(new_stored)
    failed.alive = True
    transcript = RepairTranscript(
        failed.id, tuple(share.helper_id for share in shares), tuple(shares),
        collection.key, newcomer, newcomer.rows, tuple(new_stored))
    assert transcript.total_download == params.r * params.beta
    if state.strict:
        for node in state.nodes:
            next_collection, _ = _survivor_collection(state, node.id)
            assert next_collection in state.code
    state.log.append(
        f"repair: node {failed.id} <- helpers "
        f"{','.join(str(i) for i in transcript.helper_ids)}, "
        f"newcomer {_short(newcomer.key)}, downloaded {transcript.total_download}")
    return transcript


def collect(state: DssState, node_ids: Sequence[int]) -> tuple[int, ...]:
    """Recover the message from the stored symbols of the chosen nodes."""
    params = state.params
    field = state.field
    rows: list[tuple[int, ...]] = []
    rhs: list[int] = []
    for node_id in node_ids:
        if not 0 <= node_id < len(state.nodes):
            raise ValueError(f"no node {node_id}")
        node = state.nodes[node_id]
        if not node.alive:
            raise ValueError(f"node {node_id} is failed")
        rows.extend(node.basis)
        rhs.extend(node.stored)
    rank = rank_of(field, params.m, rows)
    if rank != params.m:
        raise RecoveryError(
            f"nodes {list(node_ids)} span only {rank} of {params.m} dimensions; "
            "insufficient to recover")
    recovered = solve(field, rows, rhs)
    assert recovered is not None
    return recovered


@dataclass(frozen=True)
class RunReport:
    """Outcome of a random failure/repair/collect run."""

    steps: int
    seed: int
    distinct_states: int
    downloads: int
    verdict: str
    log: tuple[str, ...]
    transcripts: tuple[RepairTranscript, ...] = ()

    def render(self) -> str:
        lines = [
            f"run: {self.steps} steps, seed {self.seed}",
            f"states visited: {self.distinct_states}",
            f"downloads: {self.downloads} symbols",
            f"integrity: {self.verdict}",
            "--- log ---",
        ]
        lines.extend(self.log)
        return "\n".join(lines)


def run_random(state: DssState, steps: int,
               seed: Optional[int] = None) -> RunReport:
    """Cycle random failures, repairs and recoveries, checking integrity.

    Each step fails a uniformly random node, repairs it, and recovers
    the message from spanning node subsets: every spanning subset of
    size k in strict mode, one seeded choice otherwise.  Identical
    seeds give identical reports.
    """
    if seed is not None:
        state.rng = random.Random(seed)
        state.seed = seed
    params = state.params
    visited: set[tuple[bytes, ...]] = set()
    transcripts: list[RepairTranscript] = []
    downloads = 0
    for _ in range(steps):
        victim = state.rng.randrange(len(state.nodes))
        fail(state, victim)
        transcript = repair(state)
        transcripts.append(transcript)
        visited.add(transcript.collection_key)
        downloads += transcript.total_download
        spanning = []
        for combo in itertools.combinations(range(len(state.nodes)), params.k):
            spaces = [state.nodes[i].space for i in combo]
            if is_recovery_set(spaces, params.m):
                spanning.append(combo)
        assert spanning, "some k nodes must span after a verified repair"
        checks = spanning if state.strict else [state.rng.choice(spanning)]
        for combo in checks:
            recovered = collect(state, combo)
            if recovered != state.message:
                state.log.append(f"integrity failure at nodes {combo}")
                return RunReport(steps, state.seed, len(visited), downloads,
                                 "FAILED", tuple(state.log), tuple(transcripts))
    return RunReport(steps, state.seed, len(visited), downloads, "ok",
                     tuple(state.log), tuple(transcripts))
