"""Network-scale resilience: connectivity under node failures, key-node
vulnerability, subnetwork isolation, region-avoiding rerouting and
SLA-tiered traffic shedding.

Graphs are undirected, without self-loops or duplicate edges. Node ids may
be strings or integers but must be homogeneous within a topology so that
deterministic orderings (lexicographic tie-breaks) are well defined.
"""

from __future__ import annotations

import json
import math
from collections import deque
from dataclasses import dataclass, field
from pathlib import Path
from typing import Hashable, Iterable, Mapping, Sequence

from .errors import ConfigError, InvalidInputError, NoRouteError
from .service_level import SlaTier, validate_tiers

__all__ = [
    "Topology",
    "FlowRequest",
    "DisruptionRegion",
    "IsolationReport",
    "vertex_connectivity",
    "critical_nodes",
    "isolate",
    "reroute_avoiding",
    "shed_traffic",
    "topology_from_dict",
    "topology_to_dict",
    "load_topology",
    "flows_from_dict",
    "region_from_dict",
]

NodeId = Hashable


class Topology:
    """Undirected graph with per-edge capacity and optional 2-D coordinates."""

    def __init__(
        self,
        nodes: Mapping[NodeId, tuple[float, float] | None],
        edges: Iterable[tuple],
    ):
        self.coords: dict[NodeId, tuple[float, float] | None] = {}
        id_types = set()
        for node, coord in dict(nodes).items():
            id_types.add(type(node))
            if coord is not None:
                x, y = coord
                coord = (float(x), float(y))
                if not (math.isfinite(coord[0]) and math.isfinite(coord[1])):
                    raise InvalidInputError(f"node {node!r}: coordinates must be finite")
            self.coords[node] = coord
        if not all(t in (str, int) for t in id_types):
            raise InvalidInputError("node ids must be strings or integers")
        if len(id_types) > 1:
            raise InvalidInputError("node ids must not mix strings and integers")
        self.capacity: dict[tuple[NodeId, NodeId], float] = {}
        self.adjacency: dict[NodeId, set[NodeId]] = {n: set() for n in self.coords}
        for edge in edges:
            if len(edge) == 2:
                a, b = edge
                cap = 1.0
            else:
                a, b, cap = edge
            if a == b:
                raise InvalidInputError(f"self-loop on node {a!r}")
            if a not in self.coords or b not in self.coords:
                raise InvalidInputError(f"edge ({a!r},{b!r}) references unknown node")
            key = (a, b) if _key(a) <= _key(b) else (b, a)
            if key in self.capacity:
                raise InvalidInputError(f"duplicate edge ({a!r},{b!r})")
            cap = float(cap)
            if not (math.isfinite(cap) and cap > 0):
                raise InvalidInputError(f"edge ({a!r},{b!r}): capacity must be > 0")
            self.capacity[key] = cap
            self.adjacency[a].add(b)
            self.adjacency[b].add(a)

    @property
    def nodes(self) -> list[NodeId]:
        return sorted(self.coords, key=_key)

    @property
    def edges(self) -> list[tuple[NodeId, NodeId, float]]:
        return [(a, b, c) for (a, b), c in sorted(self.capacity.items(), key=lambda e: (_key(e[0][0]), _key(e[0][1])))]

    def __len__(self) -> int:
        return len(self.coords)

    def neighbors(self, node: NodeId) -> set[NodeId]:
        return self.adjacency[node]

    def has_edge(self, a: NodeId, b: NodeId) -> bool:
        return b in self.adjacency.get(a, ())

    def is_connected(self) -> bool:
        if len(self.coords) == 0:
            return False
        return len(_component(self.adjacency, next(iter(self.coords)))) == len(self.coords)

    def components(self) -> list[set[NodeId]]:
        seen: set[NodeId] = set()
        comps = []
        for node in self.coords:
            if node in seen:
                continue
            comp = _component(self.adjacency, node)
            seen |= comp
            comps.append(comp)
        return comps


def _key(node: NodeId):
    # stable sort key for homogeneous str-or-int ids
    return node


def _component(adjacency: Mapping[NodeId, set[NodeId]], start: NodeId) -> set[NodeId]:
    seen = {start}
    queue = deque([start])
    while queue:
        v = queue.popleft()
        for w in adjacency[v]:
            if w not in seen:
                seen.add(w)
                queue.append(w)
    return seen


@dataclass(frozen=True)
class FlowRequest:
    """A demand between two nodes, prioritized by its SLA tier."""

    flow_id: Hashable
    source: NodeId
    destination: NodeId
    demand: float
    tier: SlaTier

    def __post_init__(self):
        if self.source == self.destination:
            raise InvalidInputError(f"flow {self.flow_id!r}: source equals destination")
        if not self.demand > 0:
            raise InvalidInputError(f"flow {self.flow_id!r}: demand must be > 0")


@dataclass(frozen=True)
class DisruptionRegion:
    """A failed or threatened area: a circle over node coordinates, or an
    explicit node set. Circle membership is strict interior; boundary nodes
    and nodes without coordinates survive."""

    center: tuple[float, float] | None = None
    radius: float | None = None
    nodes: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        circular = self.center is not None or self.radius is not None
        if circular:
            if self.center is None or self.radius is None:
                raise InvalidInputError("circular region needs both center and radius")
            if self.nodes:
                raise InvalidInputError("region is either circular or an explicit node set")
            if not self.radius > 0:
                raise InvalidInputError("region radius must be > 0")
            object.__setattr__(self, "center", (float(self.center[0]), float(self.center[1])))
        object.__setattr__(self, "nodes", frozenset(self.nodes))

    def members(self, topology: Topology) -> set[NodeId]:
        if self.center is None:
            unknown = self.nodes - set(topology.coords)
            if unknown:
                raise InvalidInputError(f"region references unknown nodes {sorted(unknown, key=_key)!r}")
            return set(self.nodes)
        cx, cy = self.center
        inside = set()
        for node, coord in topology.coords.items():
            if coord is None:
                continue
            if math.dist(coord, (cx, cy)) < self.radius:
                inside.add(node)
        return inside


@dataclass(frozen=True)
class IsolationReport:
    removed: tuple
    connected: bool
    component_sizes: tuple[int, ...]


def vertex_connectivity(topology: Topology) -> int:
    """Minimum number of node removals that disconnect the graph.

    Max-flow with node splitting (unit node capacities), minimized over all
    non-adjacent pairs; a complete graph has connectivity n-1 by convention.
    """
    n = len(topology)
    if n < 2:
        raise InvalidInputError("vertex connectivity needs at least 2 nodes")
    if not topology.is_connected():
        return 0
    nodes = topology.nodes
    best = n - 1
    for i, s in enumerate(nodes):
        for t in nodes[i + 1 :]:
            if topology.has_edge(s, t):
                continue
            best = min(best, _local_connectivity(topology, s, t))
    return best


def _local_connectivity(topology: Topology, s: NodeId, t: NodeId) -> int:
    """Max number of internally node-disjoint s-t paths (s,t non-adjacent).

    Each node v becomes v_in -> v_out with capacity 1 (infinite for the
    endpoints); an undirected edge becomes the two directed crossings.
    Integer capacities, so Edmonds-Karp terminates at the exact value.
    """
    big = len(topology) + 1  # effectively infinite for unit node capacities
    capacity: dict[tuple, dict[tuple, int]] = {}

    def add_arc(u, v, cap):
        capacity.setdefault(u, {})[v] = capacity.get(u, {}).get(v, 0) + cap
        capacity.setdefault(v, {}).setdefault(u, 0)

    for v in topology.coords:
        add_arc((v, "in"), (v, "out"), big if v in (s, t) else 1)
    for a, b, _cap in topology.edges:
        add_arc((a, "out"), (b, "in"), big)
        add_arc((b, "out"), (a, "in"), big)

    source, sink = (s, "out"), (t, "in")
    flow = 0
    while True:
        parent = {source: None}
        queue = deque([source])
        while queue and sink not in parent:
            u = queue.popleft()
            for v, cap in capacity.get(u, {}).items():
                if cap > 0 and v not in parent:
                    parent[v] = u
                    queue.append(v)
        if sink not in parent:
            return flow
        bottleneck = big
        v = sink
        while parent[v] is not None:
            u = parent[v]
            bottleneck = min(bottleneck, capacity[u][v])
            v = u
        v = sink
        while parent[v] is not None:
            u = parent[v]
            capacity[u][v] -= bottleneck
            capacity[v][u] += bottleneck
            v = u
        flow += bottleneck


def critical_nodes(topology: Topology) -> set[NodeId]:
    """Articulation points of a connected graph, via iterative DFS low-link."""
    if not topology.is_connected():
        raise InvalidInputError("critical node analysis requires a connected graph")
    adjacency = topology.adjacency
    index: dict[NodeId, int] = {}
    low: dict[NodeId, int] = {}
    parent: dict[NodeId, NodeId | None] = {}
    articulation: set[NodeId] = set()
    counter = 0
    for root in topology.coords:
        if root in index:
            continue
        parent[root] = None
        root_children = 0
        stack: list[tuple[NodeId, Iterable[NodeId]]] = [(root, iter(adjacency[root]))]
        index[root] = low[root] = counter
        counter += 1
        while stack:
            v, it = stack[-1]
            advanced = False
            for w in it:
                if w not in index:
                    parent[w] = v
                    index[w] = low[w] = counter
                    counter += 1
                    if v == root:
                        root_children += 1
                    stack.append((w, iter(adjacency[w])))
                    advanced = True
                    break
                elif w != parent[v]:
                    low[v] = min(low[v], index[w])
            if not advanced:
                stack.pop()
                if stack:
                    u = stack[-1][0]
                    low[u] = min(low[u], low[v])
                    if u != root and low[v] >= index[u]:
                        articulation.add(u)
        if root_children > 1:
            articulation.add(root)
    return articulation


def isolate(topology: Topology, remove: Iterable[NodeId]) -> tuple[Topology, IsolationReport]:
    """Drop a node set and its incident edges; report residual connectivity."""
    remove = set(remove)
    unknown = remove - set(topology.coords)
    if unknown:
        raise InvalidInputError(f"cannot remove unknown nodes {sorted(unknown, key=_key)!r}")
    keep = {n: c for n, c in topology.coords.items() if n not in remove}
    edges = [(a, b, c) for a, b, c in topology.edges if a in keep and b in keep]
    residual = Topology(keep, edges)
    sizes = tuple(sorted((len(c) for c in residual.components()), reverse=True))
    report = IsolationReport(
        removed=tuple(sorted(remove, key=_key)),
        connected=residual.is_connected(),
        component_sizes=sizes,
    )
    return residual, report


def reroute_avoiding(
    topology: Topology,
    source: NodeId,
    destination: NodeId,
    region: DisruptionRegion | None = None,
) -> list[NodeId]:
    """Shortest hop-count path that avoids every node inside the region.

    Ties break to the lexicographically smallest node-id sequence. Raises
    :class:`NoRouteError` when no avoiding path exists (distinct from the
    invalid-input case of an endpoint lying inside the region).
    """
    for endpoint in (source, destination):
        if endpoint not in topology.coords:
            raise InvalidInputError(f"unknown endpoint {endpoint!r}")
    blocked = region.members(topology) if region is not None else set()
    if source in blocked or destination in blocked:
        raise InvalidInputError("endpoints must lie outside the disruption region")
    if source == destination:
        return [source]
    # distances to the destination over the surviving subgraph
    dist = {destination: 0}
    queue = deque([destination])
    while queue:
        v = queue.popleft()
        for w in topology.adjacency[v]:
            if w in blocked or w in dist:
                continue
            dist[w] = dist[v] + 1
            queue.append(w)
    if source not in dist:
        raise NoRouteError(f"no path from {source!r} to {destination!r} avoiding the region")
    # among shortest paths, greedily taking the smallest next id is
    # lexicographically minimal
    path = [source]
    current = source
    while current != destination:
        candidates = [
            w
            for w in topology.adjacency[current]
            if w not in blocked and dist.get(w) == dist[current] - 1
        ]
        current = min(candidates, key=_key)
        path.append(current)
    return path


def shed_traffic(
    flows: Sequence[FlowRequest],
    available_capacity: float,
) -> dict[Hashable, float]:
    """Admit flows in ascending tier priority (ties by flow id) until the
    capacity runs out; the marginal flow is admitted partially."""
    if available_capacity < 0:
        raise InvalidInputError("available_capacity must be >= 0")
    ids = [f.flow_id for f in flows]
    if len(set(ids)) != len(ids):
        raise InvalidInputError("flow ids must be unique")
    if flows:
        by_name: dict[str, SlaTier] = {}
        for f in flows:
            if by_name.setdefault(f.tier.name, f.tier) != f.tier:
                raise InvalidInputError(f"conflicting definitions of tier {f.tier.name!r}")
        validate_tiers(list(by_name.values()))
    admitted: dict[Hashable, float] = {}
    remaining = available_capacity
    try:
        ordered = sorted(flows, key=lambda f: (f.tier.priority, _key(f.flow_id)))
    except TypeError as exc:
        raise InvalidInputError("flow ids must be mutually orderable") from exc
    for flow in ordered:
        grant = min(flow.demand, remaining)
        admitted[flow.flow_id] = grant
        remaining -= grant
    return admitted


def topology_from_dict(data: Mapping) -> Topology:
    """Parse the documented topology schema:
    ``{"nodes": [{"id", "x"?, "y"?}], "edges": [{"a", "b", "capacity"?}]}``."""
    if not isinstance(data, Mapping):
        raise ConfigError("topology", "must be an object")
    unknown = set(data) - {"nodes", "edges"}
    if unknown:
        raise ConfigError(sorted(unknown)[0], "unknown field")
    nodes: dict[NodeId, tuple[float, float] | None] = {}
    for i, node in enumerate(data.get("nodes", [])):
        if not isinstance(node, Mapping) or "id" not in node:
            raise ConfigError(f"nodes[{i}]", "must be an object with an 'id'")
        extra = set(node) - {"id", "x", "y"}
        if extra:
            raise ConfigError(f"nodes[{i}].{sorted(extra)[0]}", "unknown field")
        has_x, has_y = "x" in node, "y" in node
        if has_x != has_y:
            raise ConfigError(f"nodes[{i}]", "x and y must be given together")
        if node["id"] in nodes:
            raise ConfigError(f"nodes[{i}].id", f"duplicate node id {node['id']!r}")
        nodes[node["id"]] = (node["x"], node["y"]) if has_x else None
    edges = []
    for i, edge in enumerate(data.get("edges", [])):
        if not isinstance(edge, Mapping) or "a" not in edge or "b" not in edge:
            raise ConfigError(f"edges[{i}]", "must be an object with 'a' and 'b'")
        extra = set(edge) - {"a", "b", "capacity"}
        if extra:
            raise ConfigError(f"edges[{i}].{sorted(extra)[0]}", "unknown field")
        edges.append((edge["a"], edge["b"], edge.get("capacity", 1.0)))
    try:
        return Topology(nodes, edges)
    except InvalidInputError as exc:
        raise ConfigError("topology", str(exc)) from exc


def topology_to_dict(topology: Topology) -> dict:
    nodes = []
    for node in topology.nodes:
        entry: dict = {"id": node}
        coord = topology.coords[node]
        if coord is not None:
            entry["x"], entry["y"] = coord
        nodes.append(entry)
    return {
        "nodes": nodes,
        "edges": [{"a": a, "b": b, "capacity": c} for a, b, c in topology.edges],
    }


def load_topology(path: str | Path) -> Topology:
    with open(path, encoding="utf-8") as fh:
        return topology_from_dict(json.load(fh))


def region_from_dict(data: Mapping | None) -> DisruptionRegion | None:
    """Parse ``{"center": [x,y], "radius": r}`` or ``{"nodes": [...]}``."""
    if data is None:
        return None
    if not isinstance(data, Mapping):
        raise ConfigError("region", "must be an object")
    unknown = set(data) - {"center", "radius", "nodes"}
    if unknown:
        raise ConfigError(f"region.{sorted(unknown)[0]}", "unknown field")
    try:
        if "nodes" in data:
            return DisruptionRegion(nodes=frozenset(data["nodes"]))
        return DisruptionRegion(
            center=tuple(data["center"]), radius=data["radius"]
        )
    except (KeyError, TypeError, InvalidInputError) as exc:
        raise ConfigError("region", str(exc)) from exc


def flows_from_dict(data: Mapping) -> list[FlowRequest]:
    """Parse ``{"tiers": [...], "flows": [...]}`` with tiers referenced by name."""
    if not isinstance(data, Mapping):
        raise ConfigError("flows", "must be an object")
    unknown = set(data) - {"tiers", "flows"}
    if unknown:
        raise ConfigError(sorted(unknown)[0], "unknown field")
    tiers: dict[str, SlaTier] = {}
    for i, td in enumerate(data.get("tiers", [])):
        fields = {"name", "priority", "outage_target", "survival_time", "demand", "degraded_demand"}
        if not isinstance(td, Mapping) or set(td) - fields:
            raise ConfigError(f"tiers[{i}]", f"expected fields {sorted(fields)}")
        missing = fields - set(td)
        if missing:
            raise ConfigError(f"tiers[{i}].{sorted(missing)[0]}", "missing field")
        tier = SlaTier(**td)
        if tier.name in tiers:
            raise ConfigError(f"tiers[{i}].name", f"duplicate tier {tier.name!r}")
        tiers[tier.name] = tier
    validate_tiers(list(tiers.values()))
    flows = []
    for i, fd in enumerate(data.get("flows", [])):
        fields = {"flow_id", "source", "destination", "demand", "tier"}
        if not isinstance(fd, Mapping) or set(fd) != fields:
            raise ConfigError(f"flows[{i}]", f"expected fields {sorted(fields)}")
        if fd["tier"] not in tiers:
            raise ConfigError(f"flows[{i}].tier", f"unknown tier {fd['tier']!r}")
        flows.append(
            FlowRequest(
                flow_id=fd["flow_id"],
                source=fd["source"],
                destination=fd["destination"],
                demand=fd["demand"],
                tier=tiers[fd["tier"]],
            )
        )
    return flows
