"""Regular threads, thread extraction, projection and thread equality.

A regular thread is kept as a finite rooted graph. Every node is a leaf
(D, S, S+, S-), a tau node with one successor, or a postconditional node
``x <| a |> y`` that performs the basic action ``a`` and continues with
``x`` on reply T and ``y`` on reply F.

Node ids are numbered breadth-first from the root, then-branch before
else-branch, so two threads built in different ways print identically
when their graphs are identical.
"""
from collections import deque, namedtuple
import enum
from typing import Dict, Hashable, List, Tuple

from isproc.isa import BasicInstruction, InstrSeq, Kind


class NodeKind(enum.Enum):
    """Kinds of thread node."""

    DEAD = "D"
    STOP = "S"
    STOP_POS = "S+"
    STOP_NEG = "S-"
    TAU = "tau"
    POST = "post"


LEAF_KINDS = (NodeKind.DEAD, NodeKind.STOP, NodeKind.STOP_POS, NodeKind.STOP_NEG)

HALT_TO_LEAF = {
    Kind.HALT: NodeKind.STOP,
    Kind.HALT_POS: NodeKind.STOP_POS,
    Kind.HALT_NEG: NodeKind.STOP_NEG,
}


class Node(namedtuple("Node", ["kind", "action", "then", "orelse"])):
    """One thread state."""

    __slots__ = ()

    @classmethod
    def leaf(cls, kind):
        """Leaf node of the given kind."""
        if kind not in LEAF_KINDS:
            raise ValueError(f"Not a leaf kind: {kind}")
        return cls(kind, None, None, None)

    @classmethod
    def tau(cls, successor):
        """Tau node; T1 makes both branches the same."""
        return cls(NodeKind.TAU, None, successor, successor)

    @classmethod
    def post(cls, action, then, orelse):
        """Postconditional composition node."""
        return cls(NodeKind.POST, action, then, orelse)

    @property
    def is_leaf(self):
        """True for D, S, S+ and S-."""
        return self.kind in LEAF_KINDS

    def successors(self):
        """Return the successor ids (empty for a leaf)."""
        if self.kind is NodeKind.POST:
            return (self.then, self.orelse)
        if self.kind is NodeKind.TAU:
            return (self.then,)
        return ()


class RegularThread:
    """A finite rooted thread graph, compacted to the reachable part."""

    __slots__ = ("nodes", "root")

    def __init__(self, nodes, root=0):
        """Initialize from a node tuple and a root id.

        Raises:
            ValueError: If some successor id does not resolve
        """
        nodes = tuple(nodes)
        for node_id, node in enumerate(nodes):
            for successor in node.successors():
                if not 0 <= successor < len(nodes):
                    msg = f"Node {node_id} has dangling successor {successor}"
                    raise ValueError(msg)
        if not 0 <= root < len(nodes):
            raise ValueError(f"Root {root} is not a node")
        self.nodes = nodes
        self.root = root

    @classmethod
    def leaf(cls, kind):
        """A thread that is a single leaf."""
        return cls([Node.leaf(kind)])

    def node(self, node_id=None):
        """Return the node with ``node_id``, the root by default."""
        return self.nodes[self.root if node_id is None else node_id]

    def rooted_at(self, node_id):
        """Return the sub-thread starting from ``node_id``."""
        return _compact(self.nodes, node_id)

    def actions(self):
        """Return the set of basic actions on reachable post nodes."""
        return {node.action for node in self.nodes if node.kind is NodeKind.POST}

    def leaf_kinds(self):
        """Return the set of leaf kinds present."""
        return {node.kind for node in self.nodes if node.is_leaf}

    def __len__(self):
        return len(self.nodes)

    def __eq__(self, other):
        """Structural equality of compacted graphs; see ``equal`` for bisimilarity."""
        if not isinstance(other, RegularThread):
            return NotImplemented
        return self.nodes == other.nodes and self.root == other.root

    def __hash__(self):
        return hash((self.nodes, self.root))

    def to_text(self):
        """Return the deterministic adjacency text of the graph."""
        lines = [f"root n{self.root}"]
        for node_id, node in enumerate(self.nodes):
            if node.kind is NodeKind.POST:
                lines.append(
                    f"n{node_id} post {node.action} -> n{node.then} n{node.orelse}"
                )
            elif node.kind is NodeKind.TAU:
                lines.append(f"n{node_id} tau -> n{node.then}")
            else:
                lines.append(f"n{node_id} {node.kind.value}")
        return "\n".join(lines)

    def __str__(self):
        return self.to_text()

    def __repr__(self):
        return f"RegularThread(nodes={len(self.nodes)}, root={self.root})"


def _compact(nodes, root):
    """Renumber the nodes reachable from ``root`` breadth-first."""
    order = {root: 0}
    queue = deque([root])
    visit = []
    while queue:
        old = queue.popleft()
        visit.append(old)
        for successor in nodes[old].successors():
            if successor not in order:
                order[successor] = len(order)
                queue.append(successor)
    compacted = []
    for old in visit:
        node = nodes[old]
        if node.kind is NodeKind.POST:
            node = Node.post(node.action, order[node.then], order[node.orelse])
        elif node.kind is NodeKind.TAU:
            node = Node.tau(order[node.then])
        compacted.append(node)
    return RegularThread(compacted, 0)


class ThreadBuilder:
    """Build a thread whose nodes are keyed by arbitrary hashable states.

    ``node_id(key)`` hands out ids on first sight and tells whether the key
    is new, so callers can run a worklist over keys and fill each node in
    with ``define`` once its successors have ids.
    """

    def __init__(self, limit=None):
        self._ids: Dict[Hashable, int] = {}
        self._nodes: List[Node] = []
        self.limit = limit

    def node_id(self, key) -> Tuple[int, bool]:
        """Return ``(id, is_new)`` for ``key``."""
        if key in self._ids:
            return self._ids[key], False
        if self.limit is not None and len(self._nodes) >= self.limit:
            raise OverflowError(f"More than {self.limit} thread nodes")
        node_id = len(self._nodes)
        self._ids[key] = node_id
        self._nodes.append(None)
        return node_id, True

    def define(self, node_id, node):
        """Fill in the node for an id."""
        self._nodes[node_id] = node

    def __len__(self):
        return len(self._nodes)

    def build(self, root_id=0):
        """Return the compacted thread rooted at ``root_id``."""
        missing = [i for i, node in enumerate(self._nodes) if node is None]
        if missing:
            raise ValueError(f"Undefined thread nodes: {missing}")
        return _compact(self._nodes, root_id)


DEAD = RegularThread.leaf(NodeKind.DEAD)
STOP = RegularThread.leaf(NodeKind.STOP)
STOP_POS = RegularThread.leaf(NodeKind.STOP_POS)
STOP_NEG = RegularThread.leaf(NodeKind.STOP_NEG)


def post(action, then: RegularThread, orelse: RegularThread) -> RegularThread:
    """Return ``then <| action |> orelse`` as a new graph."""
    if not isinstance(action, BasicInstruction):
        action = BasicInstruction.from_text(action)
    offset_then = 1
    offset_else = 1 + len(then.nodes)
    nodes = [Node.post(action, offset_then + then.root, offset_else + orelse.root)]
    nodes.extend(_shift(then.nodes, offset_then))
    nodes.extend(_shift(orelse.nodes, offset_else))
    return _compact(nodes, 0)


def tau(thread: RegularThread) -> RegularThread:
    """Return ``tau o thread``."""
    nodes = [Node.tau(1 + thread.root)]
    nodes.extend(_shift(thread.nodes, 1))
    return _compact(nodes, 0)


def _shift(nodes, offset):
    for node in nodes:
        if node.kind is NodeKind.POST:
            yield Node.post(node.action, node.then + offset, node.orelse + offset)
        elif node.kind is NodeKind.TAU:
            yield Node.tau(node.then + offset)
        else:
            yield node


def resolve_jumps(seq: InstrSeq, position: int):
    """Follow jumps from ``position`` to a non-jump position.

    Returns:
        The final position, or None when control leaves the sequence or the
        jumps form a cycle (the beginning of an infinite jump chain).
    """
    seen = set()
    while 1 <= position <= len(seq):
        instruction = seq.at(position)
        if not instruction.is_jump:
            return position
        if position in seen:
            return None
        seen.add(position)
        position = instruction.target(position)
    return None


def extract(seq: InstrSeq) -> RegularThread:
    """Return the thread exhibited by ``seq`` on execution.

    One node per reachable non-jump position plus a shared D node.
    """
    builder = ThreadBuilder()
    dead_id, _ = builder.node_id(None)
    builder.define(dead_id, Node.leaf(NodeKind.DEAD))
    pending = []

    def node_for(position):
        final = resolve_jumps(seq, position)
        if final is None:
            return dead_id
        node_id, is_new = builder.node_id(final)
        if is_new:
            pending.append((node_id, final))
        return node_id

    root_id = node_for(1)
    while pending:
        node_id, position = pending.pop()
        instruction = seq.at(position)
        if instruction.is_halt:
            node = Node.leaf(HALT_TO_LEAF[instruction.kind])
        elif instruction.kind is Kind.PLAIN:
            next_id = node_for(position + 1)
            node = Node.post(instruction.basic, next_id, next_id)
        elif instruction.kind is Kind.POS_TEST:
            node = Node.post(
                instruction.basic, node_for(position + 1), node_for(position + 2)
            )
        else:
            node = Node.post(
                instruction.basic, node_for(position + 2), node_for(position + 1)
            )
        builder.define(node_id, node)
    return builder.build(root_id)


ThreadApprox = namedtuple("ThreadApprox", ["depth", "thread"])


def project(thread: RegularThread, depth: int) -> ThreadApprox:
    """Cut ``thread`` off after ``depth`` actions; tau counts as an action."""
    if depth < 0:
        raise ValueError(f"Depth must be a natural number, got {depth}")
    builder = ThreadBuilder()
    root_id, _ = builder.node_id((thread.root, depth))
    pending = [(root_id, thread.root, depth)]
    while pending:
        node_id, old, remaining = pending.pop()
        node = thread.nodes[old]
        if remaining == 0:
            builder.define(node_id, Node.leaf(NodeKind.DEAD))
            continue
        if node.is_leaf:
            builder.define(node_id, node)
            continue
        ids = []
        for successor in (node.then, node.orelse):
            key = (successor, remaining - 1)
            child_id, is_new = builder.node_id(key)
            if is_new:
                pending.append((child_id, successor, remaining - 1))
            ids.append(child_id)
        if node.kind is NodeKind.TAU:
            builder.define(node_id, Node.tau(ids[0]))
        else:
            builder.define(node_id, Node.post(node.action, ids[0], ids[1]))
    return ThreadApprox(depth, builder.build(root_id))


def contract_tau(thread: RegularThread) -> RegularThread:
    """Remove all tau nodes; a cycle of tau nodes becomes D."""
    nodes = thread.nodes
    dead = len(nodes)

    def skip(node_id):
        seen = set()
        while nodes[node_id].kind is NodeKind.TAU:
            if node_id in seen:
                return dead
            seen.add(node_id)
            node_id = nodes[node_id].then
        return node_id

    contracted = []
    for node in nodes:
        if node.kind is NodeKind.POST:
            contracted.append(Node.post(node.action, skip(node.then), skip(node.orelse)))
        else:
            contracted.append(node)
    contracted.append(Node.leaf(NodeKind.DEAD))
    return _compact(contracted, skip(thread.root))


def _partition(nodes):
    """Return the coarsest bisimulation as a list of block numbers."""
    blocks = {}
    labels = []
    for node in nodes:
        label = (node.kind, node.action)
        labels.append(blocks.setdefault(label, len(blocks)))
    while True:
        signatures = {}
        refined = []
        for node_id, node in enumerate(nodes):
            signature = (labels[node_id],) + tuple(
                labels[successor] for successor in node.successors()
            )
            refined.append(signatures.setdefault(signature, len(signatures)))
        if len(signatures) == len(set(labels)):
            return refined
        labels = refined


def equal(a: RegularThread, b: RegularThread) -> bool:
    """Decide whether two regular threads are bisimilar."""
    offset = len(a.nodes)
    union = list(a.nodes) + list(_shift(b.nodes, offset))
    blocks = _partition(union)
    return blocks[a.root] == blocks[offset + b.root]
