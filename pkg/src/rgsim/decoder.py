"""ABSA-side classical processing and end-node Pauli-frame aggregation.

Everything here operates on classical data: raw measurement outcomes, loss
flags, and the side-effect bits received from the generating nodes. The
sign conventions are pinned by the end-to-end oracle checks in the test
suite.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .build import ArmLayout

LOST = "L"


@dataclass(frozen=True)
class BsmOutcome:
    """Result of one outer-photon pair analysis."""

    pair_index: int
    success: bool
    sign_left: int | None = None
    sign_right: int | None = None


def run_bsm(t, outer_left: int, outer_right: int, rng, p_success: float = 0.5,
            lost_left: bool = False, lost_right: bool = False,
            pair_index: int = 0) -> BsmOutcome:
    """Analyze one pair of outer photons on the tableau.

    With probability p_success the analyzer fires: the pair is entangled
    with a CZ and both photons are X-measured, returning the raw sign pair.
    Otherwise both photons are measured out in Z and the results dropped.
    Loss must be adjudicated by the caller first.
    """
    if lost_left or lost_right:
        raise ValueError("lost photon handed to the analyzer")
    if not 0.0 <= p_success <= 1.0:
        raise ValueError("p_success must be in [0, 1]")
    if rng.random() < p_success:
        t.cz(outer_left, outer_right)
        s_left = t.measure("X", outer_left, rng).sign
        s_right = t.measure("X", outer_right, rng).sign
        return BsmOutcome(pair_index, True, s_left, s_right)
    t.measure("Z", outer_left, rng)
    t.measure("Z", outer_right, rng)
    return BsmOutcome(pair_index, False)


def select_arm(outcomes) -> int | None:
    """Lowest-index successful pair, or None when every pair failed."""
    for out in outcomes:
        if out.success:
            return out.pair_index
    return None


@dataclass
class TreeNode:
    photon: int
    level: int
    basis: str
    raw: int | None  # +/-1, None when lost
    zbit: int
    resolved: int | None  # side-effect-conjugated outcome

    @property
    def lost(self) -> bool:
        return self.raw is None


@dataclass
class MeasurementTree:
    """Per-arm record of bases, outcomes, side effects and losses."""

    arm: ArmLayout
    logical_basis: str
    nodes: dict  # photon id -> TreeNode
    _resolve_cache: dict = field(default_factory=dict)

    @property
    def first_level(self):
        return self.arm.first_level

    def children(self, photon: int):
        return self.arm.children[photon]

    def node(self, photon: int) -> TreeNode:
        return self.nodes[photon]


def physical_basis(logical_basis: str, level: int) -> str:
    """Bases alternate down the tree, starting from the logical basis."""
    if logical_basis not in ("X", "Z"):
        raise ValueError("logical basis must be X or Z")
    odd = level % 2 == 1
    if logical_basis == "X":
        return "X" if odd else "Z"
    return "Z" if odd else "X"


def build_tree(arm: ArmLayout, logical_basis: str, raw_results: dict,
               side_effects: dict) -> MeasurementTree:
    """Assemble the measurement tree for one arm.

    `raw_results` maps every tree photon to +/-1 or LOST. An X-basis
    outcome is flipped when the photon's Z side-effect bit is set; Z-basis
    outcomes and losses are taken as-is.
    """
    nodes = {}
    for level0, photons in enumerate(arm.levels):
        level = level0 + 1
        basis = physical_basis(logical_basis, level)
        for p in photons:
            if p not in raw_results:
                raise ValueError(f"no result supplied for photon {p}")
            raw = raw_results[p]
            zbit = side_effects.get(p, 0)
            if raw == LOST:
                node = TreeNode(p, level, basis, None, zbit, None)
            else:
                if raw not in (1, -1):
                    raise ValueError(f"bad outcome {raw!r} for photon {p}")
                resolved = raw * (-1 if (basis == "X" and zbit) else 1)
                node = TreeNode(p, level, basis, raw, zbit, resolved)
            nodes[p] = node
    return MeasurementTree(arm, logical_basis, nodes)


def propagate_bsm(tree: MeasurementTree, opposite_sign: int):
    """Fold the partner outer photon's folded BSM sign into the tree.

    A -1 sign flips the resolved value of every first-level node; lost
    nodes stay lost.
    """
    if opposite_sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    if opposite_sign < 0:
        for p in tree.first_level:
            node = tree.nodes[p]
            if node.resolved is not None:
                node.resolved = -node.resolved
        tree._resolve_cache.clear()


def _resolve_z(tree: MeasurementTree, photon: int, use_majority: bool):
    if photon in tree._resolve_cache:
        return tree._resolve_cache[photon]
    node = tree.nodes[photon]
    value = None
    if not node.lost:
        value = node.resolved
    else:
        votes = []
        for child in tree.children(photon):
            cnode = tree.nodes[child]
            if cnode.lost:
                continue
            acc = cnode.resolved
            ok = True
            for grand in tree.children(child):
                gv = _resolve_z(tree, grand, use_majority)
                if gv is None:
                    ok = False
                    break
                acc *= gv
            if ok:
                if not use_majority:
                    value = acc
                    break
                votes.append(acc)
        if use_majority and votes:
            balance = sum(votes)
            value = None if balance == 0 else (1 if balance > 0 else -1)
    tree._resolve_cache[photon] = value
    return value


def indirect_z(tree: MeasurementTree, photon: int, use_majority: bool = False):
    """Z value of a Z-assigned node, directly or via a child's parity.

    A lost node's Z outcome equals the product of any surviving child's X
    outcome and the Z outcomes of that child's children (recursively
    resolved). Returns +/-1 or None when unresolvable.
    """
    node = tree.nodes[photon]
    if node.basis != "Z":
        raise ValueError(f"photon {photon} was assigned {node.basis}, not Z")
    return _resolve_z(tree, photon, use_majority)


def logical_x_candidates(tree: MeasurementTree, use_majority: bool = False):
    """One parity candidate per surviving first-level node."""
    candidates = []
    for p in tree.first_level:
        node = tree.nodes[p]
        if node.lost:
            continue
        acc = node.resolved
        ok = True
        for child in tree.children(p):
            v = _resolve_z(tree, child, use_majority)
            if v is None:
                ok = False
                break
            acc *= v
        if ok:
            candidates.append(acc)
    return candidates


def decode_logical(tree: MeasurementTree, basis: str, use_majority: bool = False):
    """Logical +/-1 outcome of the tree, or None on decode failure.

    Logical Z is the parity of all first-level Z values (direct or
    indirect); any unresolvable first-level node fails the decode.
    Logical X takes a majority vote over the per-node candidates; no
    candidates or an even tie fails.
    """
    if basis not in ("X", "Z"):
        raise ValueError("logical basis must be X or Z")
    if basis != tree.logical_basis:
        raise ValueError("tree was built for the other logical basis")
    if basis == "Z":
        value = 1
        for p in tree.first_level:
            v = _resolve_z(tree, p, use_majority)
            if v is None:
                return None
            value *= v
        return value
    votes = logical_x_candidates(tree, use_majority)
    if not votes:
        return None
    balance = sum(votes)
    if balance == 0:
        return None
    return 1 if balance > 0 else -1


# -- per-ABSA aggregation -------------------------------------------------


@dataclass(frozen=True)
class AbsaReport:
    """The two bits each end node receives from one ABSA."""

    success: bool
    z_parity_left: int | None = None
    z_parity_right: int | None = None


@dataclass
class AbsaDetail:
    """Local quantities kept for diagnostics and the propagation checks."""

    chosen_arm: int | None
    bsm_success: list
    alpha: int | None = None  # left-side non-chosen logical-Z parity bit
    beta: int | None = None  # right-side non-chosen logical-Z parity bit
    x_left_bit: int | None = None  # propagated logical X of left chosen tree
    y_right_bit: int | None = None  # propagated logical X of right chosen tree


def _bit(sign: int) -> int:
    return 1 if sign < 0 else 0


def absa_process(left_arms, right_arms, left_bits, right_bits, raw_left,
                 raw_right, bsm_outcomes, use_majority: bool = False):
    """Full classical processing of one ABSA.

    The chosen pair's trees are decoded in logical X (after folding the
    partner outer's sign into each tree's first level); every other arm is
    decoded in logical Z. Each side's parity bit combines its own side's
    non-chosen logical-Z outcomes with the opposite side's chosen logical-X
    outcome, so that XORing the bits of all ABSAs at an end node yields
    that node's Z correction.
    """
    chosen = select_arm(bsm_outcomes)
    detail = AbsaDetail(chosen_arm=chosen, bsm_success=[o.success for o in bsm_outcomes])
    if chosen is None:
        return AbsaReport(False), detail

    out = bsm_outcomes[chosen]
    s_left = out.sign_left * (-1 if left_bits.get(left_arms[chosen].outer, 0) else 1)
    s_right = out.sign_right * (-1 if right_bits.get(right_arms[chosen].outer, 0) else 1)

    ok = True
    alpha = 0
    beta = 0
    for i, arm in enumerate(left_arms):
        if i == chosen:
            continue
        v = decode_logical(build_tree(arm, "Z", raw_left, left_bits), "Z", use_majority)
        if v is None:
            ok = False
        else:
            alpha ^= _bit(v)
    for i, arm in enumerate(right_arms):
        if i == chosen:
            continue
        v = decode_logical(build_tree(arm, "Z", raw_right, right_bits), "Z", use_majority)
        if v is None:
            ok = False
        else:
            beta ^= _bit(v)

    tree_left = build_tree(left_arms[chosen], "X", raw_left, left_bits)
    propagate_bsm(tree_left, s_right)
    x_left = decode_logical(tree_left, "X", use_majority)
    tree_right = build_tree(right_arms[chosen], "X", raw_right, right_bits)
    propagate_bsm(tree_right, s_left)
    y_right = decode_logical(tree_right, "X", use_majority)
    if x_left is None or y_right is None:
        ok = False

    if not ok:
        return AbsaReport(False), detail
    detail.alpha = alpha
    detail.beta = beta
    detail.x_left_bit = _bit(x_left)
    detail.y_right_bit = _bit(y_right)
    return AbsaReport(True, alpha ^ _bit(y_right), beta ^ _bit(x_left)), detail


# -- end-node frame ---------------------------------------------------------


@dataclass(frozen=True)
class PauliFrame:
    """Accumulated end-node correction; this protocol only produces I or Z."""

    correction: str
    parity_bit: int
    local_bit: int


def end_node_frame(reports, side: str, local_bit: int) -> PauliFrame:
    """Fold all ABSA parity bits for one side into a Pauli correction.

    Any failed report is a protocol error here; the trial should already
    have been declared failed.
    """
    if side not in ("left", "right"):
        raise ValueError("side must be 'left' or 'right'")
    p = local_bit & 1
    for rep in reports:
        if not rep.success:
            raise ValueError("cannot build a frame from a failed report")
        p ^= rep.z_parity_left if side == "left" else rep.z_parity_right
    return PauliFrame("Z" if p else "I", p, local_bit & 1)


def wire_line(trial_id: int, absa_id: int, report: AbsaReport) -> str:
    """Log/golden-file form of one report: trial, absa, success, parities.

    Parities are only defined on success; failed reports carry '-'.
    """
    if report.success:
        return f"{trial_id},{absa_id},1,{report.z_parity_left},{report.z_parity_right}"
    return f"{trial_id},{absa_id},0,-,-"


def sequential_frame_bits(details, left_local_bit: int, right_local_bit: int):
    """Hop-by-hop view of the same aggregation.

    Processes the chain's logical fusions left to right: the left memory
    collects the right-side tree's flip at every boundary (with the next
    node's own Z parity folded in), while the pending flip on each
    boundary's left-side tree is carried forward and lands on the right
    memory at the end. Must agree bit-for-bit with the one-shot XOR of
    per-ABSA parities done by end_node_frame.
    """
    if not details:
        raise ValueError("need at least one ABSA")
    k = len(details) - 1
    for det in details:
        if det.alpha is None:
            raise ValueError("sequential view needs successful ABSAs")

    e_left = (left_local_bit & 1) ^ details[0].alpha
    for j, det in enumerate(details):
        next_alpha = details[j + 1].alpha if j < k else 0
        e_left ^= det.y_right_bit ^ next_alpha

    carry = 0
    for j, det in enumerate(details):
        prev_beta = details[j - 1].beta if j >= 1 else 0
        carry = det.x_left_bit ^ prev_beta ^ carry
    e_right = (right_local_bit & 1) ^ details[k].beta ^ carry
    return e_left, e_right
