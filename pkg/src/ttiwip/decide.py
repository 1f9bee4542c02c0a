"""The verdict pipeline for full irreducibility of an outer automorphism.

The pipeline verifies a given (or rose-built) representative and combines the
detectors: invariant subgraphs, train-track verification, matrix filters
(irreducibility, expansion, positive power), Whitehead connectivity with the
blow-up certificate, the clean criterion, and a bounded search for periodic
conjugacy classes.  Atoroidality is never certified here, only asserted by the
caller or refuted by a found periodic class; verdicts carry machine-checkable
witnesses.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional, Union

from . import blowup as B
from . import traintrack as T
from . import whitehead as WH
from .graphs import (
    GraphMap,
    TopologicalRepresentative,
    induced_endomorphism,
    is_homotopy_equivalence,
    min_degree,
    print_graph_map,
    rose,
    rose_representative,
)
from .words import (
    Automorphism,
    Word,
    canonical_rotation,
    conjugate_equal,
    enumerate_conjugacy_classes,
    print_automorphism,
)

VERDICT_IWIP_GIVEN_ATOROIDAL = "IWIP_CERTIFIED_GIVEN_ATOROIDAL"
VERDICT_NOT_IWIP = "NOT_IWIP"
VERDICT_NOT_ATOROIDAL_UNDETERMINED = "NOT_ATOROIDAL_UNDETERMINED"
VERDICT_UNDETERMINED = "UNDETERMINED"

ATOROIDAL_TRUE = "asserted-true"
ATOROIDAL_FALSE = "asserted-false"
ATOROIDAL_UNKNOWN = "unknown"


@dataclass(frozen=True)
class AnalysisOptions:
    """Bounds for the bounded searches; atoroidality is an input assertion."""

    atoroidal: str = ATOROIDAL_UNKNOWN
    lmax: int = 6  # longest cyclic word scanned for periodic classes
    pmax: int = 12  # largest period scanned
    carriage_lmax: int = 10  # window bound for carriage refutation
    length_cap: int = 10**6  # iterated image length cap
    search_word_cap: int = 4096  # image length cap inside the periodic search

    def __post_init__(self):
        if self.atoroidal not in (ATOROIDAL_TRUE, ATOROIDAL_FALSE, ATOROIDAL_UNKNOWN):
            raise ValueError(f"bad atoroidal assertion {self.atoroidal!r}")
        for name in ("lmax", "pmax", "carriage_lmax", "length_cap", "search_word_cap"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")


def search_periodic_conjugacy(
    aut: Automorphism, lmax: int, pmax: int, word_cap: int = 4096
) -> Optional[tuple[Word, int]]:
    """Bounded scan for a conjugacy class made periodic by some power.

    Canonical representatives of classes of cyclically reduced words of length
    <= lmax are tried in order, periods up to pmax; inverse classes are
    scanned separately.  Returns the first (word, period) hit; absence refutes
    nothing.  Words whose images outgrow word_cap are abandoned early.
    """
    for w in enumerate_conjugacy_classes(aut.rank, lmax):
        current = w
        for j in range(1, pmax + 1):
            current = aut.apply(current)
            if len(current) > word_cap:
                break
            if conjugate_equal(current, w):
                return w, j
    return None


@dataclass(frozen=True)
class Report:
    """Full analysis record; every verdict lists the evidence that drove it."""

    input_kind: str
    input_text: str
    marking: str
    options: AnalysisOptions
    homotopy_equivalence: Optional[bool]
    min_degree: int
    train_track: bool
    degenerate_turn_chain: Optional[list]
    matrix: tuple[tuple[int, ...], ...]
    edge_order: tuple[str, ...]
    irreducible: bool
    expanding: bool
    expanding_per_edge: tuple[bool, ...]
    primitive_exponent: Optional[int]
    whitehead: Optional[list]
    clean: Optional[bool]
    weakly_clean: Optional[bool]
    reduction_witnesses: list
    periodic_conjugacy: Optional[tuple[str, int]]
    verdict: str
    witnesses: list = field(default_factory=list)
    justifications: list = field(default_factory=list)
    diagnostics: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "schema": "ttiwip-report/1",
            "input": {
                "kind": self.input_kind,
                "text": self.input_text,
                "marking": self.marking,
            },
            "bounds_used": {
                "atoroidal": self.options.atoroidal,
                "lmax": self.options.lmax,
                "pmax": self.options.pmax,
                "carriage_lmax": self.options.carriage_lmax,
                "length_cap": self.options.length_cap,
                "search_word_cap": self.options.search_word_cap,
            },
            "homotopy_equivalence": self.homotopy_equivalence,
            "min_degree": self.min_degree,
            "train_track": self.train_track,
            "degenerate_turn_chain": self.degenerate_turn_chain,
            "matrix": [list(row) for row in self.matrix],
            "edge_order": list(self.edge_order),
            "irreducible": self.irreducible,
            "expanding": self.expanding,
            "expanding_per_edge": list(self.expanding_per_edge),
            "primitive_exponent": self.primitive_exponent,
            "whitehead": self.whitehead,
            "clean": self.clean,
            "weakly_clean": self.weakly_clean,
            "reduction_witnesses": self.reduction_witnesses,
            "periodic_conjugacy": (
                None
                if self.periodic_conjugacy is None
                else {"word": self.periodic_conjugacy[0], "period": self.periodic_conjugacy[1]}
            ),
            "verdict": self.verdict,
            "witnesses": self.witnesses,
            "justifications": self.justifications,
            "diagnostics": self.diagnostics,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    def to_text(self) -> str:
        lines = [f"verdict: {self.verdict}"]
        lines.append(f"input ({self.input_kind}, marking {self.marking}):")
        lines.extend("  " + ln for ln in self.input_text.strip().splitlines())
        lines.append(f"homotopy equivalence: {self.homotopy_equivalence}")
        lines.append(f"train-track: {self.train_track}")
        if self.degenerate_turn_chain:
            lines.append("degenerate turn witness chain:")
            for entry in self.degenerate_turn_chain:
                lines.append(
                    f"  turn {{{entry['turn'][0]}, {entry['turn'][1]}}} "
                    f"in image {entry['depth']} of edge {entry['edge']}"
                )
        lines.append("transition matrix (rows/cols " + " ".join(self.edge_order) + "):")
        width = max(
            (len(str(a)) for row in self.matrix for a in row), default=1
        )
        for row in self.matrix:
            lines.append("  " + " ".join(str(a).rjust(width) for a in row))
        lines.append(f"irreducible: {self.irreducible}")
        lines.append(
            "expanding: "
            + str(self.expanding)
            + " (per edge: "
            + ", ".join(
                f"{name}={flag}" for name, flag in zip(self.edge_order, self.expanding_per_edge)
            )
            + ")"
        )
        lines.append(f"primitive exponent: {self.primitive_exponent}")
        if self.whitehead is not None:
            for entry in self.whitehead:
                lines.append(
                    f"whitehead graph at vertex {entry['vertex']}: "
                    f"connected={entry['connected']}"
                )
                for node, nbrs in entry["adjacency"].items():
                    lines.append(f"  {node}: {' '.join(nbrs) if nbrs else '-'}")
        lines.append(f"clean: {self.clean}   weakly clean: {self.weakly_clean}")
        for w in self.reduction_witnesses:
            lines.append(
                f"reduction witness ({w['provenance']}): edges {w['edges']} "
                f"b1 {w['betti_delta']} < ambient {w['betti_ambient']}"
            )
        if self.periodic_conjugacy is not None:
            lines.append(
                f"periodic conjugacy class: [{self.periodic_conjugacy[0]}] "
                f"with period {self.periodic_conjugacy[1]}"
            )
        for w in self.witnesses:
            lines.append(f"witness: {json.dumps(w, sort_keys=True)}")
        for j in self.justifications:
            lines.append(f"justified by: {j}")
        for d in self.diagnostics:
            lines.append(f"note: {d}")
        return "\n".join(lines) + "\n"


AnalyzeInput = Union[Automorphism, GraphMap, TopologicalRepresentative]


def _as_representative(obj: AnalyzeInput) -> tuple[TopologicalRepresentative, str, str]:
    if isinstance(obj, Automorphism):
        rep = rose_representative(obj)
        return rep, "automorphism", print_automorphism(obj)
    if isinstance(obj, TopologicalRepresentative):
        kind = "automorphism" if obj.automorphism is not None else "graph-map"
        text = (
            print_automorphism(obj.automorphism)
            if obj.automorphism is not None
            else print_graph_map(obj.map)
        )
        return obj, kind, text
    if isinstance(obj, GraphMap):
        aut: Optional[Automorphism] = None
        marking = "claimed"
        g = obj.graph
        if g.vertex_count == 1 and g == rose(g.edge_count):
            try:
                images = induced_endomorphism(obj)
                aut = Automorphism(g.edge_count, tuple(images))
                marking = "identity-rose"
            except ValueError:
                aut = None
        rep = TopologicalRepresentative(
            map=obj,
            marking=marking,
            min_degree_3=min_degree(g) >= 3,
            automorphism=aut,
        )
        return rep, "graph-map", print_graph_map(obj)
    raise TypeError(f"cannot analyze {type(obj).__name__}")


def _whitehead_entries(g, whs) -> list:
    entries = []
    for w in whs:
        adjacency = {}
        for node in w.nodes:
            adjacency[g.edge_name(node)] = [g.edge_name(n) for n in w.neighbors(node)]
        entries.append(
            {
                "vertex": w.vertex,
                "nodes": [g.edge_name(n) for n in w.nodes],
                "adjacency": adjacency,
                "connected": w.is_connected(),
            }
        )
    return entries


def _reduction_entry(g, witness: B.ReductionWitness, graph_label: str) -> dict:
    return {
        "provenance": witness.provenance,
        "graph": graph_label,
        "edges": [g.edge_names[k - 1] for k in witness.delta_edges],
        "invariant": witness.invariant,
        "homotopically_nontrivial": witness.homotopically_nontrivial,
        "not_homotopy_equivalence": witness.not_homotopy_equivalence,
        "betti_delta": witness.betti_delta,
        "betti_ambient": witness.betti_ambient,
        "delta_connected": witness.delta_connected,
    }


def analyze(obj: AnalyzeInput, options: AnalysisOptions = AnalysisOptions()) -> Report:
    """Run the full pipeline and assemble a deterministic report."""
    rep, input_kind, input_text = _as_representative(obj)
    f = rep.map
    g = f.graph
    diagnostics: list[str] = []
    witnesses: list[dict] = []
    justifications: list[str] = []

    try:
        he: Optional[bool] = is_homotopy_equivalence(f)
    except ValueError:
        he = None
        diagnostics.append("fundamental group is trivial; not a representative")
    if he is False:
        diagnostics.append(
            "map is not a homotopy equivalence; it represents no automorphism"
        )
    degree = min_degree(g)
    if degree < 3:
        diagnostics.append(
            f"minimum vertex degree {degree} < 3; reported but not blocking"
        )

    # stage: invariant subgraphs (works for any graph-map)
    reductions: list[dict] = []
    inv = B.invariant_subgraph_witness(f)
    if inv is not None:
        reductions.append(_reduction_entry(g, inv, "base"))
        justifications.append("reduction-witness")

    # stage: train-track verification
    closure = T.taken_turn_closure(f)
    tt = T.is_train_track(f, closure)
    chain = None
    if not tt:
        worst = closure.degenerate_turns()[0]
        chain = [
            {
                "turn": [g.edge_name(t[0]), g.edge_name(t[1])],
                "edge": g.edge_name(edge),
                "depth": depth,
            }
            for (t, edge, depth) in closure.witness_chain(worst)
        ]
        justifications.append("train-track-verification")

    # stage: matrix filters
    a = T.transition_matrix(f)
    irreducible = T.is_irreducible(a)
    expansion = T.is_expanding(f)
    exponent = (
        T.primitive_exponent(f) if tt else T.minimal_primitive_exponent(a)
    )
    obstructions = []
    if not irreducible:
        obstructions.append("reducible-matrix")
    if not all(expansion.per_edge):
        obstructions.append("non-expanding-edge")
    if exponent is None:
        obstructions.append("no-positive-power")
    if tt and obstructions:
        justifications.append("irreducibility-expansion-primitivity-filter")

    # stage: Whitehead graphs, clean, blow-up
    wh_entries = None
    clean_report: Optional[WH.CleanReport] = None
    if tt:
        whs = WH.whitehead_graphs(f, closure)
        wh_entries = _whitehead_entries(g, whs)
        clean_report = WH.is_clean(f, closure)
        if expansion.expanding and not all(w.is_connected() for w in whs):
            blow = B.blow_up_reduction(f)
            if blow is not None:
                bu = B.blow_up(f)
                reductions.append(_reduction_entry(bu.blown.graph, blow, "blown"))
                justifications.append("whitehead-blowup-reduction")

    # stage: periodic conjugacy classes
    periodic: Optional[tuple[Word, int]] = None
    searched = False
    if rep.automorphism is not None:
        certifying = (
            clean_report is not None
            and clean_report.clean
            and options.atoroidal == ATOROIDAL_TRUE
        )
        if not certifying:
            searched = True
            periodic = search_periodic_conjugacy(
                rep.automorphism, options.lmax, options.pmax, options.search_word_cap
            )
    else:
        diagnostics.append(
            "no automorphism recovered from the input; periodic-class search skipped"
        )

    # verdict assembly, in certificate priority order; a map that is not a
    # homotopy equivalence represents no automorphism, so no verdict applies
    verdict = VERDICT_UNDETERMINED
    have_reduction = he is not False and any(
        w for w in reductions if w["invariant"] and w["homotopically_nontrivial"]
        and w["not_homotopy_equivalence"]
    )
    periodic_primitive = (
        periodic is not None and len(canonical_rotation(periodic[0])) == 1
    )
    if have_reduction:
        verdict = VERDICT_NOT_IWIP
        for w in reductions:
            witnesses.append({"type": "reduction", **w})
    if periodic_primitive:
        verdict = VERDICT_NOT_IWIP
        core_word = canonical_rotation(periodic[0])
        witnesses.append(
            {
                "type": "periodic-free-factor",
                "word": str(periodic[0]),
                "free_factor_generator": str(core_word),
                "period": periodic[1],
                "image": str(rep.automorphism.power(periodic[1]).apply(periodic[0])),
            }
        )
        justifications.append("primitive-periodic-free-factor")
    if he is False:
        verdict = VERDICT_UNDETERMINED
        witnesses.append(
            {
                "type": "diagnostic",
                "reason": "input is not a homotopy equivalence; map-level"
                " evidence is reported but certifies nothing about an"
                " automorphism",
            }
        )
    elif verdict == VERDICT_NOT_IWIP:
        pass
    elif not tt:
        verdict = VERDICT_UNDETERMINED
        witnesses.append(
            {
                "type": "diagnostic",
                "reason": "not a train-track map; train-track construction is out of scope",
            }
        )
    elif obstructions:
        verdict = VERDICT_UNDETERMINED
        witnesses.append(
            {
                "type": "matrix-obstruction",
                "kinds": obstructions,
                "reason": "necessary growth conditions fail but no reduction was found",
            }
        )
    elif clean_report is not None and clean_report.clean:
        if options.atoroidal == ATOROIDAL_TRUE:
            verdict = VERDICT_IWIP_GIVEN_ATOROIDAL
            witnesses.append(
                {
                    "type": "clean-certificate",
                    "primitive_exponent": clean_report.primitive_exponent,
                    "whitehead_connected": True,
                    "atoroidality": "asserted by caller, not verified",
                }
            )
            justifications.append("clean-criterion-given-atoroidal")
        elif periodic is not None:
            verdict = VERDICT_NOT_ATOROIDAL_UNDETERMINED
            witnesses.append(
                {
                    "type": "periodic-conjugacy-class",
                    "word": str(periodic[0]),
                    "period": periodic[1],
                    "reason": "a periodic class refutes atoroidality; the"
                    " non-atoroidal decision branch is out of scope",
                }
            )
            justifications.append("atoroidality-refuted-by-periodic-class")
        elif options.atoroidal == ATOROIDAL_FALSE:
            verdict = VERDICT_NOT_ATOROIDAL_UNDETERMINED
            witnesses.append(
                {
                    "type": "atoroidality-assertion",
                    "value": False,
                    "reason": "caller asserts non-atoroidal; the non-atoroidal"
                    " decision branch is out of scope",
                }
            )
        else:
            verdict = VERDICT_UNDETERMINED
            witnesses.append(
                {
                    "type": "diagnostic",
                    "reason": "clean, but atoroidality is unknown and no periodic"
                    f" class was found with lmax={options.lmax}, pmax={options.pmax}",
                }
            )
    elif periodic is not None:
        verdict = VERDICT_NOT_ATOROIDAL_UNDETERMINED
        witnesses.append(
            {
                "type": "periodic-conjugacy-class",
                "word": str(periodic[0]),
                "period": periodic[1],
            }
        )

    if periodic is not None and not periodic_primitive:
        justifications.append("periodic-class-found")
    if searched and periodic is None:
        diagnostics.append(
            f"no periodic conjugacy class with length <= {options.lmax}, "
            f"period <= {options.pmax} (bounded search; absence refutes nothing)"
        )

    return Report(
        input_kind=input_kind,
        input_text=input_text,
        marking=rep.marking,
        options=options,
        homotopy_equivalence=he,
        min_degree=degree,
        train_track=tt,
        degenerate_turn_chain=chain,
        matrix=a.entries,
        edge_order=a.edge_names,
        irreducible=irreducible,
        expanding=expansion.expanding,
        expanding_per_edge=expansion.per_edge,
        primitive_exponent=exponent,
        whitehead=wh_entries,
        clean=None if clean_report is None else clean_report.clean,
        weakly_clean=None if clean_report is None else clean_report.weakly_clean,
        reduction_witnesses=reductions,
        periodic_conjugacy=None if periodic is None else (str(periodic[0]), periodic[1]),
        verdict=verdict,
        witnesses=witnesses,
        justifications=justifications,
        diagnostics=diagnostics,
    )


REPORT_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": [
        "schema", "input", "bounds_used", "train_track", "matrix", "edge_order",
        "irreducible", "expanding", "primitive_exponent", "whitehead",
        "clean", "weakly_clean", "verdict", "witnesses", "justifications",
    ],
    "properties": {
        "schema": {"const": "ttiwip-report/1"},
        "input": {
            "type": "object",
            "required": ["kind", "text", "marking"],
            "properties": {
                "kind": {"enum": ["automorphism", "graph-map"]},
                "text": {"type": "string"},
                "marking": {"enum": ["identity-rose", "claimed"]},
            },
        },
        "bounds_used": {
            "type": "object",
            "required": ["atoroidal", "lmax", "pmax", "carriage_lmax"],
        },
        "homotopy_equivalence": {"type": ["boolean", "null"]},
        "min_degree": {"type": "integer"},
        "train_track": {"type": "boolean"},
        "degenerate_turn_chain": {"type": ["array", "null"]},
        "matrix": {
            "type": "array",
            "items": {"type": "array", "items": {"type": "integer", "minimum": 0}},
        },
        "edge_order": {"type": "array", "items": {"type": "string"}},
        "irreducible": {"type": "boolean"},
        "expanding": {"type": "boolean"},
        "expanding_per_edge": {"type": "array", "items": {"type": "boolean"}},
        "primitive_exponent": {"type": ["integer", "null"], "minimum": 1},
        "whitehead": {
            "type": ["array", "null"],
            "items": {
                "type": "object",
                "required": ["vertex", "nodes", "adjacency", "connected"],
            },
        },
        "clean": {"type": ["boolean", "null"]},
        "weakly_clean": {"type": ["boolean", "null"]},
        "reduction_witnesses": {"type": "array"},
        "periodic_conjugacy": {"type": ["object", "null"]},
        "verdict": {
            "enum": [
                VERDICT_IWIP_GIVEN_ATOROIDAL,
                VERDICT_NOT_IWIP,
                VERDICT_NOT_ATOROIDAL_UNDETERMINED,
                VERDICT_UNDETERMINED,
            ]
        },
        "witnesses": {"type": "array", "items": {"type": "object", "required": ["type"]}},
        "justifications": {"type": "array", "items": {"type": "string"}},
        "diagnostics": {"type": "array", "items": {"type": "string"}},
    },
}
