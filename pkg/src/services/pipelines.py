"""Certificate pipelines: named computations from plain inputs to Certificates."""

import logging
from fractions import Fraction
from typing import Callable, Optional

from src import __version__
from src.config import EngineConfig, get_engine_config
from src.errors import InvalidInputError
from src.models.certificate import (
    Certificate,
    Verdict,
    canonical_json,
    exact_payload,
    parse_fraction,
)
from src.models.circle_map import PLCircleMap
from src.models.circular_order import OrderAutomorphism, RawOrderTable
from src.models.knot import EvenContinuedFraction, Orientation
from src.models.tree import CyclicOrderTree

logger = logging.getLogger(__name__)

Pipeline = Callable[[dict, EngineConfig], Certificate]
PIPELINES: dict[str, Pipeline] = {}


def pipeline(name: str) -> Callable[[Pipeline], Pipeline]:
    def register(fn: Pipeline) -> Pipeline:
        PIPELINES[name] = fn
        return fn

    return register


def _certificate(name: str, inputs: dict, verdict: Verdict, evidence: dict, provenance: list[str]) -> Certificate:
    return Certificate(
        pipeline=name,
        verdict=verdict,
        inputs=inputs,
        evidence=exact_payload(evidence),
        provenance=provenance,
        tool_version=__version__,
    )


def _require(inputs: dict, *keys: str) -> None:
    missing = [k for k in keys if k not in inputs]
    if missing:
        raise InvalidInputError(f"Missing inputs: {', '.join(missing)}")


def _order_from_inputs(inputs: dict):
    from src.services.circord import from_cyclic_listing, order_from_table

    if "listing" in inputs:
        return from_cyclic_listing(inputs["listing"])
    _require(inputs, "elements", "triples")
    try:
        table = RawOrderTable.from_dict(inputs)
    except (TypeError, ValueError) as e:
        raise InvalidInputError(f"Malformed order table: {e}") from e
    return order_from_table(table)


def _tree(inputs: dict) -> CyclicOrderTree:
    _require(inputs, "tree")
    try:
        return CyclicOrderTree.from_dict(inputs["tree"])
    except (KeyError, TypeError, ValueError) as e:
        raise InvalidInputError(f"Malformed tree: {e}") from e


def _cf(inputs: dict) -> EvenContinuedFraction:
    _require(inputs, "cf")
    cf = inputs["cf"]
    orientation = Orientation(inputs.get("orientation", "canonical"))
    if isinstance(cf, str):
        return EvenContinuedFraction.parse(cf, orientation.value)
    return EvenContinuedFraction(tuple(int(c) for c in cf), orientation)


@pipeline("order.validate")
def order_validate(inputs: dict, config: EngineConfig) -> Certificate:
    from src.services.circord import check_circular_order, check_table, from_cyclic_listing

    if "listing" in inputs:
        check = check_circular_order(from_cyclic_listing(inputs["listing"]))
    else:
        _require(inputs, "elements", "triples")
        try:
            table = RawOrderTable.from_dict(inputs)
        except (TypeError, ValueError) as e:
            raise InvalidInputError(f"Malformed order table: {e}") from e
        check = check_table(table)
    verdict = Verdict.CERTIFIED if check.valid else Verdict.REFUTED
    return _certificate("order.validate", inputs, verdict, check.to_dict(), ["circord.check_table"])


@pipeline("order.aut")
def order_aut(inputs: dict, config: EngineConfig) -> Certificate:
    from src.services.circord import (
        automorphism_group,
        circular_order_on_aut,
        check_circular_order,
        is_left_invariant,
    )

    order = _order_from_inputs(inputs)
    basepoint = inputs.get("basepoint", order.elements[0])
    group = automorphism_group(order, bound=config.max_order_size, marking=inputs.get("marking"))
    result = circular_order_on_aut(order, basepoint, group)
    valid = check_circular_order(result.order).valid if result.order.size >= 3 else True
    invariant = is_left_invariant(result)
    evidence = result.to_dict()
    evidence.update({"valid": valid, "left_invariant": invariant})
    evidence.pop("order", None)
    verdict = Verdict.CERTIFIED if valid and invariant else Verdict.REFUTED
    return _certificate(
        "order.aut", inputs, verdict, evidence, ["circord.automorphism_group", "circord.circular_order_on_aut"]
    )


@pipeline("tree.ends")
def tree_ends(inputs: dict, config: EngineConfig) -> Certificate:
    from src.services.circord import check_circular_order
    from src.services.ordtree import end_circular_order

    order = end_circular_order(_tree(inputs))
    check = check_circular_order(order)
    evidence = {"leaves": list(order.elements), "listing": list(order.to_listing()), "check": check.to_dict()}
    verdict = Verdict.CERTIFIED if check.valid else Verdict.REFUTED
    return _certificate("tree.ends", inputs, verdict, evidence, ["ordtree.end_circular_order"])


@pipeline("tree.spine")
def tree_spine(inputs: dict, config: EngineConfig) -> Certificate:
    from src.services.ordtree import geodesic_spine

    _require(inputs, "x", "y")
    spine = geodesic_spine(_tree(inputs), str(inputs["x"]), str(inputs["y"]))
    verdict = Verdict.CERTIFIED if spine.is_connected() else Verdict.REFUTED
    return _certificate("tree.spine", inputs, verdict, spine.to_dict(), ["ordtree.geodesic_spine"])


@pipeline("tree.y")
def tree_y(inputs: dict, config: EngineConfig) -> Certificate:
    from src.services.ordtree import branch_locus

    _require(inputs, "x", "y", "z")
    locus = branch_locus(_tree(inputs), str(inputs["x"]), str(inputs["y"]), str(inputs["z"]))
    return _certificate("tree.y", inputs, Verdict.CERTIFIED, locus.to_dict(), ["ordtree.branch_locus"])


@pipeline("recalibrate")
def recalibrate(inputs: dict, config: EngineConfig) -> Certificate:
    from src.services.circord import from_cyclic_listing
    from src.services.dynamics import dynamic_realization, rotation_number_mod1
    from src.services.recal import calibrate, recalibrate_star, recalibrate_tree, star_rotation_number

    _require(inputs, "n", "delta", "a")
    n, delta, a = int(inputs["n"]), int(inputs["delta"]), int(inputs["a"])
    cal = calibrate(n, delta, a)
    natural, recalibrated = star_rotation_number(cal)
    listing = recalibrate_star(cal.d, cal.b)
    evidence = {
        "a_adjusted": cal.a,
        "b": cal.b,
        "d": cal.d,
        "listing": list(listing),
        "natural": natural,
        "recalibrated": recalibrated,
    }

    if cal.d >= 3:
        order = from_cyclic_listing(listing)
        shift = OrderAutomorphism(
            order.elements, tuple((e - 1 + delta) % cal.d + 1 for e in order.elements)
        )
        realized = rotation_number_mod1(dynamic_realization(order, shift), config=config)
        evidence["realized_rotation"] = realized.to_dict()
        realized_ok = realized.exact == recalibrated
    else:
        realized_ok = True

    if "tree" in inputs:
        result = recalibrate_tree(_tree(inputs), inputs.get("vertices", []), cal)
        evidence["tree"] = result.tree.to_dict()

    expected = Fraction(cal.a, n) % 1
    verdict = Verdict.CERTIFIED if recalibrated == expected and realized_ok else Verdict.REFUTED
    return _certificate(
        "recalibrate",
        inputs,
        verdict,
        evidence,
        ["recal.calibrate", "recal.star_rotation_number", "dynamics.dynamic_realization"],
    )


@pipeline("rotnum")
def rotnum(inputs: dict, config: EngineConfig) -> Certificate:
    from src.services.dynamics import has_fixed_point, shift, translation_number

    if "shift" in inputs:
        f = shift(parse_fraction(inputs["shift"]))
    else:
        _require(inputs, "map")
        try:
            f = PLCircleMap.from_dict(inputs["map"])
        except (KeyError, TypeError, ValueError, ZeroDivisionError) as e:
            raise InvalidInputError(f"Malformed circle map: {e}") from e
    budget = int(inputs["budget"]) if "budget" in inputs else None
    tau = translation_number(f, budget=budget, config=config)
    rotation = Fraction(tau.lower) % 1 if tau.is_exact else None
    evidence = {"translation": tau.to_dict(), "rotation": rotation, "fixed_point": has_fixed_point(f)}
    certified = tau.is_exact or tau.certified_width
    verdict = Verdict.CERTIFIED if certified else Verdict.INCONCLUSIVE
    return _certificate("rotnum", inputs, verdict, evidence, ["dynamics.translation_number"])


def _complex(inputs: dict):
    from src.services.homology import complex_from_dict

    _require(inputs, "presentation")
    return complex_from_dict(inputs["presentation"])


@pipeline("homology.snf")
def homology_snf(inputs: dict, config: EngineConfig) -> Certificate:
    from src.services.homology import diagonal, smith_normal_form

    _require(inputs, "matrix")
    D, U, V = smith_normal_form(inputs["matrix"])
    evidence = {"diagonal": diagonal(D) if D and D[0] else [], "D": D, "U": U, "V": V}
    return _certificate("homology.snf", inputs, Verdict.CERTIFIED, evidence, ["homology.smith_normal_form"])


@pipeline("homology.h2")
def homology_h2(inputs: dict, config: EngineConfig) -> Certificate:
    from src.services.homology import second_cohomology

    result = second_cohomology(_complex(inputs))
    return _certificate("homology.h2", inputs, Verdict.CERTIFIED, result.to_dict(), ["homology.second_cohomology"])


@pipeline("homology.lift")
def homology_lift(inputs: dict, config: EngineConfig) -> Certificate:
    from src.services.homology import attach_orbifold_cells, lifting_certificate, orientation_sweep

    if inputs.get("sweep"):
        _require(inputs, "n")
        results = orientation_sweep(_complex(inputs), int(inputs["n"]))
        verdicts = [d.verdict for d in results]
        if all(v == Verdict.CERTIFIED for v in verdicts):
            verdict = Verdict.CERTIFIED
        elif Verdict.REFUTED in verdicts:
            verdict = Verdict.REFUTED
        else:
            verdict = next(v for v in verdicts if v != Verdict.CERTIFIED)
        evidence = {
            "orientations": [
                {"a": d.a, "verdict": d.verdict.value, "failure": d.failure} for d in results
            ]
        }
        return _certificate("homology.lift", inputs, verdict, evidence, ["homology.orientation_sweep"])

    _require(inputs, "n", "a")
    cx = _complex(inputs)
    n = int(inputs["n"])
    a = {str(k): int(v) for k, v in inputs["a"].items()}
    if inputs.get("attach", True):
        cx = attach_orbifold_cells(cx, n, a)
    data = lifting_certificate(cx, n, a, inputs.get("psi"))
    evidence = data.to_dict()
    evidence["boundary2"] = cx.boundary2()
    return _certificate("homology.lift", inputs, data.verdict, evidence, ["homology.lifting_certificate"])


@pipeline("homology.detect")
def homology_detect(inputs: dict, config: EngineConfig) -> Certificate:
    from src.services.homology import meridian_detection, order_detection_certificate

    if "c" in inputs:
        _require(inputs, "n")
        result = meridian_detection(int(inputs["c"]), int(inputs["n"]))
    else:
        _require(inputs, "rot_mu", "rot_alpha")
        n = int(inputs["n"]) if "n" in inputs else None
        result = order_detection_certificate(
            parse_fraction(inputs["rot_mu"]), parse_fraction(inputs["rot_alpha"]), n
        )
    return _certificate("homology.detect", inputs, result.verdict, result.to_dict(), ["homology.order_detection"])


def _seifert(inputs: dict):
    from src.services.twobridge import fk_block, fprime_block, seifert_matrix

    block = inputs.get("block")
    if block:
        kind, _, size = str(block).partition(":")
        if kind == "F":
            return fk_block(int(size))
        if kind == "F'":
            return fprime_block(int(size))
        raise InvalidInputError(f"Unknown block {block!r}; use F:k or F':l")
    return seifert_matrix(_cf(inputs)).matrix


@pipeline("twobridge.rational")
def twobridge_rational(inputs: dict, config: EngineConfig) -> Certificate:
    from src.services.twobridge import cf_matrix_product, cf_to_rational, component_count

    cf = _cf(inputs)
    value = cf_to_rational(cf)
    evidence = {"value": value, "components": component_count(cf)}
    verdict = Verdict.CERTIFIED if value == cf_matrix_product(cf) else Verdict.REFUTED
    return _certificate("twobridge.rational", inputs, verdict, evidence, ["twobridge.cf_to_rational"])


@pipeline("twobridge.alex")
def twobridge_alex(inputs: dict, config: EngineConfig) -> Certificate:
    from src.services.twobridge import alexander_polynomial, intersection_corank

    S = _seifert(inputs)
    delta = alexander_polynomial(S)
    evidence = {
        "seifert": S,
        "alexander": delta.to_dict(),
        "symmetric": delta.is_symmetric(),
        "corank": intersection_corank(S) if S else 0,
    }
    verdict = Verdict.CERTIFIED if delta.is_zero or delta.is_symmetric() else Verdict.REFUTED
    return _certificate("twobridge.alex", inputs, verdict, evidence, ["twobridge.alexander_polynomial"])


@pipeline("twobridge.lt-definite")
def twobridge_lt_definite(inputs: dict, config: EngineConfig) -> Certificate:
    from src.services.twobridge import definite_on_arc

    _require(inputs, "n")
    result = definite_on_arc(_seifert(inputs), int(inputs["n"]))
    if result.definite:
        verdict = Verdict.CERTIFIED
    elif result.witness.get("boundary"):
        verdict = Verdict.INCONCLUSIVE
    else:
        verdict = Verdict.REFUTED
    return _certificate("twobridge.lt-definite", inputs, verdict, result.to_dict(), ["twobridge.definite_on_arc"])


@pipeline("twobridge.rho-theta")
def twobridge_rho_theta(inputs: dict, config: EngineConfig) -> Certificate:
    from src.services.twobridge import rho_theta

    if "n" in inputs:
        record = rho_theta(pi_multiple=Fraction(1, int(inputs["n"])))
    elif "pi_multiple" in inputs:
        record = rho_theta(pi_multiple=parse_fraction(inputs["pi_multiple"]))
    else:
        _require(inputs, "theta")
        record = rho_theta(theta=float(inputs["theta"]))
    tight = record.relation_residual <= config.matrix_tolerance and record.symmetry_residual <= config.matrix_tolerance
    verdict = Verdict.CERTIFIED if record.conjugate_to_real and tight else Verdict.REFUTED
    return _certificate("twobridge.rho-theta", inputs, verdict, record.to_dict(), ["twobridge.rho_theta"])


@pipeline("twobridge.bound")
def twobridge_bound(inputs: dict, config: EngineConfig) -> Certificate:
    from src.services.twobridge import lspace_obstruction_bound

    bound = lspace_obstruction_bound(_cf(inputs))
    return _certificate("twobridge.bound", inputs, Verdict.CERTIFIED, bound.to_dict(), ["twobridge.lspace_obstruction_bound"])


@pipeline("twobridge.report")
def twobridge_report(inputs: dict, config: EngineConfig) -> Certificate:
    from src.services.twobridge import branched_cover_report

    n_values = inputs.get("n_values", list(range(7, 13)))
    report = branched_cover_report(_cf(inputs), [int(n) for n in n_values])
    return _certificate("twobridge.report", inputs, report.verdict, report.to_dict(), ["twobridge.branched_cover_report"])


@pipeline("braid.stats")
def braid_stats(inputs: dict, config: EngineConfig) -> Certificate:
    from src.services.braids import (
        closure_components,
        cycle_notation,
        exponent_sum,
        parse_braid,
        permutation,
        two_bridge_braid,
    )

    if "family" in inputs:
        try:
            k, l, m = (int(v) for v in inputs["family"])
        except (TypeError, ValueError) as e:
            raise InvalidInputError(f"family must be three integers k, l, m: {e}") from e
        word = two_bridge_braid(k, l, m)
    else:
        _require(inputs, "word")
        word = parse_braid(str(inputs["word"]), inputs.get("strands"))
    evidence = {
        "strands": word.strands,
        "exponent_sum": exponent_sum(word),
        "permutation": cycle_notation(permutation(word)),
        "components": closure_components(word),
    }
    return _certificate("braid.stats", inputs, Verdict.CERTIFIED, evidence, ["braids.permutation"])


@pipeline("braid.fdtc-shift")
def braid_fdtc_shift(inputs: dict, config: EngineConfig) -> Certificate:
    from src.models.braid import FdtcProvenance, FdtcRecord
    from src.services.braids import fdtc_shift

    _require(inputs, "c", "k")
    provenance = FdtcProvenance(inputs.get("provenance", "user-asserted"))
    base = FdtcRecord(parse_fraction(inputs["c"]), provenance, label=str(inputs.get("label", "b")))
    shifted = fdtc_shift(base, int(inputs["k"]))
    round_trip = fdtc_shift(shifted, -int(inputs["k"])) == base
    evidence = {"record": shifted.to_dict(), "round_trip": round_trip}
    verdict = Verdict.CERTIFIED if round_trip else Verdict.REFUTED
    return _certificate("braid.fdtc-shift", inputs, verdict, evidence, ["braids.fdtc_shift"])


@pipeline("braid.hyp-check")
def braid_hyp_check(inputs: dict, config: EngineConfig) -> Certificate:
    from src.services.braids import hypothesis_check

    _require(inputs, "c")
    report = hypothesis_check(
        parse_fraction(inputs["c"]),
        k=int(inputs["k"]) if "k" in inputs else None,
        boundary_fdtcs=[parse_fraction(v) for v in inputs["boundary"]] if "boundary" in inputs else None,
        quasipositive=inputs.get("quasipositive"),
        degeneracy=[tuple(pair) for pair in inputs["degeneracy"]] if "degeneracy" in inputs else None,
    )
    verdict = Verdict.CERTIFIED if report.all_passed else Verdict.REFUTED
    return _certificate("braid.hyp-check", inputs, verdict, report.to_dict(), ["braids.hypothesis_check"])


@pipeline("braid.qp-verify")
def braid_qp_verify(inputs: dict, config: EngineConfig) -> Certificate:
    from src.models.braid import QuasipositiveDecomposition
    from src.services.braids import bpqr, bpqr_decomposition, is_quasipositive_form, parse_braid

    if "bands" in inputs:
        _require(inputs, "word")
        target = parse_braid(str(inputs["word"]), inputs.get("strands"))
        bands = [
            (parse_braid(str(band.get("conjugator", "")), target.strands), int(band["generator"]))
            for band in inputs["bands"]
        ]
        decomposition = QuasipositiveDecomposition(strands=target.strands, bands=bands)
    else:
        _require(inputs, "p", "q", "r")
        p, q, r = int(inputs["p"]), int(inputs["q"]), int(inputs["r"])
        target, _ = bpqr(p, q, r)
        decomposition = bpqr_decomposition(p, q, r)
    ok = is_quasipositive_form(decomposition, target)
    evidence = {"target": target.to_dict(), "decomposition": decomposition.to_dict(), "matches": ok}
    verdict = Verdict.CERTIFIED if ok else Verdict.REFUTED
    return _certificate("braid.qp-verify", inputs, verdict, evidence, ["braids.is_quasipositive_form"])


def run_pipeline(name: str, inputs: dict, config: Optional[EngineConfig] = None) -> Certificate:
    """
    Run a named pipeline.

    Raises:
        InvalidInputError: If the pipeline is unknown or inputs are malformed.
    """
    if name not in PIPELINES:
        raise InvalidInputError(f"Unknown pipeline {name!r}; known: {', '.join(sorted(PIPELINES))}")
    if not isinstance(inputs, dict):
        raise InvalidInputError(f"{name}: inputs must be a mapping, got {type(inputs).__name__}")
    config = config or get_engine_config()
    logger.info(f"Running pipeline {name}")
    try:
        return PIPELINES[name](inputs, config)
    except (KeyError, TypeError, ValueError, ZeroDivisionError) as e:
        raise InvalidInputError(f"{name}: bad input ({type(e).__name__}: {e})") from e


def replay(cert: Certificate, config: Optional[EngineConfig] = None) -> dict:
    """Re-run a certificate's pipeline on its recorded inputs and compare."""
    fresh = run_pipeline(cert.pipeline, cert.inputs, config)
    evidence_matches = canonical_json(fresh.evidence) == canonical_json(cert.evidence)
    return {
        "pipeline": cert.pipeline,
        "input_digest": cert.input_digest,
        "recorded_verdict": cert.verdict.value,
        "replayed_verdict": fresh.verdict.value,
        "verdict_matches": fresh.verdict == cert.verdict,
        "evidence_matches": evidence_matches,
        "recorded_version": cert.tool_version,
        "replayed_version": fresh.tool_version,
    }
