"""Command-line interface for OrderForge."""

import json
import logging
import sys
from dataclasses import replace
from pathlib import Path
from typing import Any, Optional

import click
import yaml

from src import __version__
from src.config import EngineConfig, get_engine_config
from src.errors import InvalidInputError, OrderForgeError, SizeLimitError, UnsupportedInputError
from src.models.certificate import INVALID_INPUT_EXIT, Certificate, exact_payload


def setup_logging(verbose: bool = False):
    """Configure logging."""
    level = logging.DEBUG if verbose else logging.WARNING
    logging.basicConfig(
        level=level,
        format="%(message)s",
        handlers=[logging.StreamHandler()],
    )


def _fail(message: str, code: int = INVALID_INPUT_EXIT):
    click.echo(f"Error: {message}", err=True)
    sys.exit(code)


def _load_file(path: str) -> Any:
    """Read a JSON or YAML file, reporting syntax errors as file:line:col."""
    try:
        with open(path) as f:
            return yaml.safe_load(f)
    except yaml.YAMLError as e:
        mark = getattr(e, "problem_mark", None)
        problem = getattr(e, "problem", None) or str(e)
        if mark is not None:
            raise InvalidInputError(f"{path}:{mark.line + 1}:{mark.column + 1}: {problem}") from e
        raise InvalidInputError(f"{path}: {problem}") from e
    except OSError as e:
        raise InvalidInputError(f"{path}: {e.strerror}") from e


def _load_mapping(path: str) -> dict:
    data = _load_file(path)
    if not isinstance(data, dict):
        raise InvalidInputError(f"{path}:1:1: expected a mapping at top level")
    return data


def _position(path: str, location: tuple) -> Optional[yaml.Mark]:
    """Start mark of the node at `location` in a YAML file, or of the deepest key found."""
    try:
        with open(path) as f:
            node = yaml.compose(f)
    except (OSError, yaml.YAMLError):
        return None
    if node is None:
        return None
    mark = node.start_mark
    for key in location:
        if isinstance(node, yaml.MappingNode):
            match = next(((k, v) for k, v in node.value if k.value == str(key)), None)
            if match is None:
                break
            mark, node = match[0].start_mark, match[1]
        elif isinstance(node, yaml.SequenceNode) and isinstance(key, int) and key < len(node.value):
            node = node.value[key]
            mark = node.start_mark
        else:
            break
    return mark


def _where(source: Optional[str], error: OrderForgeError) -> str:
    if not source:
        return ""
    location = getattr(error, "location", ())
    mark = _position(source, location) if location else None
    if mark is None:
        return f"{source}: "
    return f"{source}:{mark.line + 1}:{mark.column + 1}: "


def _config(ctx: click.Context, **overrides) -> EngineConfig:
    config = ctx.obj["config"]
    chosen = {k: v for k, v in overrides.items() if v is not None}
    return replace(config, **chosen) if chosen else config


def _run(ctx: click.Context, name: str, inputs, source: Optional[str] = None, **overrides):
    """Run a pipeline, print its certificate and exit with the verdict's code."""
    from src.services.pipelines import run_pipeline

    try:
        cert = run_pipeline(name, inputs, _config(ctx, **overrides))
    except (SizeLimitError, UnsupportedInputError) as e:
        _fail(f"{_where(source, e)}{e}", code=2)
    except OrderForgeError as e:
        _fail(f"{_where(source, e)}{e}")
    _emit(ctx, cert)
    sys.exit(cert.exit_code)


def _load_or_fail(loader, *args):
    try:
        return loader(*args)
    except OrderForgeError as e:
        _fail(str(e))


def _flatten(payload: Any, prefix: str = "") -> list[tuple[str, str]]:
    if isinstance(payload, dict):
        rows = []
        for key in sorted(payload):
            rows.extend(_flatten(payload[key], f"{prefix}.{key}" if prefix else str(key)))
        return rows
    if isinstance(payload, list) and any(isinstance(v, (dict, list)) for v in payload):
        rows = []
        for i, v in enumerate(payload):
            rows.extend(_flatten(v, f"{prefix}.{i}"))
        return rows
    return [(prefix, json.dumps(payload) if not isinstance(payload, str) else payload)]


def _emit(ctx: click.Context, cert: Certificate):
    mode = ctx.obj["output"]
    if mode == "json":
        click.echo(cert.to_json())
    elif mode == "tsv":
        click.echo(f"pipeline\t{cert.pipeline}")
        click.echo(f"verdict\t{cert.verdict.value}")
        click.echo(f"input_digest\t{cert.input_digest}")
        for key, value in _flatten(cert.to_dict()["evidence"]):
            click.echo(f"evidence.{key}\t{value}")
    else:
        _print_certificate(cert)


def _print_certificate(cert: Certificate):
    """Print a certificate in human-readable format."""
    click.echo(f"Pipeline: {cert.pipeline}")
    click.echo(f"Verdict:  {cert.verdict.value}")
    click.echo(f"Digest:   {cert.input_digest}")
    click.echo()
    for key, value in sorted(exact_payload(cert.evidence).items()):
        if isinstance(value, (dict, list)):
            value = json.dumps(value)
            if len(value) > 100:
                value = value[:97] + "..."
        click.echo(f"  {key}: {value}")


def _int_list(text: Optional[str]) -> Optional[list[int]]:
    if text is None:
        return None
    try:
        return [int(part) for part in text.strip().strip("[]").split(",") if part.strip()]
    except ValueError:
        _fail(f"expected comma-separated integers, got {text!r}")


def _assignments(text: str) -> dict[str, int]:
    """Parse `x=1,y=-1`."""
    result = {}
    for part in text.split(","):
        name, sep, value = part.partition("=")
        if not sep:
            _fail(f"expected name=value pairs, got {part!r}")
        try:
            result[name.strip()] = int(value)
        except ValueError:
            _fail(f"{name.strip()}: expected an integer, got {value!r}")
    return result


@click.group()
@click.version_option(version=__version__)
@click.option("--verbose", is_flag=True, help="Log progress to stderr")
@click.option("--json", "output", flag_value="json", help="Print certificates as JSON")
@click.option("--tsv", "output", flag_value="tsv", help="Print certificates as tab-separated rows")
@click.pass_context
def cli(ctx: click.Context, verbose: bool, output: Optional[str]):
    """OrderForge - certificates for circular orders, trees and two-bridge links."""
    setup_logging(verbose)
    ctx.ensure_object(dict)
    ctx.obj["output"] = output or "text"
    ctx.obj["config"] = get_engine_config()


@cli.group()
def order():
    """Circular orders on finite sets."""
    pass


@order.command("validate")
@click.argument("path", type=click.Path())
@click.pass_context
def order_validate(ctx: click.Context, path: str):
    """Check a table or cyclic listing against the circular-order axioms."""
    _run(ctx, "order.validate", _load_or_fail(_load_mapping, path), source=path)


@order.command("aut")
@click.argument("path", type=click.Path())
@click.option("--basepoint", default=None, help="Basepoint e (default: first element)")
@click.option("--bound", type=int, default=None, help="Largest |E| for the automorphism search")
@click.pass_context
def order_aut(ctx: click.Context, path: str, basepoint: Optional[str], bound: Optional[int]):
    """Circularly order the automorphism group of a circular order."""
    inputs = _load_or_fail(_load_mapping, path)
    if basepoint is not None:
        elements = inputs.get("listing") or inputs.get("elements") or []
        matches = [e for e in elements if str(e) == basepoint]
        inputs["basepoint"] = matches[0] if matches else basepoint
    _run(ctx, "order.aut", inputs, source=path, max_order_size=bound)


@cli.group()
def tree():
    """Cyclically ordered order trees."""
    pass


@tree.command("ends")
@click.argument("path", type=click.Path())
@click.pass_context
def tree_ends(ctx: click.Context, path: str):
    """Circular order on the leaves of a tree."""
    _run(ctx, "tree.ends", {"tree": _load_or_fail(_load_mapping, path)}, source=path)


@tree.command("spine")
@click.argument("path", type=click.Path())
@click.argument("x")
@click.argument("y")
@click.pass_context
def tree_spine(ctx: click.Context, path: str, x: str, y: str):
    """Geodesic spine from X to Y."""
    inputs = {"tree": _load_or_fail(_load_mapping, path), "x": x, "y": y}
    _run(ctx, "tree.spine", inputs, source=path)


@tree.command("y")
@click.argument("path", type=click.Path())
@click.argument("x")
@click.argument("y")
@click.argument("z")
@click.pass_context
def tree_y(ctx: click.Context, path: str, x: str, y: str, z: str):
    """Branch locus of the spines from Y to X and Y to Z."""
    inputs = {"tree": _load_or_fail(_load_mapping, path), "x": x, "y": y, "z": z}
    _run(ctx, "tree.y", inputs, source=path)


@cli.command()
@click.option("--n", "n", type=int, required=True, help="Target denominator n")
@click.option("--delta", type=int, required=True, help="Valency factor, d = n * delta")
@click.option("--a", "a", type=int, required=True, help="Target numerator, coprime to n")
@click.option("--tree", "tree_path", type=click.Path(), default=None, help="Tree to recalibrate")
@click.option("--vertex", "vertices", multiple=True, help="Vertex to recalibrate (repeatable)")
@click.pass_context
def recalibrate(ctx: click.Context, n: int, delta: int, a: int, tree_path: Optional[str], vertices: tuple):
    """Recalibrate a valency n*delta star (and optionally tree vertices) to rotation a/n."""
    inputs: dict = {"n": n, "delta": delta, "a": a}
    if tree_path:
        inputs["tree"] = _load_or_fail(_load_mapping, tree_path)
        inputs["vertices"] = list(vertices)
    _run(ctx, "recalibrate", inputs, source=tree_path)


@cli.command()
@click.argument("path", type=click.Path(), required=False)
@click.option("--shift", default=None, help="Use the rigid rotation x -> x + r instead of a file")
@click.option("--budget", type=int, default=None, help="Iteration budget (overrides ORDERFORGE_ITER_BUDGET)")
@click.pass_context
def rotnum(ctx: click.Context, path: Optional[str], shift: Optional[str], budget: Optional[int]):
    """Translation and rotation number of a PL circle map."""
    if shift is not None:
        inputs: dict = {"shift": shift}
    elif path:
        inputs = {"map": _load_or_fail(_load_mapping, path)}
    else:
        _fail("give a map file or --shift")
    _run(ctx, "rotnum", inputs, source=path, iter_budget=budget)


@cli.group()
def homology():
    """Presentation complexes, H^2 and Euler-class lifts."""
    pass


@homology.command("snf")
@click.argument("path", type=click.Path())
@click.pass_context
def homology_snf(ctx: click.Context, path: str):
    """Smith normal form of an integer matrix."""
    data = _load_or_fail(_load_file, path)
    matrix = data.get("matrix") if isinstance(data, dict) else data
    _run(ctx, "homology.snf", {"matrix": matrix}, source=path)


@homology.command("h2")
@click.argument("path", type=click.Path())
@click.pass_context
def homology_h2(ctx: click.Context, path: str):
    """Second cohomology of a presentation complex."""
    _run(ctx, "homology.h2", {"presentation": _load_or_fail(_load_mapping, path)}, source=path)


@homology.command("lift")
@click.argument("path", type=click.Path())
@click.option("--n", "n", type=int, required=True, help="Cover order")
@click.option("--a", "a", default=None, help="Numerators per meridian, e.g. x=1,y=1")
@click.option("--psi", default=None, help="psi on other generators, e.g. z=2")
@click.option("--no-attach", is_flag=True, help="Use the orbifold cells in the file as given")
@click.option("--sweep", is_flag=True, help="Try a_i = +1 or -1 on every meridian instead of --a")
@click.pass_context
def homology_lift(
    ctx: click.Context, path: str, n: int, a: Optional[str], psi: Optional[str], no_attach: bool, sweep: bool
):
    """Integer lift of n times the Milnor cocycle."""
    presentation = _load_or_fail(_load_mapping, path)
    if sweep:
        _run(ctx, "homology.lift", {"presentation": presentation, "n": n, "sweep": True}, source=path)
    if a is None:
        _fail("give --a or --sweep")
    inputs = {"presentation": presentation, "n": n, "a": _assignments(a), "attach": not no_attach}
    if psi:
        inputs["psi"] = _assignments(psi)
    _run(ctx, "homology.lift", inputs, source=path)


@homology.command("detect")
@click.option("--rot-mu", default=None, help="Rotation number of the meridian")
@click.option("--rot-alpha", default=None, help="Rotation number of the slope")
@click.option("--c", "c", type=int, default=None, help="Degeneracy locus c*mu (meridian pipeline)")
@click.option("--n", "n", type=int, default=None, help="Cover order")
@click.pass_context
def homology_detect(
    ctx: click.Context, rot_mu: Optional[str], rot_alpha: Optional[str], c: Optional[int], n: Optional[int]
):
    """Order detection from peripheral rotation numbers."""
    inputs: dict = {}
    if c is not None:
        inputs["c"] = c
    else:
        if rot_mu is None or rot_alpha is None:
            _fail("give --rot-mu and --rot-alpha, or --c and --n")
        inputs.update({"rot_mu": rot_mu, "rot_alpha": rot_alpha})
    if n is not None:
        inputs["n"] = n
    _run(ctx, "homology.detect", inputs)


@cli.group()
def twobridge():
    """Two-bridge links L(2a_1, ..., 2a_r)."""
    pass


def _cf_inputs(cf: Optional[str], orientation: str, block: Optional[str] = None) -> dict:
    if block:
        return {"block": block}
    if not cf:
        _fail("give --cf (or --block)")
    return {"cf": _int_list(cf), "orientation": orientation}


_orientation = click.option(
    "--orientation",
    type=click.Choice(["canonical", "reversed"]),
    default="canonical",
    help="Orientation of the second component",
)


@twobridge.command("rational")
@click.option("--cf", required=True, help="Even continued fraction, e.g. 2,2,2")
@click.pass_context
def twobridge_rational(ctx: click.Context, cf: str):
    """Value of the continued fraction."""
    _run(ctx, "twobridge.rational", _cf_inputs(cf, "canonical"))


@twobridge.command("alex")
@click.option("--cf", default=None, help="Even continued fraction, e.g. 2,2")
@_orientation
@click.option("--block", default=None, help="Use a block instead: F:k or F':l")
@click.pass_context
def twobridge_alex(ctx: click.Context, cf: Optional[str], orientation: str, block: Optional[str]):
    """Seifert matrix and Alexander polynomial."""
    _run(ctx, "twobridge.alex", _cf_inputs(cf, orientation, block))


@twobridge.command("lt-definite")
@click.option("--cf", default=None, help="Even continued fraction")
@_orientation
@click.option("--block", default=None, help="Use a block instead: F:k or F':l")
@click.option("--n", "n", type=int, required=True, help="Arc bounded by exp(+-2 pi i / n)")
@click.pass_context
def twobridge_lt_definite(ctx: click.Context, cf: Optional[str], orientation: str, block: Optional[str], n: int):
    """Definiteness of the Levine-Tristram form on the arc through -1."""
    inputs = _cf_inputs(cf, orientation, block)
    inputs["n"] = n
    _run(ctx, "twobridge.lt-definite", inputs)


@twobridge.command("rho-theta")
@click.option("--n", "n", type=int, default=None, help="theta = pi / n")
@click.option("--pi-multiple", default=None, help="theta = r * pi for a rational r")
@click.option("--theta", type=float, default=None, help="theta in radians (numeric verdict)")
@click.pass_context
def twobridge_rho_theta(ctx: click.Context, n: Optional[int], pi_multiple: Optional[str], theta: Optional[float]):
    """Representation family of the L(2,2,2) link group at one angle."""
    if n is not None:
        inputs: dict = {"n": n}
    elif pi_multiple is not None:
        inputs = {"pi_multiple": pi_multiple}
    elif theta is not None:
        inputs = {"theta": theta}
    else:
        _fail("give --n, --pi-multiple or --theta")
    _run(ctx, "twobridge.rho-theta", inputs)


@twobridge.command("bound")
@click.option("--cf", required=True, help="L(2k_1, 2l_1, ..., 2k_(r+1))")
@click.pass_context
def twobridge_bound(ctx: click.Context, cf: str):
    """Smallest n from which the reversed-orientation covers are not L-spaces."""
    _run(ctx, "twobridge.bound", _cf_inputs(cf, "reversed"))


@twobridge.command("report")
@click.option("--cf", required=True, help="Even continued fraction, e.g. 2,2,2")
@click.option("--n-values", default=None, help="Cover orders to report (default 7..12)")
@click.pass_context
def twobridge_report(ctx: click.Context, cf: str, n_values: Optional[str]):
    """Branched-cover summary for both orientations."""
    inputs = _cf_inputs(cf, "canonical")
    if n_values:
        inputs["n_values"] = _int_list(n_values)
    _run(ctx, "twobridge.report", inputs)


@cli.group()
def braid():
    """Braid words and the fractional Dehn twist ledger."""
    pass


@braid.command("stats")
@click.argument("word", required=False)
@click.option("--strands", type=int, default=None, help="Strand count (default: largest index + 1)")
@click.option("--family", default=None, help="Two-bridge braid for k,l,m instead of a word")
@click.pass_context
def braid_stats(ctx: click.Context, word: Optional[str], strands: Optional[int], family: Optional[str]):
    """Exponent sum, permutation and closure components of a word like 's1 s1 S2'."""
    if family:
        inputs: dict = {"family": _int_list(family)}
    elif word:
        inputs = {"word": word}
    else:
        _fail("give a braid word or --family")
    if strands is not None:
        inputs["strands"] = strands
    _run(ctx, "braid.stats", inputs)


@braid.command("fdtc-shift")
@click.option("--c", "c", required=True, help="c(b) as an exact fraction")
@click.option("--k", "k", type=int, required=True, help="Number of full twists")
@click.option(
    "--provenance",
    type=click.Choice(["cited-fact", "ledger-derived", "user-asserted"]),
    default="user-asserted",
    help="Where c(b) comes from",
)
@click.pass_context
def braid_fdtc_shift(ctx: click.Context, c: str, k: int, provenance: str):
    """Ledger entry for C^k b."""
    _run(ctx, "braid.fdtc-shift", {"c": c, "k": k, "provenance": provenance})


@braid.command("hyp-check")
@click.option("--c", "c", required=True, help="c(b) as an exact fraction")
@click.option("--k", "k", type=int, default=None, help="Full-twist exponent")
@click.option("--boundary", default=None, help="FDTCs on boundary components, comma-separated")
@click.option("--quasipositive/--not-quasipositive", default=None, help="Whether b is quasipositive")
@click.pass_context
def braid_hyp_check(
    ctx: click.Context, c: str, k: Optional[int], boundary: Optional[str], quasipositive: Optional[bool]
):
    """Check the FDTC hypotheses of the closed-braid statements."""
    inputs: dict = {"c": c}
    if k is not None:
        inputs["k"] = k
    if boundary:
        inputs["boundary"] = [v.strip() for v in boundary.split(",") if v.strip()]
    if quasipositive is not None:
        inputs["quasipositive"] = quasipositive
    _run(ctx, "braid.hyp-check", inputs)


@braid.command("qp-verify")
@click.option("--p", "p", type=int, default=None)
@click.option("--q", "q", type=int, default=None)
@click.option("--r", "r", type=int, default=None)
@click.option("--file", "path", type=click.Path(), default=None, help="Word and bands to verify")
@click.pass_context
def braid_qp_verify(ctx: click.Context, p: Optional[int], q: Optional[int], r: Optional[int], path: Optional[str]):
    """Verify a quasipositive band decomposition (b(p,q,r) by default)."""
    if path:
        inputs = _load_or_fail(_load_mapping, path)
    elif None in (p, q, r):
        _fail("give --p, --q and --r, or --file")
    else:
        inputs = {"p": p, "q": q, "r": r}
    _run(ctx, "braid.qp-verify", inputs, source=path)


@cli.command()
@click.argument("path", type=click.Path(), default="eval/acceptance.yaml")
@click.option("--workers", type=int, default=None, help="Worker threads (overrides ORDERFORGE_BATCH_WORKERS)")
@click.pass_context
def batch(ctx: click.Context, path: str, workers: Optional[int]):
    """Run a YAML file of pipeline cases against their expectations."""
    from src.services.batch import BatchService

    service = BatchService(_config(ctx, batch_workers=workers))
    try:
        results = service.run_batch(Path(path))
    except yaml.YAMLError as e:
        mark = getattr(e, "problem_mark", None)
        where = f"{path}:{mark.line + 1}:{mark.column + 1}" if mark is not None else path
        _fail(f"{where}: {getattr(e, 'problem', None) or e}")
    except OSError as e:
        _fail(f"{path}: {e.strerror}")
    except OrderForgeError as e:
        _fail(str(e))

    if ctx.obj["output"] == "json":
        click.echo(json.dumps(results, indent=2))
    elif ctx.obj["output"] == "tsv":
        for r in results["details"]:
            click.echo(f"{r['case_id']}\t{r['pipeline']}\t{r['verdict']}\t{'pass' if r['passed'] else 'FAIL'}")
    else:
        _print_batch_results(results)
    sys.exit(0 if results["cases_passed"] == results["total_cases"] else 1)


def _print_batch_results(results: dict):
    """Print batch results in human-readable format."""
    click.echo("Batch Results")
    click.echo("=" * 40)
    click.echo(f"Total cases: {results['total_cases']}")
    click.echo(f"Passed: {results['cases_passed']}")
    click.echo(f"Pass rate: {results['pass_rate']:.0%}")
    click.echo()

    for r in results["details"]:
        status = "PASS" if r["passed"] else "FAIL"
        click.echo(f"[{status}] {r['case_id']} ({r['pipeline']}): {r['verdict'] or 'error'}")
        if r["error"]:
            click.echo(f"    {r['error']}")
        for mismatch in r["mismatches"]:
            click.echo(f"    {mismatch}")


@cli.command("replay")
@click.argument("path", type=click.Path())
@click.pass_context
def replay_cmd(ctx: click.Context, path: str):
    """Re-run a certificate's pipeline and compare verdict and evidence."""
    from src.services.pipelines import replay

    data = _load_or_fail(_load_mapping, path)
    try:
        cert = Certificate.from_dict(data)
    except (KeyError, ValueError) as e:
        _fail(f"{path}: not a certificate ({e})")
    try:
        result = replay(cert, _config(ctx))
    except (SizeLimitError, UnsupportedInputError) as e:
        _fail(f"{path}: {e}", code=2)
    except OrderForgeError as e:
        _fail(f"{path}: {e}")

    if ctx.obj["output"] == "text":
        for key, value in result.items():
            click.echo(f"{key}: {value}")
    else:
        click.echo(json.dumps(result, indent=2))
    sys.exit(0 if result["verdict_matches"] and result["evidence_matches"] else 1)


if __name__ == "__main__":
    cli()
