import csv
import logging
import sys
import time
from datetime import datetime

import click

from .exceptions import RealFormsException
from .groups import DEFAULT_ORDER_CAP
from .realforms import RealForms
from .utils import input_digest, json_dumps, parse_index_list
from .version import __version__

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1

COLORS = {
    0: "black",
    1: "red",
    2: "green",
    3: "yellow",
    4: "blue",
    5: "magenta",
    6: "cyan",
    7: "bright_black",
    8: "bright_red",
    9: "bright_green",
    10: "bright_yellow",
    11: "bright_blue",
    12: "bright_magenta",
    13: "bright_cyan",
    14: "white",
    15: "bright_white",
}


def _records(payload):
    if isinstance(payload, list):
        return [x if isinstance(x, dict) else {"value": x} for x in payload]
    if isinstance(payload, dict):
        return [payload]
    return [{"value": payload}]


def _save_data(command, data, filename):
    filename, ext = filename.rsplit(".", 1) if filename and filename.endswith((".csv", ".json")) else (None, filename)
    filename = filename if filename else f"{command}_{datetime.now():%Y%m%d_%H%M%S}"
    if ext == "csv":
        _save_csv(f"{filename}.{ext}", _records(data))
    elif ext == "json":
        _save_json(f"{filename}.{ext}", data)
    else:
        raise click.BadParameter(f"expected csv, json or a .csv/.json filename, got {ext!r}", param_hint="--output")


def _save_json(jsonfile, data):
    with open(jsonfile, "w", encoding="utf-8") as file:
        file.write(json_dumps(data))


def _save_csv(csvfile, data):
    with open(csvfile, "w", newline="", encoding="utf-8") as file:
        if data:
            headers = list(dict.fromkeys(k for row in data for k in row))
            writer = csv.DictWriter(file, fieldnames=headers, quoting=csv.QUOTE_MINIMAL)
            writer.writeheader()
            for row in data:
                cells = {k: json_dumps(v, indent=False) if isinstance(v, (list, dict)) else v for k, v in row.items()}
                writer.writerow(cells)


def _print_data(data):
    records = _records(data)
    for i, e in enumerate(records, start=1):
        if len(records) > 1:
            click.secho(f"{i}.\t    {'=' * 78}", bg="black", fg="white")
        for j, (k, v) in enumerate(e.items(), start=1):
            text = v if isinstance(v, str) else json_dumps(v, indent=False)
            text = click.wrap_text(text, width=100, initial_indent="", subsequent_indent=" " * 20)
            click.secho(f"{k:<20}{text}", fg=COLORS[j % 16 or 1])


def _run(command, inputs, compute, as_json, output):
    """Evaluate a command and emit it as a CommandResult, a file or a colored listing."""
    start = time.perf_counter()
    digest = input_digest({"command": command, **inputs})
    try:
        payload = compute()
    except RealFormsException as ex:
        message = f"{type(ex).__name__}: {ex}"
        logger.debug(f"{command} failed {message}")
        if as_json:
            error = {"error": type(ex).__name__, "message": str(ex)}
            click.echo(json_dumps(_envelope(command, digest, "error", error, start)))
            raise click.exceptions.Exit(1) from ex
        raise click.ClickException(message) from ex
    if output:
        _save_data(command, payload, output)
    if as_json:
        click.echo(json_dumps(_envelope(command, digest, "ok", payload, start)))
    elif not output:
        _print_data(payload)
    return payload


def _envelope(command, digest, status, payload, start):
    return {
        "schema": SCHEMA_VERSION,
        "command": command,
        "input_digest": digest,
        "status": status,
        "payload": payload,
        "timing_ms": round((time.perf_counter() - start) * 1000, 3),
    }


def _indices(ctx, param, value):
    if value is None:
        return None
    try:
        return parse_index_list(value)
    except RealFormsException as ex:
        raise click.BadParameter(str(ex)) from ex


def _sign(ctx, param, value):
    if value not in (1, -1):
        raise click.BadParameter("must be 1 or -1")
    return value


def output_options(f):
    f = click.option("-o", "--output", help="csv, json or filename.csv|json (save the payload to a file)")(f)
    f = click.option("--json", "as_json", is_flag=True, default=False, help="print a versioned JSON CommandResult")(f)
    return f


def cap_option(f):
    return click.option(
        "--cap",
        type=click.IntRange(min=1),
        default=DEFAULT_ORDER_CAP,
        envvar="REALFORMS_CAP",
        show_default=True,
        help="maximum group order (env REALFORMS_CAP)",
    )(f)


def group_options(f):
    f = cap_option(f)
    f = click.option(
        "-g", "--group", "group_spec", required=True, help="group JSON file or builtin:<name>:<n>[:<involution>]"
    )(f)
    return f


@click.group()
@click.option("--debug", is_flag=True, default=False, help="log debug messages to stderr")
def cli(debug):
    """realforms CLI tool: components and stabilizers of real realizations"""
    if debug:
        logging.basicConfig(level=logging.DEBUG, format="%(asctime)s %(levelname)s %(name)s: %(message)s")


def safe_entry_point():
    try:
        cli()
    except Exception as ex:
        click.echo(f"{type(ex).__name__}: {ex}", err=True)
        sys.exit(1)


@cli.command()
def version():
    print(__version__)
    return __version__


@cli.command()
@group_options
@output_options
def h1(group_spec, cap, as_json, output):
    """H^1(C2, G): twisted-conjugacy classes of cocycles and their stabilizers."""
    _run("h1", {"group": group_spec, "cap": cap}, lambda: RealForms(order_cap=cap).h1(group_spec), as_json, output)


@cli.command()
@group_options
@output_options
def components(group_spec, cap, as_json, output):
    """Components B(K_g) of the real realization of BG."""
    _run(
        "components",
        {"group": group_spec, "cap": cap},
        lambda: RealForms(order_cap=cap).components(group_spec),
        as_json,
        output,
    )


@cli.command("strong-involutions")
@group_options
@output_options
def strong_involutions(group_spec, cap, as_json, output):
    """Strong involutions with central and reduced invariants."""
    _run(
        "strong-involutions",
        {"group": group_spec, "cap": cap},
        lambda: RealForms(order_cap=cap).strong_involutions(group_spec),
        as_json,
        output,
    )


@cli.command("twist-check")
@group_options
@click.option("--g0", type=int, help="cocycle to twist by (element index); every cocycle when omitted")
@output_options
def twist_check(group_spec, cap, g0, as_json, output):
    """Check the twisting bijection c -> c g0 between H^1 sets."""
    _run(
        "twist-check",
        {"group": group_spec, "cap": cap, "g0": g0},
        lambda: RealForms(order_cap=cap).twist_check(group_spec, g0),
        as_json,
        output,
    )


@cli.command()
@group_options
@click.option(
    "-v", "--values", multiple=True, help="character values as 1,-1,... per element; repeat for a diagonal form"
)
@output_options
def character(group_spec, cap, values, as_json, output):
    """Restrict characters to the stabilizers; list all characters when --values is omitted."""
    client = RealForms(order_cap=cap)
    try:
        parsed = [parse_index_list(v) for v in values]
    except RealFormsException as ex:
        raise click.BadParameter(str(ex), param_hint="--values") from ex
    compute = (lambda: client.character(group_spec, parsed)) if parsed else (lambda: client.characters(group_spec))
    _run("character", {"group": group_spec, "cap": cap, "values": parsed}, compute, as_json, output)


@cli.command("inner-forms")
@group_options
@output_options
def inner_forms(group_spec, cap, as_json, output):
    """|H^1| for every strong inner twist of the involution."""
    _run(
        "inner-forms",
        {"group": group_spec, "cap": cap},
        lambda: RealForms(order_cap=cap).inner_forms(group_spec),
        as_json,
        output,
    )


@cli.command()
@click.option("-a", "--action", "action_spec", required=True, help="action JSON file")
@cap_option
@output_options
def stack(action_spec, cap, as_json, output):
    """Fixed-point groupoid of an equivariant action: the real points of [G\\X]."""
    _run(
        "stack",
        {"action": action_spec, "cap": cap},
        lambda: RealForms(order_cap=cap).stack(action_spec),
        as_json,
        output,
    )


@cli.command()
@group_options
@click.option("-s", "--subgroup", required=True, callback=_indices, help="subgroup members, e.g. 0,2")
@click.option("-a", "--action", "action_spec", help="action JSON file over the subgroup; the point when omitted")
@output_options
def induce(group_spec, cap, subgroup, action_spec, as_json, output):
    """Induce an action from a sigma-stable subgroup and compare fixed-point groupoids."""
    _run(
        "induce",
        {"group": group_spec, "cap": cap, "subgroup": subgroup, "action": action_spec},
        lambda: RealForms(order_cap=cap).induce(group_spec, subgroup, action_spec),
        as_json,
        output,
    )


@cli.command()
@click.option("-a", "--action", "action_spec", required=True, help="action JSON file")
@click.option("-s", "--subgroup", required=True, callback=_indices, help="normal subgroup members, e.g. 0,2")
@cap_option
@output_options
def quotient(action_spec, subgroup, cap, as_json, output):
    """Quotient an action by a free normal subgroup and compare fixed-point groupoids."""
    _run(
        "quotient",
        {"action": action_spec, "subgroup": subgroup, "cap": cap},
        lambda: RealForms(order_cap=cap).quotient(action_spec, subgroup),
        as_json,
        output,
    )


@cli.command()
@click.argument("first")
@click.argument("second")
@cap_option
@output_options
def compare(first, second, cap, as_json, output):
    """Compare the fixed-point groupoids of two action files."""
    _run(
        "compare",
        {"first": first, "second": second, "cap": cap},
        lambda: RealForms(order_cap=cap).compare(first, second),
        as_json,
        output,
    )


@cli.group()
def forms():
    """Real quadratic forms: O(n) and SO(p,q) components, invariant matching."""


@forms.command("o")
@click.argument("n", type=int)
@output_options
def forms_o(n, as_json, output):
    """Signatures (p, q) with p + q = N, descending p."""
    _run("forms o", {"n": n}, lambda: RealForms().forms_o(n), as_json, output)


@forms.command("so")
@click.argument("p", type=int)
@click.argument("q", type=int)
@output_options
def forms_so(p, q, as_json, output):
    """Signatures in the SO(P, Q) realization (same rank and discriminant)."""
    _run("forms so", {"p": p, "q": q}, lambda: RealForms().forms_so(p, q), as_json, output)


@forms.command("match", context_settings={"ignore_unknown_options": True})
@click.argument("n", type=int)
@click.argument("disc", type=int, callback=_sign)
@click.argument("hasse", type=int, callback=_sign)
@output_options
def forms_match(n, disc, hasse, as_json, output):
    """Signatures of rank N with the given discriminant and Hasse signs (1 or -1)."""
    _run(
        "forms match",
        {"n": n, "disc": disc, "hasse": hasse},
        lambda: RealForms().forms_match(n, disc, hasse),
        as_json,
        output,
    )


@cli.command()
@click.argument("parity", type=click.Choice(["odd", "even"]))
@click.argument("n", type=click.IntRange(min=1))
@click.option("--compare", is_flag=True, default=False, help="list the signatures matching the split form too")
@output_options
def spin(parity, n, compare, as_json, output):
    """Witt invariant rank of B Spin(n, n+1) (odd) or B Spin(n, n) (even)."""
    payload = _run(
        "spin",
        {"parity": parity, "n": n, "compare": compare},
        lambda: RealForms().spin(parity, n, compare),
        as_json,
        output,
    )
    return payload


@cli.command("witt-rank")
@click.argument("kind")
@click.argument("params", nargs=-1, type=int)
@output_options
def witt_rank(kind, params, as_json, output):
    """Witt invariant rank for O n, SO p q, Spin-odd n, Spin-even n, G2, F4, E6-inner, E6-outer."""
    _run(
        "witt-rank",
        {"kind": kind, "params": list(params)},
        lambda: RealForms().witt_rank(kind, params),
        as_json,
        output,
    )


@cli.command()
@click.option("--case", "case_id", required=True, help="normalizer-sl2, o11, orthogonal-diag or a case file")
@output_options
def witness(case_id, as_json, output):
    """Run an exact-arithmetic witness suite."""
    payload = _run("witness", {"case": case_id}, lambda: RealForms().witness(case_id), as_json, output)
    if not payload["passed"]:
        raise click.exceptions.Exit(1)


@cli.command()
@group_options
@click.option("-k", "--max-degree", "kmax", type=click.IntRange(min=0), default=4, show_default=True)
@click.option("--verify", is_flag=True, default=False, help="also check d o d = 0 in every degree")
@output_options
def cohomology(group_spec, cap, kmax, verify, as_json, output):
    """dim H^k(BG; F2) from the normalized bar complex."""
    _run(
        "cohomology",
        {"group": group_spec, "cap": cap, "max_degree": kmax, "verify": verify},
        lambda: RealForms(order_cap=cap).cohomology(group_spec, kmax, verify),
        as_json,
        output,
    )


@cli.command("realization-cohomology")
@click.option("-g", "--group", "group_spec", help="group JSON file or builtin:<name>:<n>[:<involution>]")
@click.option("-a", "--action", "action_spec", help="action JSON file")
@click.option("-k", "--max-degree", "kmax", type=click.IntRange(min=0), default=4, show_default=True)
@cap_option
@output_options
def realization_cohomology(group_spec, action_spec, kmax, cap, as_json, output):
    """F2 Betti numbers of the real realization, summed over components."""
    if bool(group_spec) == bool(action_spec):
        raise click.UsageError("give exactly one of --group and --action")
    client = RealForms(order_cap=cap)
    compute = (
        (lambda: client.realization_cohomology(client.group(group_spec), kmax))
        if group_spec
        else (lambda: client.realization_cohomology(client.action(action_spec), kmax))
    )
    _run(
        "realization-cohomology",
        {"group": group_spec, "action": action_spec, "max_degree": kmax, "cap": cap},
        compute,
        as_json,
        output,
    )


@cli.command()
@output_options
def selftest(as_json, output):
    """Run the bundled corpus of known results; exit 1 on any failure."""
    rows = _run("selftest", {}, lambda: RealForms().selftest(), as_json, output)
    if not as_json and not output:
        passed = sum(r["passed"] for r in rows)
        for r in rows:
            if not r["passed"]:
                message = f"FAILED [{r['source']}] {r['claim']}: expected {r['expected']}, got {r['actual']}"
                click.secho(message, fg="red")
        click.secho(f"{passed}/{len(rows)} claims passed", fg="green" if passed == len(rows) else "red")
    if not all(r["passed"] for r in rows):
        raise click.exceptions.Exit(1)


if __name__ == "__main__":
    cli(prog_name="realforms")
