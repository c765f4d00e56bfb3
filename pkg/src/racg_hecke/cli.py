"""Command-line interface.

Exit codes: 0 ok, 1 violations found, 2 theorem hypothesis violated,
3 capacity exceeded, 64 usage error.
"""

from __future__ import annotations

import argparse
import itertools
import json
import sys
from fractions import Fraction

import numpy as np

from . import __version__
from .coxeter import CoxeterSystem, enumerate_ball
from .errors import CapacityError, HypothesisError, InputError, PreconditionError, RacgError, ThicknessError
from .series import (
    DEFAULT_MAX_LEN,
    c_sets,
    decide_convergence,
    factoriality_report,
    reduce_parameters,
    weighted_sphere_sums,
    effective_weights,
)

SCHEMA_VERSION = 1
EXIT_OK, EXIT_VIOLATIONS, EXIT_HYPOTHESIS, EXIT_CAPACITY, EXIT_USAGE = 0, 1, 2, 3, 64
SUITES = ("hecke-relations", "eigenvectors", "central", "double-coset", "characters", "translation", "iwahori")
RESIDUAL_TOL = 1e-9


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(EXIT_USAGE)


def _common(p):
    p.add_argument("--system", required=True, metavar="PATH", help="system JSON: generators and commuting pairs")
    p.add_argument("--q", help="deformation parameters, JSON list or map generator -> value")
    p.add_argument("--d", "--thickness", dest="d", help="building thickness, JSON list or map generator -> int")
    p.add_argument("--a", help="representation parameters in (-1, 1), JSON list or map")
    p.add_argument("--r", type=float, default=2.0)
    p.add_argument("--radius", type=int, default=None)
    p.add_argument("--format", choices=("json", "text"), default="json")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-len", type=int, default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="racg-hecke", description="Hecke algebras of right-angled Coxeter groups")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    p = sub.add_parser("factoriality", help="decide factoriality of the Hecke operator algebra")
    _common(p)
    p = sub.add_parser("verify", help="run a verification suite")
    p.add_argument("suite", choices=SUITES)
    _common(p)
    p = sub.add_parser("growth", help="weighted sphere sums and convergence verdict")
    _common(p)
    p.add_argument("--eps", help="sign vector, JSON list or map (default all +1)")
    p = sub.add_parser("spherical", help="decomposition of the Iwahori-spherical representation")
    _common(p)
    p = sub.add_parser("characters", help="character table of a graph-product representation")
    _common(p)
    return parser


# -- input parsing ------------------------------------------------------------


def load_system(path: str) -> CoxeterSystem:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read system file {path!r}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"system file {path!r} is not valid JSON: {exc}") from None
    return CoxeterSystem.from_json(data)


def parse_vector(system: CoxeterSystem, text: str, label: str, number=float) -> tuple:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"--{label} is not valid JSON: {exc}") from None
    if isinstance(data, (int, float)) and not isinstance(data, bool):
        data = [data] * system.rank
    if isinstance(data, dict):
        unknown = set(data) - set(system.names)
        missing = [n for n in system.names if n not in data]
        if unknown or missing:
            raise UsageError(f"--{label}: unknown generators {sorted(unknown)}, missing {missing}")
        data = [data[n] for n in system.names]
    if not isinstance(data, list) or len(data) != system.rank:
        raise UsageError(f"--{label} needs {system.rank} values")
    try:
        return tuple(number(x) for x in data)
    except (TypeError, ValueError):
        raise UsageError(f"--{label} entries must be numbers") from None


def _fraction_or_float(x):
    if isinstance(x, str):
        return Fraction(x)
    return x


def _exactly_one(args, names):
    given = [n for n in names if getattr(args, n) is not None]
    if len(given) > 1:
        raise UsageError(f"give exactly one of {', '.join('--' + n for n in names)}, got {', '.join(given)}")
    return given[0] if given else None


def get_q(system, args, rng=None, required=True):
    """``q`` from --q or from --d (as 1/d); random when absent and ``rng`` given."""
    which = _exactly_one(args, ("q", "d"))
    if which == "q":
        return parse_vector(system, args.q, "q", _fraction_or_float)
    if which == "d":
        d = parse_vector(system, args.d, "d", int)
        return tuple(Fraction(1, x) if x >= 2 else _bad_thickness(x) for x in d)
    if rng is not None:
        return tuple(float(x) for x in rng.uniform(0.1, 1.0, system.rank))
    if required:
        raise UsageError("this command needs --q or --d")
    return None


def _bad_thickness(x):
    raise ThicknessError(f"thickness entries must be at least 2, got {x}")


# -- commands -----------------------------------------------------------------


def cmd_factoriality(system, args) -> tuple:
    q = get_q(system, args)
    reduced, flips = reduce_parameters(q)
    kw = {} if args.max_len is None else {"max_len": args.max_len}
    report = factoriality_report(system, reduced, args.r, **kw)
    out = report.to_json()
    out["q_reduced"] = dict(zip(system.names, (float(x) for x in reduced.q)))
    out["flips"] = dict(zip(system.names, flips))
    return out, EXIT_OK


def cmd_growth(system, args) -> tuple:
    q = get_q(system, args)
    reduced, flips = reduce_parameters(q)
    eps = (1,) * system.rank if args.eps is None else parse_vector(system, args.eps, "eps", int)
    if any(e not in (-1, 1) for e in eps):
        raise UsageError("--eps entries must be -1 or 1")
    # q_{s} > 1 enters as the reduced parameter with the sign flipped
    eps_eff = tuple(e * f for e, f in zip(eps, flips))
    n = DEFAULT_MAX_LEN if args.max_len is None else args.max_len
    exponent = args.r / 2.0
    verdict = decide_convergence(system, reduced, eps_eff, exponent, n)
    sums = verdict.sphere_sums
    if sums is None:
        sums = weighted_sphere_sums(system, effective_weights(reduced, eps_eff, exponent), n)
    return {"exponent": exponent, "eps": dict(zip(system.names, eps)),
            "sphere_sums": sums, "verdict": verdict.to_json()}, EXIT_OK


def cmd_spherical(system, args) -> tuple:
    from .iwahori import spherical_report

    if args.d is None:
        raise UsageError("spherical needs --d (thickness)")
    d = parse_vector(system, args.d, "d", int)
    return spherical_report(system, d, args.max_len).to_json(), EXIT_OK


def cmd_characters(system, args) -> tuple:
    from .graph_product import character

    if args.a is None:
        raise UsageError("characters needs --a")
    a = parse_vector(system, args.a, "a")
    n = 4 if args.max_len is None else args.max_len
    table = [(system.word_str(w), character(system, a, w)) for w in enumerate_ball(system, n).words]
    return {"a": dict(zip(system.names, a)), "max_len": n,
            "characters": [{"word": w, "value": v} for w, v in table]}, EXIT_OK


# -- verification suites ------------------------------------------------------


def _radius(args, default):
    return default if args.radius is None else args.radius


def suite_hecke_relations(system, args, rng):
    from .hecke import commutator_residual, inversion_operator, left_hecke_operator, quadratic_residual, \
        right_hecke_operator

    q = get_q(system, args, rng)
    ball = enumerate_ball(system, _radius(args, 6))
    reduced, _ = reduce_parameters(q)
    bad, worst = [], 0.0
    L = [left_hecke_operator(system, reduced, s, ball).matrix for s in system.generators]
    R = [right_hecke_operator(system, reduced, s, ball).matrix for s in system.generators]
    inner2 = ball.interior(2)
    for s in system.generators:
        r = quadratic_residual(system, reduced, s, ball)
        worst = max(worst, r)
        if r > RESIDUAL_TOL:
            bad.append({"kind": "quadratic", "operator": f"T_{system.names[s]}", "residual": r})
    for s, t in itertools.product(system.generators, repeat=2):
        if s < t and system.commutes(s, t):
            r = commutator_residual(L[s], L[t], inner2)
            worst = max(worst, r)
            if r > RESIDUAL_TOL:
                bad.append({"kind": "commuting-pair", "operator": f"[T_{system.names[s]}, T_{system.names[t]}]",
                            "residual": r})
        r = commutator_residual(L[s], R[t], inner2)
        worst = max(worst, r)
        if r > RESIDUAL_TOL:
            bad.append({"kind": "left-right", "operator": f"[pi(T_{system.names[s]}), rho(T_{system.names[t]})]",
                        "residual": r})
    J = inversion_operator(ball)
    if abs(J @ J - np.eye(len(ball))).max() != 0:
        bad.append({"kind": "involution", "operator": "J"})
    return {"q": [float(x) for x in reduced.q], "radius": ball.radius, "ball_size": len(ball),
            "max_residual": worst}, bad


def suite_eigenvectors(system, args, rng):
    from .hecke import adding_letters_check, eigenvector_residual

    q = get_q(system, args, rng)
    reduced, _ = reduce_parameters(q)
    ball = enumerate_ball(system, _radius(args, 6))
    C, _ = c_sets(system, reduced, args.r)
    bad, worst = [], 0.0
    for eps in C:
        for s in system.generators:
            r = eigenvector_residual(system, reduced, eps, s, ball)
            worst = max(worst, r)
            if r > RESIDUAL_TOL:
                bad.append({"kind": "eigen", "eps": list(eps), "operator": f"T_{system.names[s]}", "residual": r})
        bad.extend(dict(v.to_json(), eps=list(eps)) for v in adding_letters_check(system, reduced, eps, ball))
    return {"q": [float(x) for x in reduced.q], "C": [list(e) for e in C], "max_residual": worst}, bad


def suite_central(system, args, rng):
    from .hecke import eigenvector_coeffs, solve_central_space

    q = get_q(system, args, rng)
    reduced, _ = reduce_parameters(q)
    ball = enumerate_ball(system, _radius(args, 6))
    space = solve_central_space(system, reduced, ball, margin=1)
    C, _ = c_sets(system, reduced, 2.0)
    delta = np.zeros(len(ball))
    delta[0] = 1.0
    bad, errs = [], {"delta_e": space.containment_error(delta)}
    for eps in C:
        errs[str(list(eps))] = space.containment_error(eigenvector_coeffs(system, reduced, eps, ball))
    for k, v in errs.items():
        if v > 1e-8:
            bad.append({"kind": "containment", "vector": k, "relative_error": v})
    return {"q": [float(x) for x in reduced.q], "radius": ball.radius, "dimension": space.dimension,
            "ball_size": len(ball), "expected_minimum": 1 + len(C), "containment_errors": errs,
            "note": "dimension is inflated by unconstrained boundary words; reported only"}, bad


def suite_double_coset(system, args, rng):
    from .hecke import double_coset_form_check, eigenvector_coeffs, first_solution_identity, \
        fundamental_solution_check

    q = get_q(system, args, rng)
    reduced, _ = reduce_parameters(q)
    ball = enumerate_ball(system, _radius(args, 6))
    C, _ = c_sets(system, reduced, 2.0)
    bad, fits = [], 0
    xi = np.zeros(len(ball))
    for eps in C:
        xi += rng.normal() * eigenvector_coeffs(system, reduced, eps, ball)
    for s, t in itertools.combinations(system.generators, 2):
        if system.commutes(s, t):
            continue
        for st in ((s, t), (t, s)):
            for w in ball.words:
                if len(w) > ball.radius - 2:
                    break
                try:
                    fit = double_coset_form_check(system, reduced, st[0], st[1], w, xi, ball)
                except PreconditionError:
                    continue
                fits += 1
                scale = max(1.0, float(np.abs(xi).max()))
                if fit.residual > RESIDUAL_TOL * scale:
                    bad.append({"kind": "double-coset", "s": system.names[st[0]], "t": system.names[st[1]],
                                "word": system.word_str(w), "residual": fit.residual})
        rep = fundamental_solution_check(float(reduced.q[s]), float(reduced.q[t]), 20)
        bad.extend(dict(v, kind="recurrence", s=system.names[s], t=system.names[t]) for v in rep.violations)
        if not first_solution_identity(Fraction(reduced.q[s]), Fraction(reduced.q[t])):
            bad.append({"kind": "identity", "s": system.names[s], "t": system.names[t]})
    return {"q": [float(x) for x in reduced.q], "C": [list(e) for e in C], "cosets_fitted": fits}, bad


def suite_characters(system, args, rng):
    from .graph_product import character, character_by_matrices, closed_form_character

    samples = 100
    n = 4 if args.max_len is None else args.max_len
    words = enumerate_ball(system, n).words
    shaped = [w for w in words if len(w) <= 4]
    bad, worst = [], 0.0
    given = None if args.a is None else parse_vector(system, args.a, "a")
    for k in range(1 if given else samples):
        a = given if given else tuple(rng.uniform(-0.95, 0.95, system.rank))
        for w in shaped:
            cf = closed_form_character(system, a, w)
            if cf is None:
                continue
            ex, mx = character(system, a, w), character_by_matrices(system, a, w)
            err = max(abs(ex - cf), abs(mx - cf))
            worst = max(worst, err)
            if err > RESIDUAL_TOL:
                bad.append({"kind": "closed-form", "word": system.word_str(w), "a": list(a), "error": err})
        if k < 5:
            for w in words:
                err = abs(character(system, a, w) - character(system, a, system.inverse(w)))
                if err > RESIDUAL_TOL:
                    bad.append({"kind": "symmetry", "word": system.word_str(w), "error": err})
    return {"samples": 1 if given else samples, "max_error": worst}, bad


def suite_translation(system, args, rng):
    from .graph_product import character, character_via_hecke, hecke_translation_check

    ball = enumerate_ball(system, _radius(args, 6))
    given = None if args.a is None else parse_vector(system, args.a, "a")
    bad, worst = [], 0.0
    for k in range(1 if given else 50):
        a = given if given else tuple(rng.uniform(0.0, 0.9, system.rank))
        rep = hecke_translation_check(system, a, ball)
        worst = max(worst, rep.max_residual)
        bad.extend(dict(v.to_json(), a=list(a)) for v in rep.violations)
        for w in ball.words:
            if len(w) > 3:
                break
            err = abs(character(system, a, w) - character_via_hecke(system, a, w))
            if err > RESIDUAL_TOL:
                bad.append({"kind": "character-via-hecke", "word": system.word_str(w), "error": err})
    return {"radius": ball.radius, "max_residual": worst}, bad


def suite_iwahori(system, args, rng):
    from .iwahori import iwahori_check

    if args.d is not None:
        d = parse_vector(system, args.d, "d", int)
    else:
        d = tuple(int(x) for x in rng.integers(2, 5, system.rank))
    rep = iwahori_check(system, d, _radius(args, 5))
    return {"d": dict(zip(system.names, d)), "checked": rep.checked}, rep.violations


def cmd_verify(system, args) -> tuple:
    rng = np.random.default_rng(args.seed)
    fn = {
        "hecke-relations": suite_hecke_relations,
        "eigenvectors": suite_eigenvectors,
        "central": suite_central,
        "double-coset": suite_double_coset,
        "characters": suite_characters,
        "translation": suite_translation,
        "iwahori": suite_iwahori,
    }[args.suite]
    info, violations = fn(system, args, rng)
    return {"suite": args.suite, "violations": violations, "n_violations": len(violations), **info}, \
        (EXIT_VIOLATIONS if violations else EXIT_OK)


COMMANDS = {
    "factoriality": cmd_factoriality,
    "verify": cmd_verify,
    "growth": cmd_growth,
    "spherical": cmd_spherical,
    "characters": cmd_characters,
}


def _config(args) -> dict:
    return {k: v for k, v in vars(args).items() if k != "func"}


def _emit(args, envelope, stream):
    if args.format == "json":
        json.dump(envelope, stream, indent=2, default=str)
        stream.write("\n")
        return
    result = envelope.get("result", {})
    if args.command == "characters" and "characters" in result:
        for row in result["characters"]:
            stream.write(f"{row['word']};{row['value']!r}\n")
        return
    if args.command == "growth" and "sphere_sums" in result:
        for n, c in enumerate(result["sphere_sums"]):
            stream.write(f"{n};{c!r}\n")
        stream.write(f"# status: {result['verdict']['status']}\n")
        return
    stream.write(f"racg-hecke {envelope['version']} {args.command}\n")
    for k, v in (envelope.get("result") or {"error": envelope.get("error")}).items():
        stream.write(f"{k}: {json.dumps(v, default=str)}\n")


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    envelope = {"tool": "racg-hecke", "version": __version__, "schema_version": SCHEMA_VERSION,
                "command": args.command, "config": _config(args)}
    code = EXIT_OK
    try:
        system = load_system(args.system)
        result, code = COMMANDS[args.command](system, args)
        envelope["result"] = result
    except UsageError as exc:
        envelope["error"], code = {"type": "usage", "message": str(exc)}, EXIT_USAGE
    except HypothesisError as exc:
        envelope["error"], code = {"type": "hypothesis", "message": str(exc)}, EXIT_HYPOTHESIS
    except CapacityError as exc:
        envelope["error"], code = {"type": "capacity", "message": str(exc)}, EXIT_CAPACITY
    except (InputError, PreconditionError) as exc:
        envelope["error"], code = {"type": "input", "message": str(exc)}, EXIT_USAGE
    except RacgError as exc:  # pragma: no cover - every subclass is mapped above
        envelope["error"], code = {"type": "error", "message": str(exc)}, EXIT_USAGE
    envelope["exit_code"] = code
    _emit(args, envelope, sys.stdout)
    if "error" in envelope:
        print(f"racg-hecke: {envelope['error']['message']}", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
