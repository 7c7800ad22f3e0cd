"""
cmtool : directions elliptiques CM de niveau p², courbe de Gross A(p) et période Ω.

Usage :
    python main.py <chars|qexp|gross|period|verify> --p <premier> [--order d] [--terms B]
                   [--prec bits] [--format json|csv] [--out chemin]

Les variables d'environnement CMTOOL_PREC, CMTOOL_TERMS, CMTOOL_FORMAT, CMTOOL_OUT et
CMTOOL_WORKERS remplacent les valeurs par défaut ; les options de la ligne de commande
restent prioritaires.
"""
import argparse
import os
import sys
import time
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional

import mpmath as mp
import numpy as np

import directions.qexp as qexp_module
import gross.point_count as point_count_module
from directions.cocycle import (TwistedCocycle, TwistWitness, coefficient_span, compute_delta,
                                delta_certificate, make_modular, projector_spectrum, trace_phi)
from directions.heckechar import (ArtinGroup, character_for_order, enumerate_characters, phi_embeddings,
                                  splitting_field_data, trace_psi, trace_psi_numeric)
from directions.qexp import (canonical_direction, decompose_direction, direction_from_twist, hecke_verify,
                             recognize_coefficients)
from gross.gross import gross_curve, omega_period, period_cross_check, rho_norm_residual, rho_unit
from gross.point_count import a_ell_table, good_primes, integral_model
from helpers.console import RED, message, status_line, summary
from helpers.result_save import SCHEMA_VERSION, save_results_to_file
from helpers.run_stats import RunStats
from utils.analytic import (DEFAULT_PREC, GUARD_BITS, chowla_selberg_residual, embed, gauss_multiplication_residual,
                            tolerance)
from utils.cyclo import CycloElem
from utils.errors import ChoiceRequiredError, PrecisionError
from utils.quadfield import check_prime, make_field, primitive_root, sample_ideals

DEFAULT_TERMS = 1000
MIN_PREC = 64
COMMANDS = ("chars", "qexp", "gross", "period", "verify")
FORMATS = ("json", "csv")
VERIFY_TERMS = 200
ENV_PREFIX = "CMTOOL_"


@dataclass
class RunConfig:
    p: int
    command: str
    order: int = 1
    terms: int = DEFAULT_TERMS
    prec: int = DEFAULT_PREC
    output_format: str = "json"
    output_path: Optional[str] = None
    workers: Optional[int] = None

    def validate(self) -> None:
        """
        Vérifie les préconditions avant tout calcul :
        - p premier, p > 3, p ≡ 3 (mod 4) ;
        - d divise (p-1)/2 ;
        - B >= 1 et précision suffisante ;
        - format connu.
        """
        if self.command not in COMMANDS:
            raise ValueError(f"unknown command {self.command!r}")
        check_prime(self.p)
        if self.order < 1 or ((self.p - 1) // 2) % self.order:
            raise ValueError(f"--order {self.order} does not divide (p-1)/2 = {(self.p - 1) // 2}")
        if self.terms < 1:
            raise ValueError(f"--terms must be >= 1, got {self.terms}")
        if self.prec < MIN_PREC or (self.command == "period" and self.prec < 128):
            raise ValueError(f"--prec {self.prec} is too small for {self.command}")
        if self.output_format not in FORMATS:
            raise ValueError(f"--format must be one of {FORMATS}, got {self.output_format!r}")
        if self.workers is not None and self.workers < 1:
            raise ValueError(f"{ENV_PREFIX}WORKERS must be >= 1, got {self.workers}")

    def to_dict(self) -> Dict[str, object]:
        return {"p": self.p, "order": self.order, "terms": self.terms, "prec": self.prec,
                "format": self.output_format}


def _env(environ, name: str, cast: Callable = str):
    value = environ.get(ENV_PREFIX + name)
    if value is None or value == "":
        return None
    try:
        return cast(value)
    except ValueError:
        raise ValueError(f"{ENV_PREFIX}{name}={value!r} is not valid")


def _first(*values):
    for v in values:
        if v is not None:
            return v
    return None


def build_config(args: argparse.Namespace, environ=None) -> RunConfig:
    environ = os.environ if environ is None else environ
    return RunConfig(
        p=args.p,
        command=args.command,
        order=args.order,
        terms=_first(args.terms, _env(environ, "TERMS", int), DEFAULT_TERMS),
        prec=_first(args.prec, _env(environ, "PREC", int), DEFAULT_PREC),
        output_format=_first(args.format, _env(environ, "FORMAT"), "json"),
        output_path=_first(args.out, _env(environ, "OUT")),
        workers=_env(environ, "WORKERS", int),
    )


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cmtool", description="Directions elliptiques CM de niveau p².")
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--p", type=int, required=True)
    parser.add_argument("--order", type=int, default=1)
    parser.add_argument("--terms", type=int, default=None)
    parser.add_argument("--prec", type=int, default=None)
    parser.add_argument("--format", choices=FORMATS, default=None)
    parser.add_argument("--out", default=None)
    return parser


def _payload(config: RunConfig, results, residuals=None, choices=None) -> Dict[str, object]:
    return {
        "schema_version": SCHEMA_VERSION,
        "command": config.command,
        "config": config.to_dict(),
        "results": results,
        "residuals": residuals or {},
        "choices": choices or {},
    }


def cmd_chars(config: RunConfig):
    """ Une ligne par diviseur d de (p-1)/2 : ordre de η, dim A_f, [L:H], [L:K]. """
    rows = []
    for orbit in enumerate_characters(config.p):
        data = splitting_field_data(config.p, orbit.nebentypus_order)
        rows.append({
            "d": orbit.nebentypus_order,
            "eta_order": orbit.eta_order,
            "dim_Af": orbit.dimension,
            "ray_over_hilbert": data.ray_over_hilbert,
            "L_over_H": data.l_over_hilbert,
            "L_over_K": data.l_over_k,
            "eta_exponents": [chi.t for chi in orbit.representatives],
        })
    choices = {"primitive_root": primitive_root(config.p)}
    return _payload(config, rows, choices=choices), None


def cmd_qexp(config: RunConfig):
    """ Direction canonique (d = 1) ou direction du tordu modulaire (d > 1). """
    ctx = make_field(config.p)
    cocycle = compute_delta(ctx, config.prec)
    if config.order == 1:
        qe = canonical_direction(cocycle, config.terms)
        witness = TwistWitness(u=CycloElem.one(config.p), trace_value=trace_phi(qe.source), branch="identity")
    else:
        chi = character_for_order(config.p, config.order)
        witness = make_modular(TwistedCocycle(cocycle, chi))
        qe = direction_from_twist(cocycle, witness, chi, config.terms)
    residuals: Dict[str, object] = {}
    if qe.bound >= qexp_module.MIN_HECKE_TERMS:
        report = hecke_verify(qe)
        residuals["hecke"] = {"passed": report.passed, "residual": report.max_residual,
                              "p_column": report.p_column, "inert_vanishing": report.inert_vanishing}
    decomposition = decompose_direction(qe)
    if decomposition is not None:
        residuals["decomposition"] = decomposition
    if ctx.h > 1:
        recognition = recognize_coefficients(qe, limit=min(qe.bound, 50))
        residuals["recognition_failures"] = recognition.failures
    results = {
        "level": qe.level,
        "d": qe.d,
        "terms": qe.bound,
        "coefficients": list(qe.coefficients),
        "twist": witness.to_dict(),
    }
    choices = {
        "primitive_root": primitive_root(config.p),
        "cocycle": cocycle.choices(),
        "psi_extensions": [comp.character.choices() for comp in qe.components],
    }
    return _payload(config, results, residuals, choices), list(qe.coefficients)


def cmd_gross(config: RunConfig):
    gc = gross_curve(config.p, config.prec)
    results = {
        "j0": gc.recognized.get("j0", gc.j0),
        "m": gc.recognized.get("m", gc.m),
        "n": gc.recognized.get("n", gc.n),
        "c4": gc.recognized.get("c4", gc.c4),
        "c6": gc.recognized.get("c6", gc.c6),
        "disc": gc.recognized.get("discriminant", gc.discriminant),
        "hilbert_polynomial": gc.hilbert_polynomial,
    }
    if gc.is_integral:
        results["integral_model"] = list(integral_model(gc.recognized["c4"], gc.recognized["c6"]))
    return _payload(config, results), None


def cmd_period(config: RunConfig):
    ctx = make_field(config.p)
    cocycle = compute_delta(ctx, config.prec)
    pd = omega_period(config.p, cocycle, config.prec)
    results = {"omega": pd.omega, "rho": pd.rho, "is_real": pd.is_real, "lattice": pd.lattice}
    residuals: Dict[str, object] = {"delta_of_omega_lattice": pd.delta_residual}
    if ctx.h == 1:
        check = period_cross_check(gross_curve(config.p, config.prec), pd, config.prec)
        residuals["agm_cross_check"] = {"passed": check.passed, "residual": check.comparison.relative_error}
    return _payload(config, results, residuals, {"cocycle": cocycle.choices()}), None


def _case(name: str, check: Callable[[], tuple]) -> RunStats:
    """ Un cas renvoie (passed, residual) ou (passed, residual, details). """
    start_time = time.time()
    passed, residual, *rest = check()
    details = dict(rest[0]) if rest else {}
    return RunStats(name=name, passed=bool(passed), duration=time.time() - start_time, residual=residual,
                    details=details)


def _verify_cases(config: RunConfig) -> List[tuple]:
    """ Cas (nom, fonction) de la suite d'invariants. """
    p, prec = config.p, config.prec
    ctx = make_field(p)
    tol = tolerance(prec)
    rng = np.random.default_rng(0)
    cocycle = compute_delta(ctx, prec)
    cases = []

    def certificate():
        cert = delta_certificate(cocycle, rng)
        return cert.passed, cert.max_residual
    cases.append(("delta_certificate", certificate))

    for orbit in enumerate_characters(p):
        d = orbit.nebentypus_order
        chi = orbit.representatives[0]

        def spectrum(chi=chi, d=d):
            found = projector_spectrum(ArtinGroup(ctx, d), chi)
            details = {"rank": found.rank, "eigen_multiplicities": found.eigen_multiplicities}
            return found.passed, found.idempotence_residual, details
        cases.append((f"projector_spectrum_d{d}", spectrum))

        def modular(chi=chi):
            lam = TwistedCocycle(cocycle, chi)
            w = make_modular(lam)
            return trace_phi(lam.twisted(w.u)) == CycloElem.from_rational(p, lam.degree), 0, {"branch": w.branch}
        cases.append((f"make_modular_d{d}", modular))

        def span(chi=chi):
            lam = TwistedCocycle(cocycle, chi)
            found = coefficient_span(lam.twisted(make_modular(lam).u))
            return found.passed, found.dropped_residual, {"rank": found.rank, "expected_rank": found.expected_rank}
        cases.append((f"coefficient_span_d{d}", span))

    def trace_vanishing():
        chi = character_for_order(p, 1)
        if any(not trace_psi(chi, rep).is_zero() for rep in ctx.class_reps[1:]):
            return False, None
        try:
            members = phi_embeddings(ctx, chi, prec)
        except ChoiceRequiredError:
            return True, None
        worst = mp.mpf(0)
        with mp.workprec(prec + GUARD_BITS):
            for x in list(ctx.class_reps[1:]) + sample_ideals(ctx, rng, 10):
                exact = embed(trace_psi(chi, x))
                numeric = trace_psi_numeric(ctx, chi, x, prec, members)
                worst = max(worst, mp.fabs(numeric - exact) / max(mp.mpf(1), mp.fabs(exact)))
        return worst < tol, worst
    cases.append(("trace_vanishing", trace_vanishing))

    def hecke():
        qe = canonical_direction(cocycle, min(config.terms, VERIFY_TERMS))
        report = hecke_verify(qe)
        return report.passed, report.max_residual
    cases.append(("hecke_canonical", hecke))

    def chowla_selberg():
        residual = chowla_selberg_residual(ctx, prec)
        return residual < tol, residual
    cases.append(("chowla_selberg", chowla_selberg))

    def gauss():
        residual = gauss_multiplication_residual(p, prec)
        return residual < tol, residual
    cases.append(("gauss_multiplication", gauss))

    def rho():
        residual = rho_norm_residual(cocycle)
        return rho_unit(cocycle) > 0 and residual < tol, residual
    cases.append(("rho_unit", rho))

    def period():
        pd = omega_period(p, cocycle, max(prec, 128))
        return pd.delta_residual < tol, pd.delta_residual
    cases.append(("omega_period", period))

    if ctx.h == 1:
        def point_count():
            gc = gross_curve(p, prec)
            model = integral_model(gc.recognized["c4"], gc.recognized["c6"])
            primes = good_primes(model, VERIFY_TERMS)
            table = a_ell_table(model, primes)
            qe = canonical_direction(cocycle, max(primes))
            mismatches = sum(1 for ell, a in table.items() if qe.coefficient(ell) != a)
            return mismatches == 0, mismatches, {"primes": len(primes), "bound": VERIFY_TERMS}
        cases.append(("point_count_oracle", point_count))
    return cases


def cmd_verify(config: RunConfig, stream=None):
    results = []
    for name, check in _verify_cases(config):
        stats = _case(name, check)
        status_line(stats, stream)
        results.append(stats)
    summary(results, stream)
    residuals = {r.name: {"passed": r.passed, "residual": r.residual, "duration": r.duration, **r.details}
                 for r in results}
    payload = _payload(config, {"passed": all(r.passed for r in results), "cases": len(results)}, residuals,
                       {"primitive_root": primitive_root(config.p)})
    return payload, None


HANDLERS = {
    "chars": cmd_chars,
    "qexp": cmd_qexp,
    "gross": cmd_gross,
    "period": cmd_period,
}


def main(argv: Optional[List[str]] = None, environ=None) -> int:
    """
    Fonction principale :
    - lit et valide la configuration ;
    - exécute la commande ;
    - écrit le résultat (fichier ou sortie standard) ;
    - code de retour : 0 succès, 1 vérification échouée, 2 erreur d'usage, 3 précision insuffisante.
    """
    args = make_parser().parse_args(argv)
    try:
        config = build_config(args, environ)
        config.validate()
        if config.workers is not None:
            qexp_module.MAX_WORKERS = config.workers
            point_count_module.MAX_WORKERS = config.workers
        log_stream = sys.stderr if config.output_path is None else sys.stdout
        if config.command == "verify":
            payload, coefficients = cmd_verify(config, log_stream)
        else:
            payload, coefficients = HANDLERS[config.command](config)
        save_results_to_file(payload, config.prec, config.output_format, config.output_path, coefficients)
    except PrecisionError as e:
        message(f"Précision insuffisante : {e}", RED)
        return 3
    except ValueError as e:
        message(f"Erreur d'usage : {e}", RED)
        return 2
    if config.command == "verify" and not payload["results"]["passed"]:
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
