import csv
import dataclasses
import io
import json
import sys
from fractions import Fraction
from typing import Dict, List, Optional

import mpmath as mp
import numpy as np

from directions.heckechar import HeckeCharacter
from utils.analytic import LatticeBasis
from utils.cyclo import CycloElem
from utils.quadfield import Ideal, QuadInt

SCHEMA_VERSION = 1


def _digits(prec: int) -> int:
    return max(15, int(prec * 0.30103))


def _real(x, prec: int) -> str:
    return mp.nstr(x, _digits(prec))


def convert_results(obj, prec: int):
    """
    Conversion récursive vers des types JSON :
    - entiers numpy et Fraction entières -> int ;
    - nombres mpmath -> chaînes décimales avec la précision en bits ;
    - QuadInt, CycloElem, idéaux, réseaux et dataclasses -> dictionnaires.
    """
    if isinstance(obj, (bool, str)) or obj is None:
        return obj
    if isinstance(obj, dict):
        return {str(k): convert_results(v, prec) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [convert_results(item, prec) for item in obj]
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    if isinstance(obj, Fraction):
        return obj.numerator if obj.denominator == 1 else str(obj)
    if isinstance(obj, mp.mpf):
        return {"re": _real(obj, prec), "prec": prec}
    if isinstance(obj, mp.mpc):
        return {"re": _real(obj.real, prec), "im": _real(obj.imag, prec), "prec": prec}
    if isinstance(obj, QuadInt):
        return {"a": obj.a, "b": obj.b, "basis": "a + b·ω", "text": str(obj)}
    if isinstance(obj, CycloElem):
        return {"field": f"Q(ζ_{obj.n})", "coeffs": [convert_results(c, prec) for c in obj.coeffs]}
    if isinstance(obj, Ideal):
        return str(obj)
    if isinstance(obj, LatticeBasis):
        return {"omega1": convert_results(obj.omega1, prec), "omega2": convert_results(obj.omega2, prec)}
    if isinstance(obj, HeckeCharacter):
        return convert_results(obj.choices(), prec)
    if dataclasses.is_dataclass(obj):
        return {f.name: convert_results(getattr(obj, f.name), prec)
                for f in dataclasses.fields(obj) if f.repr}
    return str(obj)


def coefficient_rows(coefficients, prec: int) -> List[Dict[str, object]]:
    """ Une ligne par coefficient : n, re, im, exact. """
    rows = []
    with mp.workprec(prec):
        for n, a_n in enumerate(coefficients, start=1):
            if isinstance(a_n, int):
                rows.append({"n": n, "re": a_n, "im": 0, "exact": str(a_n)})
                continue
            value = a_n.to_complex() if isinstance(a_n, CycloElem) else mp.mpc(a_n)
            exact = json.dumps(convert_results(a_n, prec)) if isinstance(a_n, CycloElem) else ""
            rows.append({"n": n, "re": _real(value.real, prec), "im": _real(value.imag, prec), "exact": exact})
    return rows


def _flat_rows(obj, prefix: str = "") -> List[Dict[str, object]]:
    if isinstance(obj, dict):
        rows = []
        for k, v in obj.items():
            rows.extend(_flat_rows(v, f"{prefix}.{k}" if prefix else str(k)))
        return rows
    if isinstance(obj, list):
        rows = []
        for i, v in enumerate(obj):
            rows.extend(_flat_rows(v, f"{prefix}[{i}]"))
        return rows
    return [{"key": prefix, "value": obj}]


def render(payload: Dict[str, object], prec: int, fmt: str = "json",
           coefficients: Optional[list] = None) -> str:
    result = convert_results(payload, prec)
    if fmt == "json":
        return json.dumps(result, indent=4, ensure_ascii=False) + "\n"
    buffer = io.StringIO()
    if coefficients is not None:
        writer = csv.DictWriter(buffer, fieldnames=["n", "re", "im", "exact"], lineterminator="\n")
        writer.writeheader()
        writer.writerows(coefficient_rows(coefficients, prec))
    else:
        writer = csv.DictWriter(buffer, fieldnames=["key", "value"], lineterminator="\n")
        writer.writeheader()
        writer.writerows(_flat_rows(result))
    return buffer.getvalue()


def save_results_to_file(payload: Dict[str, object], prec: int, fmt: str = "json",
                         path: Optional[str] = None, coefficients: Optional[list] = None) -> None:
    """ Écrit le résultat (JSON indenté ou CSV) dans path, ou sur la sortie standard. """
    text = render(payload, prec, fmt, coefficients)
    if path is None:
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8") as f:
        f.write(text)
