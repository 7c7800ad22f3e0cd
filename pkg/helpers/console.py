import sys
from typing import List, Optional, TextIO

from helpers.run_stats import RunStats

GREEN = "\x1b[32m"
RED = "\x1b[31m"
YELLOW = "\x1b[33m"
RESET = "\x1b[0m"


def status_line(stats: RunStats, stream: Optional[TextIO] = None) -> None:
    """ Ligne colorée : vert si le cas passe, rouge sinon, jaune sans résidu mesuré. """
    color = GREEN if stats.passed else RED
    if stats.passed and stats.residual is None:
        color = YELLOW
    stream = stream or sys.stdout
    label = "PASS" if stats.passed else "FAILED"
    residual = "" if stats.residual is None else f" [résidu={stats.residual}]"
    stream.write(f"\rVérification {stats.name}: {color}{label}{residual} ({stats.duration:.2f}s){RESET}\n")


def message(text: str, color: str = YELLOW, stream: Optional[TextIO] = None) -> None:
    stream = stream or sys.stderr
    stream.write(f"{color}{text}{RESET}\n")


def summary(results: List[RunStats], stream: Optional[TextIO] = None) -> None:
    """
    Résumé :
    - nombre de cas, cas validés ;
    - temps moyen par cas.
    """
    if not results:
        return
    stream = stream or sys.stdout
    print("\nRésumé :", file=stream)
    print("-" * 50, file=stream)
    print(f"Total des cas : {len(results)}", file=stream)
    print(f"Validés : {sum(1 for r in results if r.passed)}", file=stream)
    avg_time = sum(r.duration for r in results) / len(results)
    print(f"Temps moyen : {avg_time:.2f}s", file=stream)
