from dataclasses import dataclass, field
from typing import Dict, Optional


@dataclass
class RunStats:
    """ Bilan d'un cas de vérification ou d'une commande. """
    name: str
    passed: bool
    duration: float
    residual: Optional[object] = None
    details: Dict[str, object] = field(default_factory=dict)
