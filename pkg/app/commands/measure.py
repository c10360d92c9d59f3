"""
Subcomando measure: tabela de átomos ou amostras de densidade mais a massa total
"""

import logging
from typing import List, Optional

from app.commands.evaluate import parse_params
from app.services.integrate import total_mass
from app.services.measures import build_measure, measure_table, measure_table_csv
from app.services.qcore import QBase

logger = logging.getLogger(__name__)


def cmd_measure(name: str, params: Optional[List[str]], q: float, atoms: int = 32, samples: int = 64,
                output_format: str = "csv") -> int:
    base = QBase(q)
    mu = build_measure(name, base, **parse_params(params))
    logger.info(f"📥 Medida {mu.name} q={q} {mu.params}")
    mass = total_mass(mu)

    if output_format == "csv":
        print(measure_table_csv(mu, atoms, samples), end="")
    else:
        for location, value, cumulative in measure_table(mu, atoms, samples):
            print(f"{location:>14.6g}  {complex(value):>28.10g}  {complex(cumulative):>28.10g}")
    print(f"# total_mass={complex(mass.value).real!r} err={mass.err_estimate:.2e}"
          + (f" imag={complex(mass.value).imag!r}" if complex(mass.value).imag else ""))
    logger.info(f"✅ Massa total {complex(mass.value):.12g} (declarada {mu.total_mass})")
    return 0
