"""Shipped numerical tolerances, shared by the library and the CLI.

Every tolerance used by an operation has a named default here; the CLI
accepts ``--tol-<name>`` overrides and embeds the effective table in its
output so runs are reproducible from the config alone.
"""

from __future__ import annotations

TOLERANCES: dict[str, float] = {
    # coefficient reality check on construction
    "hermitian": 1e-12,
    # |G| target when polishing periodic-orbit roots of closed-form lifts
    "orbit-residual": 1e-12,
    # same for numerically integrated return maps
    "torus-orbit-residual": 1e-10,
    # half-width of the undecided band around multiplier 1
    "attract-band": 1e-7,
    # |G| level below which a scan point counts as degenerate
    "non-isolated": 1e-9,
    # cyclic distance identifying two roots as the same trajectory
    "dedup": 1e-8,
    # |value| triggering local refinement in sign scans
    "near-zero": 1e-10,
    # minimum contour modulus for the argument-principle counter
    "root-on-contour": 1e-8,
    # max distance of the contour integral from an integer
    "snap-residual": 1e-6,
    # |m cos a + n sin a| below which the resonant kernel branch is taken
    "resonance": 1e-12,
    # guard band that parameter sweeps keep away from resonances
    "resonance-guard": 1e-6,
    # crossing-time bisection width for the torus section map
    "event-time": 1e-13,
    # coefficient scale below which a resampled series counts as zero
    "degenerate-series": 1e-13,
}


def tolerance(name: str) -> float:
    return TOLERANCES[name]


def merged_tolerances(overrides: dict[str, float] | None = None) -> dict[str, float]:
    """Shipped table with overrides applied; unknown names are rejected."""
    table = dict(TOLERANCES)
    for name, value in (overrides or {}).items():
        if name not in table:
            raise ValueError(f"unknown tolerance {name!r}; known: {sorted(table)}")
        table[name] = float(value)
    return table
