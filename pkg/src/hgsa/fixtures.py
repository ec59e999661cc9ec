"""Reference tables for the three-photon analyzer, in their published spelling.

Labels keep the published bit strings (``100`` rather than the canonical
``011``); use ``states.canonical_hyper`` / ``states.canonicalize`` before
comparing them with simulated labels.
"""

from __future__ import annotations

# Polarization label -> atom 1, atom 2, atom 3 readouts.
ATOM_TABLE: tuple[tuple[str, tuple[str, str, str]], ...] = (
    ("+000", ("+", "+", "-")),
    ("-000", ("+", "+", "+")),
    ("+001", ("+", "-", "-")),
    ("-001", ("+", "-", "+")),
    ("+010", ("-", "+", "-")),
    ("-010", ("-", "+", "+")),
    ("+100", ("-", "-", "-")),
    ("-100", ("-", "-", "+")),
)

# Detector groups: group number -> eight hyper labels.
GROUP_TABLE: tuple[tuple[int, tuple[str, ...]], ...] = (
    (1, ("P+000,T+000", "P+001,T+001", "P+010,T+010", "P+100,T+100",
         "P-000,T-000", "P-001,T-001", "P-010,T-010", "P-100,T-100")),
    (2, ("P+000,T-000", "P+001,T-001", "P+010,T-010", "P+100,T-100",
         "P-000,T+000", "P-001,T+001", "P-010,T+010", "P-100,T+100")),
    (3, ("P+000,T+001", "P+001,T+000", "P+010,T+100", "P+100,T+010",
         "P-000,T-001", "P-001,T-000", "P-010,T-100", "P-100,T-010")),
    (4, ("P+000,T-001", "P+001,T-000", "P+010,T-100", "P+100,T-010",
         "P-000,T+001", "P-001,T+000", "P-010,T+100", "P-100,T+010")),
    (5, ("P+000,T+010", "P+001,T+100", "P+010,T+000", "P+100,T+001",
         "P-000,T-010", "P-001,T-100", "P-010,T-000", "P-100,T-001")),
    (6, ("P+000,T-010", "P+001,T-100", "P+010,T-000", "P+100,T-001",
         "P-000,T+010", "P-001,T+100", "P-010,T+000", "P-100,T+001")),
    (7, ("P+000,T+100", "P+001,T+010", "P+010,T+001", "P+100,T+000",
         "P-000,T-100", "P-001,T-010", "P-010,T-001", "P-100,T-000")),
    (8, ("P+000,T-100", "P+001,T-010", "P+010,T-001", "P+100,T-000",
         "P-000,T+100", "P-001,T+010", "P-010,T+001", "P-100,T+000")),
)

# Polarization state fed to the time-bin analyzer in TESA_OUTPUTS.
TESA_REFERENCE_POL = "+001"

# Time label -> (the two polarization patterns, path terms as (sign, paths)).
# Paths are listed per photon (A, B, C) as 1 or 2. Both polarization terms
# and all four path terms carry equal weight: 1/sqrt(2) and 1/2.
TESA_OUTPUTS: tuple[tuple[str, tuple[str, str], tuple[tuple[int, str], ...]], ...] = (
    ("+000", ("HHV", "VVH"), ((1, "111"), (1, "122"), (1, "212"), (1, "221"))),
    ("-000", ("HHV", "VVH"), ((1, "112"), (1, "121"), (1, "211"), (1, "222"))),
    ("+001", ("HHH", "VVV"), ((1, "111"), (-1, "122"), (-1, "212"), (1, "221"))),
    ("-001", ("HHH", "VVV"), ((1, "112"), (-1, "121"), (-1, "211"), (1, "222"))),
    ("+010", ("HVV", "VHH"), ((1, "111"), (-1, "122"), (1, "212"), (-1, "221"))),
    ("-010", ("HVV", "VHH"), ((1, "112"), (-1, "121"), (1, "211"), (-1, "222"))),
    ("+100", ("VHV", "HVH"), ((1, "111"), (1, "122"), (-1, "212"), (-1, "221"))),
    ("-100", ("VHV", "HVH"), ((1, "112"), (1, "121"), (-1, "211"), (-1, "222"))),
)
