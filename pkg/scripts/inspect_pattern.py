#!/usr/bin/env python3
"""Everything the toolkit knows about one pattern, in one place.

Usage:
    python scripts/inspect_pattern.py mmxxx
"""

import sys

from treewilf.elim import EliminationBoundError, annihilates, eliminate
from treewilf.grammar import build_grammar
from treewilf.series import av_series, en_series, solve_truncated, to_operad_series
from treewilf.systems import cs_system, enumeration_system, occurrence_state_count
from treewilf.trees import Alphabet, PatternSet, emit_polish, height, mirror, parse_polish


def main() -> int:
    if len(sys.argv) != 2:
        print(__doc__, file=sys.stderr)
        return 1
    alphabet = Alphabet.binary()
    pattern = parse_polish(sys.argv[1], alphabet)
    word = emit_polish(pattern)
    print(f"pattern        {word}")
    print(f"height         {height(pattern)}")
    print(f"mirror         {emit_polish(mirror(pattern))}")
    print(f"solver states  {occurrence_state_count(pattern)}")

    av = av_series(pattern, 25)
    print(f"avoidance      {av.serialize()}")
    print(f"arity series   {to_operad_series(av).serialize()}")
    en = en_series(pattern, 13)
    print(f"occurrences    {en.serialize()}")

    system = cs_system(build_grammar(alphabet, PatternSet(alphabet, (pattern,))))
    print(f"grammar system {system.n_unknowns} unknowns")
    try:
        poly = eliminate(system, max_unknowns=18, deadline_seconds=30)
        _, target = solve_truncated(system, 60)
        tag = "verified" if annihilates(poly, target, 60) else "NOT ANNIHILATING (bug)"
        print(f"annihilator    {poly.pretty()}   [{tag}]")
    except EliminationBoundError as exc:
        print(f"annihilator    skipped ({exc})")
    print()
    print(enumeration_system(pattern).to_text())
    return 0


if __name__ == "__main__":
    sys.exit(main())
