TOOL_NAME = "wulink"

VERSION = "0.1.0"

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2

SECTIONS = ("cohomology", "steenrod", "bss", "pairing", "wu", "verdict")

SUITES = ("axioms", "cochain-identities", "pairing", "bss", "theorem73")
