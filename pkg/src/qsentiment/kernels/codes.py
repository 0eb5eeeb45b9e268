"""Integer gate codes shared by the compiled circuit arrays and both backends."""

H = 0
X = 1
RY = 2
RZ = 3
CNOT = 4

NAMES = {H: "H", X: "X", RY: "RY", RZ: "RZ", CNOT: "CNOT"}
CODES = {name: code for code, name in NAMES.items()}
PARAMETRIC = frozenset({RY, RZ})
