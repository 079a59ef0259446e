"""Published second-order probability matrices used as golden data."""

from .matrix import DeltaModel, ProbabilityMatrix, generate_delta


def four_element_series() -> ProbabilityMatrix:
    """Four-element series system (one element per cut set)."""
    return ProbabilityMatrix.from_upper([
        [0.27425312, 0.17106964, 0.13021655, 0.09525911],
        [0.21185540, 0.10920296, 0.08120990],
        [0.15865525, 0.06566078],
        [0.11506967],
    ])


DELTA_FIRST_ORDER = (0.01, 0.025, 0.03, 0.07)
DELTA_VALUES = (1e-4, 0.0, -1e-4)


def delta_series(delta: float = 0.0) -> ProbabilityMatrix:
    return generate_delta(DeltaModel(DELTA_FIRST_ORDER, delta))


def five_cut_sets() -> ProbabilityMatrix:
    return ProbabilityMatrix.from_upper([
        [4.548, 1.776, 1.790, 1.559, 0.119],
        [2.360, 1.358, 1.133, 0.212],
        [3.031, 1.786, 0.123],
        [2.744, 0.269],
        [1.469],
    ], scale=0.01)


def seven_member_truss() -> ProbabilityMatrix:
    return ProbabilityMatrix.from_upper([
        [18.8, 5.73, 4.35, 5.42, 4.59, 5.13, 4.85],
        [18.8, 6.08, 7.79, 6.47, 7.42, 6.87],
        [18.8, 5.75, 4.86, 5.43, 5.14],
        [18.8, 6.10, 6.88, 6.48],
        [18.8, 5.76, 5.44],
        [18.8, 6.11],
        [18.8],
    ], scale=1e-5)


def random_six() -> ProbabilityMatrix:
    return ProbabilityMatrix.from_upper([
        [4.74467793, 1.35693940, 3.02042750, 3.17568001, 2.17177994, 1.80796900],
        [2.34044502, 0.58219757, 0.38739530, 0.19132633, 1.39092307],
        [3.60105675, 0.44924975, 0.33655831, 1.88047290],
        [3.63910007, 1.24586511, 3.61723941],
        [4.42818259, 2.03204045],
        [6.94666654],
    ], scale=1e-3)


EXAMPLES = {
    "series4": four_element_series,
    "delta4": delta_series,
    "cutsets5": five_cut_sets,
    "truss7": seven_member_truss,
    "random6": random_six,
}
